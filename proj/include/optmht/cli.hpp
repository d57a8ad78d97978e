#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace optmht {

// Exit codes: 0 success, 1 input error, 2 solver did not converge.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace optmht
