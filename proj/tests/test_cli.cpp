#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "optmht/cli.hpp"
#include "optmht/io.hpp"

using namespace optmht;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("optmht_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write(const std::string& name, const std::string& text) {
        const fs::path p = dir_ / name;
        std::ofstream(p, std::ios::binary) << text;
        return p;
    }

    std::string read(const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        std::ostringstream s;
        s << f.rdbuf();
        return s.str();
    }

    int run(std::vector<std::string> args) {
        out_.str("");
        err_.str("");
        return run_cli(args, out_, err_);
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

const char* kBeta = R"({"alpha": 0.05, "density": {"model": "beta", "params": {"theta": 0.2}},
  "simulation": {"n_reps": 2000, "seed": 3}})";

}  // namespace

TEST_F(CliTest, SolveBetaConverges) {
    const auto cfg = write("beta.json", kBeta);
    const auto out = dir_ / "solve.json";
    ASSERT_EQ(run({"solve", "--config", cfg.string(), "--out", out.string()}), 0) << err_.str();
    const json j = parse_json_text(read(out), "solve.json");
    EXPECT_EQ(j.at("status"), "Converged");
    ASSERT_EQ(j.at("kkt").size(), 3u);
    ASSERT_EQ(j.at("mu").size(), 3u);
    for (int g = 0; g < 3; ++g) {
        if (j.at("mu")[g].get<double>() > 0) {
            EXPECT_LE(std::abs(j.at("kkt")[g].get<double>()), 5e-3);
        }
    }
    EXPECT_TRUE(j.contains("trace"));
}

TEST_F(CliTest, SolveThenDecideRoundTrip) {
    const auto cfg = write("beta.json", kBeta);
    const auto solved = dir_ / "solve.json";
    ASSERT_EQ(run({"solve", "--config", cfg.string(), "--out", solved.string()}), 0);
    write("p.csv", "id,p1,p2,p3\nA,0.001,0.5,0.002\nB,0.9,0.8,0.7\n");
    const auto dcfg = write("decide.json", R"({"decide": {"input": "p.csv", "solve_result": "solve.json"}})");
    ASSERT_EQ(run({"decide", "--config", dcfg.string()}), 0) << err_.str();
    EXPECT_EQ(out_.str(), "id,reject1,reject2,reject3,num_rejected\nA,1,0,1,2\nB,0,0,0,0\n");
}

TEST_F(CliTest, DecideBadRowIsInputError) {
    write("p.csv", "id,p1,p2,p3\nok,0.01,0.02,0.03\nbad,0.01,1.5,0.03\n");
    const auto cfg = write("d.json", R"({"density": {"model": "beta", "params": {"theta": 0.2}},
      "decide": {"input": "p.csv", "mu": [0, 0, 0]}})");
    EXPECT_EQ(run({"decide", "--config", cfg.string()}), 1);
    EXPECT_NE(out_.str().find("ok,1,1,1,3"), std::string::npos);
    EXPECT_NE(out_.str().find("bad,,,,"), std::string::npos);
    EXPECT_NE(err_.str().find("bad"), std::string::npos);
}

TEST_F(CliTest, MalformedCsvHasLineAndColumn) {
    write("p.csv", "id,p1,p2,p3\nA,0.1,0.2,0.3\nB,0.1,zz,0.3\n");
    const auto cfg = write("d.json", R"({"density": {"model": "uniform"}, "decide": {"input": "p.csv", "mu": [0,0,0]}})");
    EXPECT_EQ(run({"decide", "--config", cfg.string()}), 1);
    EXPECT_NE(err_.str().find("line 3"), std::string::npos) << err_.str();
    EXPECT_NE(err_.str().find("column"), std::string::npos) << err_.str();
}

TEST_F(CliTest, MalformedJsonHasLineAndColumn) {
    const auto cfg = write("bad.json", "{\n  \"alpha\": 0.05,\n  \"density\": {\"model\": }\n}\n");
    EXPECT_EQ(run({"solve", "--config", cfg.string()}), 1);
    EXPECT_NE(err_.str().find("line 3"), std::string::npos) << err_.str();
    EXPECT_NE(err_.str().find("column"), std::string::npos) << err_.str();
}

TEST_F(CliTest, SimulateZeroRepsIsRejected) {
    const auto cfg = write("z.json", R"({"density": {"model": "uniform"}, "simulation": {"n_reps": 0, "procedure": "holm"}})");
    EXPECT_EQ(run({"simulate", "--config", cfg.string()}), 1);
    EXPECT_NE(err_.str().find("n_reps"), std::string::npos);
}

TEST_F(CliTest, SolverFailureExitsTwoWithMessage) {
    const auto cfg = write("u.json", R"({"alpha": 0.05, "density": {"model": "beta", "params": {"theta": 0.2}},
      "solver": {"allow_slack": false, "integration": {"n": 32}}})");
    EXPECT_EQ(run({"solve", "--config", cfg.string()}), 2);
    EXPECT_NE(err_.str().find("Consider decreasing FWER level"), std::string::npos) << err_.str();

    const auto cfg2 = write("b.json", R"({"alpha": 0.05, "density": {"model": "beta", "params": {"theta": 0.2}},
      "solver": {"U_max": 0.6, "integration": {"n": 32}}})");
    EXPECT_EQ(run({"solve", "--config", cfg2.string()}), 2);
    EXPECT_NE(err_.str().find("Consider increasing U_max"), std::string::npos) << err_.str();
}

TEST_F(CliTest, CompareIsByteIdenticalAcrossRunsAndThreads) {
    const auto cfg = write("c.json", R"({"alpha": 0.05, "density": {"model": "beta", "params": {"theta": 0.2}},
      "simulation": {"n_reps": 2000, "seed": 3, "mu": [0, 0.7458, 1.4398]}})");
    const auto a = dir_ / "a.csv", b = dir_ / "b.csv", c = dir_ / "table.json";
    ASSERT_EQ(run({"compare", "--config", cfg.string(), "--out", a.string()}), 0) << err_.str();
    ASSERT_EQ(run({"compare", "--config", cfg.string(), "--out", b.string(), "--threads", "3"}), 0);
    EXPECT_EQ(read(a), read(b));
    ASSERT_EQ(run({"compare", "--config", cfg.string(), "--out", c.string()}), 0);
    const json j = parse_json_text(read(c), "c.json");
    EXPECT_EQ(j.at("rows").size(), 6u);
    ASSERT_EQ(run({"compare", "--config", cfg.string(), "--seed", "4", "--out", b.string()}), 0) << err_.str();
    EXPECT_NE(read(a), read(b));
}

TEST_F(CliTest, SimulateSingleProcedure) {
    const auto cfg = write("s.json", R"({"density": {"model": "beta", "params": {"theta": 0.2}},
      "simulation": {"n_reps": 1000, "truths": ["h0", "h3"]}})");
    ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--procedure", "hommel"}), 0) << err_.str();
    EXPECT_NE(out_.str().find("hommel"), std::string::npos);
    EXPECT_EQ(run({"simulate", "--config", cfg.string(), "--procedure", "hommel,holm"}), 1);
    EXPECT_EQ(run({"simulate", "--config", cfg.string(), "--procedure", "bh"}), 1);
}

TEST_F(CliTest, ValidateDensityReportsViolations) {
    write("tab.csv", "u,g\n0.0,3.0\n0.2,1.5\n0.4,0.6\n0.6,0.8\n1.0,0.5\n");
    const auto cfg = write("v.json", R"({"density": {"model": "tabulated", "params": {"csv": "tab.csv"}}, "validate": {"grid_size": 500}})");
    ASSERT_EQ(run({"validate-density", "--config", cfg.string()}), 0) << err_.str();
    const json j = parse_json_text(out_.str(), "stdout");
    EXPECT_EQ(j.at("monotone_violations"), 1);
}

TEST_F(CliTest, KernelFlagAgreesToRounding) {
    const auto cfg = write("k.json", R"({"density": {"model": "beta", "params": {"theta": 0.2}}, "solver": {"integration": {"n": 48}}})");
    ASSERT_EQ(run({"solve", "--config", cfg.string(), "--kernel", "scalar"}), 0);
    const json scalar = parse_json_text(out_.str(), "scalar");
    ASSERT_EQ(run({"solve", "--config", cfg.string(), "--kernel", "auto"}), 0);
    const json vec = parse_json_text(out_.str(), "auto");
    // the vector kernel sums in a different order, so compare to rounding
    EXPECT_EQ(scalar.at("status"), vec.at("status"));
    for (int g = 0; g < 3; ++g) {
        EXPECT_NEAR(scalar.at("mu")[g].get<double>(), vec.at("mu")[g].get<double>(), 1e-9);
        EXPECT_NEAR(scalar.at("kkt")[g].get<double>(), vec.at("kkt")[g].get<double>(), 1e-9);
    }
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(run({}), 1);
    EXPECT_EQ(run({"solve"}), 1);
    EXPECT_EQ(run({"frobnicate", "--config", "x.json"}), 1);
    EXPECT_EQ(run({"solve", "--config", (dir_ / "missing.json").string()}), 1);
}
