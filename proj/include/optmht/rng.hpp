#pragma once

#include <cstdint>

namespace optmht {

// Counter-based stream: output k is a hash of (key, k), so a stream is fully
// determined by its key and any number of them can be created without
// coordination between workers.
class RngStream {
public:
    explicit RngStream(std::uint64_t key) : key_(mix(key)) {}

    // Stream for replication `index` of a run seeded with `seed`.
    static RngStream derive(std::uint64_t seed, std::uint64_t index, std::uint64_t lane = 0) {
        std::uint64_t k = mix(seed ^ 0x6a09e667f3bcc909ULL);
        k = mix(k ^ (index + 0x9e3779b97f4a7c15ULL));
        k = mix(k ^ (lane * 0xbf58476d1ce4e5b9ULL + 0x3c6ef372fe94f82bULL));
        return RngStream(k);
    }

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

    // Uniform on the open interval (0,1).
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    std::uint64_t draws() const { return counter_; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace optmht
