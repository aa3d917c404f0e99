#pragma once

#include <cstdint>
#include <random>

namespace sawlab {

// splitmix64 finalizer; also used to derive per-chain seeds from a master seed.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t chain_seed(std::uint64_t master_seed, std::uint64_t chain_id) {
    return mix64(master_seed + 0x9E3779B97F4A7C15ull * (chain_id + 1));
}

// mt19937_64 with platform-independent bounded/real mappings. The standard
// distributions are implementation-defined, so we roll our own.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // uniform in {0, ..., n-1} (Lemire multiply-shift; negligible bias for our n)
    std::uint64_t bounded(std::uint64_t n) {
        return std::uint64_t((static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    // uniform in [0, 1)
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

  private:
    std::mt19937_64 engine_;
};

}  // namespace sawlab
