#pragma once

#include <cstdint>
#include <random>

namespace didcap {

/// splitmix64 finalizer; used to derive independent per-task seeds.
[[nodiscard]] constexpr std::uint64_t mix_seed(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    return mix_seed(seed ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

/// mt19937_64 with bit-exact uniform/Bernoulli draws.
///
/// std::uniform_real_distribution is implementation-defined, so draws are
/// built from the raw 64-bit output to keep results reproducible everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe for -log.
    double uniform_open0() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace didcap
