#pragma once

// The binary first-order Markov state process {Z_i} driving the channel.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "core.hpp"
#include "random.hpp"

namespace didcap {

/// Distribution of a single state bit.
struct StateDist {
    double p0 = 1.0;
    double p1 = 0.0;

    [[nodiscard]] double operator[](int z) const { return z == 0 ? p0 : p1; }
};

/// 2x2 column-stochastic matrix, entry (a, b) = P(Z_n = a | Z_{n-k} = b).
struct TransitionMatrix {
    std::array<std::array<double, 2>, 2> entries{};

    [[nodiscard]] double operator()(int a, int b) const { return entries[a][b]; }
    double& operator()(int a, int b) { return entries[a][b]; }
};

/// (p_d, p_i) / (p_i + p_d).
[[nodiscard]] inline StateDist stationary_distribution(const ChannelParams& params)
{
    params.require_nondegenerate();
    const double s = params.sum();
    return {params.p_del / s, params.p_ins / s};
}

/// The one-step matrix [[1-p_i, p_d], [p_i, 1-p_d]].
[[nodiscard]] inline TransitionMatrix one_step_matrix(const ChannelParams& params)
{
    params.validate();
    TransitionMatrix m;
    m(0, 0) = 1.0 - params.p_ins;
    m(1, 0) = params.p_ins;
    m(0, 1) = params.p_del;
    m(1, 1) = 1.0 - params.p_del;
    return m;
}

/// 1 - (1 - p_i - p_d)^k, evaluated without cancellation for small p_i + p_d.
[[nodiscard]] inline double mixing_deficit(const ChannelParams& params, long k)
{
    const double s = params.sum();
    if (s < 1.0) return -std::expm1(static_cast<double>(k) * std::log1p(-s));
    return 1.0 - std::pow(1.0 - s, static_cast<double>(k));
}

/// Closed-form k-step transition matrix via the eigen-decomposition of the
/// one-step matrix.
[[nodiscard]] inline TransitionMatrix k_step_matrix(const ChannelParams& params, long k)
{
    params.require_nondegenerate();
    if (k < 1) throw domain_error("k_step_matrix requires k >= 1");
    const double s = params.sum();
    const double d = mixing_deficit(params, k);
    TransitionMatrix m;
    m(1, 0) = params.p_ins * d / s;
    m(0, 0) = 1.0 - m(1, 0);
    m(0, 1) = params.p_del * d / s;
    m(1, 1) = 1.0 - m(0, 1);
    return m;
}

/// H(Z_n | Z_{n-k}) in bits under the stationary state distribution.
[[nodiscard]] inline double cond_state_entropy(const ChannelParams& params, long k)
{
    const StateDist pi = stationary_distribution(params);
    const TransitionMatrix m = k_step_matrix(params, k);
    return pi.p0 * binary_entropy(m(1, 0)) + pi.p1 * binary_entropy(m(0, 1));
}

/// Draw Z_1..Z_n: Z_1 from `initial` (stationary when omitted), then the
/// one-step transitions.
inline std::vector<std::uint8_t> sample_state_path(const ChannelParams& params, std::size_t n, Rng& rng,
                                                   std::optional<StateDist> initial = std::nullopt)
{
    if (n < 1) throw domain_error("sample_state_path requires n >= 1");
    const StateDist start = initial ? *initial : stationary_distribution(params);
    params.validate();
    std::vector<std::uint8_t> z(n);
    int cur = rng.bernoulli(start.p1) ? 1 : 0;
    z[0] = static_cast<std::uint8_t>(cur);
    for (std::size_t i = 1; i < n; ++i) {
        const double flip = cur == 0 ? params.p_ins : params.p_del;
        if (rng.bernoulli(flip)) cur ^= 1;
        z[i] = static_cast<std::uint8_t>(cur);
    }
    return z;
}

inline std::vector<std::uint8_t> sample_state_path(const ChannelParams& params, std::size_t n, std::uint64_t seed)
{
    params.require_nondegenerate();
    Rng rng(seed);
    return sample_state_path(params, n, rng);
}

}  // namespace didcap
