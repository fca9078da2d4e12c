#pragma once

// Monte Carlo estimates of H(Y^n)/n, H(Y^n | X_0^n)/n and their difference
// for Markov(alpha) inputs, by scaled forward recursion on the channel trellis.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core.hpp"
#include "lower_bound.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "state_chain.hpp"

namespace didcap {

enum class RateQuantity { output_entropy, conditional_entropy, info_rate };

[[nodiscard]] inline std::string to_string(RateQuantity q)
{
    switch (q) {
    case RateQuantity::output_entropy: return "H(Y)/n";
    case RateQuantity::conditional_entropy: return "H(Y|X)/n";
    case RateQuantity::info_rate: return "info-rate";
    }
    return "?";
}

struct RateEstimate {
    std::size_t n = 0;
    std::size_t samples = 0;
    double mean = 0.0;
    double half_width = 0.0;  // 95% normal-approximation
    RateQuantity quantity = RateQuantity::info_rate;
};

namespace detail {

/// Running product kept as mantissa * 2^exponent so long paths never underflow.
class Log2Accumulator {
public:
    void multiply(double v)
    {
        mant_ *= v;
        int e = 0;
        mant_ = std::frexp(mant_, &e);
        exp_ += e;
    }
    [[nodiscard]] double log2() const { return static_cast<double>(exp_) + std::log2(mant_); }

private:
    double mant_ = 1.0;
    long exp_ = 0;
};

inline void check_path(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y)
{
    if (y.empty() || x.size() != y.size() + 1) throw domain_error("x must hold exactly one more symbol than y");
}

}  // namespace detail

/// log2 p(y^n) for a Markov(alpha) input, by the forward recursion over the
/// hidden pair (X_i, Z_i). X_0 is uniform and Z_1 stationary.
[[nodiscard]] inline double log2_output_likelihood(const ChannelParams& params, const MarkovInput& input,
                                                   std::span<const std::uint8_t> y)
{
    input.validate();
    if (y.empty()) throw domain_error("empty output path");
    const StateDist pi = stationary_distribution(params);
    const TransitionMatrix m = one_step_matrix(params);
    const double a = input.alpha;
    // f[2 * x + z]; the z here is a virtual Z_0 drawn from the stationary law.
    double f[4] = {0.5 * pi.p0, 0.5 * pi.p1, 0.5 * pi.p0, 0.5 * pi.p1};
    detail::Log2Accumulator acc;
    for (std::uint8_t yi : y) {
        double g[4] = {0.0, 0.0, 0.0, 0.0};
        for (int xp = 0; xp < 2; ++xp)
            for (int zp = 0; zp < 2; ++zp) {
                const double w = f[2 * xp + zp];
                if (w == 0.0) continue;
                for (int x = 0; x < 2; ++x) {
                    const double px = x == xp ? 1.0 - a : a;
                    // z = 0 emits the current symbol, z = 1 the previous one.
                    if (x == yi) g[2 * x] += w * px * m(0, zp);
                    if (xp == yi) g[2 * x + 1] += w * px * m(1, zp);
                }
            }
        const double s = g[0] + g[1] + g[2] + g[3];
        if (!(s > 0.0)) return -std::numeric_limits<double>::infinity();
        for (int i = 0; i < 4; ++i) f[i] = g[i] / s;
        acc.multiply(s);
    }
    return acc.log2();
}

/// log2 p(y^n | x_0^n) by the forward recursion over Z_i.
[[nodiscard]] inline double log2_conditional_likelihood(const ChannelParams& params, std::span<const std::uint8_t> x,
                                                        std::span<const std::uint8_t> y)
{
    detail::check_path(x, y);
    const StateDist pi = stationary_distribution(params);
    const TransitionMatrix m = one_step_matrix(params);
    double f[2] = {pi.p0, pi.p1};  // virtual Z_0
    detail::Log2Accumulator acc;
    for (std::size_t i = 1; i <= y.size(); ++i) {
        const int yi = y[i - 1];
        const double g0 = x[i] == yi ? m(0, 0) * f[0] + m(0, 1) * f[1] : 0.0;
        const double g1 = x[i - 1] == yi ? m(1, 0) * f[0] + m(1, 1) * f[1] : 0.0;
        const double s = g0 + g1;
        if (!(s > 0.0)) return -std::numeric_limits<double>::infinity();
        f[0] = g0 / s;
        f[1] = g1 / s;
        acc.multiply(s);
    }
    return acc.log2();
}

/// Draw X_0..X_n from the Markov(alpha) input.
inline std::vector<std::uint8_t> sample_markov_input(const MarkovInput& input, std::size_t n, Rng& rng)
{
    input.validate();
    std::vector<std::uint8_t> x(n + 1);
    int cur = rng.bernoulli(0.5) ? 1 : 0;
    x[0] = static_cast<std::uint8_t>(cur);
    for (std::size_t i = 1; i <= n; ++i) {
        if (rng.bernoulli(input.alpha)) cur ^= 1;
        x[i] = static_cast<std::uint8_t>(cur);
    }
    return x;
}

inline constexpr std::size_t kMinSimLength = 1000;

/// Paired estimates of all three quantities from the same sample paths.
struct SimRates {
    RateEstimate output;
    RateEstimate conditional;
    RateEstimate info;
};

namespace detail {

inline RateEstimate summarize(const std::vector<double>& v, std::size_t n, RateQuantity q)
{
    RateEstimate r;
    r.n = n;
    r.samples = v.size();
    r.quantity = q;
    KahanSum sum;
    for (double x : v) sum.add(x);
    r.mean = sum.value() / static_cast<double>(v.size());
    KahanSum ss;
    for (double x : v) ss.add((x - r.mean) * (x - r.mean));
    const double var = ss.value() / static_cast<double>(v.size() - 1);
    r.half_width = 1.96 * std::sqrt(var / static_cast<double>(v.size()));
    return r;
}

}  // namespace detail

/// One path per sample with seed derive_seed(seed, sample index); results do
/// not depend on the worker count.
[[nodiscard]] inline SimRates simulate_rates(const ChannelParams& params, const MarkovInput& input, std::size_t n,
                                             std::size_t samples, std::uint64_t seed, unsigned workers = worker_count())
{
    params.require_nondegenerate();
    input.validate();
    if (n < kMinSimLength) throw domain_error("simulation length must be >= 1000");
    if (samples < 2) throw domain_error("at least two samples are needed for a confidence interval");

    std::vector<double> hy(samples), hyx(samples), info(samples);
    parallel_for(
        samples,
        [&](std::size_t s) {
            Rng rng(derive_seed(seed, s));
            auto x = sample_markov_input(input, n, rng);
            const auto z = sample_state_path(params, n, rng);
            std::vector<std::uint8_t> y(n);
            for (std::size_t i = 1; i <= n; ++i) y[i - 1] = x[i - z[i - 1]];
            const double nn = static_cast<double>(n);
            hy[s] = -log2_output_likelihood(params, input, y) / nn;
            hyx[s] = -log2_conditional_likelihood(params, x, y) / nn;
            info[s] = hy[s] - hyx[s];
        },
        workers);

    return {detail::summarize(hy, n, RateQuantity::output_entropy),
            detail::summarize(hyx, n, RateQuantity::conditional_entropy),
            detail::summarize(info, n, RateQuantity::info_rate)};
}

[[nodiscard]] inline RateEstimate estimate_output_entropy_rate(const ChannelParams& params, const MarkovInput& input,
                                                               std::size_t n, std::size_t samples, std::uint64_t seed)
{
    return simulate_rates(params, input, n, samples, seed).output;
}

[[nodiscard]] inline RateEstimate estimate_conditional_entropy_rate(const ChannelParams& params,
                                                                    const MarkovInput& input, std::size_t n,
                                                                    std::size_t samples, std::uint64_t seed)
{
    return simulate_rates(params, input, n, samples, seed).conditional;
}

[[nodiscard]] inline RateEstimate estimate_info_rate(const ChannelParams& params, const MarkovInput& input,
                                                     std::size_t n, std::size_t samples, std::uint64_t seed)
{
    return simulate_rates(params, input, n, samples, seed).info;
}

}  // namespace didcap
