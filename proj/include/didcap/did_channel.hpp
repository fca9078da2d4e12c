#pragma once

// Exact finite-block law of the dependent insertion-deletion channel
//
//     Y_i = X_{i - Z_i},   i = 1..n,
//
// with input X_0..X_n, and executable checks of its structural properties.
// The state chain always starts from its stationary distribution.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "core.hpp"
#include "random.hpp"
#include "state_chain.hpp"

namespace didcap {

inline constexpr int kMaxLawLength = 24;

namespace detail {

inline void check_law_length(int n)
{
    if (n < 1) throw domain_error("channel block length must be >= 1");
    if (n > kMaxLawLength) throw guard_violation("channel block length exceeds enumeration guard");
}

}  // namespace detail

/// P(Y^n = y | X_0^n = x) by the forward recursion over Z_i in {0, 1}.
///
/// x holds n+1 input symbols, y holds n output symbols (packed, LSB first).
[[nodiscard]] inline double channel_probability(const ChannelParams& params, Word x, Word y, int n)
{
    detail::check_law_length(n);
    const StateDist pi = stationary_distribution(params);
    const TransitionMatrix m = one_step_matrix(params);
    std::array<double, 2> f{};
    for (int i = 1; i <= n; ++i) {
        const int yi = bit_at(y, i - 1);
        std::array<double, 2> g{};
        for (int z = 0; z < 2; ++z) {
            if (bit_at(x, i - z) != yi) continue;
            g[z] = i == 1 ? pi[z] : m(z, 0) * f[0] + m(z, 1) * f[1];
        }
        f = g;
    }
    return f[0] + f[1];
}

/// Distribution of Y^n given X_0^n = x, indexed by packed y (2^n entries).
///
/// Expands the y-prefix tree jointly with Z_i; each node carries the mass of
/// (y_1..y_i, Z_i = z).
[[nodiscard]] inline std::vector<double> channel_law(const ChannelParams& params, Word x, int n)
{
    detail::check_law_length(n);
    const StateDist pi = stationary_distribution(params);
    const TransitionMatrix m = one_step_matrix(params);

    // mass[2 * prefix + z]
    std::vector<double> mass(4, 0.0);
    for (int z = 0; z < 2; ++z) {
        const int y1 = bit_at(x, 1 - z);
        mass[2 * static_cast<std::size_t>(y1) + static_cast<std::size_t>(z)] += pi[z];
    }
    for (int i = 2; i <= n; ++i) {
        std::vector<double> next(mass.size() * 2, 0.0);
        const Word prefixes = block_count(i - 1);
        for (Word prefix = 0; prefix < prefixes; ++prefix) {
            for (int zp = 0; zp < 2; ++zp) {
                const double w = mass[2 * prefix + static_cast<Word>(zp)];
                if (w == 0.0) continue;
                for (int z = 0; z < 2; ++z) {
                    const double t = m(z, zp);
                    if (t == 0.0) continue;
                    const Word grown = prefix | (static_cast<Word>(bit_at(x, i - z)) << (i - 1));
                    next[2 * grown + static_cast<Word>(z)] += w * t;
                }
            }
        }
        mass = std::move(next);
    }
    std::vector<double> law(block_count(n));
    for (Word y = 0; y < law.size(); ++y) law[y] = mass[2 * y] + mass[2 * y + 1];
    return law;
}

/// Full channel law for block length n: P(y | x) for every x in GF(2)^{n+1}.
struct ChannelLawTable {
    int n = 0;
    std::vector<double> entries;  // row-major: x * 2^n + y

    [[nodiscard]] Word inputs() const { return block_count(n + 1); }
    [[nodiscard]] Word outputs() const { return block_count(n); }
    [[nodiscard]] double operator()(Word x, Word y) const { return entries[x * outputs() + y]; }
    [[nodiscard]] std::span<const double> row(Word x) const
    {
        return {entries.data() + x * outputs(), static_cast<std::size_t>(outputs())};
    }
};

inline constexpr int kMaxLawTableLength = 12;

[[nodiscard]] inline ChannelLawTable channel_law_table(const ChannelParams& params, int n)
{
    detail::check_law_length(n);
    if (n > kMaxLawTableLength) throw guard_violation("channel law table exceeds enumeration guard");
    ChannelLawTable table{n, {}};
    table.entries.reserve(static_cast<std::size_t>(table.inputs() * table.outputs()));
    for (Word x = 0; x < table.inputs(); ++x) {
        const auto row = channel_law(params, x, n);
        table.entries.insert(table.entries.end(), row.begin(), row.end());
    }
    return table;
}

/// One joint draw of input, state path and output.
struct ChannelTraceSample {
    std::vector<std::uint8_t> x;  // X_0..X_n
    std::vector<std::uint8_t> z;  // Z_1..Z_n
    std::vector<std::uint8_t> y;  // Y_1..Y_n
};

/// Pass x through the channel. `initial` overrides the stationary Z_1 law.
inline ChannelTraceSample sample_channel(const ChannelParams& params, std::vector<std::uint8_t> x, Rng& rng,
                                         std::optional<StateDist> initial = std::nullopt)
{
    if (x.size() < 2) throw domain_error("sample_channel needs at least two input symbols");
    ChannelTraceSample s;
    s.z = sample_state_path(params, x.size() - 1, rng, initial);
    s.y.resize(s.z.size());
    for (std::size_t i = 1; i < x.size(); ++i) s.y[i - 1] = x[i - s.z[i - 1]];
    s.x = std::move(x);
    return s;
}

inline ChannelTraceSample sample_channel(const ChannelParams& params, std::vector<std::uint8_t> x,
                                         std::uint64_t seed, std::optional<StateDist> initial = std::nullopt)
{
    if (!initial) params.require_nondegenerate();
    Rng rng(seed);
    return sample_channel(params, std::move(x), rng, initial);
}

// ---------------------------------------------------------------------------
// Structural checks.

struct ConsistencyReport {
    double max_violation = 0.0;
    std::size_t cases = 0;
};

/// Checks sum_{y_{n+1}} P(y^{n+1} | x_0^{n+1}) = P(y^n | x_0^n) for every
/// x, y and 1 <= n < n_max.
[[nodiscard]] inline ConsistencyReport check_consistency(const ChannelParams& params, int n_max)
{
    if (n_max < 2) throw domain_error("check_consistency requires n_max >= 2");
    ConsistencyReport report;
    for (int n = 1; n < n_max; ++n) {
        const ChannelLawTable shorter = channel_law_table(params, n);
        for (Word x = 0; x < block_count(n + 2); ++x) {
            const auto longer = channel_law(params, x, n + 1);
            const Word x_prefix = x & low_mask(n + 1);
            for (Word y = 0; y < block_count(n); ++y) {
                const double summed = longer[y] + longer[y | block_count(n)];
                report.max_violation = std::max(report.max_violation, std::abs(summed - shorter(x_prefix, y)));
                ++report.cases;
            }
        }
    }
    return report;
}

struct StationarityReport {
    double max_shift_violation = 0.0;
    double max_symmetry_violation = 0.0;
    std::size_t cases = 0;
};

/// Checks the shift identity P(Y_{k+1}^{n+k} = y | [x~, x]) = P(Y^n = y | x)
/// for all prefixes x~ of length k <= k_max, and the negation identity
/// P(y | x) = P(~y | ~x), for all block lengths n <= n_max.
[[nodiscard]] inline StationarityReport check_stationarity_and_bitsymmetry(const ChannelParams& params, int n_max,
                                                                         int k_max)
{
    if (n_max < 2 || k_max < 1) throw domain_error("check_stationarity_and_bitsymmetry requires n_max >= 2, k_max >= 1");
    StationarityReport report;
    for (int n = 1; n <= n_max; ++n) {
        const ChannelLawTable base = channel_law_table(params, n);
        for (Word x = 0; x < base.inputs(); ++x) {
            const Word nx = complement(x, n + 1);
            for (Word y = 0; y < base.outputs(); ++y) {
                const double v = std::abs(base(x, y) - base(nx, complement(y, n)));
                report.max_symmetry_violation = std::max(report.max_symmetry_violation, v);
                ++report.cases;
            }
        }
        for (int k = 1; k <= k_max; ++k) {
            for (Word w = 0; w < block_count(n + k + 1); ++w) {
                const auto law = channel_law(params, w, n + k);
                std::vector<double> shifted(base.outputs(), 0.0);
                for (Word y = 0; y < law.size(); ++y) shifted[y >> k] += law[y];
                const Word x = w >> k;
                for (Word y = 0; y < base.outputs(); ++y) {
                    report.max_shift_violation = std::max(report.max_shift_violation, std::abs(shifted[y] - base(x, y)));
                    ++report.cases;
                }
            }
        }
    }
    return report;
}

}  // namespace didcap
