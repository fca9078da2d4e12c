#pragma once

// Structural verification suites: channel consistency, shift-stationarity and
// bit-symmetry of the channel law, the symmetrization inequality,
// superadditivity, and stationarity of the shift-average construction.

#include <algorithm>
#include <chrono>
#include <string>
#include <vector>

#include "did_channel.hpp"
#include "info_kernel.hpp"
#include "random.hpp"

namespace didcap {

struct SuiteResult {
    std::string name;
    std::size_t cases = 0;
    std::size_t violations = 0;
    double max_violation = 0.0;
    double seconds = 0.0;

    [[nodiscard]] bool passed() const { return violations == 0; }
};

inline constexpr double kVerifyTolerance = 1e-10;

inline const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names{"consistency", "stationarity", "symmetrization", "superadditivity",
                                                "feinstein"};
    return names;
}

namespace detail {

inline const std::vector<ChannelParams>& verify_params()
{
    static const std::vector<ChannelParams> grid{{0.3, 0.1}, {0.5, 0.5}, {0.9, 0.05}, {0.2, 0.3}, {0.7, 0.1}, {1.0, 1.0}};
    return grid;
}

template <class Body>
SuiteResult timed(std::string name, Body&& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    SuiteResult r = body();
    r.name = std::move(name);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace detail

[[nodiscard]] inline SuiteResult verify_consistency()
{
    return detail::timed("consistency", [] {
        SuiteResult r;
        for (const auto& p : detail::verify_params()) {
            const auto rep = check_consistency(p, 6);
            r.cases += rep.cases;
            r.max_violation = std::max(r.max_violation, rep.max_violation);
            if (rep.max_violation > kVerifyTolerance) ++r.violations;
        }
        return r;
    });
}

[[nodiscard]] inline SuiteResult verify_stationarity()
{
    return detail::timed("stationarity", [] {
        SuiteResult r;
        for (const auto& p : detail::verify_params()) {
            const auto rep = check_stationarity_and_bitsymmetry(p, 6, 3);
            r.cases += rep.cases;
            const double worst = std::max(rep.max_shift_violation, rep.max_symmetry_violation);
            r.max_violation = std::max(r.max_violation, worst);
            if (worst > kVerifyTolerance) ++r.violations;
        }
        return r;
    });
}

[[nodiscard]] inline SuiteResult verify_symmetrization(std::uint64_t seed = 1)
{
    return detail::timed("symmetrization", [seed] {
        SuiteResult r;
        const ChannelParams params{0.2, 0.3};
        for (int n = 1; n <= 4; ++n) {
            const auto rep = check_symmetrization(params, n, 25, derive_seed(seed, static_cast<std::uint64_t>(n)));
            r.cases += rep.trials;
            r.violations += rep.violations;
            r.max_violation = std::max(r.max_violation, -rep.min_slack);
        }
        r.max_violation = std::max(r.max_violation, 0.0);
        return r;
    });
}

[[nodiscard]] inline SuiteResult verify_superadditivity(std::uint64_t seed = 1)
{
    return detail::timed("superadditivity", [seed] {
        SuiteResult r;
        const auto rep = check_superadditivity(200, seed);
        r.cases = rep.trials;
        r.violations = rep.violations;
        r.max_violation = std::max(0.0, -rep.min_slack);
        return r;
    });
}

[[nodiscard]] inline SuiteResult verify_feinstein(std::uint64_t seed = 1)
{
    return detail::timed("feinstein", [seed] {
        SuiteResult r;
        std::uint64_t stream = 0;
        for (int s = 1; s <= 4; ++s)
            for (int m = 1; m <= 5; ++m)
                for (int trial = 0; trial < 5; ++trial) {
                    Rng rng(derive_seed(seed, stream++));
                    const auto base = BlockDistribution::from(s, detail::random_simplex(block_count(s), rng));
                    const auto avg = feinstein_shift_average(base, m);
                    const double v = stationarity_violation(avg);
                    r.max_violation = std::max(r.max_violation, v);
                    if (v > kVerifyTolerance) ++r.violations;
                    ++r.cases;
                }
        return r;
    });
}

/// Runs one suite by name, or all of them for "all".
[[nodiscard]] inline std::vector<SuiteResult> run_verify(const std::string& suite, std::uint64_t seed = 1)
{
    std::vector<SuiteResult> out;
    const bool all = suite == "all";
    if (!all && std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
        throw domain_error("unknown verify suite: " + suite);
    if (all || suite == "consistency") out.push_back(verify_consistency());
    if (all || suite == "stationarity") out.push_back(verify_stationarity());
    if (all || suite == "symmetrization") out.push_back(verify_symmetrization(seed));
    if (all || suite == "superadditivity") out.push_back(verify_superadditivity(seed));
    if (all || suite == "feinstein") out.push_back(verify_feinstein(seed));
    return out;
}

}  // namespace didcap
