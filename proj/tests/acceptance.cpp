// Acceptance checks; one PASS/FAIL line per criterion.
//   acceptance            run all
//   acceptance --only 4   run one

#include <didcap/didcap.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "oracles.hpp"

using namespace didcap;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

void note(Outcome& o, bool ok, const char* fmt, auto... args)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, args...);
    if (!ok) {
        o.pass = false;
        if (!o.detail.empty()) o.detail += "; ";
        o.detail += buf;
    }
}

Outcome genie_values()
{
    Outcome o;
    SweepConfig cfg;
    cfg.grid = {ChannelParams::symmetric(0.1), ChannelParams::symmetric(0.2)};
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = cmd_lower(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::vector<double> genie;
    for (const auto& r : rows)
        if (r.quantity == Quantity::genie) genie.push_back(r.value);
    note(o, genie.size() == 2, "expected %d genie rows", 2);
    if (genie.size() == 2) {
        note(o, genie[0] == 0.95, "genie(0.1) = %.17g", genie[0]);
        note(o, genie[1] == 0.9, "genie(0.2) = %.17g", genie[1]);
    }
    note(o, secs < 1.0, "runtime %.2fs", secs);
    o.detail = o.pass ? "genie 0.95, 0.9" : o.detail;
    return o;
}

Outcome closed_forms()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    const double pis[] = {0.02, 0.3, 0.7, 1.0};
    const double pds[] = {0.1, 0.5};
    const double alphas[] = {0.0, 0.25, 0.5, 0.75, 0.95};
    int points = 0;
    for (int i = 0; i < 4; ++i) {
        const double pi = pis[i], pd = pds[i % 2];
        for (double a : alphas) {
            worst = std::max(worst, std::abs(first_term({pi, pd}, a) - oracle::first_term(pi, pd, a)));
            ++points;
        }
    }
    note(o, points == 20, "grid has %d points", points);
    note(o, worst <= 1e-12, "first term off by %.3g", worst);

    double worst_m = 0.0;
    for (auto [pi, pd] : {std::pair{0.2, 0.3}, {0.05, 0.01}, {0.9, 0.8}, {1.0, 1.0}})
        for (int k = 1; k <= 20; ++k) {
            const auto m = k_step_matrix({pi, pd}, k);
            const auto ref = oracle::power(pi, pd, k);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) worst_m = std::max(worst_m, std::abs(m(a, b) - ref[a][b]));
        }
    note(o, worst_m <= 1e-12, "matrix power off by %.3g", worst_m);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    note(o, secs < 5.0, "runtime %.2fs", secs);
    if (o.pass) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "first term max err %.2g, power max err %.2g", worst, worst_m);
        o.detail = buf;
    }
    return o;
}

Outcome simulation_cross_check()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    double worst_ratio = 0.0, worst_hw = 0.0;
    std::uint64_t seed = 2024;
    for (double p : {0.05, 0.1, 0.2})
        for (double a : {0.3, 0.5, 0.7}) {
            const ChannelParams params = ChannelParams::symmetric(p);
            const auto r = estimate_conditional_entropy_rate(params, MarkovInput{a}, 1'000'000, 10, seed++);
            const double exact = second_term(params, a).value;
            const double dev = std::abs(r.mean - exact);
            worst_ratio = std::max(worst_ratio, dev / r.half_width);
            worst_hw = std::max(worst_hw, r.half_width);
            note(o, dev <= 2 * r.half_width, "p=%g a=%g: |%.6f - %.6f| > 2*%.2g", p, a, r.mean, exact, r.half_width);
            note(o, r.half_width < 1e-3, "p=%g a=%g: half width %.3g", p, a, r.half_width);
        }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    note(o, secs < 120.0, "runtime %.1fs", secs);
    if (o.pass) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "max |dev|/hw %.2f, max hw %.2g, %.1fs", worst_ratio, worst_hw, secs);
        o.detail = buf;
    }
    return o;
}

Outcome sandwich_and_monotone()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> ps{0.02, 0.05, 0.1, 0.2, 0.3};
    std::vector<std::vector<BoundResult>> ub(ps.size());
    std::vector<double> lb(ps.size());
    std::vector<std::function<void()>> jobs;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        ub[i].resize(5);
        jobs.push_back([&, i] { lb[i] = lower_bound(ChannelParams::symmetric(ps[i])).value; });
        for (int L = 2; L <= 6; ++L)
            jobs.push_back([&, i, L] { ub[i][L - 2] = upper_bound(ChannelParams::symmetric(ps[i]), L); });
    }
    parallel_for(jobs.size(), [&](std::size_t j) { jobs[j](); });
    for (std::size_t i = 0; i < ps.size(); ++i)
        for (int L = 2; L <= 6; ++L) {
            const auto& r = ub[i][L - 2];
            note(o, r.converged, "p=%g L=%d did not converge", ps[i], L);
            note(o, lb[i] <= r.value + 1e-8, "p=%g L=%d: lower %.9f > upper %.9f", ps[i], L, lb[i], r.value);
            if (L > 2)
                note(o, r.value <= ub[i][L - 3].value + 1e-8, "p=%g: C_%d %.9f > C_%d %.9f", ps[i], L, r.value, L - 1,
                     ub[i][L - 3].value);
        }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    note(o, secs < 600.0, "runtime %.1fs", secs);
    if (o.pass) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "25 windows, min gap C6 - lower %.2g, %.1fs", ub[0][4].value - lb[0], secs);
        o.detail = buf;
    }
    return o;
}

Outcome low_noise_tightness()
{
    Outcome o;
    const struct {
        double p, limit;
    } cases[] = {{0.02, 5e-3}, {0.05, 2e-2}};
    std::string gaps;
    for (const auto& c : cases) {
        const auto params = ChannelParams::symmetric(c.p);
        const double gap = upper_bound(params, 2).value - lower_bound(params).value;
        note(o, gap < c.limit, "p=%g: C_2 - lower = %.5f, limit %g", c.p, gap, c.limit);
        const double gap6 = upper_bound(params, 6).value - lower_bound(params).value;
        char buf[96];
        std::snprintf(buf, sizeof buf, "%sp=%g gap %.5f (C_6: %.5f)", gaps.empty() ? "" : ", ", c.p, gap, gap6);
        gaps += buf;
    }
    o.detail = o.pass ? gaps : o.detail + " [" + gaps + "]";
    return o;
}

Outcome trivialization()
{
    Outcome o;
    double worst_obj = 0.0, worst_solve = 0.0;
    for (double p : {0.1, 0.3})
        for (int L : {2, 3, 4}) {
            const ChannelParams params = ChannelParams::symmetric(p);
            const auto t = trivializing_input(params, L);
            note(o, t.feasible && t.input.has_value(), "p=%g L=%d: no two-string input", p, L);
            if (!t.input) continue;
            const double obj = objective(build_problem(params, L, false), *t.input);
            worst_obj = std::max(worst_obj, std::abs(obj - 1.0));
            note(o, std::abs(obj - 1.0) <= 1e-12, "p=%g L=%d: objective %.15f", p, L, obj);
            note(o, check_not_stationary(*t.input), "p=%g L=%d: input passes stationarity", p, L);
            const double v = upper_bound(params, L).value;
            worst_solve = std::max(worst_solve, v);
            note(o, v < 0.999, "p=%g L=%d: stationary solve %.6f", p, L, v);
        }
    if (o.pass) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "max |obj - 1| %.2g, max constrained %.5f", worst_obj, worst_solve);
        o.detail = buf;
    }
    return o;
}

Outcome expansion_order()
{
    Outcome o;
    std::string ratios;
    for (double p : {0.02, 0.01, 0.005, 0.0025}) {
        const double ratio = std::abs(expansion(p).value - iud_lower_bound(ChannelParams::symmetric(p)).value) / (p * p);
        note(o, ratio < 10.0, "p=%g: ratio %.4f", p, ratio);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s%.4f", ratios.empty() ? "ratios " : ", ", ratio);
        ratios += buf;
    }
    if (o.pass) o.detail = ratios;
    return o;
}

Outcome taylor_coefficients_check()
{
    Outcome o;
    double worst = 0.0;
    for (double p : {0.05, 0.1, 0.2}) {
        const auto params = ChannelParams::symmetric(p);
        const auto t = taylor_coefficients(p, 0, 0, 1);
        auto f = [&](double d1, double d2) { return rate_function_f(d1, d2, params, 1e-15); };
        const double h = 1e-5;
        const double fd1 = (f(h, 0) - f(-h, 0)) / (2 * h);
        const double fd2 = (f(0, h) - f(0, -h)) / (2 * h);
        const double e1 = std::abs(t.A1 - fd1) / std::abs(fd1);
        const double e2 = std::abs(t.A2 - fd2) / std::abs(fd2);
        worst = std::max({worst, e1, e2});
        note(o, e1 <= 1e-4, "p=%g: A1 %.8f vs %.8f", p, t.A1, fd1);
        note(o, e2 <= 1e-4, "p=%g: A2 %.8f vs %.8f", p, t.A2, fd2);
        note(o, t.B20 > 0.0, "p=%g: B20 = %.6f", p, t.B20);
    }
    if (o.pass) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "max relative error %.2g", worst);
        o.detail = buf;
    }
    return o;
}

Outcome verify_suites()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto results = run_verify("all");
    std::size_t cases = 0;
    for (const auto& r : results) {
        cases += r.cases;
        note(o, r.passed(), "%s: %zu violations, max %.3g", r.name.c_str(), r.violations, r.max_violation);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    note(o, secs < 60.0, "runtime %.1fs", secs);
    if (o.pass) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%zu suites, %zu cases, %.1fs", results.size(), cases, secs);
        o.detail = buf;
    }
    return o;
}

Outcome shape()
{
    Outcome o;
    SweepConfig cfg;
    for (int i = 1; i <= 19; ++i) cfg.grid.push_back(ChannelParams::symmetric(0.02 * i));
    cfg.quantities = {Quantity::lower, Quantity::upper};
    cfg.L = {2, 3, 4, 5, 6, 7};
    const auto rows = run_sweep(cfg);
    std::map<std::pair<int, int>, std::vector<std::pair<double, double>>> series;  // (quantity, L) -> (p, value)
    for (const auto& r : rows) {
        series[{static_cast<int>(r.quantity), r.L}].push_back({r.p_i, r.value});
        if (r.quantity == Quantity::lower && r.p_i < 0.1) {
            const double a = std::stod(r.aux);
            note(o, a >= 0.4 && a <= 0.6, "p=%g: alpha_opt %.4f", r.p_i, a);
        }
        if (!r.converged) note(o, false, "p=%g L=%d unconverged", r.p_i, r.L);
    }
    for (const auto& [key, pts] : series)
        for (std::size_t i = 1; i < pts.size(); ++i)
            note(o, pts[i].second < pts[i - 1].second, "%s L=%d rises at p=%g", to_string(Quantity(key.first)).c_str(),
                 key.second, pts[i].first);
    if (o.pass) o.detail = "lower and C_2..C_7 decreasing on 0.02..0.38; alpha_opt in [0.4, 0.6] below 0.1";
    return o;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"acceptance checks"};
    int only = 0;
    app.add_option("--only", only, "run a single criterion")->check(CLI::Range(1, 10));
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"genie-erasure values", genie_values},
        {"closed forms vs enumeration", closed_forms},
        {"simulated conditional entropy rate", simulation_cross_check},
        {"sandwich and monotonicity in L", sandwich_and_monotone},
        {"low-noise tightness", low_noise_tightness},
        {"trivialization without stationarity", trivialization},
        {"expansion order", expansion_order},
        {"Taylor coefficients", taylor_coefficients_check},
        {"structural verification", verify_suites},
        {"bound shapes", shape},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only != 0 && static_cast<int>(i + 1) != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s  %2zu  %-38s %6.2fs  %s\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, secs,
                    out.detail.c_str());
        std::fflush(stdout);
        failures += out.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
