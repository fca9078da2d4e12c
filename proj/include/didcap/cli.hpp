#pragma once

// Command layer behind the didcap tool: parameter grids, bound sweeps and the
// CSV / pivot writers. Argument parsing lives in tools/didcap.cpp.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "core.hpp"
#include "low_noise.hpp"
#include "lower_bound.hpp"
#include "parallel.hpp"
#include "sim_rate.hpp"
#include "upper_bound.hpp"

namespace didcap {

/// Row kinds, in output sort order.
enum class Quantity { lower, iud_lower, upper, genie, expansion, sim_rate, sim_h_y, sim_h_y_given_x };

[[nodiscard]] inline std::string to_string(Quantity q)
{
    switch (q) {
    case Quantity::lower: return "lower";
    case Quantity::iud_lower: return "iud_lower";
    case Quantity::upper: return "upper";
    case Quantity::genie: return "genie";
    case Quantity::expansion: return "expansion";
    case Quantity::sim_rate: return "sim_rate";
    case Quantity::sim_h_y: return "sim_h_y";
    case Quantity::sim_h_y_given_x: return "sim_h_y_given_x";
    }
    return "?";
}

[[nodiscard]] inline Quantity parse_quantity(const std::string& s)
{
    for (auto q : {Quantity::lower, Quantity::iud_lower, Quantity::upper, Quantity::genie, Quantity::expansion,
                   Quantity::sim_rate, Quantity::sim_h_y, Quantity::sim_h_y_given_x})
        if (to_string(q) == s) return q;
    throw domain_error("unknown quantity: " + s);
}

struct CsvRow {
    double p_i = 0.0;
    double p_d = 0.0;
    Quantity quantity = Quantity::lower;
    int L = 0;  // 0 prints as empty
    double value = 0.0;
    std::string aux;
    bool converged = true;
    double tol = 0.0;
};

struct SweepConfig {
    std::vector<ChannelParams> grid;
    std::vector<int> L{2};
    std::vector<Quantity> quantities{Quantity::lower, Quantity::iud_lower, Quantity::genie, Quantity::upper,
                                     Quantity::expansion};
    double tol = 1e-9;
    bool bitsym = true;
    double alpha = 0.5;
    std::size_t n = 1'000'000;
    std::size_t samples = 10;
    std::uint64_t seed = 1;
    std::string suite = "all";

    void validate() const
    {
        if (grid.empty()) throw domain_error("parameter grid is empty");
        if (!(tol > 0.0)) throw domain_error("tolerance must be positive");
        for (const auto& p : grid) p.validate();
    }
};

// ---------------------------------------------------------------------------
// Argument helpers.

/// p = 1 stands for "very close to 1".
inline constexpr double kEndpointClamp = 1e-9;

[[nodiscard]] inline double clamp_probability(double p)
{
    if (!(p >= 0.0 && p <= 1.0)) throw domain_error("probability outside [0,1]: " + std::to_string(p));
    return p == 1.0 ? 1.0 - kEndpointClamp : p;
}

/// Comma-separated numbers; an item a:step:b expands to a, a+step, ..., b.
[[nodiscard]] inline std::vector<double> parse_number_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    auto number = [](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw domain_error("not a number: '" + s + "'");
        }
        if (used != s.size()) throw domain_error("not a number: '" + s + "'");
        return v;
    };
    while (std::getline(ss, item, ',')) {
        if (item.empty()) throw domain_error("empty item in list '" + text + "'");
        const auto c1 = item.find(':');
        if (c1 == std::string::npos) {
            out.push_back(number(item));
            continue;
        }
        const auto c2 = item.find(':', c1 + 1);
        if (c2 == std::string::npos) throw domain_error("range must be a:step:b");
        const double a = number(item.substr(0, c1));
        const double step = number(item.substr(c1 + 1, c2 - c1 - 1));
        const double b = number(item.substr(c2 + 1));
        if (!(step > 0.0) || b < a) throw domain_error("range needs step > 0 and a <= b");
        const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9));
        for (long i = 0; i <= count; ++i) out.push_back(a + static_cast<double>(i) * step);
    }
    if (out.empty()) throw domain_error("empty list");
    return out;
}

[[nodiscard]] inline std::vector<int> parse_int_list(const std::string& text)
{
    std::vector<int> out;
    for (double v : parse_number_list(text)) {
        if (v != std::floor(v)) throw domain_error("expected integers in '" + text + "'");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

/// Symmetric grid from --p, or the product of --pi and --pd.
[[nodiscard]] inline std::vector<ChannelParams> make_grid(const std::optional<std::string>& p,
                                                         const std::optional<std::string>& pi,
                                                         const std::optional<std::string>& pd)
{
    std::vector<ChannelParams> grid;
    if (p) {
        if (pi || pd) throw domain_error("use either --p or --pi/--pd");
        for (double v : parse_number_list(*p)) grid.push_back(ChannelParams::symmetric(clamp_probability(v)));
        return grid;
    }
    if (!pi || !pd) throw domain_error("specify --p, or both --pi and --pd");
    for (double a : parse_number_list(*pi))
        for (double b : parse_number_list(*pd)) grid.push_back({clamp_probability(a), clamp_probability(b)});
    return grid;
}

[[nodiscard]] inline bool noiseless(const ChannelParams& p) { return p.sum() == 0.0; }

// ---------------------------------------------------------------------------
// Formatting.

[[nodiscard]] inline std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline void sort_rows(std::vector<CsvRow>& rows)
{
    std::stable_sort(rows.begin(), rows.end(), [](const CsvRow& a, const CsvRow& b) {
        return std::tuple(a.p_i, a.p_d, static_cast<int>(a.quantity), a.L) <
               std::tuple(b.p_i, b.p_d, static_cast<int>(b.quantity), b.L);
    });
}

inline void write_csv(std::ostream& os, const std::vector<CsvRow>& rows)
{
    os << "p_i,p_d,quantity,L,value,aux,converged,tol\n";
    for (const auto& r : rows) {
        os << fmt(r.p_i) << ',' << fmt(r.p_d) << ',' << to_string(r.quantity) << ',';
        if (r.L > 0) os << r.L;
        os << ',' << fmt(r.value) << ',' << r.aux << ',' << (r.converged ? 1 : 0) << ',' << fmt(r.tol) << '\n';
    }
}

/// One line per (p_i, p_d); one column per quantity (upper columns per L).
inline void write_pivot(std::ostream& os, const std::vector<CsvRow>& rows)
{
    auto column = [](const CsvRow& r) {
        return r.quantity == Quantity::upper ? "upper_L" + std::to_string(r.L) : to_string(r.quantity);
    };
    std::vector<std::pair<std::tuple<int, int>, std::string>> cols;
    std::set<std::string> seen;
    for (const auto& r : rows) {
        auto name = column(r);
        if (seen.insert(name).second) cols.push_back({{static_cast<int>(r.quantity), r.L}, name});
    }
    std::sort(cols.begin(), cols.end());
    std::map<std::pair<double, double>, std::map<std::string, double>> table;
    for (const auto& r : rows) table[{r.p_i, r.p_d}][column(r)] = r.value;

    os << "p_i,p_d";
    for (const auto& c : cols) os << ',' << c.second;
    os << '\n';
    for (const auto& [key, values] : table) {
        os << fmt(key.first) << ',' << fmt(key.second);
        for (const auto& c : cols) {
            os << ',';
            if (auto it = values.find(c.second); it != values.end()) os << fmt(it->second);
        }
        os << '\n';
    }
}

// ---------------------------------------------------------------------------
// Row producers.

namespace detail {

inline std::vector<CsvRow> lower_rows(const ChannelParams& p, double tol)
{
    if (noiseless(p))
        return {{p.p_ins, p.p_del, Quantity::lower, 0, 1.0, "0.5", true, tol},
                {p.p_ins, p.p_del, Quantity::iud_lower, 0, 1.0, "0.5", true, tol},
                {p.p_ins, p.p_del, Quantity::genie, 0, 1.0, "", true, tol}};
    const auto lb = lower_bound(p, tol);
    const auto iud = iud_lower_bound(p, tol);
    return {{p.p_ins, p.p_del, Quantity::lower, 0, lb.value, fmt(lb.alpha_opt), true, tol},
            {p.p_ins, p.p_del, Quantity::iud_lower, 0, iud.value, fmt(0.5), true, tol},
            {p.p_ins, p.p_del, Quantity::genie, 0, genie_erasure(p), "", true, tol}};
}

inline CsvRow upper_row(const ChannelParams& p, int L, double tol, bool bitsym)
{
    if (noiseless(p)) return {p.p_ins, p.p_del, Quantity::upper, L, 1.0, "0", true, tol};
    const auto r = upper_bound(p, L, tol, bitsym);
    return {p.p_ins, p.p_del, Quantity::upper, L, r.value, std::to_string(r.iterations), r.converged, tol};
}

inline CsvRow expansion_row(const ChannelParams& p, double tol)
{
    if (p.p_ins != p.p_del) throw domain_error("the low-noise expansion needs p_i = p_d");
    if (p.p_ins > 0.5) throw domain_error("the low-noise expansion needs p <= 0.5");
    const auto e = expansion(p.p_ins, tol);
    return {p.p_ins, p.p_del, Quantity::expansion, 0, e.value, std::to_string(e.K), true, tol};
}

inline std::vector<CsvRow> sim_rows(const ChannelParams& p, const SweepConfig& cfg)
{
    const MarkovInput input{cfg.alpha};
    input.validate();
    if (noiseless(p)) {
        const double h = binary_entropy(cfg.alpha);
        return {{p.p_ins, p.p_del, Quantity::sim_rate, 0, h, "0", true, cfg.tol},
                {p.p_ins, p.p_del, Quantity::sim_h_y, 0, h, "0", true, cfg.tol},
                {p.p_ins, p.p_del, Quantity::sim_h_y_given_x, 0, 0.0, "0", true, cfg.tol}};
    }
    const auto r = simulate_rates(p, input, cfg.n, cfg.samples, cfg.seed);
    return {{p.p_ins, p.p_del, Quantity::sim_rate, 0, r.info.mean, fmt(r.info.half_width), true, cfg.tol},
            {p.p_ins, p.p_del, Quantity::sim_h_y, 0, r.output.mean, fmt(r.output.half_width), true, cfg.tol},
            {p.p_ins, p.p_del, Quantity::sim_h_y_given_x, 0, r.conditional.mean, fmt(r.conditional.half_width), true,
             cfg.tol}};
}

/// Flags upper rows whose value exceeds the next-smaller L by more than 1e-8.
inline void flag_monotonicity(std::vector<CsvRow>& rows)
{
    sort_rows(rows);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& prev = rows[i - 1];
        auto& cur = rows[i];
        if (cur.quantity != Quantity::upper || prev.quantity != Quantity::upper) continue;
        if (cur.p_i != prev.p_i || cur.p_d != prev.p_d) continue;
        if (cur.value > prev.value + 1e-8) cur.aux += ";nonmonotone";
    }
}

}  // namespace detail

/// Computes every requested quantity over the grid. Independent tasks run on
/// the worker pool; rows come back sorted by (p_i, p_d, quantity, L).
[[nodiscard]] inline std::vector<CsvRow> run_sweep(const SweepConfig& cfg)
{
    cfg.validate();
    auto wants = [&](Quantity q) { return std::find(cfg.quantities.begin(), cfg.quantities.end(), q) != cfg.quantities.end(); };
    const bool want_lower = wants(Quantity::lower) || wants(Quantity::iud_lower) || wants(Quantity::genie);
    const bool want_sim = wants(Quantity::sim_rate) || wants(Quantity::sim_h_y) || wants(Quantity::sim_h_y_given_x);

    struct Task {
        std::size_t point;
        Quantity kind;
        int L;
    };
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
        if (want_lower) tasks.push_back({i, Quantity::lower, 0});
        if (wants(Quantity::upper))
            for (int L : cfg.L) tasks.push_back({i, Quantity::upper, L});
        if (wants(Quantity::expansion)) tasks.push_back({i, Quantity::expansion, 0});
    }
    if (wants(Quantity::upper))
        for (int L : cfg.L)
            if (L < 1 || L > kMaxWindow) throw domain_error("L must lie in [1, 12]");

    std::vector<std::vector<CsvRow>> results(tasks.size());
    parallel_for(tasks.size(), [&](std::size_t t) {
        const auto& task = tasks[t];
        const auto& p = cfg.grid[task.point];
        switch (task.kind) {
        case Quantity::lower: results[t] = detail::lower_rows(p, cfg.tol); break;
        case Quantity::upper: results[t] = {detail::upper_row(p, task.L, cfg.tol, cfg.bitsym)}; break;
        case Quantity::expansion: results[t] = {detail::expansion_row(p, cfg.tol)}; break;
        default: break;
        }
    });

    std::vector<CsvRow> rows;
    for (auto& r : results)
        for (auto& row : r)
            if (wants(row.quantity)) rows.push_back(std::move(row));
    if (want_sim)
        for (const auto& p : cfg.grid)
            for (auto& row : detail::sim_rows(p, cfg))
                if (wants(row.quantity)) rows.push_back(std::move(row));
    detail::flag_monotonicity(rows);
    return rows;
}

[[nodiscard]] inline std::vector<CsvRow> cmd_lower(SweepConfig cfg)
{
    cfg.quantities = {Quantity::lower, Quantity::iud_lower, Quantity::genie};
    return run_sweep(cfg);
}

[[nodiscard]] inline std::vector<CsvRow> cmd_upper(SweepConfig cfg)
{
    cfg.quantities = {Quantity::upper};
    return run_sweep(cfg);
}

[[nodiscard]] inline std::vector<CsvRow> cmd_lownoise(SweepConfig cfg)
{
    cfg.quantities = {Quantity::expansion};
    return run_sweep(cfg);
}

[[nodiscard]] inline std::vector<CsvRow> cmd_simrate(SweepConfig cfg)
{
    cfg.quantities = {Quantity::sim_rate, Quantity::sim_h_y, Quantity::sim_h_y_given_x};
    return run_sweep(cfg);
}

// ---------------------------------------------------------------------------
// trivialize

struct TrivializeRow {
    double p_i = 0.0;
    double p_d = 0.0;
    int L = 0;
    bool feasible = false;
    double objective = 0.0;
    bool not_stationary = false;
    std::string support;  // blocks with positive mass, left-to-right
};

[[nodiscard]] inline std::vector<TrivializeRow> cmd_trivialize(const SweepConfig& cfg)
{
    cfg.validate();
    std::vector<TrivializeRow> rows;
    for (const auto& p : cfg.grid)
        for (int L : cfg.L) {
            if (L < 2 || L > kMaxWindow) throw domain_error("trivialize needs L in [2, 12]");
            TrivializeRow row;
            row.p_i = p.p_ins;
            row.p_d = p.p_del;
            row.L = L;
            const auto t = trivializing_input(p, L);
            row.feasible = t.feasible;
            if (t.input) {
                const auto prob = build_problem(p, L, false);
                row.objective = objective(prob, *t.input);
                row.not_stationary = check_not_stationary(*t.input);
                for (Word w = 0; w < t.input->size(); ++w)
                    if (t.input->probs[w] > 1e-12) {
                        if (!row.support.empty()) row.support += ' ';
                        row.support += format_block(w, L + 1);
                    }
            }
            rows.push_back(row);
        }
    return rows;
}

inline void write_trivialize_csv(std::ostream& os, const std::vector<TrivializeRow>& rows)
{
    os << "p_i,p_d,L,feasible,objective,not_stationary,support\n";
    for (const auto& r : rows)
        os << fmt(r.p_i) << ',' << fmt(r.p_d) << ',' << r.L << ',' << (r.feasible ? 1 : 0) << ','
           << (r.feasible ? fmt(r.objective) : std::string()) << ',' << (r.not_stationary ? 1 : 0) << ',' << r.support
           << '\n';
}

}  // namespace didcap
