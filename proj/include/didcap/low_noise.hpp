#pragma once

// Low-noise behaviour for p_i = p_d = p: the series expansion of the capacity
// to O(p^2), the two-parameter rate function f over second-order Markov
// inputs, and its Taylor coefficients.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <vector>

#include "core.hpp"
#include "lower_bound.hpp"

namespace didcap {

namespace detail {

inline void check_pid(double p)
{
    if (!(p >= 0.0 && p <= 0.5)) throw domain_error("p_id outside [0, 0.5]");
}

}  // namespace detail

/// R(p; k) = h2(1/2 + (1-2p)^k / 2), evaluated through its small complement
/// t = (1 - (1-2p)^k) / 2.
[[nodiscard]] inline double series_R(double p, long k)
{
    detail::check_pid(p);
    if (k < 1) throw domain_error("R(p; k) requires k >= 1");
    const double t = -0.5 * std::expm1(static_cast<double>(k) * std::log1p(-2.0 * p));
    return binary_entropy(t);
}

struct ExpansionResult {
    double p_id = 0.0;
    double value = 0.0;
    long K = 0;
    double tail_bound = 0.0;
};

/// 1 - sum_{k=1}^K 2^{-(k+1)} R(p; k) with 2^{-(K+1)} < tol.
[[nodiscard]] inline ExpansionResult expansion(double p, double tol = 1e-12)
{
    detail::check_pid(p);
    if (!(tol > 0.0)) throw domain_error("tolerance must be positive");
    ExpansionResult r;
    r.p_id = p;
    KahanSum sum;
    double w = 0.25;  // 2^{-(k+1)}
    long k = 1;
    for (;; ++k, w *= 0.5) {
        sum.add(w * series_R(p, k));
        if (w < tol) break;
    }
    // The remainder sum_{k>K} 2^{-(k+1)} R is at most 2^{-(K+1)} since R <= 1.
    r.K = k;
    r.tail_bound = w;
    r.value = 1.0 - sum.value();
    return r;
}

/// Feasibility of p_1 = delta1 + 1/4, p_2 = delta2 + 1/4 as a second-order
/// Markov input law.
[[nodiscard]] inline bool taylor_point_feasible(double delta1, double delta2)
{
    constexpr double slack = 1e-15;
    return delta1 + 2.0 * delta2 <= 0.25 + slack && delta1 >= -0.25 - slack && delta2 >= -0.25 - slack;
}

/// f(delta1, delta2) = H(Y_n | Y_{n-1}) - lim H(Y_n | Y^{n-1}, X_0^n).
[[nodiscard]] inline double rate_function_f(double delta1, double delta2, const ChannelParams& params, double tol = 1e-12)
{
    params.require_nondegenerate();
    if (!taylor_point_feasible(delta1, delta2)) throw domain_error("infeasible (delta1, delta2)");
    const double g = params.p_ins * params.p_del / params.sum();
    const double p1 = delta1 + 0.25;
    const double p2 = delta2 + 0.25;
    const double alpha = std::clamp(1.0 - p1 - p2, 0.0, 1.0);
    const double arg = (1.0 - 2.0 * g) * p1 + (1.0 - 4.0 * g) * p2 + 2.0 * g;
    return binary_entropy(std::clamp(arg, 0.0, 1.0)) - second_term(params, alpha, tol).value;
}

struct TaylorCoefficients {
    double A1 = 0.0;
    double A2 = 0.0;
    double B20 = 0.0;
    double B11 = 0.0;
    double B02 = 0.0;
    double q = 0.0;
    double r = 0.0;
    long terms = 0;  // of the B series
};

namespace detail {

/// k-th term of the B series without R: q^{k-3} [(q-1)^2 k^2 + (q^2+2q-3) k + 2],
/// regrouped so that no negative power of q appears.
inline double b_series_weight(double q, long k)
{
    const double kd = static_cast<double>(k);
    double v = kd * (kd + 1.0) * std::pow(q, kd - 1.0);
    if (k >= 2) v -= 2.0 * kd * (kd - 1.0) * std::pow(q, kd - 2.0);
    if (k >= 3) v += (kd - 1.0) * (kd - 2.0) * std::pow(q, kd - 3.0);
    return v;
}

inline void check_q(double q)
{
    if (!(q >= 0.0 && q < 1.0)) throw domain_error("q = 1/2 + c delta1 + c delta2 must lie in [0, 1)");
}

inline double b_denominator(double p, double r)
{
    const double d = (1.0 - std::pow(0.5 * p + r, 2)) * kLn2;
    if (!(d > 0.0)) throw domain_error("B coefficient denominator is not positive");
    return d;
}

/// (1/2) sum_{k=1}^{k_max} weight(q, k) R(p; k).
inline double b_series_fixed(double p, double q, long k_max)
{
    KahanSum sum;
    for (long k = 1; k <= k_max; ++k) sum.add(b_series_weight(q, k) * series_R(p, k));
    return 0.5 * sum.value();
}

}  // namespace detail

/// A_1, A_2 and the Lagrange-remainder B coefficients at (c delta1, c delta2).
///
/// The B series stops once the majorant eps^{k-3} P2(k), eps = q + 1e-12,
/// bounds the remainder below tol.
[[nodiscard]] inline TaylorCoefficients taylor_coefficients(double p, double delta1, double delta2, double c,
                                                            double tol = 1e-12)
{
    detail::check_pid(p);
    if (!(tol > 0.0)) throw domain_error("tolerance must be positive");
    TaylorCoefficients t;

    KahanSum a_series;
    for (long k = 1;; ++k) {
        a_series.add((static_cast<double>(k) - 3.0) * std::ldexp(1.0, -static_cast<int>(k)) * series_R(p, k));
        if ((static_cast<double>(k) + 2.0) * std::ldexp(1.0, -static_cast<int>(k)) < tol) break;
    }
    const double lg = std::log2((2.0 - p) / (2.0 + p));
    t.A1 = (1.0 - p) * lg - a_series.value();
    t.A2 = (1.0 - 2.0 * p) * lg - a_series.value();

    t.r = 2.0 * (1.0 - p) * c * delta1 + 2.0 * (1.0 - 2.0 * p) * c * delta2;
    t.q = 0.5 + c * delta1 + c * delta2;
    detail::check_q(t.q);
    const double den = detail::b_denominator(p, t.r);

    const double q = t.q;
    const double eps = q + 1e-12;
    const double c2 = (q - 1.0) * (q - 1.0);
    const double c1 = std::abs(q * q + 2.0 * q - 3.0);
    auto poly = [&](double k) { return c2 * k * k + c1 * k + 2.0; };
    KahanSum series;
    long k = 1;
    for (;; ++k) {
        series.add(detail::b_series_weight(q, k) * series_R(p, k));
        const double kn = static_cast<double>(k + 1);
        const double rho = eps * poly(kn + 1.0) / poly(kn);
        if (rho < 1.0) {
            const double next = std::pow(eps, kn - 3.0) * poly(kn);
            if (0.5 * next / (1.0 - rho) < tol) break;
        }
        if (k > 10'000'000) throw domain_error("B series failed to converge");
    }
    t.terms = k;
    const double s = 0.5 * series.value();
    t.B20 = 2.0 * (1.0 - p) * (1.0 - p) / den + s;
    t.B11 = 2.0 * (1.0 - p) * (1.0 - 2.0 * p) / den + s;
    t.B02 = 2.0 * (1.0 - 2.0 * p) * (1.0 - 2.0 * p) / den + s;
    return t;
}

/// The common coefficient B (the B_{1,1} form) truncated at k_max terms.
[[nodiscard]] inline double b_coefficient(double p, double delta1, double delta2, double c = 1.0, long k_max = 2000)
{
    detail::check_pid(p);
    const double r = 2.0 * (1.0 - p) * c * delta1 + 2.0 * (1.0 - 2.0 * p) * c * delta2;
    const double q = 0.5 + c * delta1 + c * delta2;
    detail::check_q(q);
    return 2.0 * (1.0 - p) * (1.0 - 2.0 * p) / detail::b_denominator(p, r) + detail::b_series_fixed(p, q, k_max);
}

struct BSignGrid {
    std::vector<double> p_values;
    std::vector<double> delta1_values;
    std::vector<double> delta2_values;
    double c = 1.0;
    long k_max = 2000;
};

struct BSignRow {
    double p_id = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double B_value = 0.0;
    int sign = 0;
};

/// Sign of B over the grid; infeasible or excluded (q >= 1) points are skipped.
[[nodiscard]] inline std::vector<BSignRow> b_sign_map(const BSignGrid& grid)
{
    std::vector<BSignRow> rows;
    for (double p : grid.p_values)
        for (double d1 : grid.delta1_values)
            for (double d2 : grid.delta2_values) {
                if (!taylor_point_feasible(d1, d2)) continue;
                double b = 0.0;
                try {
                    b = b_coefficient(p, d1, d2, grid.c, grid.k_max);
                } catch (const domain_error&) {
                    continue;
                }
                rows.push_back({p, d1, d2, b, b > 0.0 ? 1 : (b < 0.0 ? -1 : 0)});
            }
    return rows;
}

inline void write_b_sign_csv(std::ostream& os, const std::vector<BSignRow>& rows)
{
    os << "p_id,delta1,delta2,B_value,sign\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%d\n", r.p_id, r.delta1, r.delta2, r.B_value, r.sign);
        os << buf;
    }
}

}  // namespace didcap
