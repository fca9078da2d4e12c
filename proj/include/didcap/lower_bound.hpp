#pragma once

// Achievable-rate lower bound for stationary bit-symmetric first-order Markov
// inputs, and the genie-erasure upper bound it is compared against.

#include <algorithm>
#include <cmath>
#include <vector>

#include "core.hpp"
#include "info_kernel.hpp"
#include "state_chain.hpp"

namespace didcap {

/// Stationary bit-symmetric first-order Markov input: P(X_0 = 0) = 1/2 and
/// P(X_{n+1} != X_n) = alpha.
struct MarkovInput {
    double alpha = 0.5;

    void validate() const
    {
        if (!(alpha >= 0.0 && alpha <= 1.0)) throw domain_error("Markov flip probability outside [0,1]");
    }

    /// Marginal law of len consecutive symbols.
    [[nodiscard]] BlockDistribution block_distribution(int len) const
    {
        validate();
        if (len < 1 || len > kMaxBlockBits) throw guard_violation("Markov block length outside [1, 30]");
        std::vector<double> p(block_count(len));
        for (Word w = 0; w < p.size(); ++w) {
            double v = 0.5;
            for (int i = 1; i < len; ++i) v *= bit_at(w, i) != bit_at(w, i - 1) ? alpha : 1.0 - alpha;
            p[w] = v;
        }
        return {len, std::move(p)};
    }
};

struct LowerBoundResult {
    double value = 0.0;
    double alpha_opt = 0.5;
    double term1 = 0.0;
    double term2 = 0.0;
    long series_terms_used = 0;
};

namespace detail {

inline void check_alpha(double alpha)
{
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw domain_error("alpha outside [0,1]");
}

inline void check_tol(double tol)
{
    if (!(tol > 0.0)) throw domain_error("tolerance must be positive");
}

}  // namespace detail

/// H(Y_n | Y_{n-1}, X_{n-2}, Z_{n-2}) under a Markov(alpha) input.
[[nodiscard]] inline double first_term(const ChannelParams& params, double alpha)
{
    params.require_nondegenerate();
    detail::check_alpha(alpha);
    const double pi = params.p_ins;
    const double pd = params.p_del;
    const double s = params.sum();
    const double a = alpha;

    const double w0 = a * pd / s;
    const double w1 = pi * (1.0 - a * pd) / s;
    const double w2 = pd * (1.0 + a * pi - a) / s;

    double h = w0 * binary_entropy(a - a * pi);
    if (w1 > 0.0) {
        const double a1 = (1.0 - a - 2.0 * a * pd + a * pd * pd + 3.0 * a * a * pd - 2.0 * a * a * pd * pd + a * pi * pd -
                           a * a * pi * pd) /
                          (1.0 - a * pd);
        h += w1 * binary_entropy(a1);
    }
    if (w2 > 0.0) {
        const double a2 = (1.0 + 2.0 * a * pi - 2.0 * a - a * pi * pi - 2.0 * a * a * pi + a * a + a * a * pi * pi -
                           a * pd * pi + 2.0 * a * a * pi * pd) /
                          (1.0 + a * pi - a);
        h += w2 * binary_entropy(a2);
    }
    return h;
}

struct SecondTermResult {
    double value = 0.0;
    long terms = 0;
};

/// Cache of H(Z_n | Z_{n-k}) for k = 1, 2, ... grown on demand.
class StateEntropyTable {
public:
    explicit StateEntropyTable(const ChannelParams& params) : params_(params) { params_.require_nondegenerate(); }

    double operator()(long k)
    {
        while (static_cast<long>(h_.size()) < k) h_.push_back(cond_state_entropy(params_, static_cast<long>(h_.size()) + 1));
        return h_[static_cast<std::size_t>(k - 1)];
    }

    [[nodiscard]] const ChannelParams& params() const { return params_; }

private:
    ChannelParams params_;
    std::vector<double> h_;
};

/// sum_{k>=1} alpha^2 (1-alpha)^{k-1} H(Z_n | Z_{n-k}), truncated once the
/// remaining weight alpha (1-alpha)^K falls below tol.
[[nodiscard]] inline SecondTermResult second_term(StateEntropyTable& table, double alpha, double tol)
{
    detail::check_alpha(alpha);
    detail::check_tol(tol);
    SecondTermResult r;
    KahanSum sum;
    double weight = alpha * alpha;  // alpha^2 (1-alpha)^{k-1}
    double tail = alpha;            // alpha (1-alpha)^K after K terms
    while (tail >= tol && weight > 0.0) {
        ++r.terms;
        sum.add(weight * table(r.terms));
        weight *= 1.0 - alpha;
        tail *= 1.0 - alpha;
    }
    r.value = sum.value();
    return r;
}

[[nodiscard]] inline SecondTermResult second_term(const ChannelParams& params, double alpha, double tol = 1e-12)
{
    StateEntropyTable table(params);
    return second_term(table, alpha, tol);
}

/// 1 - p_i p_d / (p_i + p_d).
[[nodiscard]] inline double genie_erasure(const ChannelParams& params)
{
    params.require_nondegenerate();
    return 1.0 - params.p_ins * params.p_del / params.sum();
}

namespace detail {

inline LowerBoundResult evaluate_markov_rate(const ChannelParams& params, StateEntropyTable& table, double alpha,
                                             double tol)
{
    LowerBoundResult r;
    r.alpha_opt = alpha;
    r.term1 = first_term(params, alpha);
    const auto t2 = second_term(table, alpha, tol);
    r.term2 = t2.value;
    r.series_terms_used = t2.terms;
    r.value = r.term1 - r.term2;
    return r;
}

}  // namespace detail

/// Rate first_term - second_term at a fixed alpha.
[[nodiscard]] inline LowerBoundResult markov_rate(const ChannelParams& params, double alpha, double tol = 1e-12)
{
    StateEntropyTable table(params);
    return detail::evaluate_markov_rate(params, table, alpha, tol);
}

/// The i.u.d. rate (alpha = 1/2).
[[nodiscard]] inline LowerBoundResult iud_lower_bound(const ChannelParams& params, double tol = 1e-12)
{
    return markov_rate(params, 0.5, tol);
}

/// Maximize the Markov rate over alpha: a 0.001 grid scan, then golden-section
/// refinement around the best grid point to |d alpha| < 1e-8.
[[nodiscard]] inline LowerBoundResult lower_bound(const ChannelParams& params, double tol = 1e-12)
{
    params.require_nondegenerate();
    detail::check_tol(tol);
    StateEntropyTable table(params);
    auto rate = [&](double a) { return detail::evaluate_markov_rate(params, table, a, tol); };

    constexpr int grid = 1000;
    LowerBoundResult best = rate(0.0);
    for (int i = 1; i <= grid; ++i) {
        const auto r = rate(static_cast<double>(i) / grid);
        if (r.value > best.value) best = r;
    }

    double lo = std::max(0.0, best.alpha_opt - 1.0 / grid);
    double hi = std::min(1.0, best.alpha_opt + 1.0 / grid);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - g * (hi - lo);
    double x2 = lo + g * (hi - lo);
    auto r1 = rate(x1);
    auto r2 = rate(x2);
    while (hi - lo > 1e-8) {
        if (r1.value >= r2.value) {
            hi = x2;
            x2 = x1;
            r2 = r1;
            x1 = hi - g * (hi - lo);
            r1 = rate(x1);
        } else {
            lo = x1;
            x1 = x2;
            r1 = r2;
            x2 = lo + g * (hi - lo);
            r2 = rate(x2);
        }
    }
    for (const auto& r : {r1, r2})
        if (r.value > best.value) best = r;
    return best;
}

}  // namespace didcap
