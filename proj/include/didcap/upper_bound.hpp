#pragma once

// Window-L upper bounds C_L^ub: a concave objective over stationary
// distributions of the input block X_n..X_{n+L}, maximized by a log-barrier
// Newton method in null-space coordinates; plus the two-string construction
// showing what happens when stationarity is dropped.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"
#include "did_channel.hpp"
#include "info_kernel.hpp"
#include "nnls.hpp"
#include "state_chain.hpp"

namespace didcap {

inline constexpr int kMaxWindow = 12;

/// Objective H(Y_{n+L} | Y_{n+1}^{n+L-1}) - H(Y_{n+L} | Y_{n+1}^{n+L-1}, X_n^{n+L}, Z_n)
/// written as H(W u) - H(Wp u) - c.u over the input block law u.
struct UpperBoundProblem {
    ChannelParams params;
    int L = 0;
    bool bitsym = true;
    Eigen::MatrixXd W;   // 2^L x 2^{L+1}: law of Y_{n+1}^{n+L} per x-block
    Eigen::MatrixXd Wp;  // 2^{L-1} x 2^{L+1}: law of Y_{n+1}^{n+L-1}
    Eigen::VectorXd c;
    ConstraintSystem constraints;

    [[nodiscard]] int block_length() const { return L + 1; }
    [[nodiscard]] Eigen::Index dimension() const { return W.cols(); }
};

struct BoundResult {
    double value = 0.0;
    BlockDistribution u_opt;
    int iterations = 0;
    double kkt_residual = 0.0;
    double feasibility_residual = 0.0;
    double duality_gap = 0.0;  // N * mu_final bound on the barrier suboptimality
    bool converged = false;
};

namespace detail {

/// Law of Y_1..Y_L given the input block x_0..x_L and Z_0 = z0.
inline std::vector<double> window_law(const TransitionMatrix& m, Word x, int L, int z0)
{
    std::vector<double> mass(2, 0.0);  // mass[2 * prefix + z]
    mass[static_cast<std::size_t>(z0)] = 1.0;
    for (int j = 1; j <= L; ++j) {
        std::vector<double> next(mass.size() * 2, 0.0);
        const Word prefixes = block_count(j - 1);
        for (Word prefix = 0; prefix < prefixes; ++prefix)
            for (int zp = 0; zp < 2; ++zp) {
                const double w = mass[2 * prefix + static_cast<Word>(zp)];
                if (w == 0.0) continue;
                for (int z = 0; z < 2; ++z) {
                    const double t = m(z, zp);
                    if (t == 0.0) continue;
                    const Word grown = prefix | (static_cast<Word>(bit_at(x, j - z)) << (j - 1));
                    next[2 * grown + static_cast<Word>(z)] += w * t;
                }
            }
        mass = std::move(next);
    }
    std::vector<double> law(block_count(L));
    for (Word y = 0; y < law.size(); ++y) law[y] = mass[2 * y] + mass[2 * y + 1];
    return law;
}

/// H(last symbol | earlier symbols) of a law over L-symbol blocks.
inline double last_symbol_entropy(const std::vector<double>& law, int L)
{
    const Word half = block_count(L - 1);
    double h = 0.0;
    for (Word prefix = 0; prefix < half; ++prefix) {
        const double a = law[prefix];
        const double b = law[prefix | half];
        const double t = a + b;
        if (t > 0.0) h += t * binary_entropy(a / t);
    }
    return h;
}

inline void check_window(int L)
{
    if (L < 1) throw domain_error("window L must be >= 1");
    if (L > kMaxWindow) throw guard_violation("window L exceeds enumeration guard (12)");
}

}  // namespace detail

[[nodiscard]] inline UpperBoundProblem build_problem(const ChannelParams& params, int L, bool bitsym = true)
{
    detail::check_window(L);
    const StateDist pi = stationary_distribution(params);
    const TransitionMatrix m = one_step_matrix(params);
    const Word nx = block_count(L + 1);
    const Word ny = block_count(L);
    const Word np = block_count(L - 1);

    UpperBoundProblem prob;
    prob.params = params;
    prob.L = L;
    prob.bitsym = bitsym;
    prob.W = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ny), static_cast<Eigen::Index>(nx));
    prob.Wp = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(np), static_cast<Eigen::Index>(nx));
    prob.c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nx));
    for (Word x = 0; x < nx; ++x) {
        const auto col = static_cast<Eigen::Index>(x);
        for (int z0 = 0; z0 < 2; ++z0) {
            if (pi[z0] == 0.0) continue;
            const auto law = detail::window_law(m, x, L, z0);
            for (Word y = 0; y < ny; ++y) {
                prob.W(static_cast<Eigen::Index>(y), col) += pi[z0] * law[y];
                prob.Wp(static_cast<Eigen::Index>(y & low_mask(L - 1)), col) += pi[z0] * law[y];
            }
            prob.c(col) += pi[z0] * detail::last_symbol_entropy(law, L);
        }
    }
    prob.constraints = build_constraints(L + 1, {true, bitsym, true});
    return prob;
}

namespace detail {

inline void check_simplex(const UpperBoundProblem& prob, const Eigen::VectorXd& u)
{
    if (u.size() != prob.dimension()) throw domain_error("input distribution has wrong block length");
    if (u.minCoeff() < -1e-8 || std::abs(u.sum() - 1.0) > 1e-8)
        throw domain_error("input distribution is not a probability vector");
}

inline double entropy_vec(const Eigen::VectorXd& p)
{
    double h = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) h += neg_xlog2x(p(i));
    return h;
}

inline Eigen::VectorXd to_vector(const BlockDistribution& d)
{
    return Eigen::Map<const Eigen::VectorXd>(d.probs.data(), static_cast<Eigen::Index>(d.probs.size()));
}

inline double objective_raw(const UpperBoundProblem& prob, const Eigen::VectorXd& u)
{
    return entropy_vec(prob.W * u) - entropy_vec(prob.Wp * u) - prob.c.dot(u);
}

/// -W^T log2 a + Wp^T log2 b - c, with W_yx log a_y read as 0 when W_yx = 0.
inline Eigen::VectorXd gradient_raw(const UpperBoundProblem& prob, const Eigen::VectorXd& a, const Eigen::VectorXd& b)
{
    auto safe_log2 = [](const Eigen::VectorXd& v) {
        Eigen::VectorXd out(v.size());
        for (Eigen::Index i = 0; i < v.size(); ++i)
            out(i) = v(i) > 0.0 ? std::log2(v(i)) : -std::numeric_limits<double>::infinity();
        return out;
    };
    const Eigen::VectorXd la = safe_log2(a);
    const Eigen::VectorXd lb = safe_log2(b);
    Eigen::VectorXd g = -prob.c;
    for (Eigen::Index x = 0; x < prob.W.cols(); ++x) {
        double s = 0.0;
        for (Eigen::Index y = 0; y < prob.W.rows(); ++y)
            if (prob.W(y, x) != 0.0) s -= prob.W(y, x) * la(y);
        for (Eigen::Index y = 0; y < prob.Wp.rows(); ++y)
            if (prob.Wp(y, x) != 0.0) s += prob.Wp(y, x) * lb(y);
        g(x) += s;
    }
    return g;
}

}  // namespace detail

/// Objective value in bits; u only needs to be a probability vector.
[[nodiscard]] inline double objective(const UpperBoundProblem& prob, const BlockDistribution& u)
{
    const Eigen::VectorXd v = detail::to_vector(u);
    detail::check_simplex(prob, v);
    return detail::objective_raw(prob, v);
}

struct ObjectiveGradient {
    double value = 0.0;
    Eigen::VectorXd gradient;
};

[[nodiscard]] inline ObjectiveGradient objective_and_gradient(const UpperBoundProblem& prob, const BlockDistribution& u)
{
    const Eigen::VectorXd v = detail::to_vector(u);
    detail::check_simplex(prob, v);
    const Eigen::VectorXd a = prob.W * v;
    const Eigen::VectorXd b = prob.Wp * v;
    return {detail::entropy_vec(a) - detail::entropy_vec(b) - prob.c.dot(v), detail::gradient_raw(prob, a, b)};
}

/// Full Hessian -(1/ln 2) [W^T diag(1/a) W - Wp^T diag(1/b) Wp].
[[nodiscard]] inline Eigen::MatrixXd objective_hessian(const UpperBoundProblem& prob, const BlockDistribution& u)
{
    const Eigen::VectorXd v = detail::to_vector(u);
    detail::check_simplex(prob, v);
    const Eigen::VectorXd a = prob.W * v;
    const Eigen::VectorXd b = prob.Wp * v;
    auto inv = [](const Eigen::VectorXd& p) {
        Eigen::VectorXd out(p.size());
        for (Eigen::Index i = 0; i < p.size(); ++i) out(i) = p(i) > 0.0 ? 1.0 / p(i) : 0.0;
        return out;
    };
    const Eigen::MatrixXd full = prob.W.transpose() * inv(a).asDiagonal() * prob.W;
    const Eigen::MatrixXd pref = prob.Wp.transpose() * inv(b).asDiagonal() * prob.Wp;
    return -kLog2e * (full - pref);
}

struct SolveOptions {
    double mu_start = 1e-2;
    double mu_end = 1e-10;
    double mu_factor = 0.1;
    double newton_tol = 1e-10;
    int max_newton_per_stage = 200;
};

/// Maximize the objective over {u >= 0, S u = rhs}.
///
/// u = u0 + Z w with u0 the i.u.d. law and Z an orthonormal null-space basis
/// of S. Each barrier stage maximizes f(u) + mu sum log u by damped Newton.
[[nodiscard]] inline BoundResult solve(const UpperBoundProblem& prob, double tol = 1e-9, SolveOptions opt = {})
{
    if (!(tol > 0.0)) throw domain_error("tolerance must be positive");
    const Eigen::Index N = prob.dimension();
    const auto& S = prob.constraints.S;

    Eigen::MatrixXd Z;
    {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double thresh = std::max(S.rows(), S.cols()) * std::numeric_limits<double>::epsilon() *
                              (sv.size() > 0 ? sv(0) : 1.0) * 1e3;
        Eigen::Index rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > thresh) ++rank;
        Z = svd.matrixV().rightCols(N - rank);
    }
    const Eigen::VectorXd u0 = Eigen::VectorXd::Constant(N, 1.0 / static_cast<double>(N));

    // Projected operators: everything in the Newton loop works on these.
    const Eigen::MatrixXd WZ = prob.W * Z;
    const Eigen::MatrixXd WpZ = prob.Wp * Z;

    Eigen::VectorXd u = u0;
    BoundResult res;

    auto phi = [&](const Eigen::VectorXd& uu, double mu) {
        double logs = 0.0;
        for (Eigen::Index i = 0; i < N; ++i) logs += std::log(uu(i));
        return detail::objective_raw(prob, uu) + mu * logs;
    };

    auto reduced_gradient = [&](const Eigen::VectorXd& uu, double mu, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        Eigen::VectorXd g = detail::gradient_raw(prob, a, b);
        g += mu * uu.cwiseInverse();
        return Eigen::VectorXd(Z.transpose() * g);
    };

    bool all_stages = true;
    double mu = opt.mu_start;
    double mu_final = mu;
    for (;;) {
        // The last stage is polished until the reduced gradient itself is
        // small: coordinates pinned near zero carry Hessian entries of order
        // mu / u^2, so a small decrement alone leaves their gradient large.
        const bool last = mu <= opt.mu_end * (1.0 + 1e-9);
        bool stage_ok = false;
        for (int it = 0; it < opt.max_newton_per_stage; ++it) {
            const Eigen::VectorXd a = prob.W * u;
            const Eigen::VectorXd b = prob.Wp * u;
            const Eigen::VectorXd g = reduced_gradient(u, mu, a, b);
            const double gnorm = g.lpNorm<Eigen::Infinity>();

            Eigen::VectorXd ia(a.size()), ib(b.size());
            for (Eigen::Index i = 0; i < a.size(); ++i) ia(i) = a(i) > 0.0 ? 1.0 / a(i) : 0.0;
            for (Eigen::Index i = 0; i < b.size(); ++i) ib(i) = b(i) > 0.0 ? 1.0 / b(i) : 0.0;
            // Negated reduced Hessian (positive definite on the interior).
            Eigen::MatrixXd Hn = kLog2e * (WZ.transpose() * ia.asDiagonal() * WZ - WpZ.transpose() * ib.asDiagonal() * WpZ);
            Hn += mu * Z.transpose() * u.cwiseInverse().cwiseAbs2().asDiagonal() * Z;
            Hn = 0.5 * (Hn + Hn.transpose());

            const Eigen::LDLT<Eigen::MatrixXd> ldlt(Hn);
            Eigen::VectorXd dw = ldlt.solve(g);
            if (!dw.allFinite()) dw = Hn.completeOrthogonalDecomposition().solve(g);
            const double decrement = g.dot(dw);
            ++res.iterations;
            if (decrement / 2.0 <= opt.newton_tol && (!last || gnorm <= 0.1 * tol)) {
                stage_ok = true;
                break;
            }

            const Eigen::VectorXd du = Z * dw;
            double t = 1.0;
            for (Eigen::Index i = 0; i < N; ++i)
                if (du(i) < 0.0) t = std::min(t, -0.99 * u(i) / du(i));

            if (decrement < 1e-12) {
                // phi differences are below rounding here; judge by the gradient.
                const Eigen::VectorXd cand = u + t * du;
                const bool better = cand.minCoeff() > 0.0 &&
                                    reduced_gradient(cand, mu, prob.W * cand, prob.Wp * cand).lpNorm<Eigen::Infinity>() < gnorm;
                if (!better) {
                    stage_ok = !last || gnorm < tol;
                    break;
                }
                u = cand;
                continue;
            }

            const double base = phi(u, mu);
            bool moved = false;
            while (t > 1e-14) {
                const Eigen::VectorXd cand = u + t * du;
                if (cand.minCoeff() > 0.0 && phi(cand, mu) >= base + 0.25 * t * decrement) {
                    u = cand;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if (!moved) {
                stage_ok = decrement / 2.0 <= 1e-6 && (!last || gnorm < tol);
                break;
            }
        }
        all_stages = all_stages && stage_ok;
        mu_final = mu;
        if (last) break;
        mu = std::max(mu * opt.mu_factor, opt.mu_end);
    }

    const Eigen::VectorXd a = prob.W * u;
    const Eigen::VectorXd b = prob.Wp * u;
    const Eigen::VectorXd g = reduced_gradient(u, mu_final, a, b);
    res.kkt_residual = std::max(g.lpNorm<Eigen::Infinity>(), mu_final);
    res.duality_gap = static_cast<double>(N) * mu_final;
    res.value = detail::objective_raw(prob, u);
    res.feasibility_residual = prob.constraints.residual(u);
    res.u_opt = BlockDistribution{prob.block_length(), std::vector<double>(u.data(), u.data() + N)};
    res.converged = all_stages && res.kkt_residual < tol && res.feasibility_residual < 1e-10;
    return res;
}

[[nodiscard]] inline BoundResult upper_bound(const ChannelParams& params, int L, double tol = 1e-9, bool bitsym = true)
{
    return solve(build_problem(params, L, bitsym), tol);
}

// ---------------------------------------------------------------------------
// Dropping stationarity.

/// True iff some stationarity equation is violated by more than 1e-10.
[[nodiscard]] inline bool check_not_stationary(const BlockDistribution& u)
{
    return stationarity_violation(u) > 1e-10;
}

struct TrivializeResult {
    bool feasible = false;
    std::optional<BlockDistribution> input;
    double residual = 0.0;  // of the balance system
    std::string report;
};

/// An input law over X_n..X_{n+L} with X_{n+L} = X_{n+L-1} almost surely whose
/// output makes Y_{n+L} an unbiased bit given Y_{n+1}^{n+L-1}; the objective
/// then equals 1.
///
/// For p_i = p_d the two alternating strings ...0100 / ...1011 work. Otherwise
/// the balance equations are solved under nonnegativity, which may fail.
[[nodiscard]] inline TrivializeResult trivializing_input(const ChannelParams& params, int L)
{
    if (L < 2) throw domain_error("trivializing_input requires L >= 2");
    detail::check_window(L);
    params.require_nondegenerate();
    const int m = L + 1;
    TrivializeResult r;

    if (params.p_ins == params.p_del) {
        Word w = 0;
        for (int i = 0; i < L; ++i)
            if (i % 2 == 1) w |= Word{1} << i;
        if (bit_at(w, L - 1)) w |= Word{1} << L;
        std::vector<double> p(block_count(m), 0.0);
        p[w] = 0.5;
        p[complement(w, m)] = 0.5;
        r.feasible = true;
        r.input = BlockDistribution{m, std::move(p)};
        r.report = "two-string input " + format_block(w, m) + " / " + format_block(complement(w, m), m);
        return r;
    }

    // Unknown v_p for each L-symbol prefix p; the block is p with its last
    // symbol repeated. Balance row y: sum_p sign(p) v_p P(y | p) = 0.
    const Word prefixes = block_count(L);
    const Word outputs = block_count(L - 1);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(outputs + 1), static_cast<Eigen::Index>(prefixes));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(A.rows());
    for (Word p = 0; p < prefixes; ++p) {
        const auto law = channel_law(params, p, L - 1);
        const double sign = bit_at(p, L - 1) == 0 ? 1.0 : -1.0;
        for (Word y = 0; y < outputs; ++y) A(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(p)) = sign * law[y];
        A(static_cast<Eigen::Index>(outputs), static_cast<Eigen::Index>(p)) = 1.0;
    }
    rhs(static_cast<Eigen::Index>(outputs)) = 1.0;

    const NnlsResult sol = nnls(A, rhs);
    r.residual = sol.residual;
    if (sol.residual > 1e-10) {
        r.report = "balance system has no nonnegative solution (residual " + std::to_string(sol.residual) + ")";
        return r;
    }
    std::vector<double> p(block_count(m), 0.0);
    const double total = sol.x.sum();
    for (Word q = 0; q < prefixes; ++q) {
        const Word w = q | (static_cast<Word>(bit_at(q, L - 1)) << L);
        p[w] = sol.x(static_cast<Eigen::Index>(q)) / total;
    }
    r.feasible = true;
    r.input = BlockDistribution{m, std::move(p)};
    r.report = "nonnegative balance solution found";
    return r;
}

}  // namespace didcap
