#pragma once

// Distributions over binary blocks, entropy and mutual-information
// primitives, the stationary / bit-symmetric constraint polytope, and the
// finite-dimensional constructions used to justify the capacity formula.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"
#include "did_channel.hpp"
#include "random.hpp"

namespace didcap {

/// Probability vector over the 2^len binary blocks of length len.
struct BlockDistribution {
    int len = 0;
    std::vector<double> probs;

    /// Validates and normalizes: entries >= -1e-14 are clamped to 0, the sum
    /// must be 1 within 1e-10 and is then renormalized exactly.
    static BlockDistribution from(int len, std::vector<double> probs)
    {
        if (len < 0 || len > kMaxBlockBits) throw guard_violation("block length outside [0, 30]");
        if (probs.size() != block_count(len)) throw domain_error("probability vector size must be 2^len");
        KahanSum total;
        for (double& p : probs) {
            if (!std::isfinite(p) || p < -1e-14) throw domain_error("negative or non-finite block probability");
            if (p < 0.0) p = 0.0;
            total.add(p);
        }
        if (std::abs(total.value() - 1.0) > 1e-10) throw domain_error("block probabilities do not sum to 1");
        for (double& p : probs) p /= total.value();
        return {len, std::move(probs)};
    }

    static BlockDistribution uniform(int len)
    {
        if (len < 0 || len > kMaxBlockBits) throw guard_violation("block length outside [0, 30]");
        return {len, std::vector<double>(block_count(len), 1.0 / static_cast<double>(block_count(len)))};
    }

    static BlockDistribution point_mass(int len, Word w)
    {
        if (len < 0 || len > kMaxBlockBits) throw guard_violation("block length outside [0, 30]");
        if (w >= block_count(len)) throw domain_error("point mass block out of range");
        std::vector<double> p(block_count(len), 0.0);
        p[w] = 1.0;
        return {len, std::move(p)};
    }

    [[nodiscard]] Word size() const { return block_count(len); }
    [[nodiscard]] double operator[](Word w) const { return probs[w]; }
};

[[nodiscard]] inline double entropy(const BlockDistribution& d) { return entropy_of(d.probs); }

/// Marginal over the `length` symbols starting at time offset `offset`.
[[nodiscard]] inline BlockDistribution marginal(const BlockDistribution& d, int offset, int length)
{
    if (offset < 0 || length < 0 || offset + length > d.len) throw domain_error("marginal window outside block");
    std::vector<double> out(block_count(length), 0.0);
    for (Word w = 0; w < d.size(); ++w) out[(w >> offset) & low_mask(length)] += d.probs[w];
    return {length, std::move(out)};
}

/// H(A | B) where B is the first `split` symbols of the joint block and A the
/// remaining ones: H(A, B) - H(B).
[[nodiscard]] inline double cond_entropy(const BlockDistribution& joint, int split)
{
    if (split < 0 || split > joint.len) throw domain_error("cond_entropy split index outside [0, len]");
    return std::max(0.0, entropy(joint) - entropy(marginal(joint, 0, split)));
}

/// (input(x) + input(~x)) / 2.
[[nodiscard]] inline BlockDistribution symmetrize(const BlockDistribution& d)
{
    BlockDistribution out{d.len, std::vector<double>(d.size())};
    for (Word w = 0; w < d.size(); ++w) out.probs[w] = 0.5 * (d.probs[w] + d.probs[complement(w, d.len)]);
    return out;
}

// ---------------------------------------------------------------------------
// Mutual information.

inline constexpr int kMaxMutualInfoLength = 10;

/// I(X_0^n; Y^n) for the DID channel by exact enumeration; the input block
/// has length n + 1.
[[nodiscard]] inline double mutual_information_bruteforce(const ChannelParams& params, const BlockDistribution& input)
{
    const int n = input.len - 1;
    if (n < 1) throw domain_error("input block must cover at least X_0, X_1");
    if (n > kMaxMutualInfoLength) throw guard_violation("mutual information enumeration limited to n <= 10");
    std::vector<double> py(block_count(n), 0.0);
    KahanSum h_cond;
    for (Word x = 0; x < input.size(); ++x) {
        const double px = input.probs[x];
        if (px == 0.0) continue;
        const auto law = channel_law(params, x, n);
        h_cond.add(px * entropy_of(law));
        for (Word y = 0; y < law.size(); ++y) py[y] += px * law[y];
    }
    return std::max(0.0, entropy_of(py) - h_cond.value());
}

/// I(X; Y) for a finite input law px and row-stochastic channel w[x][y].
[[nodiscard]] inline double mutual_information(const std::vector<double>& px, const std::vector<std::vector<double>>& w)
{
    if (px.size() != w.size()) throw domain_error("input law and channel rows disagree");
    if (w.empty()) return 0.0;
    std::vector<double> py(w.front().size(), 0.0);
    double h_cond = 0.0;
    for (std::size_t x = 0; x < px.size(); ++x) {
        if (w[x].size() != py.size()) throw domain_error("ragged channel matrix");
        h_cond += px[x] * entropy_of(w[x]);
        for (std::size_t y = 0; y < py.size(); ++y) py[y] += px[x] * w[x][y];
    }
    return std::max(0.0, entropy_of(py) - h_cond);
}

// ---------------------------------------------------------------------------
// Constraint polytope.

struct ConstraintFlags {
    bool stationarity = true;
    bool bit_symmetry = true;
    bool unity = true;
};

/// Linear equalities S p = rhs over block distributions of length m.
struct ConstraintSystem {
    int m = 0;
    Eigen::MatrixXd S;
    Eigen::VectorXd rhs;
    ConstraintFlags flags;
    int stationarity_rows = 0;
    int bit_symmetry_rows = 0;
    int unity_rows = 0;

    [[nodiscard]] Eigen::Index rows() const { return S.rows(); }

    /// max_r |(S p - rhs)_r|.
    [[nodiscard]] double residual(const Eigen::VectorXd& p) const
    {
        if (S.rows() == 0) return 0.0;
        return (S * p - rhs).cwiseAbs().maxCoeff();
    }
};

namespace detail {

inline void check_constraint_length(int m)
{
    if (m < 2) throw domain_error("constraint block length must be >= 2");
    if (m > 16) throw guard_violation("constraint block length exceeds guard");
}

/// Row for v in GF(2)^{m-1}: P([v, *]) - P([*, v]).
inline void fill_stationarity_row(Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row, int m, Word v)
{
    const Word top = Word{1} << (m - 1);
    row.setZero();
    row(static_cast<Eigen::Index>(v)) += 1.0;
    row(static_cast<Eigen::Index>(v | top)) += 1.0;
    row(static_cast<Eigen::Index>(v << 1)) -= 1.0;
    row(static_cast<Eigen::Index>((v << 1) | 1)) -= 1.0;
}

}  // namespace detail

/// Stationarity rows P(V_1^{m-1} = v) = P(V_2^m = v) for every v
/// except the all-ones word, which is implied by the others.
[[nodiscard]] inline ConstraintSystem stationarity_constraints(int m)
{
    detail::check_constraint_length(m);
    const auto rows = static_cast<Eigen::Index>(block_count(m - 1) - 1);
    ConstraintSystem sys;
    sys.m = m;
    sys.flags = {true, false, false};
    sys.S = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(block_count(m)));
    sys.rhs = Eigen::VectorXd::Zero(rows);
    for (Eigen::Index r = 0; r < rows; ++r) detail::fill_stationarity_row(sys.S.row(r), m, static_cast<Word>(r));
    sys.stationarity_rows = static_cast<int>(rows);
    return sys;
}

/// Stationarity residual over the full equation set, dropped row included.
[[nodiscard]] inline double stationarity_violation(const BlockDistribution& d)
{
    if (d.len < 2) return 0.0;
    const auto head = marginal(d, 0, d.len - 1);
    const auto tail = marginal(d, 1, d.len - 1);
    double worst = 0.0;
    for (Word v = 0; v < head.size(); ++v) worst = std::max(worst, std::abs(head.probs[v] - tail.probs[v]));
    return worst;
}

[[nodiscard]] inline double bit_symmetry_violation(const BlockDistribution& d)
{
    double worst = 0.0;
    for (Word w = 0; w < d.size(); ++w) worst = std::max(worst, std::abs(d.probs[w] - d.probs[complement(w, d.len)]));
    return worst;
}

/// Selected families stacked in the order stationarity, bit-symmetry, unity.
/// Bit-symmetry rows are u_x - u_{~x} = 0 for x < 2^{m-1}.
[[nodiscard]] inline ConstraintSystem build_constraints(int m, ConstraintFlags flags)
{
    detail::check_constraint_length(m);
    const auto cols = static_cast<Eigen::Index>(block_count(m));
    const auto half = static_cast<Eigen::Index>(block_count(m - 1));
    ConstraintSystem sys;
    sys.m = m;
    sys.flags = flags;
    sys.stationarity_rows = flags.stationarity ? static_cast<int>(half - 1) : 0;
    sys.bit_symmetry_rows = flags.bit_symmetry ? static_cast<int>(half) : 0;
    sys.unity_rows = flags.unity ? 1 : 0;
    const Eigen::Index rows = sys.stationarity_rows + sys.bit_symmetry_rows + sys.unity_rows;
    sys.S = Eigen::MatrixXd::Zero(rows, cols);
    sys.rhs = Eigen::VectorXd::Zero(rows);
    Eigen::Index r = 0;
    for (int i = 0; i < sys.stationarity_rows; ++i, ++r)
        detail::fill_stationarity_row(sys.S.row(r), m, static_cast<Word>(i));
    for (int i = 0; i < sys.bit_symmetry_rows; ++i, ++r) {
        sys.S(r, i) = 1.0;
        sys.S(r, static_cast<Eigen::Index>(complement(static_cast<Word>(i), m))) = -1.0;
    }
    if (flags.unity) {
        sys.S.row(r).setOnes();
        sys.rhs(r) = 1.0;
    }
    return sys;
}

// ---------------------------------------------------------------------------
// Shift-average construction.

inline constexpr int kMaxShiftAverageBits = 24;

/// Length-m marginal of (1/s) sum_{k<s} mu o T^{-k}, where mu concatenates
/// independent copies of the length-s base block.
[[nodiscard]] inline BlockDistribution feinstein_shift_average(const BlockDistribution& base, int m)
{
    const int s = base.len;
    if (m < 1) throw domain_error("feinstein_shift_average requires m >= 1");
    if (s < 1) throw domain_error("base block must be non-empty");
    const int blocks = (s - 1 + m + s - 1) / s;  // covers offsets up to s-1+m
    if (blocks * s > kMaxShiftAverageBits) throw guard_violation("shift average enumeration exceeds guard");

    std::vector<double> mu = base.probs;
    for (int b = 1; b < blocks; ++b) {
        std::vector<double> next(mu.size() * base.size(), 0.0);
        for (Word w = 0; w < mu.size(); ++w) {
            if (mu[w] == 0.0) continue;
            for (Word v = 0; v < base.size(); ++v)
                next[w | (v << (b * s))] += mu[w] * base.probs[v];
        }
        mu = std::move(next);
    }

    std::vector<double> out(block_count(m), 0.0);
    const double weight = 1.0 / s;
    for (int k = 0; k < s; ++k)
        for (Word w = 0; w < mu.size(); ++w) out[(w >> k) & low_mask(m)] += weight * mu[w];
    return {m, std::move(out)};
}

// ---------------------------------------------------------------------------
// Randomized property checks.

namespace detail {

inline std::vector<double> random_simplex(std::size_t n, Rng& rng)
{
    std::vector<double> v(n);
    double total = 0.0;
    for (double& x : v) {
        x = -std::log(rng.uniform_open0());
        total += x;
    }
    for (double& x : v) x /= total;
    return v;
}

}  // namespace detail

struct PropertyReport {
    std::size_t trials = 0;
    std::size_t violations = 0;
    double min_slack = 0.0;  // smallest (lhs - rhs) observed
};

/// Superadditivity of mutual information for independent inputs through a
/// random joint channel: I(X1,X2; Y1,Y2) >= I(X1; Y1) + I(X2; Y2).
[[nodiscard]] inline PropertyReport check_superadditivity(std::size_t trials, std::uint64_t seed, int block_bits = 2)
{
    if (block_bits < 1 || block_bits > 3) throw guard_violation("superadditivity check limited to 1..3 bits per block");
    const std::size_t a = block_count(block_bits);
    PropertyReport report;
    report.min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, t));
        const auto p1 = detail::random_simplex(a, rng);
        const auto p2 = detail::random_simplex(a, rng);
        // joint[x1 * a + x2][y1 * a + y2]
        std::vector<std::vector<double>> joint(a * a);
        for (auto& row : joint) row = detail::random_simplex(a * a, rng);

        std::vector<double> px(a * a);
        for (std::size_t x1 = 0; x1 < a; ++x1)
            for (std::size_t x2 = 0; x2 < a; ++x2) px[x1 * a + x2] = p1[x1] * p2[x2];

        std::vector<std::vector<double>> w1(a, std::vector<double>(a, 0.0));
        std::vector<std::vector<double>> w2(a, std::vector<double>(a, 0.0));
        for (std::size_t x1 = 0; x1 < a; ++x1)
            for (std::size_t x2 = 0; x2 < a; ++x2)
                for (std::size_t y1 = 0; y1 < a; ++y1)
                    for (std::size_t y2 = 0; y2 < a; ++y2) {
                        const double q = joint[x1 * a + x2][y1 * a + y2];
                        w1[x1][y1] += p2[x2] * q;
                        w2[x2][y2] += p1[x1] * q;
                    }

        const double slack = mutual_information(px, joint) - mutual_information(p1, w1) - mutual_information(p2, w2);
        report.min_slack = std::min(report.min_slack, slack);
        if (slack < -1e-10) ++report.violations;
        ++report.trials;
    }
    return report;
}

/// I(symmetrize(Q)) >= I(Q) for random input laws Q over X_0^n.
[[nodiscard]] inline PropertyReport check_symmetrization(const ChannelParams& params, int n, std::size_t trials,
                                                         std::uint64_t seed)
{
    PropertyReport report;
    report.min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, t));
        const auto q = BlockDistribution::from(n + 1, detail::random_simplex(block_count(n + 1), rng));
        const double slack = mutual_information_bruteforce(params, symmetrize(q)) - mutual_information_bruteforce(params, q);
        report.min_slack = std::min(report.min_slack, slack);
        if (slack < -1e-10) ++report.violations;
        ++report.trials;
    }
    return report;
}

}  // namespace didcap
