#pragma once

// Lawson-Hanson active-set non-negative least squares:
//     minimize ||A x - b||_2  subject to  x >= 0.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

namespace didcap {

struct NnlsResult {
    Eigen::VectorXd x;
    double residual = 0.0;  // ||A x - b||_2
    int iterations = 0;
    bool converged = false;
};

[[nodiscard]] inline NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_iter = 0,
                                     double tol = 0.0)
{
    const Eigen::Index n = A.cols();
    if (max_iter <= 0) max_iter = static_cast<int>(3 * n) + 10;
    if (tol <= 0.0) tol = 10.0 * std::numeric_limits<double>::epsilon() * A.cwiseAbs().maxCoeff() * static_cast<double>(std::max(A.rows(), n));

    NnlsResult r;
    r.x = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(static_cast<std::size_t>(n), false);

    auto solve_passive = [&](Eigen::VectorXd& z) {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index j = 0; j < n; ++j)
            if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
        z = Eigen::VectorXd::Zero(n);
        if (idx.empty()) return;
        Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) Ap.col(static_cast<Eigen::Index>(k)) = A.col(idx[k]);
        const Eigen::VectorXd zp = Ap.completeOrthogonalDecomposition().solve(b);
        for (std::size_t k = 0; k < idx.size(); ++k) z(idx[k]) = zp(static_cast<Eigen::Index>(k));
    };

    Eigen::VectorXd w = A.transpose() * (b - A * r.x);
    while (r.iterations < max_iter) {
        Eigen::Index best = -1;
        double best_w = tol;
        for (Eigen::Index j = 0; j < n; ++j)
            if (!passive[static_cast<std::size_t>(j)] && w(j) > best_w) {
                best_w = w(j);
                best = j;
            }
        if (best < 0) {
            r.converged = true;
            break;
        }
        passive[static_cast<std::size_t>(best)] = true;

        Eigen::VectorXd z;
        for (;;) {
            ++r.iterations;
            solve_passive(z);
            bool feasible = true;
            for (Eigen::Index j = 0; j < n; ++j)
                if (passive[static_cast<std::size_t>(j)] && z(j) <= 0.0) feasible = false;
            if (feasible) break;
            double step = 1.0;
            for (Eigen::Index j = 0; j < n; ++j)
                if (passive[static_cast<std::size_t>(j)] && z(j) <= 0.0)
                    step = std::min(step, r.x(j) / (r.x(j) - z(j)));
            r.x += step * (z - r.x);
            for (Eigen::Index j = 0; j < n; ++j)
                if (passive[static_cast<std::size_t>(j)] && r.x(j) <= tol) {
                    passive[static_cast<std::size_t>(j)] = false;
                    r.x(j) = 0.0;
                }
            if (r.iterations >= max_iter) break;
        }
        r.x = z.cwiseMax(0.0);
        w = A.transpose() * (b - A * r.x);
    }
    r.residual = (A * r.x - b).norm();
    return r;
}

}  // namespace didcap
