// Copyright 2026 the faceanim authors
// SPDX-License-Identifier: Apache-2.0

#include "faceanim/bounded_lsq.hpp"

#include <Eigen/QR>
#include <cmath>
#include <vector>

namespace faceanim {

namespace {

enum class VarState { at_lo, free_var, at_hi };

} // namespace

Eigen::VectorXd bounded_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                      double lo, double hi, double tol) {
    const Eigen::Index n = A.cols();
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, lo);
    if (n == 0) return x;

    std::vector<VarState> state(static_cast<std::size_t>(n), VarState::at_lo);
    const double grad_tol = tol * std::max(1.0, (A.transpose() * b).cwiseAbs().maxCoeff());
    const int max_outer = 50 + 10 * static_cast<int>(n);

    for (int outer = 0; outer < max_outer; ++outer) {
        // KKT check: at the lower bound the gradient of the residual must not
        // point inward (A^T r <= 0), at the upper bound not outward.
        const Eigen::VectorXd grad = A.transpose() * (b - A * x);
        Eigen::Index worst = -1;
        double worst_violation = grad_tol;
        for (Eigen::Index j = 0; j < n; ++j) {
            double violation = 0.0;
            if (state[j] == VarState::at_lo) violation = grad[j];
            else if (state[j] == VarState::at_hi) violation = -grad[j];
            if (violation > worst_violation) {
                worst_violation = violation;
                worst = j;
            }
        }
        if (worst < 0) break;
        state[static_cast<std::size_t>(worst)] = VarState::free_var;

        // Re-solve on the free set, stepping back to the nearest bound
        // whenever the unconstrained minimizer leaves the box.
        for (int inner = 0; inner <= static_cast<int>(n); ++inner) {
            std::vector<Eigen::Index> free_idx;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (state[static_cast<std::size_t>(j)] == VarState::free_var) free_idx.push_back(j);
            }
            if (free_idx.empty()) break;

            Eigen::MatrixXd A_free(A.rows(), static_cast<Eigen::Index>(free_idx.size()));
            for (std::size_t c = 0; c < free_idx.size(); ++c) A_free.col(static_cast<Eigen::Index>(c)) = A.col(free_idx[c]);
            Eigen::VectorXd rhs = b;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (state[static_cast<std::size_t>(j)] != VarState::free_var) rhs -= A.col(j) * x[j];
            }
            const Eigen::VectorXd z = A_free.colPivHouseholderQr().solve(rhs);

            // Largest feasible step from x toward z along the free coordinates.
            double alpha = 1.0;
            Eigen::Index blocking = -1;
            bool blocking_hi = false;
            for (std::size_t c = 0; c < free_idx.size(); ++c) {
                const Eigen::Index j = free_idx[c];
                const double zj = z[static_cast<Eigen::Index>(c)];
                if (zj < lo - 1e-15) {
                    const double a = (lo - x[j]) / (zj - x[j]);
                    if (a < alpha) { alpha = a; blocking = j; blocking_hi = false; }
                } else if (zj > hi + 1e-15) {
                    const double a = (hi - x[j]) / (zj - x[j]);
                    if (a < alpha) { alpha = a; blocking = j; blocking_hi = true; }
                }
            }
            if (blocking < 0) {
                for (std::size_t c = 0; c < free_idx.size(); ++c) {
                    x[free_idx[c]] = std::min(hi, std::max(lo, z[static_cast<Eigen::Index>(c)]));
                }
                break;
            }
            for (std::size_t c = 0; c < free_idx.size(); ++c) {
                const Eigen::Index j = free_idx[c];
                x[j] += alpha * (z[static_cast<Eigen::Index>(c)] - x[j]);
                x[j] = std::min(hi, std::max(lo, x[j]));
            }
            x[blocking] = blocking_hi ? hi : lo;
            state[static_cast<std::size_t>(blocking)] = blocking_hi ? VarState::at_hi : VarState::at_lo;
        }
    }
    return x;
}

} // namespace faceanim
