// Copyright 2026 the faceanim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

namespace faceanim {

/// Minimizes ||A x - b||^2 subject to lo <= x_j <= hi, by an active-set
/// method in the style of BVLS. Deterministic; terminates at a KKT point
/// within the given tolerance.
Eigen::VectorXd bounded_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                      double lo = 0.0, double hi = 1.0,
                                      double tol = 1e-8);

} // namespace faceanim
