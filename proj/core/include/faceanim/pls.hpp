// Copyright 2026 the faceanim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "faceanim/errors.hpp"

namespace faceanim::pls {

/// Rows are examples, columns are (normalized) feature coordinates.
using SampleMatrix = Eigen::MatrixXd;

// NIPALS constants, shared with the kernelized variant.
inline constexpr double kPowerIterTol = 1e-12;
inline constexpr int kPowerIterMax = 500;
inline constexpr double kEarlyStopRel = 1e-10;   // stop when ||g|| < rel * ||S0||_F
inline constexpr double kConditionLimit = 1e12;  // inner p-by-p system

struct WeightPair {
    Eigen::VectorXd w;  // source weights, unit norm
    Eigen::VectorXd c;  // target weights, unit norm
};

struct ScorePair {
    Eigen::VectorXd g;  // source latent scores, one per example
    Eigen::VectorXd u;  // target latent scores
};

/// Fitted linear partial-least-squares regressor.
///
/// Immutable after fitting; safe to share across threads for prediction.
struct PlsModel {
    int components = 0;               // k <= requested p
    Eigen::MatrixXd G;                // n x k source scores
    Eigen::MatrixXd U;                // n x k target scores
    Eigen::MatrixXd W;                // d_s x k unit source weight columns
    Eigen::MatrixXd C;                // d_t x k unit target weight columns
    Eigen::MatrixXd deflation_dirs;   // n x k unit directions d = g/||g||
    Eigen::MatrixXd S0;               // centered training sources
    Eigen::MatrixXd T0;               // centered training targets
    Eigen::VectorXd source_mean;
    Eigen::VectorXd target_mean;
    Eigen::VectorXd source_scale;     // all-ones unless column scaling was requested
    Eigen::VectorXd target_scale;
    Eigen::MatrixXd coefficients;     // d_t x d_s closed-form map; empty if singular
    bool singular = false;            // inner system exceeded the condition limit

    int input_dim() const { return static_cast<int>(S0.cols()); }
    int output_dim() const { return static_cast<int>(T0.cols()); }
};

/// Maximal-squared-covariance weight directions: w is the dominant
/// eigenvector of S^T T T^T S, c the matching target direction.
/// Sign is fixed so the first nonzero component of w is positive.
WeightPair max_cov_weights(const SampleMatrix& S, const SampleMatrix& T);

/// g = S w, u = T c.
ScorePair latent_scores(const SampleMatrix& S, const SampleMatrix& T,
                        const Eigen::VectorXd& w, const Eigen::VectorXd& c);

/// Removes the rank-1 contribution along d = g/||g|| from both matrices:
/// S' = S - d d^T S, T' = T - d d^T T.
std::pair<SampleMatrix, SampleMatrix> deflate(const SampleMatrix& S,
                                              const SampleMatrix& T,
                                              const Eigen::VectorXd& g);

/// NIPALS fit with up to p components. Stops early on a degenerate
/// component and keeps what was extracted so far.
PlsModel fit_pls(const SampleMatrix& S, const SampleMatrix& T, int p,
                 bool scale_columns = false);

/// Closed-form prediction through the retained training matrices.
Eigen::VectorXd predict_pls(const PlsModel& model, const Eigen::VectorXd& s_star);

} // namespace faceanim::pls
