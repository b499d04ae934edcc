// Copyright 2026 the faceanim authors
// SPDX-License-Identifier: Apache-2.0

#include "faceanim/pls.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace faceanim::pls {

namespace {

void check_row_counts(const SampleMatrix& S, const SampleMatrix& T) {
    if (S.rows() != T.rows()) {
        throw DimensionMismatch("row counts differ: S has " + std::to_string(S.rows()) +
                                ", T has " + std::to_string(T.rows()));
    }
}

// Fixes the sign so the first component with non-negligible magnitude is
// positive. Applied to (w, c) pairs jointly so the covariance stays put.
int sign_of_first_nonzero(const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > 1e-12) return v[i] > 0.0 ? 1 : -1;
    }
    return 1;
}

Eigen::VectorXd deterministic_start(Eigen::Index dim) {
    return Eigen::VectorXd::Ones(dim) / std::sqrt(static_cast<double>(dim));
}

} // namespace

WeightPair max_cov_weights(const SampleMatrix& S, const SampleMatrix& T) {
    check_row_counts(S, T);
    const double s_norm = S.norm();
    const double t_norm = T.norm();
    if (!(s_norm > 0.0) || !(t_norm > 0.0)) {
        throw DegenerateInput("max_cov_weights: input matrix is numerically zero");
    }

    const Eigen::MatrixXd cross = S.transpose() * T;  // d_s x d_t
    if (cross.norm() <= 1e-15 * s_norm * t_norm) {
        throw DegenerateInput("max_cov_weights: cross-covariance is numerically zero");
    }

    // Power iteration on S^T T T^T S; the matrix is symmetric PSD so the
    // iteration is monotone and sign-stable.
    Eigen::VectorXd w = deterministic_start(S.cols());
    Eigen::VectorXd next = cross * (cross.transpose() * w);
    if (next.norm() == 0.0) {
        w = Eigen::VectorXd::Zero(S.cols());
        w[0] = 1.0;
    }
    for (int iter = 0; iter < kPowerIterMax; ++iter) {
        next = cross * (cross.transpose() * w);
        const double norm = next.norm();
        if (norm == 0.0) {
            throw DegenerateInput("max_cov_weights: start vector lies in the null space");
        }
        next /= norm;
        const double delta = (next - w).norm();
        w = next;
        if (delta < kPowerIterTol) break;
    }

    Eigen::VectorXd c = cross.transpose() * w;
    const double c_norm = c.norm();
    if (c_norm == 0.0) {
        throw DegenerateInput("max_cov_weights: target direction vanished");
    }
    c /= c_norm;

    const int sign = sign_of_first_nonzero(w);
    w *= sign;
    c *= sign;
    return {w, c};
}

ScorePair latent_scores(const SampleMatrix& S, const SampleMatrix& T,
                        const Eigen::VectorXd& w, const Eigen::VectorXd& c) {
    check_row_counts(S, T);
    if (S.cols() != w.size()) {
        throw DimensionMismatch("latent_scores: w has length " + std::to_string(w.size()) +
                                ", S has " + std::to_string(S.cols()) + " columns");
    }
    if (T.cols() != c.size()) {
        throw DimensionMismatch("latent_scores: c has length " + std::to_string(c.size()) +
                                ", T has " + std::to_string(T.cols()) + " columns");
    }
    return {S * w, T * c};
}

std::pair<SampleMatrix, SampleMatrix> deflate(const SampleMatrix& S, const SampleMatrix& T,
                                              const Eigen::VectorXd& g) {
    check_row_counts(S, T);
    if (g.size() != S.rows()) {
        throw DimensionMismatch("deflate: g has length " + std::to_string(g.size()) +
                                ", matrices have " + std::to_string(S.rows()) + " rows");
    }
    const double g_norm = g.norm();
    if (!(g_norm > 1e-300)) {
        throw ZeroLatentVector("deflate: latent vector has zero norm");
    }
    const Eigen::VectorXd d = g / g_norm;
    SampleMatrix S_next = S - d * (d.transpose() * S);
    SampleMatrix T_next = T - d * (d.transpose() * T);
    return {std::move(S_next), std::move(T_next)};
}

PlsModel fit_pls(const SampleMatrix& S, const SampleMatrix& T, int p, bool scale_columns) {
    check_row_counts(S, T);
    const Eigen::Index n = S.rows();
    if (p < 1 || p > n) {
        throw DimensionMismatch("fit_pls: component count " + std::to_string(p) +
                                " outside [1, " + std::to_string(n) + "]");
    }

    PlsModel model;
    model.source_mean = S.colwise().mean();
    model.target_mean = T.colwise().mean();
    model.source_scale = Eigen::VectorXd::Ones(S.cols());
    model.target_scale = Eigen::VectorXd::Ones(T.cols());
    Eigen::MatrixXd Sc = S.rowwise() - model.source_mean.transpose();
    Eigen::MatrixXd Tc = T.rowwise() - model.target_mean.transpose();
    if (scale_columns) {
        for (Eigen::Index j = 0; j < Sc.cols(); ++j) {
            const double s = Sc.col(j).norm();
            if (s > 0.0) {
                model.source_scale[j] = s;
                Sc.col(j) /= s;
            }
        }
        for (Eigen::Index j = 0; j < Tc.cols(); ++j) {
            const double s = Tc.col(j).norm();
            if (s > 0.0) {
                model.target_scale[j] = s;
                Tc.col(j) /= s;
            }
        }
    }
    model.S0 = Sc;
    model.T0 = Tc;

    const double s0_fnorm = Sc.norm();
    if (!(s0_fnorm > 0.0) || !(Tc.norm() > 0.0)) {
        throw DegenerateInput("fit_pls: centered training matrix is numerically zero");
    }

    std::vector<Eigen::VectorXd> g_cols, u_cols, w_cols, c_cols, d_cols;
    Eigen::MatrixXd S_work = Sc;
    Eigen::MatrixXd T_work = Tc;
    for (int k = 0; k < p; ++k) {
        WeightPair weights;
        try {
            weights = max_cov_weights(S_work, T_work);
        } catch (const DegenerateInput&) {
            if (k == 0) throw;
            break;
        }
        ScorePair scores = latent_scores(S_work, T_work, weights.w, weights.c);
        const double g_norm = scores.g.norm();
        if (g_norm < kEarlyStopRel * s0_fnorm) {
            if (k == 0) {
                throw DegenerateInput("fit_pls: first latent score is degenerate");
            }
            break;
        }
        g_cols.push_back(scores.g);
        u_cols.push_back(scores.u);
        w_cols.push_back(weights.w);
        c_cols.push_back(weights.c);
        d_cols.push_back(scores.g / g_norm);
        auto deflated = deflate(S_work, T_work, scores.g);
        S_work = std::move(deflated.first);
        T_work = std::move(deflated.second);
    }

    const int k = static_cast<int>(g_cols.size());
    model.components = k;
    model.G.resize(n, k);
    model.U.resize(n, k);
    model.W.resize(Sc.cols(), k);
    model.C.resize(Tc.cols(), k);
    model.deflation_dirs.resize(n, k);
    for (int j = 0; j < k; ++j) {
        model.G.col(j) = g_cols[j];
        model.U.col(j) = u_cols[j];
        model.W.col(j) = w_cols[j];
        model.C.col(j) = c_cols[j];
        model.deflation_dirs.col(j) = d_cols[j];
    }

    // Closed form t* = T0^T G (U^T S0 S0^T G)^{-1} U^T S0 s*, precomposed
    // into a single d_t x d_s map.
    const Eigen::MatrixXd inner = model.U.transpose() * Sc * Sc.transpose() * model.G;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(inner, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (!(smin > 0.0) || smax / smin > kConditionLimit) {
        model.singular = true;
    } else {
        const Eigen::MatrixXd inner_inv_ut = svd.solve(model.U.transpose() * Sc);
        model.coefficients = Tc.transpose() * model.G * inner_inv_ut;
    }
    return model;
}

Eigen::VectorXd predict_pls(const PlsModel& model, const Eigen::VectorXd& s_star) {
    if (s_star.size() != model.S0.cols()) {
        throw DimensionMismatch("predict_pls: input has length " + std::to_string(s_star.size()) +
                                ", model expects " + std::to_string(model.S0.cols()));
    }
    if (model.singular) {
        throw SingularSystem("predict_pls: inner system is numerically singular; "
                             "reduce the component count");
    }
    const Eigen::VectorXd centered =
        (s_star - model.source_mean).cwiseQuotient(model.source_scale);
    Eigen::VectorXd out = model.coefficients * centered;
    return out.cwiseProduct(model.target_scale) + model.target_mean;
}

} // namespace faceanim::pls
