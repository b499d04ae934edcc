// Copyright 2026 the faceanim authors
// SPDX-License-Identifier: Apache-2.0

#include "faceanim/kernel.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <vector>

namespace faceanim::kernel {

namespace {

void check_spec(const KernelSpec& spec) {
    if (spec.kind == KernelKind::rbf && !(spec.sigma > 0.0)) {
        throw InvalidConfig("rbf kernel requires sigma > 0 (or sigma = 0 resolved "
                            "via the median heuristic before fitting)");
    }
    if (spec.kind == KernelKind::polynomial && spec.degree < 1) {
        throw InvalidConfig("polynomial kernel requires degree >= 1");
    }
}

int sign_of_first_nonzero(const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > 1e-12) return v[i] > 0.0 ? 1 : -1;
    }
    return 1;
}

} // namespace

std::string kernel_name(KernelKind kind) {
    switch (kind) {
        case KernelKind::linear: return "linear";
        case KernelKind::rbf: return "rbf";
        case KernelKind::polynomial: return "polynomial";
    }
    return "unknown";
}

KernelKind kernel_kind_from_name(const std::string& name) {
    if (name == "linear") return KernelKind::linear;
    if (name == "rbf") return KernelKind::rbf;
    if (name == "polynomial") return KernelKind::polynomial;
    throw InvalidConfig("unknown kernel kind: " + name);
}

KernelSpec resolve_kernel(const KernelSpec& spec, const SampleMatrix& X) {
    if (spec.kind != KernelKind::rbf || spec.sigma > 0.0) return spec;
    const Eigen::Index n = X.rows();
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            dists.push_back((X.row(i) - X.row(j)).norm());
        }
    }
    KernelSpec resolved = spec;
    if (dists.empty()) {
        resolved.sigma = 1.0;
        return resolved;
    }
    const auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
    std::nth_element(dists.begin(), mid, dists.end());
    resolved.sigma = (*mid > 0.0) ? *mid : 1.0;
    return resolved;
}

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (x.size() != y.size()) {
        throw DimensionMismatch("kernel_eval: vectors have lengths " + std::to_string(x.size()) +
                                " and " + std::to_string(y.size()));
    }
    check_spec(spec);
    switch (spec.kind) {
        case KernelKind::linear:
            return x.dot(y);
        case KernelKind::rbf:
            return std::exp(-(x - y).squaredNorm() / (2.0 * spec.sigma * spec.sigma));
        case KernelKind::polynomial:
            return std::pow(x.dot(y) + spec.offset, spec.degree);
    }
    throw InvalidConfig("kernel_eval: unhandled kernel kind");
}

GramMatrix gram(const KernelSpec& spec, const SampleMatrix& X) {
    check_spec(spec);
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double v = kernel_eval(spec, X.row(i), X.row(j));
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    GramMatrix result;
    result.row_means = K.rowwise().mean();
    result.grand_mean = result.row_means.mean();
    result.values = K;
    result.values.colwise() -= result.row_means;
    result.values.rowwise() -= result.row_means.transpose();
    result.values.array() += result.grand_mean;
    return result;
}

Eigen::VectorXd center_kernel_vector(const GramMatrix& K, const Eigen::VectorXd& k) {
    if (k.size() != K.row_means.size()) {
        throw DimensionMismatch("center_kernel_vector: length mismatch");
    }
    const double k_mean = k.mean();
    return k - K.row_means - Eigen::VectorXd::Constant(k.size(), k_mean - K.grand_mean);
}

GramMatrix deflate_gram(const GramMatrix& K, const Eigen::VectorXd& d) {
    if (d.size() != K.values.rows()) {
        throw DimensionMismatch("deflate_gram: direction length mismatch");
    }
    if (std::abs(d.norm() - 1.0) > 1e-10) {
        throw NotUnitVector("deflate_gram: deflation direction must have unit norm");
    }
    GramMatrix result = K;
    const Eigen::VectorXd a = K.values * d;  // = K^T d too, K symmetric
    const double s = d.dot(a);
    result.values.noalias() -= d * a.transpose();
    result.values.noalias() -= a * d.transpose();
    result.values.noalias() += (s * d) * d.transpose();
    return result;
}

KplsModel fit_kpls(const KernelSpec& spec, const SampleMatrix& S, const SampleMatrix& T, int p) {
    if (S.rows() != T.rows()) {
        throw DimensionMismatch("fit_kpls: S has " + std::to_string(S.rows()) +
                                " rows, T has " + std::to_string(T.rows()));
    }
    const Eigen::Index n = S.rows();
    if (p < 1 || p > n) {
        throw DimensionMismatch("fit_kpls: component count " + std::to_string(p) +
                                " outside [1, " + std::to_string(n) + "]");
    }

    KplsModel model;
    model.spec = resolve_kernel(spec, S);
    model.training_inputs = S;
    model.target_mean = T.colwise().mean();
    Eigen::MatrixXd Tc = T.rowwise() - model.target_mean.transpose();
    if (!(Tc.norm() > 0.0)) {
        throw DegenerateInput("fit_kpls: centered target matrix is numerically zero");
    }

    GramMatrix K0 = gram(model.spec, S);
    if (!(K0.values.norm() > 0.0)) {
        throw DegenerateInput("fit_kpls: centered Gram matrix is numerically zero");
    }
    model.K0 = K0.values;
    model.gram_row_means = K0.row_means;
    model.gram_grand_mean = K0.grand_mean;
    model.T0 = Tc;

    const double k0_fnorm = K0.values.norm();
    const double t0_fnorm = Tc.norm();

    Eigen::MatrixXd K_work = K0.values;
    Eigen::MatrixXd T_work = Tc;
    std::vector<Eigen::VectorXd> g_cols, u_cols;
    for (int k = 0; k < p; ++k) {
        const Eigen::MatrixXd KT = K_work * T_work;  // n x d_t
        if (KT.norm() <= 1e-12 * k0_fnorm * t0_fnorm) {
            if (k == 0) throw DegenerateInput("fit_kpls: no covariance left to extract");
            break;
        }
        // Dominant eigenvector of K T T^T by power iteration; eigenvalues
        // are real and nonnegative (similar to a symmetric PSD matrix).
        Eigen::VectorXd g =
            Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
        if ((KT * (T_work.transpose() * g)).norm() == 0.0) {
            g.setZero();
            g[0] = 1.0;
        }
        for (int iter = 0; iter < pls::kPowerIterMax; ++iter) {
            Eigen::VectorXd next = KT * (T_work.transpose() * g);
            const double norm = next.norm();
            if (norm == 0.0) break;
            next /= norm;
            const double delta = (next - g).norm();
            g = next;
            if (delta < pls::kPowerIterTol) break;
        }
        g *= sign_of_first_nonzero(g);

        Eigen::VectorXd c = T_work.transpose() * g;
        const double c_norm = c.norm();
        if (c_norm == 0.0) {
            if (k == 0) throw DegenerateInput("fit_kpls: target direction vanished");
            break;
        }
        c /= c_norm;
        g_cols.push_back(g);
        u_cols.push_back(T_work * c);

        // Deflation: K <- (I - g g^T) K (I - g g^T), T <- T - g g^T T.
        const Eigen::VectorXd a = K_work * g;
        const double s = g.dot(a);
        K_work.noalias() -= g * a.transpose();
        K_work.noalias() -= a * g.transpose();
        K_work.noalias() += (s * g) * g.transpose();
        T_work.noalias() -= g * (g.transpose() * T_work);
    }

    const int k = static_cast<int>(g_cols.size());
    model.components = k;
    model.G.resize(n, k);
    model.U.resize(n, k);
    for (int j = 0; j < k; ++j) {
        model.G.col(j) = g_cols[j];
        model.U.col(j) = u_cols[j];
    }

    finalize_kpls(model);
    return model;
}

void finalize_kpls(KplsModel& model) {
    const Eigen::MatrixXd inner = model.U.transpose() * model.K0 * model.G;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(inner, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (!(smin > 0.0) || smax / smin > pls::kConditionLimit) {
        model.singular = true;
        model.dual_coefficients.resize(0, 0);
    } else {
        model.singular = false;
        model.dual_coefficients =
            model.T0.transpose() * model.G * svd.solve(model.U.transpose());
    }
}

Eigen::VectorXd predict_kpls(const KplsModel& model, const Eigen::VectorXd& s_star) {
    if (s_star.size() != model.training_inputs.cols()) {
        throw DimensionMismatch("predict_kpls: input has length " + std::to_string(s_star.size()) +
                                ", model expects " +
                                std::to_string(model.training_inputs.cols()));
    }
    if (model.singular) {
        throw SingularSystem("predict_kpls: inner system is numerically singular; "
                             "reduce the component count");
    }
    const Eigen::Index n = model.training_inputs.rows();
    Eigen::VectorXd k(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k[i] = kernel_eval(model.spec, model.training_inputs.row(i), s_star);
    }
    const double k_mean = k.mean();
    const Eigen::VectorXd centered =
        k - model.gram_row_means -
        Eigen::VectorXd::Constant(n, k_mean - model.gram_grand_mean);
    return model.dual_coefficients * centered + model.target_mean;
}

} // namespace faceanim::kernel
