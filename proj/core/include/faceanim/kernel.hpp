// Copyright 2026 the faceanim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <string>

#include "faceanim/errors.hpp"
#include "faceanim/pls.hpp"

namespace faceanim::kernel {

using pls::SampleMatrix;

enum class KernelKind { linear, rbf, polynomial };

struct KernelSpec {
    KernelKind kind = KernelKind::rbf;
    double sigma = 0.0;   // rbf width; 0 means "median heuristic", resolved before fitting
    int degree = 2;       // polynomial
    double offset = 0.0;  // polynomial

    static KernelSpec linear() { return {KernelKind::linear, 0.0, 0, 0.0}; }
    static KernelSpec rbf(double sigma = 0.0) { return {KernelKind::rbf, sigma, 0, 0.0}; }
    static KernelSpec polynomial(int degree, double offset = 0.0) {
        return {KernelKind::polynomial, 0.0, degree, offset};
    }
};

std::string kernel_name(KernelKind kind);
KernelKind kernel_kind_from_name(const std::string& name);

/// Replaces sigma == 0 on an rbf spec with the median pairwise distance
/// between training rows.
KernelSpec resolve_kernel(const KernelSpec& spec, const SampleMatrix& X);

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y);

/// Double-centered Gram matrix plus the statistics needed to center
/// kernel evaluations against new inputs.
struct GramMatrix {
    Eigen::MatrixXd values;    // n x n, double-centered
    Eigen::VectorXd row_means; // row means of the uncentered matrix
    double grand_mean = 0.0;   // grand mean of the uncentered matrix
};

GramMatrix gram(const KernelSpec& spec, const SampleMatrix& X);

/// Centers a raw kernel-evaluation vector k(s*, x_i) consistently with
/// the training-time double centering.
Eigen::VectorXd center_kernel_vector(const GramMatrix& K, const Eigen::VectorXd& k);

/// Conjugation by the projector (I - d d^T); d must be unit length.
GramMatrix deflate_gram(const GramMatrix& K, const Eigen::VectorXd& d);

/// Fitted kernel PLS regressor. Immutable; concurrent prediction is safe.
struct KplsModel {
    KernelSpec spec;                  // resolved (concrete sigma)
    SampleMatrix training_inputs;     // raw source rows, for kernel evaluations
    Eigen::MatrixXd T0;               // centered training targets
    Eigen::MatrixXd G;                // n x k source scores (unit columns)
    Eigen::MatrixXd U;                // n x k target scores
    Eigen::MatrixXd K0;               // original centered Gram matrix
    Eigen::VectorXd gram_row_means;   // centering statistics of the uncentered Gram
    double gram_grand_mean = 0.0;
    Eigen::VectorXd target_mean;
    int components = 0;
    Eigen::MatrixXd dual_coefficients; // d_t x n: T0^T G (U^T K0 G)^{-1} U^T; empty if singular
    bool singular = false;

    int input_dim() const { return static_cast<int>(training_inputs.cols()); }
    int output_dim() const { return static_cast<int>(T0.cols()); }
    int sample_count() const { return static_cast<int>(training_inputs.rows()); }
};

KplsModel fit_kpls(const KernelSpec& spec, const SampleMatrix& S,
                   const SampleMatrix& T, int p);

/// Recomputes dual_coefficients (and the singular flag) from the stored
/// score and Gram matrices, e.g. after deserialization.
void finalize_kpls(KplsModel& model);

Eigen::VectorXd predict_kpls(const KplsModel& model, const Eigen::VectorXd& s_star);

} // namespace faceanim::kernel
