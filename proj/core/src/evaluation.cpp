// Copyright 2026 the faceanim authors
// SPDX-License-Identifier: Apache-2.0

#include "faceanim/evaluation.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace faceanim::eval {

double displacement_error(const std::vector<VertexFrame>& seq_initial,
                          const std::vector<VertexFrame>& seq_final) {
    if (seq_initial.size() != seq_final.size() || seq_initial.empty()) {
        throw DimensionMismatch("displacement_error: sequences have " +
                                std::to_string(seq_initial.size()) + " and " +
                                std::to_string(seq_final.size()) + " frames");
    }
    const std::size_t V = seq_initial.front().size();
    if (V == 0) throw DimensionMismatch("displacement_error: empty vertex frames");
    double sum = 0.0;
    for (std::size_t t = 0; t < seq_initial.size(); ++t) {
        if (seq_initial[t].size() != V || seq_final[t].size() != V) {
            throw DimensionMismatch("displacement_error: inconsistent vertex counts");
        }
        for (std::size_t v = 0; v < V; ++v) {
            sum += (seq_initial[t][v] - seq_final[t][v]).squaredNorm();
        }
    }
    return std::sqrt(sum / (static_cast<double>(seq_initial.size()) * static_cast<double>(V)));
}

CyclicReport cyclic_retarget(const FrameMapper& map_ab, const FrameMapper& map_ba,
                             const std::vector<FeaturePointFrame>& seq,
                             const FaceRig& rig_a, const std::string& method) {
    CyclicReport report;
    report.method = method;
    report.frame_count = static_cast<long>(seq.size());
    report.vertex_count = rig_a.vertex_count();
    if (seq.empty()) return report;

    std::vector<VertexFrame> initial, final_;
    initial.reserve(seq.size());
    final_.reserve(seq.size());
    double sum = 0.0;
    for (const auto& frame : seq) {
        const FeaturePointFrame round_trip = map_ba(map_ab(frame));
        const Eigen::VectorXd w_initial = solve_blendshape_weights(rig_a, frame);
        const Eigen::VectorXd w_final = solve_blendshape_weights(rig_a, round_trip);
        VertexFrame v_initial = apply_blendshapes(rig_a, w_initial);
        VertexFrame v_final = apply_blendshapes(rig_a, w_final);
        double frame_sum = 0.0;
        for (std::size_t v = 0; v < v_initial.size(); ++v) {
            frame_sum += (v_initial[v] - v_final[v]).squaredNorm();
        }
        sum += frame_sum;
        report.per_frame_errors.push_back(
            std::sqrt(frame_sum / static_cast<double>(v_initial.size())));
        initial.push_back(std::move(v_initial));
        final_.push_back(std::move(v_final));
    }
    report.e_d = std::sqrt(sum / (static_cast<double>(seq.size()) *
                                  static_cast<double>(rig_a.vertex_count())));
    return report;
}

CyclicReport cyclic_retarget(const retarget::RetargetModel& model_ab,
                             const retarget::RetargetModel& model_ba,
                             const std::vector<FeaturePointFrame>& seq,
                             const FaceRig& rig_a, const std::string& method) {
    return cyclic_retarget(
        [&](const FeaturePointFrame& f) { return retarget_frame(model_ab, f); },
        [&](const FeaturePointFrame& f) { return retarget_frame(model_ba, f); },
        seq, rig_a, method);
}

RbfBaseline rbf_baseline_fit(const retarget::CorrespondenceSet& corr, double sigma,
                             bool remove_rotation) {
    // Unlike the regression path, a single training pair is fine here: the
    // interpolant degenerates to a constant predictor.
    if (corr.source_frames.size() != corr.target_frames.size() || corr.source_frames.empty()) {
        throw TooFewPairs("rbf_baseline_fit: needs aligned, nonempty frame lists");
    }
    if (corr.neutral_index < 0 || corr.neutral_index >= corr.pair_count()) {
        throw InvalidConfig("rbf_baseline_fit: neutral index out of range");
    }
    RbfBaseline model;
    const auto& neutral_src = corr.source_frames[static_cast<std::size_t>(corr.neutral_index)];
    const auto& neutral_tgt = corr.target_frames[static_cast<std::size_t>(corr.neutral_index)];
    model.source_normalizer = make_normalizer(neutral_src, remove_rotation);
    model.target_normalizer = make_normalizer(neutral_tgt, remove_rotation);
    model.target_points = static_cast<int>(corr.target_frames.front().points.size());

    model.centers = retarget::frames_to_matrix(model.source_normalizer, corr.source_frames);
    const Eigen::MatrixXd targets =
        retarget::frames_to_matrix(model.target_normalizer, corr.target_frames);

    const bool auto_sigma = !(sigma > 0.0);
    model.sigma = auto_sigma
                      ? kernel::resolve_kernel(kernel::KernelSpec::rbf(0.0), model.centers).sigma
                      : sigma;

    const Eigen::Index n = model.centers.rows();
    Eigen::MatrixXd phi(n, n);
    // With auto width, back off from the median heuristic until the system
    // is well conditioned; clustered centers otherwise make the dense solve
    // useless. Exact duplicates stay singular at every width.
    for (int attempt = 0;; ++attempt) {
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = i; j < n; ++j) {
                const double v =
                    std::exp(-(model.centers.row(i) - model.centers.row(j)).squaredNorm() /
                             (2.0 * model.sigma * model.sigma));
                phi(i, j) = v;
                phi(j, i) = v;
            }
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(phi, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const double smax = svd.singularValues()(0);
        const double smin = svd.singularValues()(svd.singularValues().size() - 1);
        if (smin > 0.0 && smax / smin <= pls::kConditionLimit) {
            model.coefficients = svd.solve(targets);
            return model;
        }
        if (!auto_sigma || attempt >= 60) {
            throw SingularSystem("rbf_baseline_fit: interpolation matrix is singular "
                                 "(duplicate training inputs?)");
        }
        model.sigma *= 0.5;
    }
}

FeaturePointFrame rbf_baseline_predict(const RbfBaseline& model, const FeaturePointFrame& frame) {
    const NormalizedFrame normalized = normalize_frame(model.source_normalizer, frame);
    if (normalized.coords.size() != model.centers.cols()) {
        throw DimensionMismatch("rbf_baseline_predict: dimension mismatch");
    }
    const Eigen::Index n = model.centers.rows();
    if (n == 1) {
        // The 1x1 system degenerates to a constant predictor.
        const Eigen::VectorXd constant = model.coefficients.row(0).transpose();
        return denormalize_frame(model.target_normalizer, constant, frame.time_index);
    }
    Eigen::RowVectorXd phi(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        phi[i] = std::exp(-(model.centers.row(i) - normalized.coords.transpose()).squaredNorm() /
                          (2.0 * model.sigma * model.sigma));
    }
    const Eigen::VectorXd predicted = (phi * model.coefficients).transpose();
    return denormalize_frame(model.target_normalizer, predicted, frame.time_index);
}

double improvement_percent(double e_base, double e_ours) {
    if (e_base == 0.0) {
        throw DivisionByZero("improvement_percent: baseline error is zero");
    }
    return 100.0 * (e_base - e_ours) / e_base;
}

int select_components_loo(const retarget::CorrespondenceSet& corr,
                          const kernel::KernelSpec& spec, int p_max, bool remove_rotation) {
    corr.validate();
    const int n = corr.pair_count();
    if (n < 3) {
        throw TooFewPairs("leave-one-out selection needs at least 3 pairs, has " +
                          std::to_string(n));
    }
    const auto& neutral_src = corr.source_frames[static_cast<std::size_t>(corr.neutral_index)];
    const auto& neutral_tgt = corr.target_frames[static_cast<std::size_t>(corr.neutral_index)];
    const Normalizer src_norm = make_normalizer(neutral_src, remove_rotation);
    const Normalizer tgt_norm = make_normalizer(neutral_tgt, remove_rotation);
    const Eigen::MatrixXd S = retarget::frames_to_matrix(src_norm, corr.source_frames);
    const Eigen::MatrixXd T = retarget::frames_to_matrix(tgt_norm, corr.target_frames);
    const kernel::KernelSpec resolved = kernel::resolve_kernel(spec, S);

    p_max = std::min(p_max, n - 1);
    int best_p = 1;
    double best_err = std::numeric_limits<double>::infinity();
    for (int p = 1; p <= p_max; ++p) {
        double total = 0.0;
        int count = 0;
        for (int leave = 0; leave < n; ++leave) {
            Eigen::MatrixXd S_train(n - 1, S.cols());
            Eigen::MatrixXd T_train(n - 1, T.cols());
            Eigen::Index r = 0;
            for (int i = 0; i < n; ++i) {
                if (i == leave) continue;
                S_train.row(r) = S.row(i);
                T_train.row(r) = T.row(i);
                ++r;
            }
            try {
                const auto model = kernel::fit_kpls(resolved, S_train, T_train, p);
                const Eigen::VectorXd pred = kernel::predict_kpls(model, S.row(leave));
                total += (pred - T.row(leave).transpose()).norm();
                ++count;
            } catch (const Error&) {
                // A degenerate or singular fold counts as a miss for this p.
                total += std::numeric_limits<double>::infinity();
                ++count;
            }
        }
        const double mean_err = total / static_cast<double>(count);
        // Strict improvement beyond roundoff keeps ties at the smaller p.
        if (mean_err < best_err - 1e-12) {
            best_err = mean_err;
            best_p = p;
        }
    }
    return best_p;
}

} // namespace faceanim::eval
