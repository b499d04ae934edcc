// Copyright 2026 the faceanim authors
// SPDX-License-Identifier: Apache-2.0

#include "faceanim/retarget.hpp"

#include <algorithm>

namespace faceanim::retarget {

void CorrespondenceSet::validate() const {
    if (source_frames.size() != target_frames.size()) {
        throw DimensionMismatch("correspondence set has " + std::to_string(source_frames.size()) +
                                " source frames and " + std::to_string(target_frames.size()) +
                                " target frames");
    }
    if (pair_count() < 2) {
        throw TooFewPairs("correspondence set needs at least 2 pairs, has " +
                          std::to_string(pair_count()));
    }
    if (neutral_index < 0 || neutral_index >= pair_count()) {
        throw InvalidConfig("neutral index " + std::to_string(neutral_index) + " out of range");
    }
    const std::size_t ls = source_frames.front().points.size();
    const std::size_t lt = target_frames.front().points.size();
    for (const auto& f : source_frames) {
        if (f.points.size() != ls) {
            throw DimensionMismatch("inconsistent source feature point count");
        }
    }
    for (const auto& f : target_frames) {
        if (f.points.size() != lt) {
            throw DimensionMismatch("inconsistent target feature point count");
        }
    }
}

CorrespondenceSet CorrespondenceSet::reversed() const {
    CorrespondenceSet rev;
    rev.source_frames = target_frames;
    rev.target_frames = source_frames;
    rev.neutral_index = neutral_index;
    return rev;
}

pls::SampleMatrix frames_to_matrix(const Normalizer& norm,
                                   const std::vector<FeaturePointFrame>& frames) {
    if (frames.empty()) return pls::SampleMatrix(0, 0);
    const Eigen::Index dim = 3 * static_cast<Eigen::Index>(frames.front().points.size());
    pls::SampleMatrix M(static_cast<Eigen::Index>(frames.size()), dim);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        M.row(static_cast<Eigen::Index>(i)) = normalize_frame(norm, frames[i]).coords;
    }
    return M;
}

RetargetModel train_retargeter(const CorrespondenceSet& corr, const kernel::KernelSpec& spec,
                               const TrainOptions& options) {
    corr.validate();
    const int n = corr.pair_count();

    RetargetModel model;
    model.source_points = static_cast<int>(corr.source_frames.front().points.size());
    model.target_points = static_cast<int>(corr.target_frames.front().points.size());
    const auto& neutral_src = corr.source_frames[static_cast<std::size_t>(corr.neutral_index)];
    const auto& neutral_tgt = corr.target_frames[static_cast<std::size_t>(corr.neutral_index)];
    model.source_normalizer = make_normalizer(neutral_src, options.remove_rotation);
    model.target_normalizer = make_normalizer(neutral_tgt, options.remove_rotation);

    const pls::SampleMatrix S = frames_to_matrix(model.source_normalizer, corr.source_frames);
    const pls::SampleMatrix T = frames_to_matrix(model.target_normalizer, corr.target_frames);

    int p = options.components;
    if (p <= 0) p = std::min(n - 1, 10);
    p = std::min(p, n);

    model.regressor = kernel::fit_kpls(spec, S, T, p);
    return model;
}

FeaturePointFrame retarget_frame(const RetargetModel& model, const FeaturePointFrame& frame) {
    if (static_cast<int>(frame.points.size()) != model.source_points) {
        throw DimensionMismatch("retarget_frame: frame has " + std::to_string(frame.points.size()) +
                                " points, model expects " + std::to_string(model.source_points));
    }
    const NormalizedFrame normalized = normalize_frame(model.source_normalizer, frame);
    const Eigen::VectorXd predicted = kernel::predict_kpls(model.regressor, normalized.coords);
    return denormalize_frame(model.target_normalizer, predicted, frame.time_index);
}

std::vector<FeaturePointFrame> retarget_sequence(const RetargetModel& model,
                                                 const std::vector<FeaturePointFrame>& seq) {
    std::vector<FeaturePointFrame> out;
    out.reserve(seq.size());
    for (const auto& frame : seq) {
        out.push_back(retarget_frame(model, frame));
    }
    return out;
}

} // namespace faceanim::retarget
