// Copyright 2026 the faceanim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "faceanim/frame.hpp"
#include "faceanim/kernel.hpp"

namespace faceanim::retarget {

/// Aligned (source expression, target expression) pairs; the pair at
/// neutral_index is the designated neutral.
struct CorrespondenceSet {
    std::vector<FeaturePointFrame> source_frames;
    std::vector<FeaturePointFrame> target_frames;
    int neutral_index = 0;

    int pair_count() const { return static_cast<int>(source_frames.size()); }
    void validate() const;

    CorrespondenceSet reversed() const;
};

struct TrainOptions {
    int components = 0;           // 0 = min(n - 1, 10)
    bool remove_rotation = true;  // Procrustes alignment during normalization
};

struct RetargetModel {
    Normalizer source_normalizer;
    Normalizer target_normalizer;
    kernel::KplsModel regressor;
    int source_points = 0;  // L_s
    int target_points = 0;  // L_t
};

/// Builds normalized training matrices S (N x 3L_s), T (N x 3L_t) from the
/// correspondences and fits a KPLS regressor.
RetargetModel train_retargeter(const CorrespondenceSet& corr, const kernel::KernelSpec& spec,
                               const TrainOptions& options = {});

/// Assembles the (N x 3L) matrix of normalized frames. Shared with the
/// evaluation harness.
pls::SampleMatrix frames_to_matrix(const Normalizer& norm,
                                   const std::vector<FeaturePointFrame>& frames);

FeaturePointFrame retarget_frame(const RetargetModel& model, const FeaturePointFrame& frame);

std::vector<FeaturePointFrame> retarget_sequence(const RetargetModel& model,
                                                 const std::vector<FeaturePointFrame>& seq);

} // namespace faceanim::retarget
