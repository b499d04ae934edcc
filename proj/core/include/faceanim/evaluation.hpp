// Copyright 2026 the faceanim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "faceanim/retarget.hpp"
#include "faceanim/rig.hpp"

namespace faceanim::eval {

using VertexFrame = std::vector<Eigen::Vector3d>;

/// Root-mean-square per-vertex displacement between two vertex-animation
/// sequences, plus the per-frame breakdown.
struct CyclicReport {
    double e_d = 0.0;
    std::vector<double> per_frame_errors;
    long frame_count = 0;
    long vertex_count = 0;
    std::string method;
};

double displacement_error(const std::vector<VertexFrame>& seq_initial,
                          const std::vector<VertexFrame>& seq_final);

using FrameMapper = std::function<FeaturePointFrame(const FeaturePointFrame&)>;

/// Cyclic protocol: retarget the sequence A -> B -> A, reconstruct full
/// vertex animations on rig_a for both the original and the round-tripped
/// feature points (blendshape solve + evaluation), and score with the
/// displacement error over all rig vertices.
CyclicReport cyclic_retarget(const FrameMapper& map_ab, const FrameMapper& map_ba,
                             const std::vector<FeaturePointFrame>& seq,
                             const FaceRig& rig_a, const std::string& method = "");

CyclicReport cyclic_retarget(const retarget::RetargetModel& model_ab,
                             const retarget::RetargetModel& model_ba,
                             const std::vector<FeaturePointFrame>& seq,
                             const FaceRig& rig_a, const std::string& method = "");

/// Gaussian scattered-data interpolation baseline: one RBF interpolant per
/// output coordinate, centers at the training source vectors.
struct RbfBaseline {
    Normalizer source_normalizer;
    Normalizer target_normalizer;
    Eigen::MatrixXd centers;       // N x 3L_s normalized source vectors
    Eigen::MatrixXd coefficients;  // N x 3L_t interpolation weights
    double sigma = 1.0;
    int target_points = 0;
};

RbfBaseline rbf_baseline_fit(const retarget::CorrespondenceSet& corr, double sigma = 0.0,
                             bool remove_rotation = true);

FeaturePointFrame rbf_baseline_predict(const RbfBaseline& model, const FeaturePointFrame& frame);

/// 100 * (e_base - e_ours) / e_base.
double improvement_percent(double e_base, double e_ours);

/// Leave-one-out selection of the component count, ties broken toward
/// smaller p.
int select_components_loo(const retarget::CorrespondenceSet& corr,
                          const kernel::KernelSpec& spec, int p_max,
                          bool remove_rotation = true);

} // namespace faceanim::eval
