// Copyright 2026 the faceanim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "faceanim/retarget.hpp"
#include "faceanim/rig.hpp"

namespace faceanim::eval {

/// Generator configuration for a seeded pair of rigs plus training
/// correspondences. Defaults mirror a man-sized and a baby-sized rig.
struct SyntheticConfig {
    int vertices_a = 2904;
    int blendshapes_a = 48;
    int feature_points_a = 45;
    int vertices_b = 1969;
    int blendshapes_b = 44;
    int feature_points_b = 37;
    int pairs = 60;              // correspondence pairs N
    int test_frames = 100;       // held-out source sequence length
    double nonlinearity = 0.25;  // amplitude of the sinusoidal warp; 0 = exactly affine
    double noise = 0.0;          // capture jitter: Gaussian std added to every
                                 // correspondence feature point, in mesh units

    void validate() const;
};

/// The generator's smooth map between the two rigs' weight spaces:
/// phi(w) = base + M w + nonlinearity * 0.04 * (sin(2 pi (F w + phase)) - sin(2 pi phase)).
/// Bounded so that every produced weight stays inside [0, 1].
struct GroundTruthMap {
    Eigen::MatrixXd linear;     // B_b x B_a, nonnegative, rows bounded in l1 norm
    Eigen::VectorXd base;
    double nonlinearity = 0.0;
    Eigen::MatrixXd warp_freq;  // B_b x B_a
    Eigen::VectorXd warp_phase;

    Eigen::VectorXd apply(const Eigen::VectorXd& w) const;
};

struct SyntheticWorld {
    FaceRig rig_a;
    FaceRig rig_b;
    retarget::CorrespondenceSet corr;
    GroundTruthMap ground_truth;
    std::vector<FeaturePointFrame> test_sequence;       // held-out source frames (rig_a)
    std::vector<Eigen::VectorXd> test_weights;          // the rig_a weights behind them
    std::uint64_t seed = 0;

    /// Bounding-box diagonal of rig_a's neutral mesh, the natural length
    /// scale for error thresholds.
    double bounding_box_diagonal() const;
};

SyntheticWorld gen_synthetic_world(const SyntheticConfig& config, std::uint64_t seed);

} // namespace faceanim::eval
