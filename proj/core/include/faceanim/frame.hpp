// Copyright 2026 the faceanim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "faceanim/errors.hpp"

namespace faceanim {

/// One animation frame: an ordered list of 3D feature-point positions.
struct FeaturePointFrame {
    std::vector<Eigen::Vector3d> points;
    long time_index = 0;
};

/// Maps a frame into the commensurate, dimensionless coordinates the
/// regressors operate on: centroid subtraction, a fixed global scale,
/// and (optionally) removal of the rigid rotation relative to the
/// neutral reference via orthogonal Procrustes.
struct Normalizer {
    Eigen::Vector3d reference_centroid = Eigen::Vector3d::Zero();
    double reference_scale = 1.0;            // neutral-frame bounding-box diagonal
    bool remove_rotation = true;
    Eigen::Matrix3Xd reference_shape;        // centered, scaled neutral points
};

/// The rigid transform removed from a frame during normalization; keeps
/// normalization exactly invertible.
struct RemovedPose {
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
};

struct NormalizedFrame {
    Eigen::VectorXd coords;  // 3L, x,y,z interleaved
    RemovedPose pose;
};

Normalizer make_normalizer(const FeaturePointFrame& neutral, bool remove_rotation);

NormalizedFrame normalize_frame(const Normalizer& norm, const FeaturePointFrame& frame);

FeaturePointFrame denormalize_frame(const Normalizer& norm, const Eigen::VectorXd& coords,
                                    const RemovedPose& pose, long time_index = 0);

/// Denormalization into the reference pose (neutral centroid, no rotation).
FeaturePointFrame denormalize_frame(const Normalizer& norm, const Eigen::VectorXd& coords,
                                    long time_index = 0);

/// Flattens points to a 3L vector in x,y,z interleaved order.
Eigen::VectorXd flatten_points(const std::vector<Eigen::Vector3d>& points);
std::vector<Eigen::Vector3d> unflatten_points(const Eigen::VectorXd& coords);

} // namespace faceanim
