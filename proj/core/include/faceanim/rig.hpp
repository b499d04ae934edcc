// Copyright 2026 the faceanim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "faceanim/errors.hpp"
#include "faceanim/frame.hpp"

namespace faceanim {

struct Blendshape {
    std::string name;
    std::vector<Eigen::Vector3d> deltas;  // per-vertex offsets from neutral
};

/// Neutral mesh, named blendshape delta sets, and the vertex indices
/// designated as feature points.
struct FaceRig {
    std::vector<Eigen::Vector3d> neutral_vertices;
    std::vector<Blendshape> blendshapes;
    std::vector<int> feature_point_indices;

    int vertex_count() const { return static_cast<int>(neutral_vertices.size()); }
    int blendshape_count() const { return static_cast<int>(blendshapes.size()); }
    int feature_point_count() const { return static_cast<int>(feature_point_indices.size()); }

    /// Throws on inconsistent sizes, out-of-range indices or duplicate names.
    void validate() const;

    /// Neutral positions restricted to the feature points.
    FeaturePointFrame neutral_feature_frame() const;
};

/// vertices = neutral + sum_k w_k * delta_k.
std::vector<Eigen::Vector3d> apply_blendshapes(const FaceRig& rig, const Eigen::VectorXd& weights);

/// Feature-point positions of the rig posed with the given weights.
FeaturePointFrame rig_feature_frame(const FaceRig& rig, const Eigen::VectorXd& weights,
                                    long time_index = 0);

/// Best weights in [0,1]^B reproducing the target feature points in the
/// least-squares sense (bounded least squares on the feature-point rows
/// of the delta matrix).
Eigen::VectorXd solve_blendshape_weights(const FaceRig& rig, const FeaturePointFrame& target_points);

} // namespace faceanim
