// Copyright 2026 the faceanim authors
// SPDX-License-Identifier: Apache-2.0

#include "faceanim/rig.hpp"

#include <set>

#include "faceanim/bounded_lsq.hpp"

namespace faceanim {

void FaceRig::validate() const {
    const int v = vertex_count();
    if (v == 0) throw InvalidConfig("rig has no vertices");
    std::set<std::string> names;
    for (const auto& bs : blendshapes) {
        if (static_cast<int>(bs.deltas.size()) != v) {
            throw DimensionMismatch("blendshape '" + bs.name + "' has " +
                                    std::to_string(bs.deltas.size()) + " deltas, expected " +
                                    std::to_string(v));
        }
        if (!names.insert(bs.name).second) {
            throw InvalidConfig("duplicate blendshape name '" + bs.name + "'");
        }
    }
    for (int idx : feature_point_indices) {
        if (idx < 0 || idx >= v) {
            throw DimensionMismatch("feature point index " + std::to_string(idx) +
                                    " out of range [0, " + std::to_string(v) + ")");
        }
    }
}

FeaturePointFrame FaceRig::neutral_feature_frame() const {
    FeaturePointFrame frame;
    frame.points.reserve(feature_point_indices.size());
    for (int idx : feature_point_indices) {
        frame.points.push_back(neutral_vertices[static_cast<std::size_t>(idx)]);
    }
    return frame;
}

std::vector<Eigen::Vector3d> apply_blendshapes(const FaceRig& rig, const Eigen::VectorXd& weights) {
    if (weights.size() != rig.blendshape_count()) {
        throw DimensionMismatch("apply_blendshapes: " + std::to_string(weights.size()) +
                                " weights for " + std::to_string(rig.blendshape_count()) +
                                " blendshapes");
    }
    std::vector<Eigen::Vector3d> vertices = rig.neutral_vertices;
    for (Eigen::Index k = 0; k < weights.size(); ++k) {
        const double w = weights[k];
        if (w == 0.0) continue;
        const auto& deltas = rig.blendshapes[static_cast<std::size_t>(k)].deltas;
        for (std::size_t v = 0; v < vertices.size(); ++v) {
            vertices[v] += w * deltas[v];
        }
    }
    return vertices;
}

FeaturePointFrame rig_feature_frame(const FaceRig& rig, const Eigen::VectorXd& weights,
                                    long time_index) {
    const auto vertices = apply_blendshapes(rig, weights);
    FeaturePointFrame frame;
    frame.time_index = time_index;
    frame.points.reserve(rig.feature_point_indices.size());
    for (int idx : rig.feature_point_indices) {
        frame.points.push_back(vertices[static_cast<std::size_t>(idx)]);
    }
    return frame;
}

Eigen::VectorXd solve_blendshape_weights(const FaceRig& rig, const FeaturePointFrame& target_points) {
    const int L = rig.feature_point_count();
    if (static_cast<int>(target_points.points.size()) != L) {
        throw DimensionMismatch("solve_blendshape_weights: target has " +
                                std::to_string(target_points.points.size()) +
                                " points, rig designates " + std::to_string(L));
    }
    const int B = rig.blendshape_count();
    Eigen::MatrixXd D(3 * L, B);
    Eigen::VectorXd residual(3 * L);
    for (int i = 0; i < L; ++i) {
        const int v = rig.feature_point_indices[static_cast<std::size_t>(i)];
        for (int k = 0; k < B; ++k) {
            D.block<3, 1>(3 * i, k) = rig.blendshapes[static_cast<std::size_t>(k)]
                                          .deltas[static_cast<std::size_t>(v)];
        }
        residual.segment<3>(3 * i) =
            target_points.points[static_cast<std::size_t>(i)] -
            rig.neutral_vertices[static_cast<std::size_t>(v)];
    }
    return bounded_least_squares(D, residual, 0.0, 1.0, 1e-8);
}

} // namespace faceanim
