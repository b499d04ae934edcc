// Copyright 2026 the faceanim authors
// SPDX-License-Identifier: Apache-2.0

#include "faceanim/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace faceanim::eval {

namespace {

constexpr double kFaceRadius = 10.0;
constexpr double kBumpWidth = 3.0;
constexpr double kWarpScale = 0.22;

Eigen::Vector3d random_unit_vector(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Eigen::Vector3d v;
    do {
        v = {uni(rng), uni(rng), uni(rng)};
    } while (v.squaredNorm() < 1e-4 || v.squaredNorm() > 1.0);
    return v.normalized();
}

FaceRig gen_rig(std::mt19937_64& rng, int vertices, int blendshapes, int feature_points) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    FaceRig rig;
    rig.neutral_vertices.reserve(static_cast<std::size_t>(vertices));
    for (int v = 0; v < vertices; ++v) {
        const double radius = kFaceRadius * (1.0 + 0.08 * uni(rng));
        rig.neutral_vertices.push_back(radius * random_unit_vector(rng));
    }

    std::vector<int> order(static_cast<std::size_t>(vertices));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    rig.feature_point_indices.assign(order.begin(), order.begin() + feature_points);
    std::sort(rig.feature_point_indices.begin(), rig.feature_point_indices.end());

    // Each blendshape is a sum of smooth Gaussian bumps anchored at feature
    // points, so every shape visibly moves the tracked landmarks.
    std::uniform_int_distribution<int> pick_fp(0, feature_points - 1);
    for (int b = 0; b < blendshapes; ++b) {
        Blendshape shape;
        shape.name = "shape_" + std::to_string(b);
        shape.deltas.assign(static_cast<std::size_t>(vertices), Eigen::Vector3d::Zero());
        const int bumps = 3;
        for (int j = 0; j < bumps; ++j) {
            const int center_vertex = rig.feature_point_indices[static_cast<std::size_t>(pick_fp(rng))];
            const Eigen::Vector3d center =
                rig.neutral_vertices[static_cast<std::size_t>(center_vertex)];
            const Eigen::Vector3d dir = random_unit_vector(rng);
            const double amp = 0.2 + 0.6 * uni(rng);
            for (int v = 0; v < vertices; ++v) {
                const double d2 =
                    (rig.neutral_vertices[static_cast<std::size_t>(v)] - center).squaredNorm();
                shape.deltas[static_cast<std::size_t>(v)] +=
                    amp * std::exp(-d2 / (2.0 * kBumpWidth * kBumpWidth)) * dir;
            }
        }
        // Expressions keep the tracked-landmark centroid fixed: shifting the
        // whole delta field by a constant makes the feature-point deltas
        // zero-mean, so no expression information hides in the rigid
        // translation that normalization removes.
        Eigen::Vector3d fp_mean = Eigen::Vector3d::Zero();
        for (int idx : rig.feature_point_indices) {
            fp_mean += shape.deltas[static_cast<std::size_t>(idx)];
        }
        fp_mean /= static_cast<double>(feature_points);
        for (auto& d : shape.deltas) d -= fp_mean;
        rig.blendshapes.push_back(std::move(shape));
    }
    return rig;
}

} // namespace

void SyntheticConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw InvalidConfig(std::string("synthetic config: ") + what);
    };
    require(vertices_a >= 4 && vertices_b >= 4, "need at least 4 vertices per rig");
    require(blendshapes_a >= 1 && blendshapes_b >= 1, "need at least 1 blendshape per rig");
    require(feature_points_a >= 3 && feature_points_b >= 3, "need at least 3 feature points");
    require(feature_points_a <= vertices_a && feature_points_b <= vertices_b,
            "more feature points than vertices");
    require(pairs >= 2, "need at least 2 correspondence pairs");
    require(test_frames >= 1, "need at least 1 test frame");
    require(nonlinearity >= 0.0 && nonlinearity <= 1.0, "nonlinearity outside [0, 1]");
    require(noise >= 0.0 && noise <= 1.0, "noise outside [0, 1]");
}

Eigen::VectorXd GroundTruthMap::apply(const Eigen::VectorXd& w) const {
    Eigen::VectorXd out = base + linear * w;
    if (nonlinearity > 0.0) {
        const Eigen::ArrayXd angle =
            2.0 * std::numbers::pi * ((warp_freq * w).array() + warp_phase.array());
        const Eigen::ArrayXd rest = (2.0 * std::numbers::pi * warp_phase.array()).sin();
        out.array() += nonlinearity * kWarpScale * (angle.sin() - rest);
    }
    return out;
}

double SyntheticWorld::bounding_box_diagonal() const {
    Eigen::Vector3d lo = rig_a.neutral_vertices.front();
    Eigen::Vector3d hi = lo;
    for (const auto& p : rig_a.neutral_vertices) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return (hi - lo).norm();
}

SyntheticWorld gen_synthetic_world(const SyntheticConfig& config, std::uint64_t seed) {
    config.validate();
    std::mt19937_64 rng(seed);

    SyntheticWorld world;
    world.seed = seed;
    world.rig_a = gen_rig(rng, config.vertices_a, config.blendshapes_a, config.feature_points_a);
    world.rig_b = gen_rig(rng, config.vertices_b, config.blendshapes_b, config.feature_points_b);

    const int ba = config.blendshapes_a;
    const int bb = config.blendshapes_b;
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    // Weight-space map with nonnegative rows of bounded l1 norm; together
    // with base 0.1 and samples in [0.05, 0.55] every target weight lands
    // strictly inside [0, 1].
    GroundTruthMap map;
    map.linear.resize(bb, ba);
    for (int i = 0; i < bb; ++i) {
        for (int j = 0; j < ba; ++j) map.linear(i, j) = uni(rng);
        map.linear.row(i) *= 0.15 / map.linear.row(i).sum();
    }
    map.base = Eigen::VectorXd::Constant(bb, 0.44);
    map.nonlinearity = config.nonlinearity;
    map.warp_freq.resize(bb, ba);
    map.warp_phase.resize(bb);
    for (int i = 0; i < bb; ++i) {
        for (int j = 0; j < ba; ++j) map.warp_freq(i, j) = 2.0 * uni(rng) - 1.0;
        // Keep the warp smooth but genuinely curved: a few periods across
        // the sampled trajectory rather than noise-like oscillation.
        map.warp_freq.row(i) *= 4.0 / map.warp_freq.row(i).norm();
        map.warp_phase[i] = uni(rng);
    }
    world.ground_truth = map;

    // Expressions live on a smooth low-dimensional trajectory through weight
    // space, the way captured performances do; training pairs sample it on a
    // grid and the held-out sequence sweeps it continuously in between.
    Eigen::VectorXd freq(ba), phase(ba);
    for (int j = 0; j < ba; ++j) {
        freq[j] = 1.0 + std::floor(3.0 * uni(rng));
        phase[j] = uni(rng);
    }
    const auto trajectory = [&](double z) {
        Eigen::VectorXd w(ba);
        for (int j = 0; j < ba; ++j) {
            w[j] = 0.3 + 0.225 * std::sin(2.0 * std::numbers::pi * (freq[j] * z + phase[j]));
        }
        return w;
    };

    // Pair 0 is the neutral: the resting source face and its image.
    std::vector<Eigen::VectorXd> weights;
    weights.push_back(Eigen::VectorXd::Zero(ba));
    for (int k = 1; k < config.pairs; ++k) {
        weights.push_back(trajectory(static_cast<double>(k - 1) /
                                     static_cast<double>(config.pairs - 1)));
    }
    for (int k = 0; k < config.pairs; ++k) {
        world.corr.source_frames.push_back(rig_feature_frame(world.rig_a, weights[static_cast<std::size_t>(k)], k));
        world.corr.target_frames.push_back(
            rig_feature_frame(world.rig_b, map.apply(weights[static_cast<std::size_t>(k)]), k));
    }
    world.corr.neutral_index = 0;

    if (config.noise > 0.0) {
        // Correspondence pairs come from a tracker, not from the rig itself;
        // jitter them the way captured landmarks are jittered.
        std::normal_distribution<double> gauss(0.0, config.noise);
        for (auto* frames : {&world.corr.source_frames, &world.corr.target_frames}) {
            for (auto& frame : *frames) {
                for (auto& point : frame.points) {
                    point += Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
                }
            }
        }
    }

    for (int t = 0; t < config.test_frames; ++t) {
        const double z = (static_cast<double>(t) + 0.5) / static_cast<double>(config.test_frames);
        Eigen::VectorXd w = trajectory(z);
        world.test_sequence.push_back(rig_feature_frame(world.rig_a, w, t));
        world.test_weights.push_back(std::move(w));
    }
    return world;
}

} // namespace faceanim::eval
