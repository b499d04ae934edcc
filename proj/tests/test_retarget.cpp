// Copyright 2026 the faceanim authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "faceanim/retarget.hpp"
#include "faceanim/synthetic.hpp"
#include "test_support.hpp"

using namespace faceanim;
using namespace test_support;

namespace {

// Identity task: source and target frames coincide on one rig.
retarget::CorrespondenceSet identity_corr(const eval::SyntheticWorld& world) {
    retarget::CorrespondenceSet corr;
    corr.source_frames = world.corr.source_frames;
    corr.target_frames = world.corr.source_frames;
    corr.neutral_index = world.corr.neutral_index;
    return corr;
}

eval::SyntheticConfig small_config() {
    eval::SyntheticConfig config;
    config.vertices_a = 120;
    config.blendshapes_a = 6;
    config.feature_points_a = 12;
    config.vertices_b = 100;
    config.blendshapes_b = 6;
    config.feature_points_b = 10;
    config.pairs = 20;
    config.test_frames = 10;
    config.nonlinearity = 0.0;
    return config;
}

} // namespace

TEST_CASE("train_retargeter on the identity task reproduces training frames") {
    const auto world = eval::gen_synthetic_world(small_config(), 1);
    const auto corr = identity_corr(world);
    retarget::TrainOptions options;
    options.components = corr.pair_count();  // full
    options.remove_rotation = false;
    const auto model = retarget::train_retargeter(corr, kernel::KernelSpec::linear(), options);
    for (const auto& frame : corr.source_frames) {
        const auto out = retarget_frame(model, frame);
        REQUIRE(out.points.size() == frame.points.size());
        for (std::size_t i = 0; i < frame.points.size(); ++i) {
            CHECK((out.points[i] - frame.points[i]).cwiseAbs().maxCoeff() < 1e-6);
        }
    }
}

TEST_CASE("train_retargeter reports man-to-baby shaped dimensions") {
    eval::SyntheticConfig config = small_config();
    config.vertices_a = 200;
    config.feature_points_a = 45;
    config.vertices_b = 160;
    config.feature_points_b = 37;
    const auto world = eval::gen_synthetic_world(config, 2);
    const auto model =
        retarget::train_retargeter(world.corr, kernel::KernelSpec::rbf(0.0), {});
    CHECK(model.regressor.input_dim() == 135);
    CHECK(model.regressor.output_dim() == 111);
    CHECK(model.source_points == 45);
    CHECK(model.target_points == 37);
}

TEST_CASE("train_retargeter rejects a single pair") {
    const auto world = eval::gen_synthetic_world(small_config(), 3);
    retarget::CorrespondenceSet corr;
    corr.source_frames = {world.corr.source_frames[0]};
    corr.target_frames = {world.corr.target_frames[0]};
    CHECK_THROWS_AS(retarget::train_retargeter(corr, kernel::KernelSpec::linear(), {}),
                    TooFewPairs);
}

TEST_CASE("retarget_frame") {
    const auto world = eval::gen_synthetic_world(small_config(), 4);
    retarget::TrainOptions options;
    options.components = world.corr.pair_count() - 1;
    options.remove_rotation = false;
    const auto model = retarget::train_retargeter(world.corr, kernel::KernelSpec::rbf(0.0), options);

    SUBCASE("neutral maps to the target neutral in the exact-fit regime") {
        const auto& neutral_src = world.corr.source_frames[0];
        const auto& neutral_tgt = world.corr.target_frames[0];
        const auto out = retarget_frame(model, neutral_src);
        for (std::size_t i = 0; i < out.points.size(); ++i) {
            CHECK((out.points[i] - neutral_tgt.points[i]).cwiseAbs().maxCoeff() < 1e-6);
        }
    }
    SUBCASE("deterministic output") {
        const auto& frame = world.test_sequence[0];
        const auto a = retarget_frame(model, frame);
        const auto b = retarget_frame(model, frame);
        for (std::size_t i = 0; i < a.points.size(); ++i) {
            CHECK((a.points[i] - b.points[i]).cwiseAbs().maxCoeff() == 0.0);
        }
    }
    SUBCASE("output always has L_t points and keeps the time index") {
        for (const auto& frame : world.test_sequence) {
            const auto out = retarget_frame(model, frame);
            CHECK(static_cast<int>(out.points.size()) == model.target_points);
            CHECK(out.time_index == frame.time_index);
        }
    }
    SUBCASE("translation invariance of the retargeted output") {
        const auto& frame = world.test_sequence[0];
        FeaturePointFrame shifted = frame;
        for (auto& p : shifted.points) p += Eigen::Vector3d(4.0, -2.0, 9.0);
        const auto a = retarget_frame(model, frame);
        const auto b = retarget_frame(model, shifted);
        for (std::size_t i = 0; i < a.points.size(); ++i) {
            CHECK((a.points[i] - b.points[i]).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
    SUBCASE("wrong point count") {
        FeaturePointFrame bad;
        bad.points.assign(3, Eigen::Vector3d::Zero());
        CHECK_THROWS_AS(retarget_frame(model, bad), DimensionMismatch);
    }
}

TEST_CASE("retarget_sequence") {
    const auto world = eval::gen_synthetic_world(small_config(), 5);
    retarget::TrainOptions options;
    options.components = world.corr.pair_count() - 1;
    options.remove_rotation = false;
    const auto model = retarget::train_retargeter(world.corr, kernel::KernelSpec::rbf(0.0), options);

    SUBCASE("empty sequence") {
        CHECK(retarget_sequence(model, {}).empty());
    }
    SUBCASE("element-wise equivalence with per-frame calls") {
        const auto out = retarget_sequence(model, world.test_sequence);
        REQUIRE(out.size() == world.test_sequence.size());
        for (std::size_t t = 0; t < out.size(); ++t) {
            const auto single = retarget_frame(model, world.test_sequence[t]);
            for (std::size_t i = 0; i < single.points.size(); ++i) {
                CHECK((out[t].points[i] - single.points[i]).cwiseAbs().maxCoeff() == 0.0);
            }
        }
    }
    SUBCASE("training sequence reproduces training targets in the exact-fit regime") {
        const auto out = retarget_sequence(model, world.corr.source_frames);
        for (std::size_t t = 0; t < out.size(); ++t) {
            for (std::size_t i = 0; i < out[t].points.size(); ++i) {
                CHECK((out[t].points[i] - world.corr.target_frames[t].points[i])
                          .cwiseAbs()
                          .maxCoeff() < 1e-6);
            }
        }
    }
}
