// Copyright 2026 the faceanim authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "faceanim/retarget.hpp"
#include "faceanim/synthetic.hpp"

using namespace faceanim;

namespace {

eval::SyntheticConfig bench_config(int pairs) {
    eval::SyntheticConfig config;
    config.vertices_a = 400;
    config.blendshapes_a = 12;
    config.feature_points_a = 46;
    config.vertices_b = 400;
    config.blendshapes_b = 12;
    config.feature_points_b = 46;
    config.pairs = pairs;
    config.test_frames = 100;
    config.nonlinearity = 0.5;
    return config;
}

void bm_train(benchmark::State& state) {
    const auto world = eval::gen_synthetic_world(bench_config(static_cast<int>(state.range(0))), 1);
    retarget::TrainOptions options;
    options.remove_rotation = false;
    for (auto _ : state) {
        auto model = retarget::train_retargeter(world.corr, kernel::KernelSpec::rbf(0.0), options);
        benchmark::DoNotOptimize(model);
    }
}
BENCHMARK(bm_train)->Arg(24)->Arg(48)->Arg(96);

void bm_retarget_frame(benchmark::State& state) {
    const auto world = eval::gen_synthetic_world(bench_config(48), 2);
    retarget::TrainOptions options;
    options.remove_rotation = false;
    const auto model = retarget::train_retargeter(world.corr, kernel::KernelSpec::rbf(0.0), options);
    std::size_t i = 0;
    for (auto _ : state) {
        auto out = retarget_frame(model, world.test_sequence[i % world.test_sequence.size()]);
        benchmark::DoNotOptimize(out);
        ++i;
    }
}
BENCHMARK(bm_retarget_frame);

void bm_retarget_sequence_100(benchmark::State& state) {
    const auto world = eval::gen_synthetic_world(bench_config(48), 3);
    retarget::TrainOptions options;
    options.remove_rotation = false;
    const auto model = retarget::train_retargeter(world.corr, kernel::KernelSpec::rbf(0.0), options);
    for (auto _ : state) {
        auto out = retarget_sequence(model, world.test_sequence);
        benchmark::DoNotOptimize(out);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(world.test_sequence.size()));
}
BENCHMARK(bm_retarget_sequence_100);

void bm_solve_blendshape_weights(benchmark::State& state) {
    const auto world = eval::gen_synthetic_world(bench_config(48), 4);
    std::size_t i = 0;
    for (auto _ : state) {
        auto w = solve_blendshape_weights(world.rig_a,
                                          world.test_sequence[i % world.test_sequence.size()]);
        benchmark::DoNotOptimize(w);
        ++i;
    }
}
BENCHMARK(bm_solve_blendshape_weights);

} // namespace

BENCHMARK_MAIN();
