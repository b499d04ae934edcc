// Copyright 2026 the faceanim authors
// SPDX-License-Identifier: Apache-2.0
//
// Release gate: one self-contained check per shipping criterion, each
// printing a single PASS/FAIL line. Exits nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "faceanim/evaluation.hpp"
#include "faceanim/io.hpp"
#include "faceanim/kernel.hpp"
#include "faceanim/pls.hpp"
#include "faceanim/synthetic.hpp"

using namespace faceanim;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", index, name.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) m(r, c) = uni(rng);
    }
    return m;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 1. Linear-kernel KPLS agrees with primal PLS across seeded instances.
void criterion_dual_equivalence() {
    const auto start = Clock::now();
    double worst = 0.0;
    for (int seed = 0; seed < 50; ++seed) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(1000 + seed));
        const int n = 6 + seed % 15;        // <= 20
        const int ds = 2 + seed % 9;        // <= 10
        const int dt = 1 + seed % 5;        // <= 5
        const int p = 1 + seed % std::min(5, std::min(n - 1, ds));
        const Eigen::MatrixXd S = random_matrix(rng, n, ds);
        const Eigen::MatrixXd T = random_matrix(rng, n, dt);
        const auto primal = pls::fit_pls(S, T, p);
        const auto dual = kernel::fit_kpls(kernel::KernelSpec::linear(), S, T, p);
        for (int trial = 0; trial < 3; ++trial) {
            const Eigen::VectorXd s = random_matrix(rng, ds, 1).col(0);
            const double diff =
                (pls::predict_pls(primal, s) - kernel::predict_kpls(dual, s)).cwiseAbs().maxCoeff();
            worst = std::max(worst, diff);
        }
    }
    const double elapsed = seconds_since(start);
    char detail[128];
    std::snprintf(detail, sizeof(detail), "max discrepancy %.3e over 50 seeds, %.2fs", worst,
                  elapsed);
    report(1, "linear-kernel dual matches primal PLS", worst <= 1e-8 && elapsed < 5.0, detail);
}

// 2. Full-component PLS recovers the normal-equations solution.
void criterion_least_squares() {
    const auto start = Clock::now();
    double worst = 0.0;
    for (int seed = 0; seed < 20; ++seed) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(2000 + seed));
        const int n = 8 + seed % 8;
        const int ds = 2 + seed % 4;  // full rank, n > ds
        const int dt = 1 + seed % 3;
        const Eigen::MatrixXd S = random_matrix(rng, n, ds);
        const Eigen::MatrixXd T = random_matrix(rng, n, dt);
        const auto model = pls::fit_pls(S, T, ds);
        const Eigen::RowVectorXd mean_s = S.colwise().mean();
        const Eigen::RowVectorXd mean_t = T.colwise().mean();
        const Eigen::MatrixXd Sc = S.rowwise() - mean_s;
        const Eigen::MatrixXd Tc = T.rowwise() - mean_t;
        const Eigen::MatrixXd beta = (Sc.transpose() * Sc).ldlt().solve(Sc.transpose() * Tc);
        for (int trial = 0; trial < 3; ++trial) {
            const Eigen::VectorXd s = random_matrix(rng, ds, 1).col(0);
            const Eigen::VectorXd expected =
                beta.transpose() * (s - mean_s.transpose()) + mean_t.transpose();
            worst = std::max(worst,
                             (pls::predict_pls(model, s) - expected).cwiseAbs().maxCoeff());
        }
    }
    const double elapsed = seconds_since(start);
    char detail[128];
    std::snprintf(detail, sizeof(detail), "max deviation %.3e over 20 seeds, %.2fs", worst,
                  elapsed);
    report(2, "full-component fit recovers least squares", worst <= 1e-8 && elapsed < 2.0, detail);
}

// 3. Deflation algebra: annihilation, projector identity, score orthogonality.
void criterion_deflation_algebra() {
    const auto start = Clock::now();
    double worst_annihilation = 0.0;
    double worst_projector = 0.0;
    double worst_ortho = 0.0;
    for (int seed = 0; seed < 50; ++seed) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(3000 + seed));
        const int n = 5 + seed % 10;
        const int ds = 2 + seed % 5;
        const int dt = 1 + seed % 4;
        const Eigen::MatrixXd S = random_matrix(rng, n, ds);
        const Eigen::MatrixXd T = random_matrix(rng, n, dt);

        // Primal deflation annihilates the direction.
        const Eigen::VectorXd g = random_matrix(rng, n, 1).col(0);
        const auto [S1, T1] = pls::deflate(S, T, g);
        const Eigen::VectorXd d = g.normalized();
        worst_annihilation = std::max(worst_annihilation,
                                      (d.transpose() * S1).cwiseAbs().maxCoeff());
        worst_annihilation = std::max(worst_annihilation,
                                      (d.transpose() * T1).cwiseAbs().maxCoeff());

        // Gram deflation equals conjugation by the projector I - d d^T.
        const Eigen::MatrixXd half = random_matrix(rng, n, n);
        kernel::GramMatrix K;
        K.values = half * half.transpose();
        K.row_means = Eigen::VectorXd::Zero(n);
        const auto K1 = kernel::deflate_gram(K, d);
        const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n) - d * d.transpose();
        worst_projector = std::max(worst_projector,
                                   (K1.values - P * K.values * P).cwiseAbs().maxCoeff());

        // Extracted score vectors are mutually orthogonal.
        const int p = std::min(3, std::min(n - 1, ds));
        const auto model = pls::fit_pls(S, T, p);
        for (int i = 0; i < model.components; ++i) {
            for (int j = i + 1; j < model.components; ++j) {
                const double denom = model.G.col(i).norm() * model.G.col(j).norm();
                if (denom > 0.0) {
                    worst_ortho = std::max(worst_ortho,
                                           std::abs(model.G.col(i).dot(model.G.col(j))) / denom);
                }
            }
        }
    }
    const double elapsed = seconds_since(start);
    const bool pass = worst_annihilation <= 1e-10 && worst_projector <= 1e-12 &&
                      worst_ortho <= 1e-8 && elapsed < 2.0;
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "annihilation %.3e, projector %.3e, orthogonality %.3e, %.2fs",
                  worst_annihilation, worst_projector, worst_ortho, elapsed);
    report(3, "deflation algebra over 50 seeds", pass, detail);
}

// 4. Displacement-error hand values.
void criterion_error_hand_values() {
    std::mt19937_64 rng(4000);
    std::uniform_real_distribution<double> uni(-5.0, 5.0);
    std::vector<eval::VertexFrame> base(3);
    for (auto& frame : base) {
        for (int i = 0; i < 7; ++i) frame.emplace_back(uni(rng), uni(rng), uni(rng));
    }
    const double zero = eval::displacement_error(base, base);

    const std::vector<eval::VertexFrame> a = {{Eigen::Vector3d(0, 0, 0)}};
    const std::vector<eval::VertexFrame> b = {{Eigen::Vector3d(3, 4, 0)}};
    const double pythagorean = eval::displacement_error(a, b);

    const Eigen::Vector3d c(2.0, -1.0, 2.0);
    std::vector<eval::VertexFrame> shifted = base;
    for (auto& frame : shifted) {
        for (auto& p : frame) p += c;
    }
    const double constant = eval::displacement_error(base, shifted);

    const bool pass =
        zero == 0.0 && pythagorean == 5.0 && std::abs(constant - c.norm()) <= 1e-12;
    char detail[128];
    std::snprintf(detail, sizeof(detail), "identical=%g, (3,4,0)->%.17g, offset dev %.3e", zero,
                  pythagorean, std::abs(constant - c.norm()));
    report(4, "displacement-error hand values", pass, detail);
}

eval::SyntheticConfig desk_config() {
    eval::SyntheticConfig config;
    config.vertices_a = 300;
    config.blendshapes_a = 8;
    config.feature_points_a = 16;
    config.vertices_b = 260;
    config.blendshapes_b = 8;
    config.feature_points_b = 14;
    config.pairs = 30;
    config.test_frames = 20;
    config.nonlinearity = 0.0;
    return config;
}

// 5. Cyclic protocol with source == target is exact to solver tolerance.
void criterion_identity_cycle() {
    const auto world = eval::gen_synthetic_world(desk_config(), 7);
    retarget::CorrespondenceSet corr;
    corr.source_frames = world.corr.source_frames;
    corr.target_frames = world.corr.source_frames;
    retarget::TrainOptions options;
    options.components = corr.pair_count();
    options.remove_rotation = false;
    const auto model = retarget::train_retargeter(corr, kernel::KernelSpec::linear(), options);
    const auto report_cycle =
        eval::cyclic_retarget(model, model, world.test_sequence, world.rig_a, "identity");
    const double limit = 1e-6 * world.bounding_box_diagonal();
    char detail[128];
    std::snprintf(detail, sizeof(detail), "e_d %.3e vs limit %.3e", report_cycle.e_d, limit);
    report(5, "identity cyclic retarget", report_cycle.e_d <= limit, detail);
}

// 6. Affine ground truth, linear kernel, full components: near-exact cycle.
void criterion_affine_recovery() {
    const auto world = eval::gen_synthetic_world(desk_config(), 8);
    retarget::TrainOptions options;
    options.components = world.corr.pair_count() - 1;
    options.remove_rotation = false;
    const auto ab = retarget::train_retargeter(world.corr, kernel::KernelSpec::linear(), options);
    const auto ba =
        retarget::train_retargeter(world.corr.reversed(), kernel::KernelSpec::linear(), options);
    const auto report_cycle =
        eval::cyclic_retarget(ab, ba, world.test_sequence, world.rig_a, "linear");
    const double limit = 1e-4 * world.bounding_box_diagonal();
    char detail[128];
    std::snprintf(detail, sizeof(detail), "e_d %.3e vs limit %.3e", report_cycle.e_d, limit);
    report(6, "affine-world exact recovery", report_cycle.e_d <= limit, detail);
}

// 7. Ordering on full-size nonlinear worlds: the kernelized retargeter
// should not lose to the linear model or the interpolation baseline.
void criterion_ordering() {
    const auto start = Clock::now();
    eval::SyntheticConfig config;  // full-size defaults
    config.test_frames = 20;
    config.nonlinearity = 1.0;
    // Landmark jitter keeps the comparison honest: on perfectly clean data a
    // linear round trip can cancel its own forward bias, and an exact
    // interpolant is unbeatable at its own training points.
    config.noise = 0.08;
    int wins_vs_linear = 0;
    int wins_vs_baseline = 0;
    std::ostringstream log;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto world = eval::gen_synthetic_world(config, seed);
        retarget::TrainOptions options;
        options.remove_rotation = false;  // synthetic frames carry no head pose
        const auto reversed = world.corr.reversed();
        const auto rbf_ab =
            retarget::train_retargeter(world.corr, kernel::KernelSpec::rbf(0.0), options);
        const auto rbf_ba =
            retarget::train_retargeter(reversed, kernel::KernelSpec::rbf(0.0), options);
        const auto lin_ab =
            retarget::train_retargeter(world.corr, kernel::KernelSpec::linear(), options);
        const auto lin_ba =
            retarget::train_retargeter(reversed, kernel::KernelSpec::linear(), options);
        const auto base_ab = eval::rbf_baseline_fit(world.corr, 0.0, false);
        const auto base_ba = eval::rbf_baseline_fit(reversed, 0.0, false);

        const auto r_rbf = eval::cyclic_retarget(rbf_ab, rbf_ba, world.test_sequence,
                                                 world.rig_a, "kpls_rbf");
        const auto r_lin = eval::cyclic_retarget(lin_ab, lin_ba, world.test_sequence,
                                                 world.rig_a, "linear_pls");
        const eval::FrameMapper map_ab = [&](const FeaturePointFrame& f) {
            return eval::rbf_baseline_predict(base_ab, f);
        };
        const eval::FrameMapper map_ba = [&](const FeaturePointFrame& f) {
            return eval::rbf_baseline_predict(base_ba, f);
        };
        const auto r_base =
            eval::cyclic_retarget(map_ab, map_ba, world.test_sequence, world.rig_a, "rbf_interp");
        if (r_rbf.e_d <= r_lin.e_d) ++wins_vs_linear;
        if (r_rbf.e_d <= r_base.e_d) ++wins_vs_baseline;
        log << " s" << seed << ":" << (r_rbf.e_d <= r_lin.e_d ? "L" : "-")
            << (r_rbf.e_d <= r_base.e_d ? "B" : "-");
    }
    const double elapsed = seconds_since(start);
    const bool pass = wins_vs_linear >= 8 && wins_vs_baseline >= 8 && elapsed < 60.0;
    char detail[256];
    std::snprintf(detail, sizeof(detail), "vs linear %d/10, vs baseline %d/10,%s %.1fs",
                  wins_vs_linear, wins_vs_baseline, log.str().c_str(), elapsed);
    report(7, "kernel model ordering on nonlinear worlds", pass, detail);
}

// 8. Retargeting throughput on a long sequence.
void criterion_throughput() {
    eval::SyntheticConfig config;
    config.vertices_a = 400;
    config.blendshapes_a = 12;
    config.feature_points_a = 46;
    config.vertices_b = 400;
    config.blendshapes_b = 12;
    config.feature_points_b = 46;
    config.pairs = 48;
    config.test_frames = 1000;
    config.nonlinearity = 0.5;
    const auto world = eval::gen_synthetic_world(config, 9);
    retarget::TrainOptions options;
    options.remove_rotation = false;
    const auto model = retarget::train_retargeter(world.corr, kernel::KernelSpec::rbf(0.0), options);
    const auto start = Clock::now();
    const auto out = retarget::retarget_sequence(model, world.test_sequence);
    const double elapsed = seconds_since(start);
    char detail[128];
    std::snprintf(detail, sizeof(detail), "%zu frames in %.3fs", out.size(), elapsed);
    report(8, "1000-frame retargeting under one second",
           out.size() == 1000 && elapsed < 1.0, detail);
}

// 9. Fixed seeds give byte-identical model and report files.
void criterion_determinism() {
    const fs::path dir = fs::temp_directory_path() / "faceanim_acceptance";
    fs::create_directories(dir);
    eval::SyntheticConfig config = desk_config();
    config.nonlinearity = 0.5;
    bool models_equal = true;
    bool reports_equal = true;
    std::string first_model, first_report;
    for (int run = 0; run < 2; ++run) {
        const auto world = eval::gen_synthetic_world(config, 10);
        retarget::TrainOptions options;
        options.remove_rotation = false;
        const auto ab =
            retarget::train_retargeter(world.corr, kernel::KernelSpec::rbf(0.0), options);
        const auto ba = retarget::train_retargeter(world.corr.reversed(),
                                                   kernel::KernelSpec::rbf(0.0), options);
        const fs::path model_path = dir / ("model_run" + std::to_string(run) + ".json");
        io::save_model(ab, model_path);
        const auto cycle =
            eval::cyclic_retarget(ab, ba, world.test_sequence, world.rig_a, "kpls_rbf");
        const fs::path report_path = dir / ("report_run" + std::to_string(run) + ".json");
        io::save_reports({cycle}, report_path);
        if (run == 0) {
            first_model = slurp(model_path);
            first_report = slurp(report_path);
        } else {
            models_equal = slurp(model_path) == first_model;
            reports_equal = slurp(report_path) == first_report;
        }
    }
    std::error_code ec;
    fs::remove_all(dir, ec);
    char detail[128];
    std::snprintf(detail, sizeof(detail), "model bytes %s, report bytes %s",
                  models_equal ? "identical" : "differ", reports_equal ? "identical" : "differ");
    report(9, "seeded retraining is byte-deterministic", models_equal && reports_equal, detail);
}

} // namespace

int main() {
    criterion_dual_equivalence();
    criterion_least_squares();
    criterion_deflation_algebra();
    criterion_error_hand_values();
    criterion_identity_cycle();
    criterion_affine_recovery();
    criterion_ordering();
    criterion_throughput();
    criterion_determinism();
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
