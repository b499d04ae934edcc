// Copyright 2026 the faceanim authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "faceanim/pls.hpp"
#include "test_support.hpp"

using namespace faceanim;
using namespace test_support;

namespace {

Eigen::MatrixXd centered(const Eigen::MatrixXd& M) {
    return M.rowwise() - M.colwise().mean();
}

} // namespace

TEST_CASE("max_cov_weights: single column forces unit weights") {
    Eigen::MatrixXd S(3, 1);
    S << 1, 2, 3;
    const auto [w, c] = pls::max_cov_weights(S, S);
    CHECK(w.size() == 1);
    CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("max_cov_weights: perfectly aligned column dominates orthogonal noise") {
    std::mt19937_64 rng(7);
    const Eigen::MatrixXd T = random_matrix(rng, 8, 2);
    Eigen::VectorXd c = random_vector(rng, 2).normalized();
    Eigen::MatrixXd S(8, 2);
    S.col(0) = T * c;
    // Noise column orthogonal to both columns of T, so T^T S e_2 = 0.
    Eigen::VectorXd noise = random_vector(rng, 8);
    const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(T).householderQ();
    noise -= Q.leftCols(2) * (Q.leftCols(2).transpose() * noise);
    S.col(1) = noise;

    const auto weights = pls::max_cov_weights(S, T);
    CHECK(std::abs(weights.w[0]) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(weights.w[1]) < 1e-6);
}

TEST_CASE("max_cov_weights matches the dense eigendecomposition oracle") {
    std::mt19937_64 rng(11);
    const Eigen::MatrixXd S = random_matrix(rng, 8, 4);
    const Eigen::MatrixXd T = random_matrix(rng, 8, 3);
    const auto weights = pls::max_cov_weights(S, T);
    const Eigen::VectorXd expected = dominant_eigvec_oracle(S, T);
    CHECK((weights.w - expected).norm() < 1e-8);
}

TEST_CASE("max_cov_weights error paths") {
    const Eigen::MatrixXd S = Eigen::MatrixXd::Random(4, 2);
    CHECK_THROWS_AS(pls::max_cov_weights(S, Eigen::MatrixXd::Random(5, 2)), DimensionMismatch);
    CHECK_THROWS_AS(pls::max_cov_weights(S, Eigen::MatrixXd::Zero(4, 2)), DegenerateInput);
    CHECK_THROWS_AS(pls::max_cov_weights(Eigen::MatrixXd::Zero(4, 2), S), DegenerateInput);
}

TEST_CASE("latent_scores") {
    SUBCASE("identity product") {
        const Eigen::MatrixXd S = Eigen::MatrixXd::Identity(2, 2);
        Eigen::VectorXd w(2);
        w << 1, 0;
        const auto scores = pls::latent_scores(S, S, w, w);
        CHECK(scores.g[0] == 1.0);
        CHECK(scores.g[1] == 0.0);
    }
    SUBCASE("hand-computed product") {
        Eigen::MatrixXd S(2, 2);
        S << 1, 1, 2, 2;
        Eigen::VectorXd w(2);
        w << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
        const auto scores = pls::latent_scores(S, S, w, w);
        CHECK(scores.g[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
        CHECK(scores.g[1] == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
    }
    SUBCASE("matches the naive triple-loop oracle") {
        std::mt19937_64 rng(3);
        const Eigen::MatrixXd S = random_matrix(rng, 6, 3);
        const Eigen::VectorXd w = random_vector(rng, 3).normalized();
        const auto scores = pls::latent_scores(S, S, w, w);
        CHECK((scores.g - naive_matvec(S, w)).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("dimension mismatch") {
        const Eigen::MatrixXd S = Eigen::MatrixXd::Random(4, 2);
        CHECK_THROWS_AS(pls::latent_scores(S, S, Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(2)),
                        DimensionMismatch);
    }
}

TEST_CASE("deflate") {
    std::mt19937_64 rng(17);
    const Eigen::MatrixXd S = random_matrix(rng, 5, 3);
    const Eigen::MatrixXd T = random_matrix(rng, 5, 2);
    const Eigen::VectorXd g = random_vector(rng, 5);
    const auto [S1, T1] = pls::deflate(S, T, g);
    const Eigen::VectorXd d = g.normalized();

    SUBCASE("annihilates the deflation direction") {
        CHECK((d.transpose() * S1).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((d.transpose() * T1).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("projector idempotence") {
        const auto [S2, T2] = pls::deflate(S1, T1, g);
        CHECK((S2 - S1).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((T2 - T1).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("drops the rank by one when g lies in the column space") {
        const Eigen::VectorXd g_in = S * random_vector(rng, 3);
        const auto [S3, T3] = pls::deflate(S, T, g_in);
        CHECK(svd_rank(S3) == svd_rank(S) - 1);
    }
    SUBCASE("zero latent vector") {
        CHECK_THROWS_AS(pls::deflate(S, T, Eigen::VectorXd::Zero(5)), ZeroLatentVector);
    }
}

TEST_CASE("fit_pls: exact linear relation with one component") {
    Eigen::MatrixXd S(3, 1);
    S << 1, 2, 3;
    const Eigen::MatrixXd T = 2.0 * S;
    const auto model = pls::fit_pls(S, T, 1);
    for (int i = 0; i < 3; ++i) {
        const Eigen::VectorXd pred = pls::predict_pls(model, S.row(i));
        CHECK(std::abs(pred[0] - T(i, 0)) < 1e-10);
    }
}

TEST_CASE("fit_pls: full components on full-rank data recover least squares") {
    std::mt19937_64 rng(23);
    const Eigen::MatrixXd S = random_matrix(rng, 10, 5);
    const Eigen::MatrixXd T = random_matrix(rng, 10, 3);
    const auto model = pls::fit_pls(S, T, 5);
    const OlsOracle oracle(S, T);
    for (int i = 0; i < 10; ++i) {
        const Eigen::VectorXd pred = pls::predict_pls(model, S.row(i));
        const Eigen::VectorXd expected = oracle.predict(S.row(i));
        CHECK((pred - expected).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("fit_pls: rank-deficient input stops early without NaN") {
    std::mt19937_64 rng(29);
    const Eigen::MatrixXd cols = random_matrix(rng, 10, 2);
    const Eigen::MatrixXd mix = random_matrix(rng, 2, 5);
    const Eigen::MatrixXd S = cols * mix;  // rank 2
    const Eigen::MatrixXd T = random_matrix(rng, 10, 3);
    const auto model = pls::fit_pls(S, T, 10);
    CHECK(model.components < 10);
    CHECK(model.G.allFinite());
    CHECK(model.U.allFinite());
    if (!model.singular) {
        CHECK(pls::predict_pls(model, S.row(0)).allFinite());
    }
}

TEST_CASE("predict_pls") {
    std::mt19937_64 rng(31);
    const Eigen::MatrixXd S = centered(random_matrix(rng, 10, 5));
    const Eigen::MatrixXd T = centered(random_matrix(rng, 10, 3));
    const auto model = pls::fit_pls(S, T, 5);

    SUBCASE("zero input on centered data predicts zero") {
        const Eigen::VectorXd pred = pls::predict_pls(model, Eigen::VectorXd::Zero(5));
        CHECK(pred.cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("linearity of the prediction operator") {
        const Eigen::VectorXd s1 = random_vector(rng, 5);
        const Eigen::VectorXd s2 = random_vector(rng, 5);
        const double a = 0.7, b = -1.3;
        const Eigen::VectorXd lhs = pls::predict_pls(model, a * s1 + b * s2);
        const Eigen::VectorXd rhs =
            a * pls::predict_pls(model, s1) + b * pls::predict_pls(model, s2);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(pls::predict_pls(model, Eigen::VectorXd::Zero(4)), DimensionMismatch);
    }
}

TEST_CASE("fit_pls invariants over random instances") {
    for (int seed = 0; seed < 20; ++seed) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(100 + seed));
        const int n = 5 + seed % 10;
        const int ds = 2 + seed % 5;
        const int dt = 1 + seed % 4;
        const Eigen::MatrixXd S = random_matrix(rng, n, ds);
        const Eigen::MatrixXd T = random_matrix(rng, n, dt);
        const int p = 1 + seed % std::min(n, ds);
        const auto model = pls::fit_pls(S, T, p);

        // Score orthogonality.
        for (int i = 0; i < model.components; ++i) {
            for (int j = i + 1; j < model.components; ++j) {
                const double dot = std::abs(model.G.col(i).dot(model.G.col(j)));
                CHECK(dot <= 1e-8 * model.G.col(i).norm() * model.G.col(j).norm());
            }
        }
        // Unit-norm weight columns.
        for (int j = 0; j < model.components; ++j) {
            CHECK(model.W.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(model.C.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
        }
        // Determinism: a refit is bit-identical.
        const auto model2 = pls::fit_pls(S, T, p);
        CHECK(model.components == model2.components);
        CHECK((model.G - model2.G).cwiseAbs().maxCoeff() == 0.0);
        CHECK((model.coefficients - model2.coefficients).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("deflation annihilation after every extracted component") {
    std::mt19937_64 rng(41);
    const Eigen::MatrixXd S = random_matrix(rng, 8, 4);
    const Eigen::MatrixXd T = random_matrix(rng, 8, 3);
    const auto model = pls::fit_pls(S, T, 4);
    // Recompute the deflation sequence and check d_k^T S_deflated = 0.
    Eigen::MatrixXd S_work = model.S0;
    Eigen::MatrixXd T_work = model.T0;
    for (int k = 0; k < model.components; ++k) {
        const Eigen::VectorXd d = model.deflation_dirs.col(k);
        const auto [S_next, T_next] = pls::deflate(S_work, T_work, model.G.col(k));
        CHECK((d.transpose() * S_next).cwiseAbs().maxCoeff() < 1e-10);
        S_work = S_next;
        T_work = T_next;
    }
}
