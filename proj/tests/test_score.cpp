#include <catch2/catch_amalgamated.hpp>

#include "elcp/model.hpp"
#include "elcp/score.hpp"
#include "oracles.hpp"

using elcp::Design;
using elcp::ScoreSet;

namespace {

ScoreSet tiny_scores() {
    // p = 1, n = 2, k = 1, z = (1, 0.5): the worked scalar example.
    Eigen::MatrixXd Z(2, 1);
    Z << 1.0, 0.5;
    return ScoreSet(Z, Eigen::VectorXd::Ones(1), 1);
}

}  // namespace

TEST_CASE("scores are covariates scaled by residuals", "[score]") {
    const Design d = elcp::generate_design(25, 3, 10, 5);
    const Eigen::VectorXd beta = elcp::sequence_beta(3);

    SECTION("exact fit gives zero scores") {
        const Eigen::VectorXd y = d.X * beta;
        const ScoreSet s = elcp::score_vectors(d, y, beta);
        REQUIRE(s.Z.isZero(0.0));
    }

    SECTION("hand-computed scalar case") {
        Eigen::MatrixXd X(2, 1);
        X << 1.0, 1.0;
        const Design d1(X, 1);
        Eigen::VectorXd y(2);
        y << 2.0, 1.5;
        const ScoreSet s = elcp::score_vectors(d1, y, Eigen::VectorXd::Ones(1));
        REQUIRE(s.Z(0, 0) == 1.0);
        REQUIRE(s.Z(1, 0) == 0.5);
    }

    SECTION("residual scaling is linear") {
        Eigen::VectorXd y = d.X * beta;
        Eigen::VectorXd noise = Eigen::VectorXd::LinSpaced(25, -1.0, 1.0);
        const ScoreSet s1 = elcp::score_vectors(d, y + noise, beta);
        const ScoreSet s3 = elcp::score_vectors(d, y + 3.0 * noise, beta);
        REQUIRE((s3.Z - 3.0 * s1.Z).lpNorm<Eigen::Infinity>() < 1e-12);
    }

    SECTION("dimension mismatch throws") {
        REQUIRE_THROWS_AS(elcp::score_vectors(d, Eigen::VectorXd::Zero(7), beta),
                          elcp::DimensionError);
        REQUIRE_THROWS_AS(elcp::score_vectors(d, Eigen::VectorXd::Zero(25),
                                              Eigen::VectorXd::Zero(2)),
                          elcp::DimensionError);
    }
}

TEST_CASE("psi_n weighted segment difference", "[score]") {
    SECTION("tiny case") {
        REQUIRE(elcp::psi_n(tiny_scores())(0) == Catch::Approx(0.5).margin(1e-15));
    }

    SECTION("zero scores give the zero vector") {
        ScoreSet s(Eigen::MatrixXd::Zero(6, 2), Eigen::VectorXd::Zero(2), 3);
        REQUIRE(elcp::psi_n(s).isZero(0.0));
    }

    SECTION("swapping equal-length segments negates psi") {
        Eigen::MatrixXd Z = Eigen::MatrixXd::Random(8, 3);
        ScoreSet s(Z, Eigen::VectorXd::Zero(3), 4);
        Eigen::MatrixXd Zs(8, 3);
        Zs << Z.bottomRows(4), Z.topRows(4);
        ScoreSet swapped(Zs, Eigen::VectorXd::Zero(3), 4);
        REQUIRE((elcp::psi_n(s) + elcp::psi_n(swapped)).lpNorm<Eigen::Infinity>() < 1e-14);
    }
}

TEST_CASE("s_n_matrix weighted second moment", "[score]") {
    SECTION("tiny case: 2*1 + 2*0.25") {
        REQUIRE(elcp::s_n_matrix(tiny_scores())(0, 0) == Catch::Approx(2.5).margin(1e-15));
    }

    SECTION("zero scores give the zero matrix") {
        ScoreSet s(Eigen::MatrixXd::Zero(6, 2), Eigen::VectorXd::Zero(2), 3);
        REQUIRE(elcp::s_n_matrix(s).isZero(0.0));
    }

    SECTION("matches the naive double-loop sum") {
        Eigen::MatrixXd Z = Eigen::MatrixXd::Random(40, 5);
        ScoreSet s(Z, Eigen::VectorXd::Zero(5), 17);
        const Eigen::MatrixXd fast = elcp::s_n_matrix(s);
        const Eigen::MatrixXd naive = oracles::s_n_naive(s);
        REQUIRE((fast - naive).lpNorm<Eigen::Infinity>() <
                1e-12 * naive.lpNorm<Eigen::Infinity>());
        REQUIRE((fast - fast.transpose()).lpNorm<Eigen::Infinity>() == 0.0);
    }
}

TEST_CASE("v_n_matrix population second moment", "[score]") {
    SECTION("constant scalar design at theta = 1/2") {
        const Design d(Eigen::MatrixXd::Ones(10, 1), 5);
        REQUIRE(elcp::v_n_matrix(d, 1.0)(0, 0) == Catch::Approx(4.0).margin(1e-14));
    }

    SECTION("homogeneous in sigma2") {
        const Design d = elcp::generate_design(30, 4, 12, 3);
        const Eigen::MatrixXd v1 = elcp::v_n_matrix(d, 1.0);
        const Eigen::MatrixXd v3 = elcp::v_n_matrix(d, 3.0);
        REQUIRE((v3 - 3.0 * v1).lpNorm<Eigen::Infinity>() <
                1e-12 * v3.lpNorm<Eigen::Infinity>());
    }

    SECTION("two-point scalar design") {
        Eigen::MatrixXd X(2, 1);
        X << 1.0, 2.0;
        const Design d(X, 1);
        REQUIRE(elcp::v_n_matrix(d, 1.0)(0, 0) == Catch::Approx(10.0).margin(1e-13));
        REQUIRE(elcp::v_n_matrix(d, 2.0)(0, 0) == Catch::Approx(20.0).margin(1e-13));
    }

    SECTION("singular design is rejected") {
        Eigen::MatrixXd X = Eigen::MatrixXd::Zero(10, 2);
        X.col(0).setOnes();  // second column identically zero
        const Design d(X, 5);
        REQUIRE_THROWS_AS(elcp::v_n_matrix(d, 1.0), elcp::SingularDesignError);
    }
}
