#include <Eigen/LU>
#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "nojd/metrics.hpp"
#include "nojd/rng.hpp"

using namespace nojd;

TEST_CASE("performance index pins") {
    REQUIRE(performance_index(MatC(MatC::Ones(2, 2))) == 1.0);
    REQUIRE(performance_index(MatC(MatC::Ones(5, 5))) == 1.0);
    REQUIRE(performance_index(MatC(MatC::Identity(4, 4))) == 0.0);

    // Generalized permutation: diagonal complex scaling times permutation.
    MatC g = MatC::Zero(3, 3);
    g(0, 2) = Cx(0.3, -1.1);
    g(1, 0) = Cx(-2.0, 0.4);
    g(2, 1) = Cx(0, 5.0);
    REQUIRE(performance_index(g) == 0.0);

    g(2, 1) = 0;  // zero row and column
    REQUIRE_THROWS_AS(performance_index(g), std::invalid_argument);
}

TEST_CASE("performance index is phase and scale invariant") {
    Rng rng(41);
    const MatC g = rng.complex_normal_matrix(4, 4);
    const double base = performance_index(g);
    REQUIRE(std::abs(performance_index(MatC(Cx(0.6, 0.8) * g)) - base) <= 1e-14);
    REQUIRE(std::abs(performance_index(MatC(3.0 * g)) - base) <= 1e-14);
}

TEST_CASE("mou pins") {
    // Orthogonal profiles across two matrices.
    REQUIRE(mou({VecC{{Cx(1), Cx(0)}}, VecC{{Cx(0), Cx(1)}}}) == 0.0);
    // Identical profiles, up to the sqrt rounding in the normalizers.
    REQUIRE(std::abs(mou({VecC{{Cx(1), Cx(1)}}, VecC{{Cx(2), Cx(2)}}}) - 1.0) <= 1e-15);
    // Complex collinear profiles.
    VecC d1(2), d2(2);
    d1 << Cx(1, 2), Cx(0.5, -0.25);
    d2 << Cx(1, 2) * Cx(0, 3), Cx(0.5, -0.25) * Cx(0, 3);
    REQUIRE(std::abs(mou({d1, d2}) - 1.0) <= 1e-14);

    VecC zeroed(2);
    zeroed << Cx(0), Cx(1);
    REQUIRE_THROWS_AS(mou({zeroed, zeroed}), std::invalid_argument);
}

TEST_CASE("mou matches a hand-computed pair") {
    // Profiles d_1 = (1, 0), d_2 = (1, 1)/overlap: |<d1,d2>|/(|d1||d2|) = 1/sqrt(2).
    VecC a(2), b(2);
    a << Cx(1), Cx(1);
    b << Cx(0), Cx(1);
    REQUIRE(std::abs(mou({a, b}) - 1 / std::sqrt(2.0)) <= 1e-15);
}

TEST_CASE("c_ils measures off-diagonal mass of the transformed set") {
    const TargetSet set = testutil::random_instance(42, 4, 3);
    const MatC v = set.truth->mixing.inverse();
    // The true inverse nearly diagonalizes; identity does not.
    REQUIRE(c_ils(v, set) <= 1e-20 * c_ils(MatC(MatC::Identity(4, 4)), set));

    // Hand-checked 2x2: V = I, M = [[1, 2],[3, 4]] gives 4 + 9.
    TargetSet small;
    small.n = 2;
    small.k = 1;
    MatC m(2, 2);
    m << Cx(1), Cx(2), Cx(3), Cx(4);
    small.matrices.push_back(m);
    REQUIRE(c_ils(MatC(MatC::Identity(2, 2)), small) == 13.0);

    // Unimodular phase on V leaves the criterion unchanged.
    const double base = c_ils(v, set);
    REQUIRE(std::abs(c_ils(MatC(Cx(0, 1) * v), set) - base) <= 1e-12 * std::max(1.0, base));
}

TEST_CASE("perturbation level pins") {
    const TargetSet exact = testutil::random_instance(43, 3, 2);
    std::vector<MatC> xi;
    for (const auto& m : exact.matrices) xi.push_back(MatC(0.1 * m));
    const auto pl = perturbation_level(exact, xi);
    REQUIRE(pl.size() == 2);
    for (double v : pl) REQUIRE(std::abs(v - 10.0) <= 1e-12);

    std::vector<MatC> zero{MatC::Zero(3, 3), MatC::Zero(3, 3)};
    const auto inf_pl = perturbation_level(exact, zero);
    for (double v : inf_pl) REQUIRE(std::isinf(v));

    REQUIRE_THROWS_AS(perturbation_level(exact, std::vector<MatC>{}), std::invalid_argument);
}

TEST_CASE("condition numbers") {
    MatC a = MatC::Zero(3, 3);
    a(0, 0) = 4;
    a(1, 1) = Cx(0, 2);
    a(2, 2) = 1;
    REQUIRE(std::abs(condition_number(a) - 4.0) <= 1e-12);

    VecC d(3);
    d << Cx(2), Cx(0, -8), Cx(1);
    REQUIRE(std::abs(diagonal_condition(d) - 8.0) <= 1e-12);
    d(2) = 0;
    REQUIRE(std::isinf(diagonal_condition(d)));
}

TEST_CASE("score report fills truth fields only with truth") {
    const TargetSet set = testutil::random_instance(44, 4, 2);
    const MatC v = set.truth->mixing.inverse();
    const ScoreReport with = score_report(set, {}, v);
    REQUIRE(with.pi <= 1e-10);
    REQUIRE(with.mou >= 0.0);
    REQUIRE(with.cond_a >= 1.0);
    REQUIRE(with.cond_d.size() == 2);
    REQUIRE(with.pl_db.empty());

    TargetSet blind = set;
    blind.truth.reset();
    const ScoreReport without = score_report(blind, {}, v);
    REQUIRE(std::isnan(without.pi));
    REQUIRE(std::isnan(without.mou));
    REQUIRE(without.c_ils == with.c_ils);
}
