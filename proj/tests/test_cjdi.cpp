#include <Eigen/LU>
#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "nojd/cjdi.hpp"
#include "nojd/rng.hpp"

using namespace nojd;

TEST_CASE("working set stays Hermitian through sweeps") {
    const TargetSet set = testutil::random_instance(61, 4, 3);
    SweepConfig cfg;
    cfg.max_sweeps = 8;
    cfg.tau = 1e-300;
    int sweeps_seen = 0;
    const auto observer = [&](int, const HermitianSet& work, const PlanePair&) {
        ++sweeps_seen;
        for (const auto& m : work.mats) REQUIRE(m.hermiticity_error() <= 1e-12);
    };
    cjdi(set, cfg, observer);
    REQUIRE(sweeps_seen == 8);
}

TEST_CASE("cjdi solves exact joint diagonalization") {
    const TargetSet set = testutil::random_instance(62, 5, 5);
    const auto [diag, rep] = cjdi(set, {});

    REQUIRE(rep.converged);
    REQUIRE(rep.sweeps <= 20);
    REQUIRE(rep.final_pi <= 1e-7);
    REQUIRE(rep.pair_visits_per_sweep == 5 * 4);
    REQUIRE(std::abs(std::abs(diag.v.determinant()) - 1.0) <= 1e-8);

    // The split working-set criterion equals the complex off-diagonal mass.
    const double direct = c_ils(diag.v, set);
    REQUIRE(std::abs(rep.final_c_ils - direct) <= 1e-12 * std::max(1.0, direct));
}

TEST_CASE("per-sweep criterion matches the direct complex criterion") {
    const TargetSet set = testutil::random_instance(63, 4, 4);
    SweepConfig cfg;
    cfg.max_sweeps = 5;
    cfg.tau = 1e-300;
    std::vector<double> observed;
    const auto observer = [&](int, const HermitianSet&, const PlanePair& v) {
        observed.push_back(c_ils(v.to_complex(), set));
    };
    const auto [diag, rep] = cjdi(set, cfg, observer);
    REQUIRE(rep.trajectory.size() == observed.size());
    for (size_t s = 0; s < observed.size(); ++s) {
        const double scale = std::max(1.0, observed[s]);
        REQUIRE(std::abs(rep.trajectory[s].c_ils - observed[s]) <= 1e-10 * scale);
    }
    // The criterion collapses by many orders of magnitude on an exact set.
    REQUIRE(observed.back() <= 1e-10 * observed.front());
}

TEST_CASE("trajectory records per-sweep index with truth") {
    const TargetSet set = testutil::random_instance(64, 4, 3);
    const auto [diag, rep] = cjdi(set, {});
    REQUIRE_FALSE(rep.trajectory.empty());
    for (const auto& st : rep.trajectory) {
        REQUIRE(std::isfinite(st.pi));
        REQUIRE(st.pi >= 0);
    }
    REQUIRE(rep.trajectory.back().pi == rep.final_pi);
    std::uint64_t acc = 0;
    for (const auto& st : rep.trajectory) acc += st.flops;
    REQUIRE(acc == rep.total_flops);
}

TEST_CASE("mixing estimate inverts the diagonalizer") {
    REQUIRE((mixing_estimate(ComplexDiagonalizer{MatC::Identity(3, 3)}) -
             MatC::Identity(3, 3)).norm() == 0.0);

    const MatC half = mixing_estimate(ComplexDiagonalizer{MatC(2.0 * MatC::Identity(3, 3))});
    REQUIRE((half - 0.5 * MatC::Identity(3, 3)).norm() <= 1e-15);

    const TargetSet set = testutil::random_instance(65, 4, 4);
    const auto [diag, rep] = cjdi(set, {});
    const MatC a_hat = mixing_estimate(diag);
    REQUIRE((a_hat * diag.v - MatC::Identity(4, 4)).norm() <= 1e-10);

    // Determinant drift guard.
    REQUIRE_THROWS_AS(mixing_estimate(ComplexDiagonalizer{MatC(1e-7 * MatC::Identity(2, 2))}),
                      std::runtime_error);
}

TEST_CASE("noisy non-Hermitian perturbations are absorbed by the split") {
    TargetSet set = testutil::random_instance(66, 5, 5);
    Rng rng(67);
    for (auto& m : set.matrices) {
        const MatC xi = rng.complex_normal_matrix(5, 5);  // not Hermitian
        m += (1e-3 * m.norm() / xi.norm()) * xi;          // 30 dB perturbation
    }

    const auto [diag, rep] = cjdi(set, {});
    REQUIRE(rep.sweeps <= 100);
    REQUIRE(rep.final_pi <= 1e-2);
    REQUIRE(std::isfinite(rep.final_c_ils));
}

TEST_CASE("proportional split planes stop immediately") {
    // K = 1 with d = (1 - j) * r, r real: the two split halves are exactly
    // proportional, every criterion is rank one, every solve degenerates,
    // and the run stops after one sweep of skips with V untouched.
    Rng rng(68);
    VecC d(3);
    for (int i = 0; i < 3; ++i) d(i) = Cx(1, -1) * (rng.gaussian() + 2.0);
    const TargetSet set = TargetSet::from_truth(rng.complex_normal_matrix(3, 3), {d});

    const auto [diag, rep] = cjdi(set, {});
    REQUIRE(rep.converged);
    REQUIRE(rep.sweeps == 1);
    REQUIRE(rep.skipped_pairs == 6);  // 3 pairs, both families
    REQUIRE(diag.v == MatC::Identity(3, 3));
}
