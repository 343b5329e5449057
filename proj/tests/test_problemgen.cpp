#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <sstream>

#include "nojd/metrics.hpp"
#include "nojd/problemgen.hpp"

using namespace nojd;

TEST_CASE("generation is deterministic and seed-sensitive") {
    ScenarioSpec spec = scenario_by_name("ref-n5");
    spec.seed = 99;
    const ProblemInstance a = generate(spec);
    const ProblemInstance b = generate(spec);
    for (int k = 0; k < a.set.k; ++k) REQUIRE(a.set.matrices[k] == b.set.matrices[k]);
    REQUIRE(a.set.truth->mixing == b.set.truth->mixing);
    REQUIRE(a.measured.mou == b.measured.mou);

    spec.seed = 100;
    const ProblemInstance c = generate(spec);
    REQUIRE(a.set.matrices[0] != c.set.matrices[0]);
}

TEST_CASE("reference scenario meets its bounds") {
    ScenarioSpec spec = scenario_by_name("ref-n5");
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        spec.seed = seed;
        const ProblemInstance inst = generate(spec);
        inst.validate();
        REQUIRE(inst.set.n == 5);
        REQUIRE(inst.set.k == 5);
        REQUIRE(inst.measured.mou < 0.6);
        REQUIRE(inst.measured.cond_a < 5.0);
        REQUIRE(inst.xi.empty());
        REQUIRE(inst.measured.pl_db.empty());
        // Matrices carry the exact factorization.
        const TargetSet rebuilt =
            TargetSet::from_truth(inst.set.truth->mixing, inst.set.truth->diagonals);
        for (int k = 0; k < inst.set.k; ++k)
            REQUIRE(inst.set.matrices[k] == rebuilt.matrices[k]);
    }
}

TEST_CASE("stress scenarios reach their regimes") {
    ScenarioSpec mou_spec = scenario_by_name("mou-n5");
    mou_spec.seed = 7;
    const ProblemInstance mou_inst = generate(mou_spec);
    REQUIRE(mou_inst.measured.mou > 1 - 1e-6);
    REQUIRE(mou_inst.measured.mou < 1.0);

    ScenarioSpec conda_spec = scenario_by_name("conda-n5");
    conda_spec.seed = 7;
    const ProblemInstance conda_inst = generate(conda_spec);
    REQUIRE(conda_inst.measured.cond_a > 100.0);

    ScenarioSpec condd_spec = scenario_by_name("condd-n5");
    condd_spec.seed = 7;
    const ProblemInstance condd_inst = generate(condd_spec);
    double worst = 0;
    for (double c : condd_inst.measured.cond_d) worst = std::max(worst, c);
    REQUIRE(worst > 1e4);
}

TEST_CASE("conflicting stress knobs are rejected") {
    ScenarioSpec spec;
    spec.n = 4;
    spec.k = 3;
    spec.mou_min = 0.9;
    spec.cond_d_min = 1e4;
    REQUIRE_THROWS_AS(spec.validate(), std::invalid_argument);

    ScenarioSpec bad_range;
    bad_range.n = 1;
    REQUIRE_THROWS_AS(bad_range.validate(), std::invalid_argument);
}

TEST_CASE("noise levels round trip within a hundredth of a dB") {
    ScenarioSpec spec = scenario_by_name("ref-n5");
    spec.seed = 11;
    const ProblemInstance base = generate(spec);
    for (double pl : {0.0, 10.0, 30.0, 50.0}) {
        const ProblemInstance noisy = add_noise(base, pl);
        REQUIRE(noisy.xi.size() == 5);
        REQUIRE(noisy.measured.pl_db.size() == 5);
        for (double measured : noisy.measured.pl_db) REQUIRE(std::abs(measured - pl) <= 0.01);
        for (int k = 0; k < 5; ++k)
            REQUIRE(noisy.set.matrices[k] != base.set.matrices[k]);
    }

    // 0 dB pins noise norm to signal norm.
    const ProblemInstance loud = add_noise(base, 0.0);
    for (int k = 0; k < 5; ++k) {
        const double signal = base.set.matrices[k].norm();
        REQUIRE(std::abs(loud.xi[k].norm() / signal - 1.0) <= 0.01);
    }
}

TEST_CASE("infinite level sentinel means exact") {
    ScenarioSpec spec = scenario_by_name("ref-n5");
    spec.seed = 12;
    const ProblemInstance base = generate(spec);
    const ProblemInstance exact = add_noise(base, std::numeric_limits<double>::infinity());
    for (int k = 0; k < 5; ++k) REQUIRE(exact.set.matrices[k] == base.set.matrices[k]);
    REQUIRE(exact.xi.empty());
    REQUIRE(exact.measured.pl_db.empty());

    REQUIRE_THROWS_AS(add_noise(base, std::numeric_limits<double>::quiet_NaN()),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(add_noise(base, -std::numeric_limits<double>::infinity()),
                      std::invalid_argument);
}

TEST_CASE("noise is deterministic in the seed and level") {
    ScenarioSpec spec = scenario_by_name("ref-n5");
    spec.seed = 13;
    const ProblemInstance base = generate(spec);
    const ProblemInstance a = add_noise(base, 20.0);
    const ProblemInstance b = add_noise(base, 20.0);
    for (int k = 0; k < 5; ++k) REQUIRE(a.xi[k] == b.xi[k]);

    const ProblemInstance c = add_noise(base, 20.0, 777);
    REQUIRE(a.xi[0] != c.xi[0]);
    const ProblemInstance d = add_noise(base, 30.0);  // level feeds the default stream
    REQUIRE(a.xi[0] != d.xi[0]);
}

TEST_CASE("scenario registry") {
    const auto names = scenario_names();
    REQUIRE(names.size() == 8);
    for (const auto& name : names) {
        const ScenarioSpec spec = scenario_by_name(name);
        spec.validate();
        REQUIRE(spec.k == 5);
    }
    REQUIRE_THROWS_AS(scenario_by_name("nope"), std::invalid_argument);
}

TEST_CASE("scenario spec files round trip") {
    ScenarioSpec spec = scenario_by_name("condd-n50");
    spec.seed = 4242;
    spec.pl_db = 25.0;

    std::stringstream buf;
    write_scenario_spec(buf, spec);
    const ScenarioSpec back = read_scenario_spec(buf);

    REQUIRE(back.n == spec.n);
    REQUIRE(back.k == spec.k);
    REQUIRE(back.seed == spec.seed);
    REQUIRE(back.mou_min == spec.mou_min);
    REQUIRE(back.mou_max == spec.mou_max);
    REQUIRE(back.cond_a_min == spec.cond_a_min);
    REQUIRE(back.cond_a_max == spec.cond_a_max);
    REQUIRE(back.cond_d_min == spec.cond_d_min);
    REQUIRE(back.pl_db == spec.pl_db);

    std::stringstream unknown("n = 4\nk = 2\nbogus = 1\n");
    REQUIRE_THROWS_AS(read_scenario_spec(unknown), std::runtime_error);
    std::stringstream badval("n = soup\n");
    REQUIRE_THROWS_AS(read_scenario_spec(badval), std::runtime_error);
}

TEST_CASE("instance validation catches tampering") {
    ScenarioSpec spec = scenario_by_name("ref-n5");
    spec.seed = 14;
    ProblemInstance inst = generate(spec);
    inst.validate();
    inst.measured.mou += 0.2;
    REQUIRE_THROWS(inst.validate());
}
