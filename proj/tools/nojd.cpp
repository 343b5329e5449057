// Command line front end: instance generation, single runs, Monte Carlo
// campaigns, and a quick oracle-backed selftest.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nojd/nojd.hpp"
#include "nojd/oracle.hpp"

namespace {

nojd::ScenarioSpec resolve_spec(const std::string& scenario, std::uint64_t seed) {
    nojd::ScenarioSpec spec = nojd::scenario_by_name(scenario);
    spec.seed = seed;
    return spec;
}

int default_runs(const nojd::ScenarioSpec& spec) { return spec.n >= 50 ? 20 : 200; }

void print_stats(const nojd::ProblemInstance& inst) {
    std::printf("n=%d k=%d seed=%llu\n", inst.set.n, inst.set.k,
                static_cast<unsigned long long>(inst.seed));
    std::printf("mou=%.6g cond_a=%.6g\n", inst.measured.mou, inst.measured.cond_a);
    std::printf("cond_d:");
    for (double c : inst.measured.cond_d) std::printf(" %.6g", c);
    std::printf("\n");
    if (!inst.measured.pl_db.empty()) {
        std::printf("pl_db:");
        for (double p : inst.measured.pl_db) std::printf(" %.6g", p);
        std::printf("\n");
    }
}

int cmd_gen(const std::string& scenario, std::uint64_t seed, std::optional<double> pl,
            const std::string& out) {
    nojd::ScenarioSpec spec = resolve_spec(scenario, seed);
    nojd::ProblemInstance inst = nojd::generate(spec);
    if (pl) inst = nojd::add_noise(inst, *pl);
    nojd::write_matrix_set(out, inst.set);
    print_stats(inst);
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

int cmd_run(const std::string& scenario, const std::string& input, std::uint64_t seed,
            const std::string& algo_name, std::optional<double> pl, double tau, int max_sweeps,
            const std::string& out) {
    nojd::SweepConfig cfg;
    cfg.tau = tau;
    cfg.max_sweeps = max_sweeps;

    nojd::TargetSet set;
    std::vector<nojd::MatC> xi;
    if (!input.empty()) {
        set = nojd::read_matrix_set(input);
        if (pl) {
            nojd::ProblemInstance inst;
            inst.set = set;
            inst.seed = seed;
            inst = nojd::add_noise(inst, *pl);
            set = inst.set;
            xi = inst.xi;
        }
    } else {
        nojd::ProblemInstance inst = nojd::generate(resolve_spec(scenario, seed));
        if (pl) inst = nojd::add_noise(inst, *pl);
        set = inst.set;
        xi = inst.xi;
    }

    const nojd::Algorithm algo = nojd::algorithm_by_name(algo_name);
    auto [diag, rep] = algo == nojd::Algorithm::cjdi ? nojd::cjdi(set, cfg)
                                                     : nojd::basic_generalized_jdi(set, cfg);

    const nojd::ScoreReport score = nojd::score_report(set, xi, diag.v);
    std::printf("algorithm=%s n=%d k=%d\n", algo_name.c_str(), set.n, set.k);
    std::printf("sweeps=%d converged=%d max_rot=%.9e\n", rep.sweeps, rep.converged ? 1 : 0,
                rep.final_max_rot);
    std::printf("c_ils=%.9e\n", score.c_ils);
    if (set.truth) std::printf("pi=%.9e\n", score.pi);
    if (!rep.pairing_reliable)
        std::printf("warning: column pairing residual above threshold, estimate unreliable\n");

    if (!out.empty()) {
        std::filesystem::create_directories(out);
        std::ofstream traj(std::filesystem::path(out) / "trajectory.csv", std::ios::binary);
        traj << "algorithm,run,sweep,pi,c_ils,max_rot\n";
        for (const auto& st : rep.trajectory)
            traj << algo_name << ",0," << st.sweep << ',' << nojd::detail::fmt_sci(st.pi) << ','
                 << nojd::detail::fmt_sci(st.c_ils) << ',' << nojd::detail::fmt_sci(st.max_rot)
                 << '\n';
        std::printf("wrote %s/trajectory.csv\n", out.c_str());
    }
    return 0;
}

int cmd_campaign(const std::string& scenario, std::uint64_t seed, int runs,
                 std::vector<std::string> algo_names, const std::vector<double>& pl, double tau,
                 int max_sweeps, const std::string& out) {
    nojd::ScenarioSpec spec = resolve_spec(scenario, seed);
    if (runs <= 0) runs = default_runs(spec);
    if (algo_names.empty()) algo_names = {"cjdi", "basic"};
    std::vector<nojd::Algorithm> algos;
    for (const auto& name : algo_names) algos.push_back(nojd::algorithm_by_name(name));

    nojd::SweepConfig cfg;
    cfg.tau = tau;
    cfg.max_sweeps = max_sweeps;

    std::optional<std::vector<double>> grid;
    if (!pl.empty()) grid = pl;

    const nojd::CampaignResult res =
        nojd::run_campaign(spec, algos, runs, grid, cfg, scenario);
    nojd::report(res, out);
    std::printf("campaign %s: %d runs, %d failed, %.3fs\n", scenario.c_str(), res.runs,
                res.failed_runs, res.wall_seconds);
    std::printf("wrote %s/{trajectory.csv,%ssummary.csv,campaign.txt}\n", out.c_str(),
                grid ? "pl_curve.csv," : "");
    return 0;
}

bool check(bool ok, const char* what) {
    std::printf("selftest %-32s %s\n", what, ok ? "ok" : "FAIL");
    return ok;
}

int cmd_selftest() {
    bool all = true;

    {
        // Split + embedding round trip on a generated set.
        const auto inst = nojd::generate(resolve_spec("ref-n5", 1));
        const auto split = nojd::hermitian_split(inst.set);
        double err = 0;
        for (int k = 0; k < inst.set.k; ++k) {
            const nojd::MatC rebuilt = split.mats[2 * k + 1].to_complex() +
                                       nojd::Cx(0, 1) * split.mats[2 * k].to_complex();
            err = std::max(err, (rebuilt - inst.set.matrices[k]).cwiseAbs().maxCoeff());
        }
        const auto embedded = nojd::real_embed(split);
        for (size_t m = 0; m < embedded.mats.size(); ++m) {
            const nojd::MatC back = nojd::real_unembed(embedded.mats[m]);
            err = std::max(err,
                           (back - split.mats[m].to_complex()).cwiseAbs().maxCoeff());
        }
        all &= check(err < 1e-14, "embedding round trip");
    }

    {
        // Closed-form rotation solve against the 101x101 parameter grid.
        nojd::Rng rng(7);
        bool ok = true;
        for (int trial = 0; trial < 200 && ok; ++trial) {
            Eigen::Matrix<double, 3, 6> b;
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 6; ++c) b(r, c) = rng.gaussian();
            nojd::CriterionMatrix crit;
            crit.r = b * b.transpose();
            const auto sol = nojd::solve_rotation(crit, 0, 1);
            if (sol.skipped) continue;
            const auto gm = nojd::oracle::grid_minimum(crit);
            const double solved =
                nojd::oracle::criterion_value(crit, std::atan2(sol.sin_theta, sol.cos_theta),
                                              std::asinh(sol.sinh_y));
            ok = solved <= gm.value + 1e-8;
        }
        all &= check(ok, "rotation solver vs grid");
    }

    {
        const auto inst = nojd::generate(resolve_spec("ref-n5", 3));
        const auto [diag, rep] = nojd::cjdi(inst.set, {});
        all &= check(rep.converged && rep.final_pi < 1e-8, "cjdi exact-set convergence");
        const auto [bd, brep] = nojd::basic_generalized_jdi(inst.set, {});
        all &= check(brep.converged && brep.final_pi < 1e-8, "basic exact-set convergence");
    }

    {
        const auto a = nojd::generate(resolve_spec("ref-n5", 5));
        const auto b = nojd::generate(resolve_spec("ref-n5", 5));
        bool same = true;
        for (int k = 0; k < a.set.k && same; ++k)
            same = a.set.matrices[k] == b.set.matrices[k];
        all &= check(same, "generation determinism");
    }

    std::printf("selftest: %s\n", all ? "PASS" : "FAIL");
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"non-orthogonal joint diagonalization toolkit"};
    app.require_subcommand(1);

    std::string scenario = "ref-n5";
    std::string input;
    std::string algo = "cjdi";
    std::vector<std::string> algos;
    std::string out;
    std::uint64_t seed = 0;
    int runs = 0;
    int max_sweeps = 100;
    double tau = 1e-8;
    std::optional<double> pl;
    std::vector<double> pl_grid;

    auto* gen = app.add_subcommand("gen", "generate an instance and write the matrix set");
    gen->add_option("--scenario", scenario, "scenario name")->default_val("ref-n5");
    gen->add_option("--seed", seed, "base seed");
    gen->add_option("--pl", pl, "perturbation level in dB (omit for exact)");
    gen->add_option("--out", out, "output file")->required();

    auto* run = app.add_subcommand("run", "run one algorithm on one instance");
    run->add_option("--scenario", scenario, "scenario name")->default_val("ref-n5");
    run->add_option("--input", input, "read the matrix set from a file instead of generating");
    run->add_option("--seed", seed, "base seed");
    run->add_option("--algo", algo, "cjdi or basic")->default_val("cjdi");
    run->add_option("--pl", pl, "perturbation level in dB");
    run->add_option("--tau", tau, "rotation-magnitude stopping threshold");
    run->add_option("--max-sweeps", max_sweeps, "sweep budget");
    run->add_option("--out", out, "directory for trajectory.csv");

    auto* camp = app.add_subcommand("campaign", "Monte Carlo campaign with CSV reports");
    camp->add_option("--scenario", scenario, "scenario name")->default_val("ref-n5");
    camp->add_option("--seed", seed, "base seed");
    camp->add_option("--runs", runs, "run count (0 = scenario default)");
    camp->add_option("--algo", algos, "algorithms, repeatable (default: cjdi and basic)");
    camp->add_option("--pl", pl_grid, "perturbation grid in dB, repeatable (omit for exact)");
    camp->add_option("--tau", tau, "rotation-magnitude stopping threshold");
    camp->add_option("--max-sweeps", max_sweeps, "sweep budget");
    camp->add_option("--out", out, "report directory")->default_val("out");

    auto* self = app.add_subcommand("selftest", "quick oracle-backed checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen(scenario, seed, pl, out);
        if (run->parsed()) return cmd_run(scenario, input, seed, algo, pl, tau, max_sweeps, out);
        if (camp->parsed())
            return cmd_campaign(scenario, seed, runs, algos, pl_grid, tau, max_sweeps, out);
        if (self->parsed()) return cmd_selftest();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
