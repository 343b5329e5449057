// Monte Carlo benchmark harness: runs the diagonalization algorithms over
// generated scenario instances, in exact-set mode (per-sweep trajectories)
// or perturbation-grid mode (final index versus level), and writes
// deterministic CSV reports plus a human-readable digest.
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "nojd/cjdi.hpp"
#include "nojd/jdi.hpp"
#include "nojd/problemgen.hpp"
#include "nojd/report.hpp"

namespace nojd {

enum class Algorithm { cjdi, basic };

inline const char* algorithm_name(Algorithm a) {
    return a == Algorithm::cjdi ? "cjdi" : "basic";
}

inline Algorithm algorithm_by_name(const std::string& name) {
    if (name == "cjdi") return Algorithm::cjdi;
    if (name == "basic") return Algorithm::basic;
    throw std::invalid_argument("algorithm_by_name: unknown algorithm " + name);
}

// A run that hit the sweep budget while the index stayed high.
inline bool divergent_run(double final_pi, bool converged) {
    return !converged && final_pi > 1e-2;
}

struct RunRecord {
    int run = 0;
    bool failed = false;
    std::string error;
    RunReport report;
};

struct PlRunRecord {
    double pl_db = 0;
    int run = 0;
    bool failed = false;
    std::string error;
    double final_pi = std::numeric_limits<double>::quiet_NaN();
    int sweeps = 0;
    bool converged = false;
};

struct AlgoCampaign {
    Algorithm algo = Algorithm::cjdi;
    std::vector<RunRecord> runs;       // exact-set mode, indexed by run
    std::vector<PlRunRecord> pl_runs;  // grid mode, indexed run-major (run * grid + level)
};

struct CampaignResult {
    std::string scenario_id;
    ScenarioSpec spec;
    SweepConfig cfg;
    int runs = 0;
    std::vector<double> pl_grid;  // empty in exact-set mode
    std::vector<AlgoCampaign> algos;
    int failed_runs = 0;  // run indices whose generation or every record failed
    double wall_seconds = 0;
};

inline std::vector<double> default_pl_grid() { return {0, 10, 20, 30, 40, 50}; }

namespace detail {

inline int worker_count(int runs) {
    int cap = static_cast<int>(std::thread::hardware_concurrency());
    if (cap < 1) cap = 1;
    if (const char* env = std::getenv("NOJD_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) cap = v;
    }
    return std::clamp(cap, 1, std::max(1, runs));
}

template <typename Fn>
void parallel_runs(int runs, const Fn& fn) {
    const int workers = worker_count(runs);
    if (workers <= 1) {
        for (int r = 0; r < runs; ++r) fn(r);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int r = next.fetch_add(1); r < runs; r = next.fetch_add(1)) fn(r);
        });
    for (auto& t : pool) t.join();
}

inline RunReport execute(Algorithm algo, const TargetSet& set, const SweepConfig& cfg) {
    if (algo == Algorithm::cjdi) return cjdi(set, cfg).second;
    return basic_generalized_jdi(set, cfg).second;
}

// Scientific notation with 10 significant digits; non-finite values are
// normalized so equal results serialize identically.
inline std::string fmt_sci(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9e", v);
    return buf;
}

inline std::string fmt_short(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// Nearest-rank quantile of an unsorted sample; NaN on empty input.
inline double quantile(std::vector<double> xs, double q) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(xs.begin(), xs.end());
    const auto idx = std::min(xs.size() - 1,
                              static_cast<size_t>(q * static_cast<double>(xs.size())));
    return xs[idx];
}

struct GroupStats {
    int present = 0, divergent = 0, converged = 0;
    double mean_pi = std::numeric_limits<double>::quiet_NaN();
    double mean_pi_excl = std::numeric_limits<double>::quiet_NaN();
    double median_pi = std::numeric_limits<double>::quiet_NaN();
    double p90_pi = std::numeric_limits<double>::quiet_NaN();
    double mean_sweeps = std::numeric_limits<double>::quiet_NaN();
};

template <typename Rec>
GroupStats group_stats(const std::vector<Rec>& recs, double (*pi_of)(const Rec&),
                       int (*sweeps_of)(const Rec&), bool (*conv_of)(const Rec&)) {
    GroupStats g;
    std::vector<double> pis, pis_excl;
    double sweep_sum = 0;
    for (const auto& r : recs) {
        if (r.failed) continue;
        ++g.present;
        const double pi = pi_of(r);
        const bool conv = conv_of(r);
        pis.push_back(pi);
        if (divergent_run(pi, conv))
            ++g.divergent;
        else
            pis_excl.push_back(pi);
        if (conv) {
            ++g.converged;
            sweep_sum += sweeps_of(r);
        }
    }
    const auto mean = [](const std::vector<double>& xs) {
        if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
        double s = 0;
        for (double x : xs) s += x;
        return s / static_cast<double>(xs.size());
    };
    g.mean_pi = mean(pis);
    g.mean_pi_excl = mean(pis_excl);
    g.median_pi = quantile(pis, 0.5);
    g.p90_pi = quantile(pis, 0.9);
    if (g.converged > 0) g.mean_sweeps = sweep_sum / g.converged;
    return g;
}

}  // namespace detail

// Runs the scenario `runs` times per algorithm with per-run derived seeds.
// Without a level grid each run records its sweep trajectory on the
// generated set; with a grid, each run's exact instance is re-perturbed at
// every level and only final figures are kept. Generation or solver
// failures are recorded per run, fatal only past a 10% budget. Results are
// deterministic for a given spec seed regardless of the worker count.
inline CampaignResult run_campaign(const ScenarioSpec& spec, std::vector<Algorithm> algorithms,
                                   int runs,
                                   const std::optional<std::vector<double>>& pl_grid = std::nullopt,
                                   const SweepConfig& cfg = {},
                                   const std::string& scenario_id = "custom") {
    spec.validate();
    cfg.validate();
    if (runs < 0) throw std::invalid_argument("run_campaign: negative run count");
    if (algorithms.empty()) throw std::invalid_argument("run_campaign: no algorithms selected");
    const auto t0 = std::chrono::steady_clock::now();

    CampaignResult res;
    res.scenario_id = scenario_id;
    res.spec = spec;
    res.cfg = cfg;
    res.runs = runs;
    if (pl_grid) res.pl_grid = *pl_grid;
    const int levels = static_cast<int>(res.pl_grid.size());
    for (const Algorithm a : algorithms) {
        AlgoCampaign ac;
        ac.algo = a;
        if (levels == 0)
            ac.runs.resize(runs);
        else
            ac.pl_runs.resize(static_cast<size_t>(runs) * levels);
        res.algos.push_back(std::move(ac));
    }

    detail::parallel_runs(runs, [&](int r) {
        const std::uint64_t run_seed = derive_seed(spec.seed, static_cast<std::uint64_t>(r));
        ScenarioSpec rs = spec;
        rs.seed = run_seed;

        ProblemInstance inst;
        std::string gen_error;
        bool generated = false;
        try {
            inst = generate(rs);
            generated = true;
        } catch (const std::exception& e) {
            gen_error = e.what();
        }

        if (levels == 0) {
            for (auto& ac : res.algos) {
                RunRecord rec;
                rec.run = r;
                if (!generated) {
                    rec.failed = true;
                    rec.error = gen_error;
                } else {
                    try {
                        rec.report = detail::execute(ac.algo, inst.set, cfg);
                    } catch (const std::exception& e) {
                        rec.failed = true;
                        rec.error = e.what();
                    }
                }
                ac.runs[r] = std::move(rec);
            }
            return;
        }

        SweepConfig quiet = cfg;
        quiet.record_trajectory = false;
        for (int g = 0; g < levels; ++g) {
            const size_t slot = static_cast<size_t>(r) * levels + g;
            ProblemInstance noisy;
            std::string noise_error = gen_error;
            bool have_noisy = false;
            if (generated) {
                try {
                    noisy = add_noise(inst, res.pl_grid[g],
                                      derive_seed(run_seed, 1000 + static_cast<std::uint64_t>(g)));
                    have_noisy = true;
                } catch (const std::exception& e) {
                    noise_error = e.what();
                }
            }
            for (auto& ac : res.algos) {
                PlRunRecord rec;
                rec.pl_db = res.pl_grid[g];
                rec.run = r;
                if (!have_noisy) {
                    rec.failed = true;
                    rec.error = noise_error;
                } else {
                    try {
                        const RunReport rep = detail::execute(ac.algo, noisy.set, quiet);
                        rec.final_pi = rep.final_pi;
                        rec.sweeps = rep.sweeps;
                        rec.converged = rep.converged;
                    } catch (const std::exception& e) {
                        rec.failed = true;
                        rec.error = e.what();
                    }
                }
                ac.pl_runs[slot] = std::move(rec);
            }
        }
    });

    std::vector<char> run_failed(std::max(runs, 1), 0);
    for (const auto& ac : res.algos) {
        for (const auto& rec : ac.runs)
            if (rec.failed) run_failed[rec.run] = 1;
        for (const auto& rec : ac.pl_runs)
            if (rec.failed) run_failed[rec.run] = 1;
    }
    res.failed_runs = static_cast<int>(std::count(run_failed.begin(), run_failed.end(), 1));
    if (res.failed_runs * 10 > runs)
        throw std::runtime_error("run_campaign: failure budget exceeded (" +
                                 std::to_string(res.failed_runs) + "/" + std::to_string(runs) +
                                 " runs failed)");

    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

// Writes trajectory.csv, pl_curve.csv (grid mode), summary.csv, and
// campaign.txt under out_dir. CSV contents are byte-deterministic for a
// given seed; wall-clock and flop figures go only to the digest.
inline void report(const CampaignResult& res, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const auto open = [&](const char* name) {
        std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
        if (!out) throw std::runtime_error(std::string("report: cannot write ") + name);
        return out;
    };
    const bool grid_mode = !res.pl_grid.empty();

    {
        auto out = open("trajectory.csv");
        out << "algorithm,run,sweep,pi,c_ils,max_rot\n";
        if (!grid_mode)
            for (const auto& ac : res.algos)
                for (const auto& rec : ac.runs) {
                    if (rec.failed) continue;
                    for (const auto& st : rec.report.trajectory)
                        out << algorithm_name(ac.algo) << ',' << rec.run << ',' << st.sweep << ','
                            << detail::fmt_sci(st.pi) << ',' << detail::fmt_sci(st.c_ils) << ','
                            << detail::fmt_sci(st.max_rot) << '\n';
                }
    }

    if (grid_mode) {
        auto out = open("pl_curve.csv");
        out << "algorithm,pl_db,run,final_pi,sweeps,converged\n";
        const int levels = static_cast<int>(res.pl_grid.size());
        for (const auto& ac : res.algos)
            for (int g = 0; g < levels; ++g)
                for (int r = 0; r < res.runs; ++r) {
                    const auto& rec = ac.pl_runs[static_cast<size_t>(r) * levels + g];
                    if (rec.failed) continue;
                    out << algorithm_name(ac.algo) << ',' << detail::fmt_short(rec.pl_db) << ','
                        << rec.run << ',' << detail::fmt_sci(rec.final_pi) << ',' << rec.sweeps
                        << ',' << (rec.converged ? 1 : 0) << '\n';
                }
    }

    {
        auto out = open("summary.csv");
        out << "scenario,algorithm,runs,mean_final_pi,mean_final_pi_excl_divergent,"
               "median_final_pi,p90_final_pi,divergence_rate,mean_sweeps_to_tau\n";
        const auto row = [&](const std::string& id, Algorithm algo,
                             const detail::GroupStats& g, int attempted) {
            out << id << ',' << algorithm_name(algo) << ',' << attempted << ','
                << detail::fmt_sci(g.mean_pi) << ',' << detail::fmt_sci(g.mean_pi_excl) << ','
                << detail::fmt_sci(g.median_pi) << ',' << detail::fmt_sci(g.p90_pi) << ','
                << detail::fmt_sci(attempted > 0
                                       ? static_cast<double>(g.divergent) / attempted
                                       : std::numeric_limits<double>::quiet_NaN())
                << ',' << detail::fmt_sci(g.mean_sweeps) << '\n';
        };
        if (!grid_mode) {
            for (const auto& ac : res.algos)
                row(res.scenario_id, ac.algo,
                    detail::group_stats<RunRecord>(
                        ac.runs, [](const RunRecord& r) { return r.report.final_pi; },
                        [](const RunRecord& r) { return r.report.sweeps; },
                        [](const RunRecord& r) { return r.report.converged; }),
                    res.runs);
        } else {
            const int levels = static_cast<int>(res.pl_grid.size());
            for (const auto& ac : res.algos)
                for (int g = 0; g < levels; ++g) {
                    std::vector<PlRunRecord> slice;
                    slice.reserve(res.runs);
                    for (int r = 0; r < res.runs; ++r)
                        slice.push_back(ac.pl_runs[static_cast<size_t>(r) * levels + g]);
                    row(res.scenario_id + "/pl=" + detail::fmt_short(res.pl_grid[g]), ac.algo,
                        detail::group_stats<PlRunRecord>(
                            slice, [](const PlRunRecord& r) { return r.final_pi; },
                            [](const PlRunRecord& r) { return r.sweeps; },
                            [](const PlRunRecord& r) { return r.converged; }),
                        res.runs);
                }
        }
    }

    {
        auto out = open("campaign.txt");
        out << "scenario: " << res.scenario_id << "\n";
        out << "runs: " << res.runs << "  failed: " << res.failed_runs << "\n";
        out << "dimension: n=" << res.spec.n << " k=" << res.spec.k << "  seed: " << res.spec.seed
            << "\n";
        out << "sweeps: tau=" << detail::fmt_short(res.cfg.tau)
            << " max_sweeps=" << res.cfg.max_sweeps << "\n";
        if (grid_mode) {
            out << "pl grid (dB):";
            for (double pl : res.pl_grid) out << ' ' << detail::fmt_short(pl);
            out << "\n";
        }
        out << "wall seconds (not deterministic): " << detail::fmt_short(res.wall_seconds)
            << "\n";
        for (const auto& ac : res.algos) {
            out << "\n[" << algorithm_name(ac.algo) << "]\n";
            if (!grid_mode) {
                const auto g = detail::group_stats<RunRecord>(
                    ac.runs, [](const RunRecord& r) { return r.report.final_pi; },
                    [](const RunRecord& r) { return r.report.sweeps; },
                    [](const RunRecord& r) { return r.report.converged; });
                out << "  completed runs: " << g.present << "  divergent: " << g.divergent
                    << "  divergence rate: "
                    << detail::fmt_short(res.runs > 0 ? static_cast<double>(g.divergent) / res.runs
                                                      : 0.0)
                    << "\n";
                out << "  mean final pi: " << detail::fmt_sci(g.mean_pi)
                    << "  (excl divergent: " << detail::fmt_sci(g.mean_pi_excl) << ")\n";
                out << "  mean sweeps to tau: " << detail::fmt_sci(g.mean_sweeps) << "\n";
                double flops_per_sweep = 0, wall = 0;
                int counted = 0;
                for (const auto& rec : ac.runs) {
                    if (rec.failed || rec.report.sweeps == 0) continue;
                    flops_per_sweep +=
                        static_cast<double>(rec.report.total_flops) / rec.report.sweeps;
                    wall += rec.report.wall_seconds;
                    ++counted;
                }
                if (counted > 0) {
                    out << "  mean flops per sweep: "
                        << detail::fmt_sci(flops_per_sweep / counted) << "\n";
                    out << "  mean run wall seconds (not deterministic): "
                        << detail::fmt_sci(wall / counted) << "\n";
                }
            } else {
                const int levels = static_cast<int>(res.pl_grid.size());
                for (int g = 0; g < levels; ++g) {
                    std::vector<PlRunRecord> slice;
                    for (int r = 0; r < res.runs; ++r)
                        slice.push_back(ac.pl_runs[static_cast<size_t>(r) * levels + g]);
                    const auto st = detail::group_stats<PlRunRecord>(
                        slice, [](const PlRunRecord& r) { return r.final_pi; },
                        [](const PlRunRecord& r) { return r.sweeps; },
                        [](const PlRunRecord& r) { return r.converged; });
                    out << "  pl=" << detail::fmt_short(res.pl_grid[g])
                        << " dB: mean final pi " << detail::fmt_sci(st.mean_pi) << ", divergent "
                        << st.divergent << "\n";
                }
            }
        }
    }
}

}  // namespace nojd
