// Sweep configuration and per-run reporting shared by the real and complex
// diagonalization pipelines.
#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace nojd {

struct SweepConfig {
    double tau = 1e-8;   // stop when the sweep's max rotation magnitude drops below
    int max_sweeps = 100;
    bool record_trajectory = true;

    void validate() const {
        if (!(tau > 0)) throw std::invalid_argument("SweepConfig: tau must be > 0");
        if (max_sweeps < 1) throw std::invalid_argument("SweepConfig: max_sweeps must be >= 1");
    }
};

struct SweepStats {
    int sweep = 0;           // 1-based
    double c_ils = 0;        // off-diagonal Frobenius mass of the working set
    double max_rot = 0;      // max(|sin theta|, |sinh y|) over non-skipped visits
    double pi = std::numeric_limits<double>::quiet_NaN();  // NaN without truth
    std::uint64_t flops = 0;
};

struct RunReport {
    std::vector<SweepStats> trajectory;  // filled when record_trajectory is set
    int sweeps = 0;
    bool converged = false;
    int pair_visits_per_sweep = 0;       // rotation solves per sweep, fixed by dimension
    std::uint64_t skipped_pairs = 0;     // degenerate solves over the whole run
    std::uint64_t total_flops = 0;
    double final_max_rot = std::numeric_limits<double>::quiet_NaN();
    double final_c_ils = std::numeric_limits<double>::quiet_NaN();
    double final_pi = std::numeric_limits<double>::quiet_NaN();
    double wall_seconds = 0;
    bool pairing_reliable = true;  // cleared when column pairing saw a weak match
};

}  // namespace nojd
