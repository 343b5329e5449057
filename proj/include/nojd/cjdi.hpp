// Complex joint diagonalization: sweeps over 1 <= i < j <= N with two
// rotation families per pair, operating directly on the split Hermitian
// working set with structure-preserving updates.
#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <chrono>
#include <functional>
#include <optional>
#include <sstream>

#include "nojd/embedding.hpp"
#include "nojd/jdi.hpp"
#include "nojd/metrics.hpp"
#include "nojd/report.hpp"
#include "nojd/rotations.hpp"

namespace nojd {

using ComplexSweepObserver = std::function<void(int, const HermitianSet&, const PlanePair&)>;

namespace detail {

inline double offdiag_sq(const HermitianSet& set) {
    double acc = 0;
    for (const auto& m : set.mats) {
        acc += m.re.squaredNorm() - m.re.diagonal().squaredNorm();
        acc += m.im.squaredNorm() - m.im.diagonal().squaredNorm();
    }
    return acc;
}

}  // namespace detail

// Splits the targets once, then sweeps pairs (i,j) with a family-one solve
// and update followed by a family-two solve and update; both magnitudes
// feed the stopping statistic. The flop counter covers criterion builds,
// solves, matrix updates, and diagonalizer accumulation; trajectory
// diagnostics are not counted. The per-sweep criterion value over the
// split working set equals the off-diagonal mass of the transformed input
// set exactly.
inline std::pair<ComplexDiagonalizer, RunReport> cjdi(const TargetSet& set,
                                                      const SweepConfig& cfg,
                                                      const ComplexSweepObserver& on_sweep = {}) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    HermitianSet work = hermitian_split(set);
    const int n = work.n;
    if (n < 2) throw std::invalid_argument("cjdi: need dimension >= 2");

    PlanePair v{MatR::Identity(n, n), MatR::Zero(n, n)};
    RunReport rep;
    rep.pair_visits_per_sweep = n * (n - 1);  // two family solves per pair
    FlopCount flops;

    int sweep = 0;
    double max_rot = 0;
    for (;;) {
        ++sweep;
        max_rot = 0;
        for (int i = 0; i < n - 1; ++i)
            for (int j = i + 1; j < n; ++j)
                for (const auto family : {RotationFamily::one, RotationFamily::two}) {
                    const CriterionMatrix crit = build_criterion(work, i, j, family, &flops);
                    if (!crit.r.allFinite()) {
                        std::ostringstream msg;
                        msg << "cjdi: non-finite working values at sweep " << sweep << ", pair ("
                            << i << "," << j << "), family "
                            << (family == RotationFamily::one ? 1 : 2);
                        throw std::runtime_error(msg.str());
                    }
                    const RotationSolution sol = solve_rotation(crit, i, j, family, &flops);
                    if (sol.skipped) {
                        ++rep.skipped_pairs;
                        continue;
                    }
                    apply_rotation_complex(work, sol, &flops);
                    apply_rotation_complex_rows(v, sol, &flops);
                    max_rot = std::max(max_rot, sol.magnitude());
                }

        rep.final_c_ils = detail::offdiag_sq(work);
        if (!std::isfinite(rep.final_c_ils)) {
            std::ostringstream msg;
            msg << "cjdi: non-finite working values at sweep " << sweep;
            throw std::runtime_error(msg.str());
        }
        if (cfg.record_trajectory) {
            SweepStats st;
            st.sweep = sweep;
            st.c_ils = rep.final_c_ils;
            st.max_rot = max_rot;
            st.flops = flops.value - rep.total_flops;
            if (set.truth)
                st.pi = performance_index(MatC(v.to_complex() * set.truth->mixing));
            rep.trajectory.push_back(st);
        }
        rep.total_flops = flops.value;
        if (on_sweep) on_sweep(sweep, work, v);
        if (max_rot <= cfg.tau || sweep >= cfg.max_sweeps) break;
    }

    rep.sweeps = sweep;
    rep.converged = max_rot <= cfg.tau;
    rep.final_max_rot = max_rot;
    ComplexDiagonalizer cd{v.to_complex()};
    if (set.truth) rep.final_pi = performance_index(MatC(cd.v * set.truth->mixing));
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(cd), std::move(rep)};
}

// Estimated mixing matrix, the inverse of the accumulated diagonalizer.
// The determinant has unit modulus by construction; drift outside a wide
// band signals corruption.
inline MatC mixing_estimate(const ComplexDiagonalizer& d) {
    if (d.v.rows() != d.v.cols() || d.v.rows() < 1)
        throw std::invalid_argument("mixing_estimate: need a square diagonalizer");
    Eigen::PartialPivLU<MatC> lu(d.v);
    const double det_mod = std::abs(lu.determinant());
    if (!(det_mod >= 1e-6 && det_mod <= 1e6))
        throw std::runtime_error("mixing_estimate: determinant drift outside [1e-6, 1e6]");
    MatC inv = lu.solve(MatC::Identity(d.v.rows(), d.v.cols()));
    if (!inv.allFinite()) throw std::runtime_error("mixing_estimate: singular diagonalizer");
    return inv;
}

}  // namespace nojd
