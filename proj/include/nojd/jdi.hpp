// Real-embedding diagonalization pipelines: the modified JDi sweep over all
// embedded index pairs, its paired-schedule variant, column pairing of the
// estimated embedded mixing matrix, and the basic complex generalization.
#pragma once

#include <Eigen/Core>
#include <chrono>
#include <functional>
#include <optional>
#include <sstream>
#include <vector>

#include "nojd/embedding.hpp"
#include "nojd/metrics.hpp"
#include "nojd/report.hpp"
#include "nojd/rotations.hpp"

namespace nojd {

struct RealDiagonalizer {
    MatR v;  // accumulated product of unit-determinant elementary rotations
};

struct ComplexDiagonalizer {
    MatC v;
};

struct ColumnPairing {
    // 2N column indices: entries (2m, 2m+1) are the matched pair feeding
    // recovered column m.
    std::vector<int> permutation;
    MatC mixing;                 // N recovered columns, unit norm, leading entry real-positive
    bool reliable = true;        // cleared when a best match correlates weakly
    double worst_residual = 0;   // max over pairs of the normalized association residual
};

// Associates the columns of an estimated embedded mixing matrix in pairs
// and collapses each pair to one complex column. The z-vector of a real
// column [t; b] is t - j*b; the two columns born from one complex source
// keep collinear z-vectors under any residual orthogonal pair mixing, so
// association reduces to maximal |correlation| of normalized z-vectors and
// the least-squares association residual is 1 - |correlation|^2.
inline ColumnPairing pair_columns(const MatR& a_real) {
    const auto dim = a_real.rows();
    if (dim != a_real.cols() || dim < 2 || dim % 2 != 0)
        throw std::invalid_argument("pair_columns: need a square even-dimension matrix");
    const int d = static_cast<int>(dim);
    const int n = d / 2;

    MatC z(n, d);
    for (int c = 0; c < d; ++c) {
        const double nrm = a_real.col(c).norm();
        if (!(nrm > 0)) throw std::invalid_argument("pair_columns: zero column");
        z.col(c) = (a_real.col(c).head(n) - Cx(0, 1) * a_real.col(c).tail(n)) / nrm;
    }

    ColumnPairing out;
    out.permutation.reserve(dim);
    out.mixing.resize(n, n);
    std::vector<char> used(d, 0);
    int m = 0;
    for (int i = 0; i < d; ++i) {
        if (used[i]) continue;
        used[i] = 1;
        int best = -1;
        double best_corr = -1;
        for (int j = i + 1; j < d; ++j) {
            if (used[j]) continue;
            const double corr = std::abs(z.col(j).dot(z.col(i)));
            if (corr > best_corr) {
                best_corr = corr;
                best = j;
            }
        }
        if (best < 0) throw std::invalid_argument("pair_columns: non-finite correlations");
        used[best] = 1;
        const double residual = std::max(0.0, 1.0 - best_corr * best_corr);
        out.worst_residual = std::max(out.worst_residual, residual);
        if (residual > 0.5) out.reliable = false;
        out.permutation.push_back(i);
        out.permutation.push_back(best);

        VecC col = z.col(i);  // unit norm by construction
        int lead = 0;
        while (lead < n - 1 && std::abs(col(lead)) <= 1e-14) ++lead;
        col *= std::conj(col(lead)) / std::abs(col(lead));
        out.mixing.col(m++) = col;
    }
    return out;
}

namespace detail {

inline double offdiag_sq(const std::vector<MatR>& mats) {
    double acc = 0;
    for (const auto& m : mats) acc += m.squaredNorm() - m.diagonal().squaredNorm();
    return acc;
}

// Complex diagonalizer snapshot from an accumulated real one: the columns
// of v^T carry the conjugated rows of the complex matrix, so pairing them
// and conjugate-transposing recovers it up to row scale and order.
inline MatC row_paired_diagonalizer(const MatR& v) {
    return pair_columns(v.transpose()).mixing.adjoint();
}

[[noreturn]] inline void abort_non_finite(const char* algo, int sweep, int i, int j) {
    std::ostringstream msg;
    msg << algo << ": non-finite working values at sweep " << sweep << ", pair (" << i << ","
        << j << ")";
    throw std::runtime_error(msg.str());
}

}  // namespace detail

// Invoked at each sweep boundary with the sweep number, the working set,
// and the accumulated diagonalizer.
using RealSweepObserver = std::function<void(int, const RealEmbeddedSet&, const MatR&)>;

// One elementary rotation per pair over all 1 <= i < j <= 2N, repeated
// until the sweep's largest rotation magnitude drops to tau or the sweep
// budget runs out (always at least one sweep). Skipped (degenerate) solves
// are excluded from the stopping statistic. When truth is supplied the
// per-sweep performance index of the pairing-recovered complex
// diagonalizer is recorded.
inline std::pair<RealDiagonalizer, RunReport> jdi_modified(
    const RealEmbeddedSet& input, const SweepConfig& cfg,
    const std::optional<MixingTruth>& truth = std::nullopt,
    const RealSweepObserver& on_sweep = {}) {
    input.validate();
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const int dim = input.real_dim();

    RealEmbeddedSet work = input;
    RealDiagonalizer diag{MatR::Identity(dim, dim)};
    RunReport rep;
    rep.pair_visits_per_sweep = dim * (dim - 1) / 2;
    FlopCount flops;

    int sweep = 0;
    double max_rot = 0;
    for (;;) {
        ++sweep;
        max_rot = 0;
        for (int i = 0; i < dim - 1; ++i)
            for (int j = i + 1; j < dim; ++j) {
                const CriterionMatrix crit = build_criterion(work.mats, i, j, &flops);
                if (!crit.r.allFinite()) detail::abort_non_finite("jdi_modified", sweep, i, j);
                const RotationSolution sol = solve_rotation(crit, i, j, RotationFamily::one, &flops);
                if (sol.skipped) {
                    ++rep.skipped_pairs;
                    continue;
                }
                const RotationCoeffs coeffs = rotation_coeffs(sol);
                for (auto& m : work.mats) apply_plane_rotation_at(m, i, j, coeffs, &flops);
                apply_plane_rotation_rows_at(diag.v, i, j, coeffs, &flops);
                max_rot = std::max(max_rot, sol.magnitude());
            }

        rep.final_c_ils = detail::offdiag_sq(work.mats);
        if (!std::isfinite(rep.final_c_ils)) detail::abort_non_finite("jdi_modified", sweep, 0, 1);
        if (cfg.record_trajectory) {
            SweepStats st;
            st.sweep = sweep;
            st.c_ils = rep.final_c_ils;
            st.max_rot = max_rot;
            st.flops = flops.value - rep.total_flops;
            if (truth)
                st.pi = performance_index(
                    MatC(detail::row_paired_diagonalizer(diag.v) * truth->mixing));
            rep.trajectory.push_back(st);
        }
        rep.total_flops = flops.value;
        if (on_sweep) on_sweep(sweep, work, diag.v);
        if (max_rot <= cfg.tau || sweep >= cfg.max_sweeps) break;
    }

    rep.sweeps = sweep;
    rep.converged = max_rot <= cfg.tau;
    rep.final_max_rot = max_rot;
    if (truth)
        rep.final_pi =
            performance_index(MatC(detail::row_paired_diagonalizer(diag.v) * truth->mixing));
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(diag), std::move(rep)};
}

// Same machinery restricted to the structure-preserving paired schedule:
// for each complex pair (i,j) a family-one then a family-two solve, each
// applied as the equivalent two commuting elementary rotations.
inline std::pair<RealDiagonalizer, RunReport> jdi_paired(
    const RealEmbeddedSet& input, const SweepConfig& cfg,
    const std::optional<MixingTruth>& truth = std::nullopt,
    const RealSweepObserver& on_sweep = {}) {
    input.validate();
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const int n = input.n;
    const int dim = input.real_dim();

    RealEmbeddedSet work = input;
    RealDiagonalizer diag{MatR::Identity(dim, dim)};
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
                    const CriterionMatrix crit = build_criterion_paired(work, i, j, family, &flops);
                    if (!crit.r.allFinite()) detail::abort_non_finite("jdi_paired", sweep, i, j);
                    const RotationSolution sol = solve_rotation(crit, i, j, family, &flops);
                    if (sol.skipped) {
                        ++rep.skipped_pairs;
                        continue;
                    }
                    apply_rotation_real(work, sol, &flops);
                    apply_rotation_real_rows(diag.v, sol, n, &flops);
                    max_rot = std::max(max_rot, sol.magnitude());
                }

        rep.final_c_ils = detail::offdiag_sq(work.mats);
        if (!std::isfinite(rep.final_c_ils)) detail::abort_non_finite("jdi_paired", sweep, 0, 1);
        if (cfg.record_trajectory) {
            SweepStats st;
            st.sweep = sweep;
            st.c_ils = rep.final_c_ils;
            st.max_rot = max_rot;
            st.flops = flops.value - rep.total_flops;
            if (truth)
                st.pi = performance_index(
                    MatC(detail::row_paired_diagonalizer(diag.v) * truth->mixing));
            rep.trajectory.push_back(st);
        }
        rep.total_flops = flops.value;
        if (on_sweep) on_sweep(sweep, work, diag.v);
        if (max_rot <= cfg.tau || sweep >= cfg.max_sweeps) break;
    }

    rep.sweeps = sweep;
    rep.converged = max_rot <= cfg.tau;
    rep.final_max_rot = max_rot;
    if (truth)
        rep.final_pi =
            performance_index(MatC(detail::row_paired_diagonalizer(diag.v) * truth->mixing));
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(diag), std::move(rep)};
}

// Three-step pipeline: Hermitian split, real embedding, modified JDi, then
// row pairing of the real diagonalizer to recover the complex one. The
// report's final criterion value refers to the recovered complex
// diagonalizer on the input set.
inline std::pair<ComplexDiagonalizer, RunReport> basic_generalized_jdi(const TargetSet& set,
                                                                       const SweepConfig& cfg) {
    const RealEmbeddedSet embedded = real_embed(hermitian_split(set));
    auto [rd, rep] = jdi_modified(embedded, cfg, set.truth);

    const ColumnPairing pairing = pair_columns(rd.v.transpose());
    rep.pairing_reliable = pairing.reliable;
    ComplexDiagonalizer cd{pairing.mixing.adjoint()};
    rep.final_c_ils = c_ils(cd.v, set);
    if (set.truth) rep.final_pi = performance_index(MatC(cd.v * set.truth->mixing));
    return {std::move(cd), std::move(rep)};
}

}  // namespace nojd
