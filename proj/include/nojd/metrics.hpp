// Joint-diagonalization quality metrics: performance index, diagonal
// collinearity (MOU), least-squares off-diagonal criterion, perturbation
// level, condition numbers.
#pragma once

#include <Eigen/Core>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <vector>

#include "nojd/embedding.hpp"

namespace nojd {

// Normalized distance of a global matrix from the set of generalized
// permutations (diagonal scaling times permutation); 0 iff each row and
// column carries exactly one nonzero entry. Uses squared moduli.
template <typename Derived>
double performance_index(const Eigen::MatrixBase<Derived>& g) {
    const auto n = g.rows();
    if (n != g.cols() || n < 2) throw std::invalid_argument("performance_index: need square n >= 2");
    double acc = 0;
    for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index r = 0; r < n; ++r) {
            double mx = 0, sum = 0;
            for (Eigen::Index c = 0; c < n; ++c) {
                const double a = pass == 0 ? std::norm(Cx(g(r, c))) : std::norm(Cx(g(c, r)));
                mx = std::max(mx, a);
                sum += a;
            }
            if (!(mx > 0))
                throw std::invalid_argument("performance_index: zero row or column");
            acc += sum / mx - 1;
        }
    }
    return acc / (2.0 * n * (n - 1));
}

// Maximum modulus of uncorrelation between the diagonal profiles
// d_i = [D_1(i,i) ... D_K(i,i)]: max over pairs of |d_i^H d_j| / (|d_i||d_j|).
// Input is the K diagonals (length N each); profiles are their transposed
// stacking. 1 means two sources are indistinguishable across the set.
inline double mou(const std::vector<VecC>& diagonals) {
    if (diagonals.empty()) throw std::invalid_argument("mou: empty diagonal set");
    const auto k = static_cast<Eigen::Index>(diagonals.size());
    const auto n = diagonals.front().size();
    if (n < 2) throw std::invalid_argument("mou: need at least two diagonal profiles");
    for (const auto& d : diagonals)
        if (d.size() != n) throw std::invalid_argument("mou: diagonal length mismatch");

    MatC profiles(k, n);  // column i holds d_i
    for (Eigen::Index kk = 0; kk < k; ++kk) profiles.row(kk) = diagonals[kk].transpose();
    std::vector<double> norms(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        norms[i] = profiles.col(i).norm();
        if (!(norms[i] > 0)) throw std::invalid_argument("mou: zero diagonal profile");
    }
    double best = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double c = std::abs(profiles.col(i).dot(profiles.col(j))) / (norms[i] * norms[j]);
            best = std::max(best, c);
        }
    return std::min(best, 1.0);
}

// Direct least-squares criterion: total squared off-diagonal mass of the
// congruence-transformed set.
inline double c_ils(const MatC& v, const TargetSet& set) {
    set.validate();
    if (v.rows() != set.n || v.cols() != set.n)
        throw std::invalid_argument("c_ils: diagonalizer dimension mismatch");
    double acc = 0;
    for (const auto& m : set.matrices) {
        MatC t = v * m * v.adjoint();
        t.diagonal().setZero();
        acc += t.squaredNorm();
    }
    return acc;
}

// Signal-to-perturbation ratio per matrix in dB:
//   10 log10(|A D_k A^H|_F / |Xi_k|_F).
// Exact matrices come from the noise-free set; zero noise gives +inf.
inline std::vector<double> perturbation_level(const TargetSet& exact,
                                              const std::vector<MatC>& xi) {
    exact.validate();
    if (xi.size() != exact.matrices.size())
        throw std::invalid_argument("perturbation_level: need one noise matrix per target");
    std::vector<double> out;
    out.reserve(xi.size());
    for (size_t k = 0; k < xi.size(); ++k) {
        const double signal = exact.matrices[k].norm();
        const double noise = xi[k].norm();
        out.push_back(noise > 0 ? 10 * std::log10(signal / noise)
                                : std::numeric_limits<double>::infinity());
    }
    return out;
}

inline double condition_number(const MatC& m) {
    Eigen::JacobiSVD<MatC> svd(m);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    return smin > 0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
}

inline double diagonal_condition(const VecC& d) {
    const auto mags = d.cwiseAbs();
    const double mn = mags.minCoeff();
    return mn > 0 ? mags.maxCoeff() / mn : std::numeric_limits<double>::infinity();
}

struct ScoreReport {
    double pi = std::numeric_limits<double>::quiet_NaN();  // NaN without truth
    double c_ils = 0;
    double mou = std::numeric_limits<double>::quiet_NaN();
    double cond_a = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> cond_d;
    std::vector<double> pl_db;  // empty for exact sets
};

// Scores an estimated diagonalizer against a set; truth-dependent fields
// stay NaN/empty when the set carries no truth. xi may be empty (exact).
inline ScoreReport score_report(const TargetSet& set, const std::vector<MatC>& xi,
                                const MatC& v_hat) {
    ScoreReport rep;
    rep.c_ils = c_ils(v_hat, set);
    if (set.truth) {
        rep.pi = performance_index(MatC(v_hat * set.truth->mixing));
        rep.mou = mou(set.truth->diagonals);
        rep.cond_a = condition_number(set.truth->mixing);
        for (const auto& d : set.truth->diagonals) rep.cond_d.push_back(diagonal_condition(d));
        if (!xi.empty()) {
            TargetSet exact = TargetSet::from_truth(set.truth->mixing, set.truth->diagonals);
            rep.pl_db = perturbation_level(exact, xi);
        }
    }
    return rep;
}

}  // namespace nojd
