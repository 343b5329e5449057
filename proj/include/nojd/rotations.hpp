// Elementary Givens+Shear rotations: the 3x3 criterion matrix, its
// closed-form constrained minimizer, and the rank-two congruence updates
// for the real-embedded and complex split-plane pipelines.
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <cstdint>

#include "nojd/embedding.hpp"

namespace nojd {

// Family one acts on the real parts of the pair entries (rows/cols (i,j)
// and (i+N,j+N) after embedding); family two on the imaginary parts
// ((i,j+N) and (j,i+N)).
enum class RotationFamily { one, two };

struct FlopCount {
    std::uint64_t value = 0;
    void add(std::uint64_t n) { value += n; }
};

inline void count_flops(FlopCount* fc, std::uint64_t n) {
    if (fc) fc->value += n;
}

// R = W W^T where column k of W is
//   [ (M_k(i,i)+M_k(j,j))/2, (M_k(i,i)-M_k(j,j))/2, c_k ]
// with c_k the targeted off-diagonal part. Positive semidefinite.
struct CriterionMatrix {
    Eigen::Matrix3d r = Eigen::Matrix3d::Zero();
};

struct RotationSolution {
    Eigen::Vector3d v{0, 0, 1};  // [sinh 2y, -sin 2t cosh 2y, cos 2t cosh 2y]
    double cos_theta = 1, sin_theta = 0;
    double cosh_y = 1, sinh_y = 0;
    int i = 0, j = 0;
    RotationFamily family = RotationFamily::one;
    bool skipped = false;  // degenerate pencil: identity returned, excluded from stopping stats

    double magnitude() const { return std::max(std::abs(sin_theta), std::abs(sinh_y)); }
    bool identity() const { return sin_theta == 0 && sinh_y == 0; }
};

inline RotationSolution identity_solution(int i, int j, RotationFamily family, bool skipped) {
    RotationSolution sol;
    sol.i = i;
    sol.j = j;
    sol.family = family;
    sol.skipped = skipped;
    return sol;
}

// Row-combination coefficients of H = S(y) G(theta) (rows i and j):
//   [ a11 a12 ]   [ cosh cos - sinh sin   cosh sin + sinh cos ]
//   [ a21 a22 ] = [ sinh cos - cosh sin   cosh cos + sinh sin ]
struct RotationCoeffs {
    double a11, a12, a21, a22;
};

inline RotationCoeffs rotation_coeffs(const RotationSolution& s, bool negate_shear = false) {
    const double sh = negate_shear ? -s.sinh_y : s.sinh_y;
    return {s.cosh_y * s.cos_theta - sh * s.sin_theta,
            s.cosh_y * s.sin_theta + sh * s.cos_theta,
            sh * s.cos_theta - s.cosh_y * s.sin_theta,
            s.cosh_y * s.cos_theta + sh * s.sin_theta};
}

// The constraint-surface vector reproduced from the extracted parameters.
inline Eigen::Vector3d parameter_vector(const RotationSolution& s) {
    const double ch2 = s.cosh_y * s.cosh_y + s.sinh_y * s.sinh_y;
    const double s2t = 2 * s.sin_theta * s.cos_theta;
    const double c2t = s.cos_theta * s.cos_theta - s.sin_theta * s.sin_theta;
    return {2 * s.sinh_y * s.cosh_y, -s2t * ch2, c2t * ch2};
}

namespace detail {

inline void criterion_accumulate(Eigen::Matrix3d& r, double w0, double w1, double w2) {
    r(0, 0) += w0 * w0;
    r(0, 1) += w0 * w1;
    r(0, 2) += w0 * w2;
    r(1, 1) += w1 * w1;
    r(1, 2) += w1 * w2;
    r(2, 2) += w2 * w2;
}

inline void criterion_mirror(Eigen::Matrix3d& r) {
    r(1, 0) = r(0, 1);
    r(2, 0) = r(0, 2);
    r(2, 1) = r(1, 2);
}

}  // namespace detail

// Single-entry criterion of the real pipeline: c_k = M_k(i,j).
inline CriterionMatrix build_criterion(const std::vector<MatR>& mats, int i, int j,
                                       FlopCount* fc = nullptr) {
    if (mats.empty() || i < 0 || j <= i || j >= mats.front().rows())
        throw std::invalid_argument("build_criterion: bad pair indices");
    CriterionMatrix out;
    for (const auto& m : mats) {
        const double hs = (m(i, i) + m(j, j)) / 2;
        const double hd = (m(i, i) - m(j, j)) / 2;
        detail::criterion_accumulate(out.r, hs, hd, m(i, j));
    }
    detail::criterion_mirror(out.r);
    count_flops(fc, 8 * mats.size());
    return out;
}

inline CriterionMatrix build_criterion(const RealEmbeddedSet& set, int i, int j,
                                       FlopCount* fc = nullptr) {
    return build_criterion(set.mats, i, j, fc);
}

// Paired-schedule criterion on an embedded set, complex pair indices
// i < j < N. The mirror plane of family one carries an identical column;
// for family two the negated shear of the mirror plane flips the sign of
// its whole column, which squares away. Either way each matrix
// contributes its primary-plane column twice.
inline CriterionMatrix build_criterion_paired(const RealEmbeddedSet& set, int i, int j,
                                              RotationFamily family, FlopCount* fc = nullptr) {
    if (set.mats.empty() || i < 0 || j <= i || j >= set.n)
        throw std::invalid_argument("build_criterion_paired: bad pair indices");
    const int n = set.n;
    CriterionMatrix out;
    for (const auto& m : set.mats) {
        double hs, hd, c;
        if (family == RotationFamily::one) {
            hs = (m(i, i) + m(j, j)) / 2;
            hd = (m(i, i) - m(j, j)) / 2;
            c = m(i, j);
        } else {
            hs = (m(i, i) + m(j + n, j + n)) / 2;
            hd = (m(i, i) - m(j + n, j + n)) / 2;
            c = m(i, j + n);
        }
        detail::criterion_accumulate(out.r, hs, hd, c);
    }
    out.r *= 2;
    detail::criterion_mirror(out.r);
    count_flops(fc, 8 * set.mats.size() + 6);
    return out;
}

// Family-dispatched criterion of the complex pipeline: c_k is the real
// (family one) or imaginary (family two) part of M_k(i,j). Diagonal
// entries of the Hermitian working matrices are real.
inline CriterionMatrix build_criterion(const HermitianSet& set, int i, int j,
                                       RotationFamily family, FlopCount* fc = nullptr) {
    if (set.mats.empty() || i < 0 || j <= i || j >= set.n)
        throw std::invalid_argument("build_criterion: bad pair indices");
    CriterionMatrix out;
    for (const auto& m : set.mats) {
        const double hs = (m.re(i, i) + m.re(j, j)) / 2;
        const double hd = (m.re(i, i) - m.re(j, j)) / 2;
        const double c = family == RotationFamily::one ? m.re(i, j) : m.im(i, j);
        detail::criterion_accumulate(out.r, hs, hd, c);
    }
    detail::criterion_mirror(out.r);
    count_flops(fc, 8 * set.mats.size());
    return out;
}

// Minimizes v^T R v over the hyperboloid v^T J v = 1, J = diag(-1,1,1):
// v is the eigenvector of the median generalized eigenvalue of (R, J),
// found through the characteristic cubic of J*R (three real roots for a
// PSD R). Degenerate pencils (complex roots beyond tolerance, repeated
// median eigenvalue, eigenvector with non-positive hyperbolic norm,
// |sinh y| > 10) yield the identity with the skipped flag set.
inline RotationSolution solve_rotation(const CriterionMatrix& crit, int i, int j,
                                       RotationFamily family = RotationFamily::one,
                                       FlopCount* fc = nullptr) {
    // Fixed-size straight-line solve; counted flat.
    count_flops(fc, 95);

    const double scale = crit.r.cwiseAbs().maxCoeff();
    if (!(scale > 0)) return identity_solution(i, j, family, false);  // criterion already zero
    if (!std::isfinite(scale)) return identity_solution(i, j, family, true);

    const Eigen::Matrix3d rn = crit.r / scale;
    Eigen::Matrix3d b = rn;
    b.row(0) = -rn.row(0);  // b = J * R

    // Characteristic cubic x^3 - c2 x^2 + c1 x - c0, depressed by x = t + c2/3.
    const double c2 = b.trace();
    const double c1 = b(0, 0) * b(1, 1) - b(0, 1) * b(1, 0) + b(0, 0) * b(2, 2) -
                      b(0, 2) * b(2, 0) + b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1);
    const double c0 = b.determinant();
    // Rank-one criterion (all weight vectors parallel): two eigenvalues
    // collapse at zero and the median eigenvector is a whole subspace. The
    // cubic smears such roots to ~sqrt(eps), past the gap guard below, so
    // detect the collapse from the invariants instead.
    if (std::abs(c1) <= 1e-12 && std::abs(c0) <= 1e-12)
        return identity_solution(i, j, family, true);
    const double p = c1 - c2 * c2 / 3;
    const double q = c2 * c1 / 3 - 2 * c2 * c2 * c2 / 27 - c0;
    if (p >= 0) return identity_solution(i, j, family, true);  // at most one real root

    const double s = std::sqrt(-p / 3);
    const double u = -q / (2 * s * s * s);
    double lam[3];
    {
        const double phi = std::acos(std::clamp(u, -1.0, 1.0)) / 3;
        constexpr double two_thirds_pi = 2.0943951023931953;
        for (int k = 0; k < 3; ++k) lam[k] = 2 * s * std::cos(phi - two_thirds_pi * k) + c2 / 3;
        std::sort(lam, lam + 3);
        if (std::abs(u) > 1) {
            // Clamping collapsed the complex pair onto a double root; the
            // remaining simple root r is still accurate. Imaginary part of
            // the true pair: sqrt(3 r^2 + 4 p) / 2.
            const double r = lam[2] - lam[0] > 2 * (lam[1] - lam[0]) ? lam[2] : lam[0];
            const double t = r - c2 / 3;
            const double imsq = 3 * t * t + 4 * p;
            if (std::sqrt(std::max(imsq, 0.0)) / 2 > 1e-10)
                return identity_solution(i, j, family, true);
        }
    }

    const double eig_span = std::max({std::abs(lam[0]), std::abs(lam[2]), 1.0});
    if (std::min(lam[1] - lam[0], lam[2] - lam[1]) <= 1e-11 * eig_span)
        return identity_solution(i, j, family, true);  // median eigenvalue not simple

    Eigen::Matrix3d c = b;
    c.diagonal().array() -= lam[1];
    Eigen::Vector3d cand[3] = {c.row(0).cross(c.row(1)), c.row(0).cross(c.row(2)),
                               c.row(1).cross(c.row(2))};
    Eigen::Vector3d v = cand[0];
    for (int k = 1; k < 3; ++k)
        if (cand[k].squaredNorm() > v.squaredNorm()) v = cand[k];

    if (v.norm() < 1e-14) {
        // Nearly parallel rows: one inverse-iteration step from a fixed seed.
        Eigen::Matrix3d m = b;
        m.diagonal().array() -= lam[1] + 1e-12;
        const Eigen::Vector3d seed(0.577350269189625, 0.577350269189626, 0.577350269189627);
        v = Eigen::PartialPivLU<Eigen::Matrix3d>(m).solve(seed);
        if (!v.allFinite() || v.norm() < 1e-300) return identity_solution(i, j, family, true);
    }
    v.normalize();

    const double jn = -v(0) * v(0) + v(1) * v(1) + v(2) * v(2);
    if (jn < 1e-12) return identity_solution(i, j, family, true);
    v /= std::sqrt(jn);
    if (v(2) < 0) v = -v;

    RotationSolution sol;
    sol.i = i;
    sol.j = j;
    sol.family = family;
    const double ch2 = std::sqrt(1 + v(0) * v(0));
    sol.cosh_y = std::sqrt((1 + ch2) / 2);
    sol.sinh_y = v(0) / (2 * sol.cosh_y);
    sol.cos_theta = std::sqrt(std::max((1 + v(2) / ch2) / 2, 0.0));
    sol.sin_theta = -v(1) / (2 * sol.cos_theta * ch2);
    sol.v = v;
    if (std::abs(sol.sinh_y) > 10) return identity_solution(i, j, family, true);
    return sol;
}

// In-place congruence M <- H M H^T for one elementary rotation acting on
// rows/columns (sol.i, sol.j) of a real matrix. Bitwise-symmetric on
// symmetric input.
inline void apply_plane_rotation_at(MatR& m, int i, int j, const RotationCoeffs& a,
                                    FlopCount* fc = nullptr) {
    const auto dim = m.cols();
    for (Eigen::Index c = 0; c < dim; ++c) {
        const double xi = m(i, c), xj = m(j, c);
        m(i, c) = a.a11 * xi + a.a12 * xj;
        m(j, c) = a.a21 * xi + a.a22 * xj;
    }
    for (Eigen::Index r = 0; r < dim; ++r) {
        const double xi = m(r, i), xj = m(r, j);
        m(r, i) = a.a11 * xi + a.a12 * xj;
        m(r, j) = a.a21 * xi + a.a22 * xj;
    }
    count_flops(fc, 8 * static_cast<std::uint64_t>(dim));
}

inline void apply_plane_rotation(MatR& m, const RotationSolution& sol, FlopCount* fc = nullptr) {
    apply_plane_rotation_at(m, sol.i, sol.j, rotation_coeffs(sol), fc);
}

// Row-only update V <- H V (accumulation of the real diagonalizer).
inline void apply_plane_rotation_rows_at(MatR& v, int i, int j, const RotationCoeffs& a,
                                         FlopCount* fc = nullptr) {
    const auto dim = v.cols();
    for (Eigen::Index c = 0; c < dim; ++c) {
        const double xi = v(i, c), xj = v(j, c);
        v(i, c) = a.a11 * xi + a.a12 * xj;
        v(j, c) = a.a21 * xi + a.a22 * xj;
    }
    count_flops(fc, 4 * static_cast<std::uint64_t>(dim));
}

namespace detail {

struct PairedIndices {
    int i1, j1, i2, j2;
    bool negate_second_shear;
};

// The two commuting elementary rotations equivalent to one complex
// rotation after embedding. Indices are complex (0..N-1).
inline PairedIndices paired_indices(const RotationSolution& sol, int n) {
    if (sol.i < 0 || sol.j <= sol.i || sol.j >= n)
        throw std::invalid_argument("paired rotation: bad complex pair indices");
    if (sol.family == RotationFamily::one)
        return {sol.i, sol.j, sol.i + n, sol.j + n, false};
    return {sol.i, sol.j + n, sol.j, sol.i + n, true};
}

}  // namespace detail

// Paired update of the embedded working set; preserves the f(.) block
// structure (family one at (i,j) and (i+N,j+N) with equal parameters,
// family two at (i,j+N) and (j,i+N) with the shear sign inverted).
inline void apply_rotation_real(RealEmbeddedSet& set, const RotationSolution& sol,
                                FlopCount* fc = nullptr) {
    const auto idx = detail::paired_indices(sol, set.n);
    const auto a1 = rotation_coeffs(sol);
    const auto a2 = rotation_coeffs(sol, idx.negate_second_shear);
    for (auto& m : set.mats) {
        apply_plane_rotation_at(m, idx.i1, idx.j1, a1, fc);
        apply_plane_rotation_at(m, idx.i2, idx.j2, a2, fc);
    }
}

inline void apply_rotation_real_rows(MatR& v, const RotationSolution& sol, int n,
                                     FlopCount* fc = nullptr) {
    const auto idx = detail::paired_indices(sol, n);
    apply_plane_rotation_rows_at(v, idx.i1, idx.j1, rotation_coeffs(sol), fc);
    apply_plane_rotation_rows_at(v, idx.i2, idx.j2, rotation_coeffs(sol, idx.negate_second_shear), fc);
}

// Complex congruence M <- H M H^H on split planes, exploiting Hermitian
// symmetry: only rows (i,j) are recombined (8 flops per column), columns
// follow by conjugate mirroring. Family one touches only the real part of
// entry (i,j), family two only the imaginary part, bitwise.
inline void apply_rotation_complex(HermitianSet& set, const RotationSolution& sol,
                                   FlopCount* fc = nullptr) {
    const int n = set.n;
    const int i = sol.i, j = sol.j;
    if (i < 0 || j <= i || j >= n)
        throw std::invalid_argument("apply_rotation_complex: bad pair indices");
    const auto a = rotation_coeffs(sol);
    const Eigen::Vector3d v = parameter_vector(sol);
    const double a11s = a.a11 * a.a11, a12s = a.a12 * a.a12;
    const double a21s = a.a21 * a.a21, a22s = a.a22 * a.a22;
    const double x12 = 2 * a.a11 * a.a12, x34 = 2 * a.a21 * a.a22;
    count_flops(fc, 13);

    const bool fam1 = sol.family == RotationFamily::one;
    for (auto& m : set.mats) {
        MatR& re = m.re;
        MatR& im = m.im;
        const double dii = re(i, i), djj = re(j, j);
        const double br = re(i, j), bi = im(i, j);

        for (int c = 0; c < n; ++c) {
            if (c == i || c == j) continue;
            const double xr = re(i, c), xi = im(i, c);
            const double zr = re(j, c), zi = im(j, c);
            double nir, nii, njr, nji;
            if (fam1) {
                nir = a.a11 * xr + a.a12 * zr;
                nii = a.a11 * xi + a.a12 * zi;
                njr = a.a21 * xr + a.a22 * zr;
                nji = a.a21 * xi + a.a22 * zi;
            } else {
                nir = a.a11 * xr - a.a12 * zi;
                nii = a.a11 * xi + a.a12 * zr;
                njr = a.a21 * xi + a.a22 * zr;
                nji = -a.a21 * xr + a.a22 * zi;
            }
            re(i, c) = nir;
            im(i, c) = nii;
            re(j, c) = njr;
            im(j, c) = nji;
            re(c, i) = nir;
            im(c, i) = -nii;
            re(c, j) = njr;
            im(c, j) = -nji;
        }

        const double hs = (dii + djj) / 2, hd = (dii - djj) / 2;
        if (fam1) {
            re(i, i) = a11s * dii + x12 * br + a12s * djj;
            re(j, j) = a21s * dii + x34 * br + a22s * djj;
            const double nbr = v(0) * hs + v(1) * hd + v(2) * br;
            re(i, j) = nbr;
            re(j, i) = nbr;
        } else {
            re(i, i) = a11s * dii + x12 * bi + a12s * djj;
            re(j, j) = a21s * dii + x34 * bi + a22s * djj;
            const double nbi = v(0) * hs + v(1) * hd + v(2) * bi;
            im(i, j) = nbi;
            im(j, i) = -nbi;
        }
        count_flops(fc, 8 * static_cast<std::uint64_t>(n - 2) + 11);
    }
}

// Row-only complex update V <- H V on split planes.
inline void apply_rotation_complex_rows(PlanePair& v, const RotationSolution& sol,
                                        FlopCount* fc = nullptr) {
    const int i = sol.i, j = sol.j;
    const auto a = rotation_coeffs(sol);
    const auto dim = v.re.cols();
    const bool fam1 = sol.family == RotationFamily::one;
    for (Eigen::Index c = 0; c < dim; ++c) {
        const double xr = v.re(i, c), xi = v.im(i, c);
        const double zr = v.re(j, c), zi = v.im(j, c);
        if (fam1) {
            v.re(i, c) = a.a11 * xr + a.a12 * zr;
            v.im(i, c) = a.a11 * xi + a.a12 * zi;
            v.re(j, c) = a.a21 * xr + a.a22 * zr;
            v.im(j, c) = a.a21 * xi + a.a22 * zi;
        } else {
            v.re(i, c) = a.a11 * xr - a.a12 * zi;
            v.im(i, c) = a.a11 * xi + a.a12 * zr;
            v.re(j, c) = a.a21 * xi + a.a22 * zr;
            v.im(j, c) = -a.a21 * xr + a.a22 * zi;
        }
    }
    count_flops(fc, 8 * static_cast<std::uint64_t>(dim));
}

// Dense builders for reference checks.
inline MatR dense_rotation(int dim, int i, int j, double theta, double y) {
    const double ch = std::cosh(y), sh = std::sinh(y);
    const double ct = std::cos(theta), st = std::sin(theta);
    MatR h = MatR::Identity(dim, dim);
    h(i, i) = ch * ct - sh * st;
    h(i, j) = ch * st + sh * ct;
    h(j, i) = sh * ct - ch * st;
    h(j, j) = ch * ct + sh * st;
    return h;
}

inline MatC dense_rotation_complex(int n, int i, int j, double theta, double y,
                                   RotationFamily family) {
    const double ch = std::cosh(y), sh = std::sinh(y);
    const double ct = std::cos(theta), st = std::sin(theta);
    MatC h = MatC::Identity(n, n);
    if (family == RotationFamily::one) {
        h(i, i) = ch * ct - sh * st;
        h(i, j) = ch * st + sh * ct;
        h(j, i) = sh * ct - ch * st;
        h(j, j) = ch * ct + sh * st;
    } else {
        h(i, i) = ch * ct - sh * st;
        h(i, j) = Cx(0, ch * st + sh * ct);
        h(j, i) = Cx(0, -(sh * ct - ch * st));
        h(j, j) = ch * ct + sh * st;
    }
    return h;
}

}  // namespace nojd
