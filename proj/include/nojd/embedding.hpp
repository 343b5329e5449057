// Target-set types, Hermitian splitting and the real block embedding that
// turns a set of complex matrices into real symmetric ones.
#pragma once

#include <Eigen/Core>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nojd {

using Cx = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using MatR = Eigen::MatrixXd;
using VecC = Eigen::VectorXcd;

// Ground truth of a synthetic problem: mixing A and the K diagonals d_k.
struct MixingTruth {
    MatC mixing;                  // N x N, invertible
    std::vector<VecC> diagonals;  // K vectors of length N
};

// K complex N x N matrices sharing one congruence structure M_k = A D_k A^H,
// possibly plus additive noise. Matrices need not be Hermitian.
struct TargetSet {
    int n = 0;
    int k = 0;
    std::vector<MatC> matrices;
    std::optional<MixingTruth> truth;

    void validate() const {
        if (n < 2) throw std::invalid_argument("TargetSet: dimension must be >= 2");
        if (k < 1 || static_cast<int>(matrices.size()) != k)
            throw std::invalid_argument("TargetSet: need K >= 1 matrices");
        for (const auto& m : matrices)
            if (m.rows() != n || m.cols() != n)
                throw std::invalid_argument("TargetSet: matrix dimension mismatch");
        if (truth) {
            if (truth->mixing.rows() != n || truth->mixing.cols() != n)
                throw std::invalid_argument("TargetSet: truth mixing dimension mismatch");
            if (static_cast<int>(truth->diagonals.size()) != k)
                throw std::invalid_argument("TargetSet: need one truth diagonal per matrix");
            for (const auto& d : truth->diagonals)
                if (d.size() != n) throw std::invalid_argument("TargetSet: truth diagonal length mismatch");
        }
    }

    // Exact-structure construction M_k = A diag(d_k) A^H with truth attached.
    static TargetSet from_truth(const MatC& a, const std::vector<VecC>& diagonals) {
        TargetSet set;
        set.n = static_cast<int>(a.rows());
        set.k = static_cast<int>(diagonals.size());
        set.matrices.reserve(diagonals.size());
        for (const auto& d : diagonals)
            set.matrices.push_back(a * d.asDiagonal() * a.adjoint());
        set.truth = MixingTruth{a, diagonals};
        set.validate();
        return set;
    }
};

// Complex matrix stored as split real/imaginary planes. The inner sweep
// kernels work on the planes directly; the embedding below is then a pure
// copy-and-negate.
struct PlanePair {
    MatR re, im;

    static PlanePair from_complex(const MatC& m) { return {m.real(), m.imag()}; }
    MatC to_complex() const { return re.cast<Cx>() + Cx(0, 1) * im.cast<Cx>(); }

    // Frobenius norm of the anti-Hermitian part relative to the matrix norm.
    double hermiticity_error() const {
        double scale = std::sqrt(re.squaredNorm() + im.squaredNorm());
        double skew = std::sqrt((re - re.transpose()).squaredNorm() +
                                (im + im.transpose()).squaredNorm());
        return scale > 0 ? skew / scale : 0.0;
    }
};

// 2K Hermitian N x N matrices produced by splitting a TargetSet. Index
// order follows the construction below: slot 2k holds the skew split of
// M_k and slot 2k+1 the Hermitian split, so each source matrix occupies
// an adjacent pair of slots.
struct HermitianSet {
    int n = 0;
    std::vector<PlanePair> mats;

    void validate(double tol = 1e-13) const {
        if (n < 2) throw std::invalid_argument("HermitianSet: dimension must be >= 2");
        if (mats.empty() || mats.size() % 2 != 0)
            throw std::invalid_argument("HermitianSet: expected 2K matrices");
        for (const auto& m : mats) {
            if (m.re.rows() != n || m.re.cols() != n || m.im.rows() != n || m.im.cols() != n)
                throw std::invalid_argument("HermitianSet: matrix dimension mismatch");
            if (m.hermiticity_error() > tol)
                throw std::invalid_argument("HermitianSet: matrix is not Hermitian");
        }
    }
};

// 2K real symmetric 2N x 2N matrices, the embedded working set.
struct RealEmbeddedSet {
    int n = 0;  // complex dimension; matrices are 2n x 2n
    std::vector<MatR> mats;

    int real_dim() const { return 2 * n; }

    void validate() const {
        if (n < 2) throw std::invalid_argument("RealEmbeddedSet: dimension must be >= 2");
        if (mats.empty()) throw std::invalid_argument("RealEmbeddedSet: empty set");
        for (const auto& m : mats)
            if (m.rows() != 2 * n || m.cols() != 2 * n)
                throw std::invalid_argument("RealEmbeddedSet: matrix dimension mismatch");
    }
};

// Splits every M_k into its Hermitian pair
//   (M_k + M_k^H)/2        (diagonalizes to Re D_k)
//   (M_k - M_k^H)/(2j)     (diagonalizes to Im D_k)
// and reconstructs as M_k = mats[2k+1] + j*mats[2k]. No Hermitian
// assumption on the input; noise lands in both halves.
inline HermitianSet hermitian_split(const TargetSet& set) {
    set.validate();
    HermitianSet out;
    out.n = set.n;
    out.mats.reserve(2 * set.matrices.size());
    for (const auto& m : set.matrices) {
        MatR x = m.real(), y = m.imag();
        PlanePair skew{(y + y.transpose()) / 2.0, (x.transpose() - x) / 2.0};
        PlanePair herm{(x + x.transpose()) / 2.0, (y - y.transpose()) / 2.0};
        out.mats.push_back(std::move(skew));
        out.mats.push_back(std::move(herm));
    }
    return out;
}

// The embedding f(M) = [[Re M, Im M], [-Im M, Re M]] on an arbitrary
// complex matrix. Ring homomorphism: f(GH) = f(G) f(H), f(M^H) = f(M)^T.
inline MatR block_embed(const MatC& m) {
    const auto r = m.rows(), c = m.cols();
    MatR out(2 * r, 2 * c);
    out.topLeftCorner(r, c) = m.real();
    out.topRightCorner(r, c) = m.imag();
    out.bottomLeftCorner(r, c) = -m.imag();
    out.bottomRightCorner(r, c) = m.real();
    return out;
}

// Relative deviation of a 2N x 2N real matrix from the f(.) block structure.
inline double block_structure_error(const MatR& m) {
    if (m.rows() != m.cols() || m.rows() % 2 != 0)
        throw std::invalid_argument("block_structure_error: need even square matrix");
    const auto n = m.rows() / 2;
    double err = std::sqrt(
        (m.topLeftCorner(n, n) - m.bottomRightCorner(n, n)).squaredNorm() +
        (m.topRightCorner(n, n) + m.bottomLeftCorner(n, n)).squaredNorm());
    double scale = m.norm();
    return scale > 0 ? err / scale : 0.0;
}

inline MatC block_unembed_unchecked(const MatR& m) {
    const auto n = m.rows() / 2;
    MatR re = (m.topLeftCorner(n, n) + m.bottomRightCorner(n, n)) / 2.0;
    MatR im = (m.topRightCorner(n, n) - m.bottomLeftCorner(n, n)) / 2.0;
    return re.cast<Cx>() + Cx(0, 1) * im.cast<Cx>();
}

// Embeds one Hermitian matrix; the result is symmetric. Copy and negate
// only, no arithmetic.
inline MatR real_embed(const PlanePair& h, double tol = 1e-13) {
    if (h.hermiticity_error() > tol)
        throw std::invalid_argument("real_embed: input is not Hermitian");
    const auto n = h.re.rows();
    MatR out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = h.re;
    out.topRightCorner(n, n) = h.im;
    out.bottomLeftCorner(n, n) = -h.im;
    out.bottomRightCorner(n, n) = h.re;
    return out;
}

inline MatR real_embed(const MatC& h, double tol = 1e-13) {
    return real_embed(PlanePair::from_complex(h), tol);
}

inline RealEmbeddedSet real_embed(const HermitianSet& set, double tol = 1e-13) {
    set.validate(tol);
    RealEmbeddedSet out;
    out.n = set.n;
    out.mats.reserve(set.mats.size());
    for (const auto& m : set.mats) out.mats.push_back(real_embed(m, tol));
    return out;
}

// Inverse of real_embed; rejects matrices that lost the block structure.
inline MatC real_unembed(const MatR& m, double tol = 1e-10) {
    double err = block_structure_error(m);
    if (err > tol)
        throw std::invalid_argument("real_unembed: block structure violated (relative error " +
                                    std::to_string(err) + ")");
    return block_unembed_unchecked(m);
}

}  // namespace nojd
