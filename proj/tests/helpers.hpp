// Shared construction helpers for the test suites.
#pragma once

#include "nojd/embedding.hpp"
#include "nojd/metrics.hpp"
#include "nojd/rng.hpp"
#include "nojd/rotations.hpp"

namespace testutil {

// Random instance with truth attached. Mixing resampled below the
// condition cap; diagonal moduli kept away from zero so convergence tests
// stay well posed.
inline nojd::TargetSet random_instance(std::uint64_t seed, int n, int k, double cond_cap = 50,
                                       bool separated_diagonals = true) {
    nojd::Rng rng(seed);
    nojd::MatC a = rng.complex_normal_matrix(n, n);
    while (nojd::condition_number(a) > cond_cap) a = rng.complex_normal_matrix(n, n);
    std::vector<nojd::VecC> d;
    d.reserve(k);
    for (int kk = 0; kk < k; ++kk) {
        nojd::VecC v = rng.complex_normal_vector(n);
        if (separated_diagonals)
            for (int i = 0; i < n; ++i)
                while (std::abs(v(i)) < 0.3) v(i) = rng.complex_normal();
        d.push_back(std::move(v));
    }
    return nojd::TargetSet::from_truth(a, d);
}

inline nojd::RealEmbeddedSet random_embedded(std::uint64_t seed, int n, int k) {
    return nojd::real_embed(nojd::hermitian_split(random_instance(seed, n, k)));
}

// f(A) with columns mixed inside each pair by an invertible real 2x2 and
// then globally permuted: the family of diagonalizer inverses the column
// pairing must untangle.
inline nojd::MatR scrambled_embedding(const nojd::MatC& a, nojd::Rng& rng) {
    const int n = static_cast<int>(a.rows());
    nojd::MatR f = nojd::block_embed(a);
    for (int c = 0; c < n; ++c) {
        Eigen::Matrix2d mix;
        do {
            mix << rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian();
        } while (std::abs(mix.determinant()) < 0.1);
        const nojd::MatR c1 = f.col(c), c2 = f.col(c + n);
        f.col(c) = mix(0, 0) * c1 + mix(0, 1) * c2;
        f.col(c + n) = mix(1, 0) * c1 + mix(1, 1) * c2;
    }
    std::vector<int> perm(2 * n);
    for (int i = 0; i < 2 * n; ++i) perm[i] = i;
    for (int i = 2 * n - 1; i > 0; --i)
        std::swap(perm[i], perm[rng.next_u64() % static_cast<std::uint64_t>(i + 1)]);
    nojd::MatR out(2 * n, 2 * n);
    for (int c = 0; c < 2 * n; ++c) out.col(c) = f.col(perm[c]);
    return out;
}

// Manufactured elementary rotation from explicit parameters.
inline nojd::RotationSolution make_solution(int i, int j, nojd::RotationFamily family,
                                            double theta, double y) {
    nojd::RotationSolution sol;
    sol.i = i;
    sol.j = j;
    sol.family = family;
    sol.cos_theta = std::cos(theta);
    sol.sin_theta = std::sin(theta);
    sol.cosh_y = std::cosh(y);
    sol.sinh_y = std::sinh(y);
    sol.v = nojd::parameter_vector(sol);
    return sol;
}

}  // namespace testutil
