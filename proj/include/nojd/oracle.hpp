// Reference evaluators used for validation only: a brute-force grid search
// over (theta, y) and criterion values computed through dense congruence
// products. Deliberately independent of the closed-form solver and the
// rank-two update kernels they are used to check.
#pragma once

#include <cmath>
#include <vector>

#include "nojd/rotations.hpp"

namespace nojd::oracle {

// 101 theta points on (-pi/4, pi/4] and 101 shear points on [-1, 1].
inline double theta_point(int t) {
    constexpr double pi = 3.141592653589793238462643383279502884;
    return -pi / 4 + (t + 1) * (pi / 2) / 101;
}

inline double shear_point(int s) { return -1.0 + s * (2.0 / 100.0); }

inline Eigen::Vector3d parameter_vector(double theta, double y) {
    return {std::sinh(2 * y), -std::sin(2 * theta) * std::cosh(2 * y),
            std::cos(2 * theta) * std::cosh(2 * y)};
}

inline double criterion_value(const CriterionMatrix& crit, double theta, double y) {
    const Eigen::Vector3d v = parameter_vector(theta, y);
    return v.dot(crit.r * v);
}

struct GridMinimum {
    double value;
    double theta;
    double y;
};

inline GridMinimum grid_minimum(const CriterionMatrix& crit) {
    GridMinimum best{criterion_value(crit, theta_point(0), shear_point(0)), theta_point(0),
                     shear_point(0)};
    for (int t = 0; t < 101; ++t)
        for (int s = 0; s < 101; ++s) {
            const double val = criterion_value(crit, theta_point(t), shear_point(s));
            if (val < best.value) best = {val, theta_point(t), shear_point(s)};
        }
    return best;
}

// Off-diagonal criterion at entry (i,j) after one dense elementary
// rotation of every matrix in the set.
inline double single_entry_criterion_dense(const std::vector<MatR>& mats, int i, int j,
                                           double theta, double y) {
    const auto dim = mats.front().rows();
    const MatR h = dense_rotation(static_cast<int>(dim), i, j, theta, y);
    double acc = 0;
    for (const auto& m : mats) {
        const MatR t = h * m * h.transpose();
        acc += t(i, j) * t(i, j);
    }
    return acc;
}

// Four-entry criterion of the paired rotation on an embedded set: entries
// (i,j), (i+N,j+N), (i,j+N), (j,i+N) after the family's two dense
// elementary rotations. Complex pair indices i < j < N.
inline double paired_criterion_dense(const std::vector<MatR>& mats, int n, int i, int j,
                                     RotationFamily family, double theta, double y) {
    const int dim = 2 * n;
    MatR h;
    if (family == RotationFamily::one)
        h = dense_rotation(dim, i, j, theta, y) * dense_rotation(dim, i + n, j + n, theta, y);
    else
        h = dense_rotation(dim, i, j + n, theta, y) * dense_rotation(dim, j, i + n, theta, -y);
    double acc = 0;
    for (const auto& m : mats) {
        const MatR t = h * m * h.transpose();
        acc += t(i, j) * t(i, j) + t(i + n, j + n) * t(i + n, j + n) +
               t(i, j + n) * t(i, j + n) + t(j, i + n) * t(j, i + n);
    }
    return acc;
}

// Complex Givens factor with off-diagonal phase alpha.
inline MatC dense_givens(int n, int i, int j, double alpha, double theta) {
    MatC g = MatC::Identity(n, n);
    const Cx e(std::cos(alpha), std::sin(alpha));
    g(i, i) = std::cos(theta);
    g(j, j) = std::cos(theta);
    g(i, j) = e * std::sin(theta);
    g(j, i) = -std::conj(e) * std::sin(theta);
    return g;
}

// Complex shear factor with off-diagonal phase phi.
inline MatC dense_shear(int n, int i, int j, double phi, double y) {
    MatC s = MatC::Identity(n, n);
    const Cx e(std::cos(phi), std::sin(phi));
    s(i, i) = std::cosh(y);
    s(j, j) = std::cosh(y);
    s(i, j) = e * std::sinh(y);
    s(j, i) = std::conj(e) * std::sinh(y);
    return s;
}

}  // namespace nojd::oracle
