// Seedable randomness with explicit stream splitting. Gaussian draws use a
// fixed Box-Muller transform instead of std::normal_distribution so that
// equal seeds give equal streams on every standard library.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "nojd/embedding.hpp"

namespace nojd {

// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Decorrelated child seed for a numbered stream (per-run, per-purpose).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed + 0x9e3779b97f4a7c15ull * (stream + 1));
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.141592653589793 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Standard complex normal: unit total variance, split evenly.
    Cx complex_normal() {
        const double s = 0.7071067811865476;
        const double re = gaussian() * s;
        return {re, gaussian() * s};
    }

    MatC complex_normal_matrix(int rows, int cols) {
        MatC m(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) m(r, c) = complex_normal();
        return m;
    }

    VecC complex_normal_vector(int size) {
        VecC v(size);
        for (int i = 0; i < size; ++i) v(i) = complex_normal();
        return v;
    }

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0;
};

}  // namespace nojd
