#ifndef GERBELAB_CORE_HPP
#define GERBELAB_CORE_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace gerbelab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Raised when an eigenvalue gap falls below the configured threshold.
class DegenerateSpectrum : public std::runtime_error {
 public:
  explicit DegenerateSpectrum(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an eigenvalue sits on (or too close to) a cut ray.
class EigenvalueOnCut : public std::runtime_error {
 public:
  explicit EigenvalueOnCut(const std::string& what) : std::runtime_error(what) {}
};

class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

class SpaceMismatch : public std::invalid_argument {
 public:
  explicit SpaceMismatch(const std::string& what) : std::invalid_argument(what) {}
};

// splitmix64 finalizer; turns (seed, index) pairs into well-mixed stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the sample with the given index; all randomness in a run derives from this.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ index);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::uint64_t index = 0) {
  return Rng(derive_seed(seed, index));
}

inline double frobenius(const Matrix& m) { return m.norm(); }

inline Matrix identity(int n) { return Matrix::Identity(n, n); }

/// Matrix with independent standard complex Gaussian entries (unit variance per entry).
inline Matrix gaussian_matrix(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0 / std::numbers::sqrt2);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(normal(rng), normal(rng));
  return m;
}

/// Random element of u(n) (skew-Hermitian), entries of unit scale.
inline Matrix random_skew_hermitian(int n, Rng& rng) {
  const Matrix a = gaussian_matrix(n, rng);
  return 0.5 * (a - a.adjoint());
}

/// Argument mapped into (0, 2pi].
inline double arg_0_2pi(Complex z) {
  const double a = std::arg(z);
  return a <= 0.0 ? a + kTwoPi : a;
}

}  // namespace gerbelab

#endif  // GERBELAB_CORE_HPP
