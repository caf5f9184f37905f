#ifndef GERBELAB_MATKIT_HPP
#define GERBELAB_MATKIT_HPP

// Small dense unitary matrices: Haar sampling, spectral decomposition with
// gap policing, and first-order perturbation of eigenprojectors.

#include "gerbelab/core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>
#include <sstream>
#include <vector>

namespace gerbelab::matkit {

inline constexpr int kMaxDimension = 6;
inline constexpr double kUnitaryTol = 1e-12;
inline constexpr double kDefaultGap = 1e-6;

inline double unitarity_defect(const Matrix& g) {
  return frobenius(g * g.adjoint() - identity(static_cast<int>(g.rows())));
}

/// A point of U(n), 1 <= n <= 6.
class UnitaryPoint {
 public:
  explicit UnitaryPoint(Matrix g, double tol = kUnitaryTol) : g_(std::move(g)) {
    if (g_.rows() != g_.cols() || g_.rows() < 1 || g_.rows() > kMaxDimension)
      throw DimensionError("UnitaryPoint: dimension must be in [1, 6]");
    if (unitarity_defect(g_) >= tol) throw std::invalid_argument("UnitaryPoint: matrix is not unitary");
  }

  int n() const { return static_cast<int>(g_.rows()); }
  const Matrix& matrix() const { return g_; }

 private:
  Matrix g_;
};

/// Tangent vector X at g; g^{-1}X is skew-Hermitian.
class TangentVec {
 public:
  TangentVec(UnitaryPoint base, Matrix direction, double tol = 1e-12)
      : base_(std::move(base)), x_(std::move(direction)) {
    if (x_.rows() != base_.n() || x_.cols() != base_.n())
      throw DimensionError("TangentVec: direction has wrong shape");
    const Matrix a = base_.matrix().adjoint() * x_;
    if (frobenius(a + a.adjoint()) >= tol * std::max(1.0, frobenius(a)))
      throw std::invalid_argument("TangentVec: g^{-1}X is not skew-Hermitian");
  }

  /// Tangent g·A for A in u(n).
  static TangentVec left_translate(const UnitaryPoint& g, const Matrix& a) {
    return TangentVec(g, g.matrix() * a);
  }

  const UnitaryPoint& base() const { return base_; }
  const Matrix& direction() const { return x_; }

 private:
  UnitaryPoint base_;
  Matrix x_;
};

struct SpectralData {
  std::vector<Complex> eigenvalues;  // unit modulus, sorted by argument in (0, 2pi]
  std::vector<Matrix> projectors;    // orthogonal eigenprojectors, same order
  double gap = 0.0;                  // min_{i != j} |lambda_i - lambda_j|; +inf for n = 1

  int n() const { return static_cast<int>(eigenvalues.size()); }

  Matrix reconstruct() const {
    Matrix g = Matrix::Zero(projectors.front().rows(), projectors.front().cols());
    for (std::size_t i = 0; i < eigenvalues.size(); ++i) g += eigenvalues[i] * projectors[i];
    return g;
  }
};

inline double min_gap(const std::vector<Complex>& ev) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ev.size(); ++i)
    for (std::size_t j = i + 1; j < ev.size(); ++j) gap = std::min(gap, std::abs(ev[i] - ev[j]));
  return gap;
}

/// Haar-distributed U(n) element: QR of a complex Ginibre matrix with the
/// phases of diag(R) pushed into Q. Deterministic per seed.
inline UnitaryPoint haar_unitary(int n, std::uint64_t seed) {
  if (n < 1 || n > kMaxDimension) throw DimensionError("haar_unitary: n must be in [1, 6]");
  Rng rng = make_rng(seed);
  const Matrix z = gaussian_matrix(n, rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double m = std::abs(d);
    q.col(j) *= (m > 0.0 ? d / m : Complex(1.0));
  }
  // one polish step keeps the unitarity defect at rounding level for n = 6
  const Matrix h = q.adjoint() * q;
  q = q * (1.5 * identity(n) - 0.5 * h);
  return UnitaryPoint(std::move(q));
}

/// Spectral decomposition of a unitary matrix. Uses the complex Schur form,
/// which is diagonal for normal matrices, so the eigenvectors come out
/// orthonormal to rounding.
inline SpectralData eig_unitary(const Matrix& g, double eps_gap = kDefaultGap) {
  const int n = static_cast<int>(g.rows());
  Eigen::ComplexSchur<Matrix> schur(g);
  const Matrix& u = schur.matrixU();
  const Matrix& t = schur.matrixT();

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<Complex> raw(n);
  for (int i = 0; i < n; ++i) raw[i] = t(i, i) / std::abs(t(i, i));
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return arg_0_2pi(raw[a]) < arg_0_2pi(raw[b]); });

  SpectralData s;
  s.eigenvalues.reserve(n);
  s.projectors.reserve(n);
  for (int idx : order) {
    s.eigenvalues.push_back(raw[idx]);
    s.projectors.push_back(u.col(idx) * u.col(idx).adjoint());
  }
  s.gap = min_gap(s.eigenvalues);
  if (s.gap <= eps_gap) {
    std::ostringstream os;
    os << "eig_unitary: eigenvalue gap " << s.gap << " <= " << eps_gap;
    throw DegenerateSpectrum(os.str());
  }
  return s;
}

inline SpectralData eig_unitary(const UnitaryPoint& g, double eps_gap = kDefaultGap) {
  return eig_unitary(g.matrix(), eps_gap);
}

/// Largest violation of the SpectralData invariants (completeness,
/// orthogonality, hermiticity, reconstruction of g).
inline double spectral_defect(const Matrix& g, const SpectralData& s) {
  const int n = static_cast<int>(g.rows());
  double worst = frobenius(g - s.reconstruct());
  Matrix sum = Matrix::Zero(n, n);
  for (int i = 0; i < s.n(); ++i) {
    sum += s.projectors[i];
    worst = std::max(worst, frobenius(s.projectors[i] - s.projectors[i].adjoint()));
    for (int j = 0; j < s.n(); ++j) {
      const Matrix expect = i == j ? s.projectors[i] : Matrix::Zero(n, n);
      worst = std::max(worst, frobenius(s.projectors[i] * s.projectors[j] - expect));
    }
  }
  return std::max(worst, frobenius(sum - identity(n)));
}

/// Directional derivative of each eigenprojector along the tangent V = dg:
///   dP_k(V) = sum_{j != k} (P_j V P_k + P_k V P_j) / (lambda_k - lambda_j).
inline std::vector<Matrix> dP(const SpectralData& s, const Matrix& v) {
  if (s.n() > 1 && !(s.gap > 0.0)) throw DegenerateSpectrum("dP: spectrum is not simple");
  std::vector<Matrix> out;
  out.reserve(s.n());
  for (int k = 0; k < s.n(); ++k) {
    Matrix d = Matrix::Zero(v.rows(), v.cols());
    for (int j = 0; j < s.n(); ++j) {
      if (j == k) continue;
      d += (s.projectors[j] * v * s.projectors[k] + s.projectors[k] * v * s.projectors[j]) /
           (s.eigenvalues[k] - s.eigenvalues[j]);
    }
    out.push_back(std::move(d));
  }
  return out;
}

inline std::vector<Matrix> dP(const TangentVec& v, double eps_gap = kDefaultGap) {
  return dP(eig_unitary(v.base(), eps_gap), v.direction());
}

}  // namespace gerbelab::matkit

#endif  // GERBELAB_MATKIT_HPP
