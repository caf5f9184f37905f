#include "gerbelab/matkit.hpp"

#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

using namespace gerbelab;
using namespace gerbelab::matkit;

namespace {

Matrix diag2(Complex a, Complex b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST(Haar, OneByOneIsUnitModulus) {
  for (std::uint64_t s : {0ULL, 1ULL, 99ULL}) EXPECT_NEAR(std::abs(haar_unitary(1, s).matrix()(0, 0)), 1.0, 1e-12);
}

TEST(Haar, Deterministic) {
  EXPECT_EQ(haar_unitary(3, 7).matrix(), haar_unitary(3, 7).matrix());
  EXPECT_NE(haar_unitary(3, 7).matrix(), haar_unitary(3, 8).matrix());
}

TEST(Haar, Unitary) {
  EXPECT_LT(unitarity_defect(haar_unitary(2, 42).matrix()), 1e-12);
  for (int n = 1; n <= kMaxDimension; ++n)
    for (std::uint64_t s = 0; s < 20; ++s) EXPECT_LT(unitarity_defect(haar_unitary(n, s).matrix()), 1e-12);
}

TEST(Haar, DimensionCap) {
  EXPECT_THROW(haar_unitary(0, 1), DimensionError);
  EXPECT_THROW(haar_unitary(7, 1), DimensionError);
}

TEST(Haar, TraceMomentsMatchHaar) {
  // E|tr g|^2 = 1 and E tr g = 0 under Haar measure on U(n), n >= 1
  const int samples = 4000;
  double m2 = 0.0;
  Complex m1{};
  for (int s = 0; s < samples; ++s) {
    const Complex t = haar_unitary(3, static_cast<std::uint64_t>(s)).matrix().trace();
    m1 += t;
    m2 += std::norm(t);
  }
  EXPECT_NEAR(m2 / samples, 1.0, 0.1);
  EXPECT_LT(std::abs(m1 / static_cast<double>(samples)), 0.05);
}

TEST(UnitaryPointTest, RejectsNonUnitary) {
  Matrix m = identity(2);
  m(0, 0) = 2.0;
  EXPECT_THROW(UnitaryPoint{m}, std::invalid_argument);
}

TEST(TangentVecTest, RejectsNonTangent) {
  const UnitaryPoint g = haar_unitary(2, 1);
  EXPECT_THROW(TangentVec(g, g.matrix()), std::invalid_argument);  // g^{-1}X = I is Hermitian
  EXPECT_THROW(TangentVec(g, Matrix::Zero(3, 3)), DimensionError);
  Rng rng = make_rng(2);
  EXPECT_NO_THROW(TangentVec::left_translate(g, random_skew_hermitian(2, rng)));
}

TEST(Eig, DiagonalCase) {
  const auto s = eig_unitary(diag2(kI, -1.0));
  ASSERT_EQ(s.n(), 2);
  EXPECT_LT(std::abs(s.eigenvalues[0] - kI), 1e-15);
  EXPECT_LT(std::abs(s.eigenvalues[1] + 1.0), 1e-15);
  EXPECT_LT(frobenius(s.projectors[0] - diag2(1.0, 0.0)), 1e-15);
  EXPECT_LT(frobenius(s.projectors[1] - diag2(0.0, 1.0)), 1e-15);
}

TEST(Eig, RepeatedEigenvalue) { EXPECT_THROW(eig_unitary(identity(2), 1e-6), DegenerateSpectrum); }

TEST(Eig, Reconstruction) {
  const UnitaryPoint g = haar_unitary(3, 7);
  const auto s = eig_unitary(g);
  EXPECT_LT(frobenius(g.matrix() - s.reconstruct()), 1e-10);
  EXPECT_LT(spectral_defect(g.matrix(), s), 1e-10);
}

TEST(Eig, SortedByArgument) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto s = eig_unitary(haar_unitary(4, seed));
    for (int i = 1; i < s.n(); ++i) EXPECT_LT(arg_0_2pi(s.eigenvalues[i - 1]), arg_0_2pi(s.eigenvalues[i]));
    for (const auto& l : s.eigenvalues) EXPECT_NEAR(std::abs(l), 1.0, 1e-14);
  }
}

TEST(DP, ZeroTangent) {
  const auto s = eig_unitary(haar_unitary(3, 4));
  for (const auto& d : dP(s, Matrix::Zero(3, 3))) EXPECT_EQ(frobenius(d), 0.0);
}

TEST(DP, SumsToZero) {
  Rng rng = make_rng(9);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const UnitaryPoint g = haar_unitary(3, seed);
    const auto v = TangentVec::left_translate(g, random_skew_hermitian(3, rng));
    Matrix sum = Matrix::Zero(3, 3);
    for (const auto& d : dP(v)) sum += d;
    EXPECT_LT(frobenius(sum), 1e-12);
  }
}

TEST(DP, MatchesFiniteDifferenceDiagonal) {
  const UnitaryPoint g(diag2(kI, -1.0));
  Matrix a(2, 2);
  a << 0.0, 1.0, -1.0, 0.0;
  a *= 0.3;
  const auto analytic = dP(TangentVec(g, g.matrix() * a));
  const double h = 1e-5;
  const auto plus = eig_unitary(Matrix(g.matrix() * (h * a).exp()));
  const auto minus = eig_unitary(Matrix(g.matrix() * (-h * a).exp()));
  for (int k = 0; k < 2; ++k) {
    const Matrix fd = (plus.projectors[k] - minus.projectors[k]) / (2 * h);
    EXPECT_LT(frobenius(fd - analytic[k]), 1e-6);
  }
}

TEST(DP, MatchesFiniteDifferenceRandom) {
  Rng rng = make_rng(11);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const UnitaryPoint g = haar_unitary(3, seed);
    const Matrix a = random_skew_hermitian(3, rng);
    const auto base = eig_unitary(g);
    if (base.gap < 0.05) continue;
    const auto analytic = dP(base, g.matrix() * a);
    const double h = 1e-5;
    const auto plus = eig_unitary(Matrix(g.matrix() * (h * a).exp()));
    const auto minus = eig_unitary(Matrix(g.matrix() * (-h * a).exp()));
    for (int k = 0; k < 3; ++k)
      EXPECT_LT(frobenius((plus.projectors[k] - minus.projectors[k]) / (2 * h) - analytic[k]), 1e-6);
  }
}
