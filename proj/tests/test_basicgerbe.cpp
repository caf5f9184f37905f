#include "gerbelab/basicgerbe.hpp"

#include <gtest/gtest.h>

using namespace gerbelab;
using namespace gerbelab::basicgerbe;
using excalc::Factor;

namespace {

Matrix diag(std::initializer_list<Complex> d) {
  Matrix m = Matrix::Zero(static_cast<int>(d.size()), static_cast<int>(d.size()));
  int i = 0;
  for (Complex x : d) m(i, i) = x, ++i;
  return m;
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// Haar g together with a cut point at least 0.05 away from its spectrum
YPoint random_y(int n, Rng& rng) {
  for (;;) {
    try {
      const UnitaryPoint g = matkit::haar_unitary(n, rng());
      return YPoint(CutPoint(uniform(rng, 0.05, kTwoPi - 0.05)), g, 0.05, 1e-3);
    } catch (const DegenerateSpectrum&) {
    } catch (const EigenvalueOnCut&) {
    }
  }
}

}  // namespace

TEST(LogBranch, OneMapsToZero) {
  for (double psi : {0.1, 1.0, kPi, 5.0, 6.2}) EXPECT_EQ(log_branch(CutPoint(psi), 1.0), Complex(0.0));
}

TEST(LogBranch, HalfTurnCut) {
  const CutPoint z(kPi);
  EXPECT_LT(std::abs(log_branch(z, kI) - kI * kPi / 2.0), 1e-15);
  EXPECT_LT(std::abs(log_branch(z, -kI) + kI * kPi / 2.0), 1e-15);
}

TEST(LogBranch, JumpAcrossCut) {
  const double psi = 2.0, eps = 1e-3;
  const CutPoint z(psi);
  const Complex jump = log_branch(z, std::polar(1.0, psi - eps)) - log_branch(z, std::polar(1.0, psi + eps));
  EXPECT_LT(std::abs(jump - (kTwoPi * kI - 2.0 * kI * eps)), 1e-12);
}

TEST(LogBranch, Exponentiates) {
  Rng rng = make_rng(1);
  for (int i = 0; i < 50; ++i) {
    const CutPoint z(uniform(rng, 0.01, kTwoPi - 0.01));
    const Complex xi = std::polar(1.0, uniform(rng, -10.0, 10.0));
    if (std::abs(xi - z.z()) < 1e-6) continue;
    const Complex l = log_branch(z, xi);
    EXPECT_LT(std::abs(std::exp(l) - xi), 1e-14);
    EXPECT_GT(l.imag(), z.psi() - kTwoPi);
    EXPECT_LT(l.imag(), z.psi());
  }
}

TEST(LogBranch, OnCutThrows) { EXPECT_THROW(log_branch(CutPoint(1.0), std::polar(1.0, 1.0)), EigenvalueOnCut); }

TEST(CutPointTest, RejectsOne) {
  EXPECT_THROW(CutPoint{0.0}, std::invalid_argument);
  EXPECT_THROW(CutPoint{kTwoPi}, std::invalid_argument);
}

TEST(Between, Examples) {
  EXPECT_TRUE(between(CutPoint(kPi / 4), CutPoint(3 * kPi / 4), kI));
  EXPECT_TRUE(between(CutPoint(1.5 * kPi), CutPoint(kPi / 2), -1.0));
  EXPECT_FALSE(between(CutPoint(kPi / 4), CutPoint(3 * kPi / 4), -1.0));
  for (Complex l : {Complex(-1.0), kI, -kI}) EXPECT_FALSE(between(CutPoint(1.0), CutPoint(1.0), l));
  // the arc avoiding 1 never contains 1
  EXPECT_FALSE(between(CutPoint(0.1), CutPoint(6.2), 1.0));
}

TEST(ProjectorBetween, Diagonal) {
  const UnitaryPoint g(diag({kI, -1.0}));
  EXPECT_LT(frobenius(projector_between(CutPoint(kPi / 4), CutPoint(3 * kPi / 4), g) - diag({1.0, 0.0})), 1e-15);
  EXPECT_EQ(frobenius(projector_between(CutPoint(0.1), CutPoint(0.2), g)), 0.0);
  EXPECT_EQ(frobenius(projector_quadrature(CutPoint(0.1), CutPoint(0.2), g)), 0.0);
}

TEST(ProjectorBetween, ResidueVsQuadrature) {
  Rng rng = make_rng(2);
  for (int it = 0; it < 30; ++it) {
    const int n = 1 + it % 3;
    const YPoint y = random_y(n, rng);
    CutPoint z2(uniform(rng, 0.05, kTwoPi - 0.05));
    if (cut_distance(y.spec, z2) < 0.05) continue;
    const Matrix res = projector_between(y.z, z2, y.spec);
    const Matrix quad = projector_quadrature(y.z, z2, y.g, 512);
    EXPECT_LT(frobenius(res - quad), 1e-8) << "n=" << n;
  }
}

TEST(Alpha, Diagonal) {
  const UnitaryPoint g(diag({kI, -1.0}));
  const double a = 0.7, b = -1.3;
  const Complex v = alpha(CutPoint(kPi / 4), CutPoint(3 * kPi / 4), g, diag({kI * a, kI * b}));
  EXPECT_LT(std::abs(v - kI * a), 1e-15);
  EXPECT_EQ(alpha(CutPoint(kPi / 4), CutPoint(3 * kPi / 4), g, Matrix::Zero(2, 2)), Complex(0.0));
  EXPECT_EQ(alpha(CutPoint(1.0), CutPoint(1.0), g, diag({kI, kI})), Complex(0.0));
}

TEST(Beta, OneByOneByHand) {
  const auto s = matkit::eig_unitary(diag({kI}));
  // -(i/2pi) * (i pi/2) * i
  EXPECT_LT(std::abs(beta(CutPoint(kPi), s, diag({kI})) - kI / 4.0), 1e-15);
  EXPECT_EQ(beta(CutPoint(kPi), s, Matrix::Zero(1, 1)), Complex(0.0));
}

TEST(Beta, ResidueVsQuadrature) {
  Rng rng = make_rng(3);
  for (int it = 0; it < 20; ++it) {
    const YPoint y = random_y(2, rng);
    const Matrix b = random_skew_hermitian(2, rng);
    EXPECT_LT(std::abs(beta(y, b) - beta_quadrature(y, b, 512)), 1e-8);
  }
}

TEST(Beta, DifferenceIsAlpha) {
  Rng rng = make_rng(4);
  for (int it = 0; it < 30; ++it) {
    const YPoint y = random_y(3, rng);
    const CutPoint z2(uniform(rng, 0.05, kTwoPi - 0.05));
    if (cut_distance(y.spec, z2) < 0.05) continue;
    const Matrix b = random_skew_hermitian(3, rng);
    EXPECT_LT(std::abs(alpha(y.z, z2, y.spec, b) - (beta(z2, y.spec, b) - beta(y.z, y.spec, b))), 1e-12);
  }
}

TEST(CurvingF, Antisymmetric) {
  Rng rng = make_rng(5);
  const YPoint y = random_y(2, rng);
  const Matrix v = y.g.matrix() * random_skew_hermitian(2, rng);
  const Matrix w = y.g.matrix() * random_skew_hermitian(2, rng);
  EXPECT_LT(std::abs(curving_f(y, v, v)), 1e-14);
  EXPECT_LT(std::abs(curving_f(y, v, w) + curving_f(y, w, v)), 1e-12);
}

TEST(CurvingF, AbelianIsQuadratureStable) {
  Rng rng = make_rng(6);
  for (int it = 0; it < 10; ++it) {
    const YPoint y = random_y(1, rng);
    const Matrix v = y.g.matrix() * random_skew_hermitian(1, rng);
    const Complex a = curving_f_fixed(y, v, v * Complex(0.3, 0.0), 512);
    const Complex b = curving_f_fixed(y, v, v * Complex(0.3, 0.0), 1024);
    EXPECT_TRUE(std::isfinite(a.real()) && std::isfinite(a.imag()));
    EXPECT_LT(std::abs(a - b), 1e-8);
  }
}

TEST(CurvingF, ClosedFormViaProjection) {
  Rng rng = make_rng(7);
  for (int it = 0; it < 20; ++it) {
    const YPoint y = random_y(2, rng);
    const GmodTPoint q(y.spec.projectors, y.spec.eigenvalues, y.z);
    const GmodTTangent v{random_skew_hermitian(2, rng), {uniform(rng, -1, 1), uniform(rng, -1, 1)}, 0.0};
    const GmodTTangent w{random_skew_hermitian(2, rng), {uniform(rng, -1, 1), uniform(rng, -1, 1)}, 0.0};
    const Complex closed = curving_f_closed(q, v, w);
    const Complex quad = curving_f(p_Y(q), p_Y_push(q, v), p_Y_push(q, w));
    EXPECT_LT(std::abs(closed - quad), 1e-6);
  }
}

TEST(CurvingFClosed, DiagonalTangentsVanish) {
  Rng rng = make_rng(8);
  const YPoint y = random_y(3, rng);
  const GmodTPoint q(y.spec.projectors, y.spec.eigenvalues, y.z);
  const GmodTTangent v{Matrix::Zero(3, 3), {0.1, 0.2, 0.3}, 0.0};
  const GmodTTangent w{Matrix::Zero(3, 3), {-1.0, 0.5, 2.0}, 0.4};
  EXPECT_EQ(curving_f_closed(q, v, w), Complex(0.0));
}

TEST(CurvingFClosed, AbelianVanishes) {
  Rng rng = make_rng(9);
  const YPoint y = random_y(1, rng);
  const GmodTPoint q(y.spec.projectors, y.spec.eigenvalues, y.z);
  const GmodTTangent v{random_skew_hermitian(1, rng), {0.3}, 0.0};
  const GmodTTangent w{random_skew_hermitian(1, rng), {0.7}, 0.0};
  EXPECT_EQ(curving_f_closed(q, v, w), Complex(0.0));
}

TEST(GmodT, RejectsBadProjectors) {
  EXPECT_THROW(GmodTPoint({diag({1.0, 0.0}), diag({1.0, 0.0})}, {kI, -1.0}, CutPoint(1.0)), std::invalid_argument);
  EXPECT_THROW(GmodTPoint({diag({1.0, 0.0})}, {kI, -1.0}, CutPoint(1.0)), DimensionError);
}

TEST(Nu, AbelianAndRepeated) {
  Rng rng = make_rng(10);
  const auto u1 = group_space(1), u3 = group_space(3);
  const Form n1 = nu_form(u1), n3 = nu_form(u3);
  const Point p1 = excalc::random_point(*u1, rng);
  const Tangent t1 = excalc::random_tangent(*u1, p1, rng);
  EXPECT_LT(std::abs(n1(p1, {t1, t1, t1})), 1e-15);
  const Point p = excalc::random_point(*u3, rng);
  const Tangent a = excalc::random_tangent(*u3, p, rng), b = excalc::random_tangent(*u3, p, rng);
  EXPECT_LT(std::abs(n3(p, {a, b, a})), 1e-14);
}

TEST(Nu, IsRealAndClosed) {
  const auto u2 = group_space(2);
  const Form nu = nu_form(u2);
  const Form dnu = excalc::d_fd(nu);
  Rng rng = make_rng(11);
  for (int i = 0; i < 10; ++i) {
    const Point p = excalc::random_point(*u2, rng);
    std::vector<Tangent> t;
    for (int k = 0; k < 4; ++k) t.push_back(excalc::random_tangent(*u2, p, rng));
    EXPECT_LT(std::abs(nu(p, std::span(t).first(3)).imag()), 1e-14);
    EXPECT_LT(std::abs(dnu(p, t)), 1e-6);
  }
}

TEST(Nu, SuTwoVolume) {
  const Complex v = integrate_nu_su2(48);
  EXPECT_NEAR(std::abs(v), 1.0, 0.02);
}

TEST(Omega, AbelianValue) {
  const auto gg = group_nerve(1, 1).level(1);
  const Form w = omega_form(gg);
  Rng rng = make_rng(12);
  for (int i = 0; i < 10; ++i) {
    const Point p = excalc::random_point(*gg, rng);
    // d/dphi of e^{i phi} at the point
    const Tangent d1 = excalc::factor_tangent(*gg, 0, kI * p[0]);
    const Tangent d2 = excalc::factor_tangent(*gg, 1, kI * p[1]);
    EXPECT_LT(std::abs(w(p, {d1, d2}) + kI / kTwoPi), 1e-15);
    EXPECT_LT(std::abs(w(p, {d2, d1}) - kI / kTwoPi), 1e-15);
  }
}

TEST(Omega, EntrywiseOracle) {
  const auto gg = group_nerve(2, 1).level(1);
  const Form w = omega_form(gg);
  Rng rng = make_rng(13);
  auto mm = [](const Matrix& a, const Matrix& b) {
    Matrix c = Matrix::Zero(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) c(i, j) += a(i, k) * b(k, j);
    return c;
  };
  auto adj = [](const Matrix& a) {
    Matrix c(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) c(i, j) = std::conj(a(j, i));
    return c;
  };
  auto tr = [](const Matrix& a) { return a(0, 0) + a(1, 1); };
  for (int it = 0; it < 20; ++it) {
    const Point p = excalc::random_point(*gg, rng);
    const Tangent u = excalc::random_tangent(*gg, p, rng), v = excalc::random_tangent(*gg, p, rng);
    const Matrix g = p[0], h = p[1];
    auto th = [&](const Tangent& t) { return mm(adj(g), t[0]); };
    auto thh = [&](const Tangent& t) { return mm(t[1], adj(h)); };
    auto that = [&](const Tangent& t) { return mm(mm(adj(g), thh(t)), g); };
    auto pair = [&](auto a, auto b) { return tr(mm(a(u), b(v))) - tr(mm(a(v), b(u))); };
    const Complex oracle = kI / (4.0 * kPi) * (pair(th, thh) + pair(th, that) - pair(that, thh));
    EXPECT_LT(std::abs(w(p, {u, v}) - oracle), 1e-14);
  }
}

TEST(Omega, TorusIntegral) {
  const Complex v = integrate_omega_u1(256);
  EXPECT_LT(std::abs(v - (-kTwoPi * kI)) / kTwoPi, 1e-6);
}

// The opposite sign on the th_hat th_h term does not satisfy the curving equation.
TEST(Omega, OppositeSignBreaksCurvingEquation) {
  const int n = 2;
  const auto yn = y_nerve(n, 1);
  const auto gn = group_nerve(n, 1);
  const auto gg = gn.level(1);
  const excalc::MatrixForm th = excalc::left_mc(gg, 0), thh = excalc::right_mc(gg, 1);
  const excalc::MatrixForm that(gg, 1, [thh](const Point& p, excalc::Tangents v) -> Matrix {
    return p[0].adjoint() * thh(p, v) * p[0];
  });
  const Form flipped = Complex(kI / (4 * kPi)) *
                       (excalc::trace2(th, thh) + excalc::trace2(th, that) + excalc::trace2(that, thh));
  const Form f = curving_f_form(yn.level(0));
  const Form lhs = simpx::delta_form(f, yn, 0) - excalc::d_fd(beta_form(yn.level(1)));
  const auto pi = forget_cut(yn.level(1), gg);
  const Form good = lhs - excalc::pullback(pi, omega_form(gg));
  const Form bad = lhs - excalc::pullback(pi, flipped);
  Rng rng = make_rng(14);
  double worst_good = 0.0, worst_bad = 0.0;
  for (int i = 0; i < 5; ++i) {
    const YPoint y = random_y(n, rng);
    const Point x{{excalc::scalar(y.z.psi()), y.g.matrix(), matkit::haar_unitary(n, rng()).matrix()}};
    const Tangent a = excalc::random_tangent(*yn.level(1), x, rng), b = excalc::random_tangent(*yn.level(1), x, rng);
    worst_good = std::max(worst_good, std::abs(good(x, {a, b})));
    worst_bad = std::max(worst_bad, std::abs(bad(x, {a, b})));
  }
  EXPECT_LT(worst_good, 1e-4);
  EXPECT_GT(worst_bad, 1e-2);
}

TEST(Cocycle, EGofU2) {
  const auto nerve = group_nerve(2, 3);
  const auto r = simpx::total_D_residual(thm52_cochain(nerve), nerve, simpx::ProbePlan{20, 3, 5}, 3);
  EXPECT_LT(r.worst(), 1e-4);
  int evaluated = 0;
  for (const auto& c : r.conditions) evaluated += c.evaluated;
  EXPECT_EQ(evaluated, 3);  // (4,0) d nu, (3,1) d omega + delta nu, (2,2) delta omega
}

TEST(Cocycle, UnnormalizedOmegaFails) {
  const auto nerve = group_nerve(2, 3);
  simpx::BigradedCochain eta;
  eta.emplace(std::make_pair(3, 0), nu_form(nerve.level(0)));
  eta.emplace(std::make_pair(2, 1), omega_form(nerve.level(1)));
  EXPECT_GT(simpx::total_D_residual(eta, nerve, simpx::ProbePlan{5, 2, 6}, 3).worst(), 1e-3);
}

TEST(Verify, AbelianSuite) {
  Thm52Config cfg;
  cfg.n = 1;
  const auto r = verify_thm52(cfg);
  ASSERT_EQ(r.checks.size(), 4u);
  for (const auto& c : r.checks) EXPECT_LT(c.max_abs_residual, 1e-8) << c.id;
  EXPECT_TRUE(r.pass());
}

TEST(Verify, TwoByTwoSuite) {
  Thm52Config cfg;
  cfg.n = 2;
  cfg.samples = 20;
  const auto r = verify_thm52(cfg);
  EXPECT_TRUE(r.pass());
}

TEST(Verify, TinyToleranceFails) {
  Thm52Config cfg;
  cfg.n = 2;
  cfg.samples = 4;
  cfg.tol_closed = 1e-16;
  cfg.tol_fd = 1e-16;
  const auto r = verify_thm52(cfg);
  EXPECT_FALSE(r.pass());
  for (const auto& c : r.checks) {
    EXPECT_EQ(c.pass, c.max_abs_residual < c.tolerance);
    if (c.id != "E4") {
      EXPECT_GE(c.worst_sample, 0);
      EXPECT_LT(c.worst_sample, 4);
    }
  }
}

TEST(Verify, RejectsBadDimension) {
  Thm52Config cfg;
  cfg.n = 7;
  EXPECT_THROW(verify_thm52(cfg), DimensionError);
}
