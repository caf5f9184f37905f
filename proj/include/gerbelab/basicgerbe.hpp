#ifndef GERBELAB_BASICGERBE_HPP
#define GERBELAB_BASICGERBE_HPP

// The basic bundle gerbe on U(n): cut points and the log branch, spectral
// projectors between cut points, the forms alpha, beta, f, nu, omega, and the
// numerical verification of the strongly equivariant cocycle equations.

#include "gerbelab/excalc.hpp"
#include "gerbelab/matkit.hpp"
#include "gerbelab/simpx.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace gerbelab::basicgerbe {

using excalc::Form;
using excalc::MatrixForm;
using excalc::Point;
using excalc::SpaceRef;
using excalc::Tangent;
using excalc::Tangents;
using matkit::SpectralData;
using matkit::UnitaryPoint;

inline constexpr double kDefaultCut = 1e-3;

/// z = e^{i psi} in S^1 \ {1}.
class CutPoint {
 public:
  explicit CutPoint(double psi) : psi_(psi) {
    if (!(psi > 0.0 && psi < kTwoPi)) throw std::invalid_argument("CutPoint: psi must lie in (0, 2pi)");
  }
  double psi() const { return psi_; }
  Complex z() const { return std::polar(1.0, psi_); }

 private:
  double psi_;
};

/// log_z(xi) = i phi with xi = e^{i phi}, phi in (psi - 2pi, psi); log_z(1) = 0.
inline Complex log_branch(const CutPoint& z, Complex xi) {
  if (std::abs(std::abs(xi) - 1.0) > 1e-9) throw std::invalid_argument("log_branch: |xi| must be 1");
  if (std::abs(xi - z.z()) <= 1e-9) throw EigenvalueOnCut("log_branch: xi lies on the cut");
  double t = arg_0_2pi(xi);
  if (t >= z.psi()) t -= kTwoPi;
  return {0.0, t};
}

/// lambda lies on the arc between z1 and z2 that avoids 1.
inline bool between(const CutPoint& z1, const CutPoint& z2, Complex lambda) {
  if (std::abs(lambda - z1.z()) <= 1e-12 || std::abs(lambda - z2.z()) <= 1e-12)
    throw EigenvalueOnCut("between: lambda equals a cut point");
  if (z1.psi() == z2.psi()) return false;
  const double lo = std::min(z1.psi(), z2.psi());
  const double hi = std::max(z1.psi(), z2.psi());
  const double t = arg_0_2pi(lambda);
  return lo < t && t < hi;
}

inline double cut_distance(const SpectralData& s, const CutPoint& z) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& l : s.eigenvalues) d = std::min(d, std::abs(l - z.z()));
  return d;
}

inline void require_off_cut(const SpectralData& s, const CutPoint& z, double eps_cut) {
  const double d = cut_distance(s, z);
  if (d <= eps_cut)
    throw EigenvalueOnCut("eigenvalue within " + std::to_string(d) + " of the cut point (eps_cut " +
                          std::to_string(eps_cut) + ")");
}

/// (z, g) with no eigenvalue of g within eps_cut of z.
struct YPoint {
  CutPoint z;
  UnitaryPoint g;
  SpectralData spec;

  YPoint(CutPoint z_, UnitaryPoint g_, double eps_cut = kDefaultCut, double eps_gap = matkit::kDefaultGap)
      : z(z_), g(std::move(g_)), spec(matkit::eig_unitary(g, eps_gap)) {
    require_off_cut(spec, z, eps_cut);
  }
};

/// (P, lambda, z) in G/T x Y_T.
struct GmodTPoint {
  std::vector<Matrix> projectors;
  std::vector<Complex> eigenvalues;
  CutPoint z;

  GmodTPoint(std::vector<Matrix> p, std::vector<Complex> l, CutPoint z_, double eps_cut = kDefaultCut)
      : projectors(std::move(p)), eigenvalues(std::move(l)), z(z_) {
    if (projectors.size() != eigenvalues.size() || projectors.empty())
      throw DimensionError("GmodTPoint: need one projector per eigenvalue");
    SpectralData s{eigenvalues, projectors, matkit::min_gap(eigenvalues)};
    const Matrix g = s.reconstruct();
    if (matkit::spectral_defect(g, s) > 1e-10) throw std::invalid_argument("GmodTPoint: projector relations fail");
    if (eigenvalues.size() > 1 && !(s.gap > 0.0)) throw DegenerateSpectrum("GmodTPoint: repeated eigenvalue");
    require_off_cut(s, z, eps_cut);
  }

  int n() const { return static_cast<int>(eigenvalues.size()); }
  Matrix g() const { return SpectralData{eigenvalues, projectors, 0.0}.reconstruct(); }
};

/// Tangent to G/T x Y_T: X in u(n) moves the projectors (dP_i = [X, P_i]),
/// dphi_i moves lambda_i = e^{i phi_i}, dpsi moves the cut point.
struct GmodTTangent {
  Matrix x;
  std::vector<double> dphi;
  double dpsi = 0.0;
};

// ---------------------------------------------------------------------------
// Residue (closed-form) evaluations.

inline Matrix projector_between(const CutPoint& z1, const CutPoint& z2, const SpectralData& s,
                                double eps_cut = kDefaultCut) {
  require_off_cut(s, z1, eps_cut);
  require_off_cut(s, z2, eps_cut);
  const auto n = s.projectors.front().rows();
  Matrix p = Matrix::Zero(n, n);
  for (int i = 0; i < s.n(); ++i)
    if (between(z1, z2, s.eigenvalues[i])) p += s.projectors[i];
  return p;
}

inline Matrix projector_between(const CutPoint& z1, const CutPoint& z2, const UnitaryPoint& g,
                                double eps_cut = kDefaultCut) {
  return projector_between(z1, z2, matkit::eig_unitary(g), eps_cut);
}

/// alpha on an h-tangent with right Maurer-Cartan value B. The sign is -1 on
/// the psi1 > psi2 component, where the line bundle is the dual one.
inline Complex alpha(const CutPoint& z1, const CutPoint& z2, const SpectralData& s, const Matrix& b,
                     double eps_cut = kDefaultCut) {
  const double orientation = z1.psi() > z2.psi() ? -1.0 : 1.0;
  return orientation * (b * projector_between(z1, z2, s, eps_cut)).trace();
}

inline Complex alpha(const CutPoint& z1, const CutPoint& z2, const UnitaryPoint& g, const Matrix& b,
                     double eps_cut = kDefaultCut) {
  return alpha(z1, z2, matkit::eig_unitary(g), b, eps_cut);
}

/// beta = -(i/2pi) sum_i log_z(lambda_i) tr(B P_i).
inline Complex beta(const CutPoint& z, const SpectralData& s, const Matrix& b) {
  Complex acc{};
  for (int i = 0; i < s.n(); ++i) acc += log_branch(z, s.eigenvalues[i]) * (b * s.projectors[i]).trace();
  return -kI / kTwoPi * acc;
}

inline Complex beta(const YPoint& y, const Matrix& b) { return beta(y.z, y.spec, b); }

// ---------------------------------------------------------------------------
// Contour quadrature. Contours are ellipses in w = log xi:
//   w(t) = rho_c + a cos t + i (phi_c + b sin t),
// crossing the unit circle at phi_c -/+ halfwidth. On such a contour log_z xi
// is w itself, provided the enclosed arguments are the branch representatives.

struct Contour {
  double rho_c = 0.0;
  double a = 0.0;
  double phi_c = 0.0;
  double b = 0.0;

  /// Ellipse between radii r_in < 1 < r_out crossing |xi| = 1 at args x_lo < x_hi.
  static Contour crossing(double x_lo, double x_hi, double r_in, double r_out) {
    if (!(r_in > 0.0 && r_in < 1.0 && r_out > 1.0)) throw std::invalid_argument("Contour: need r_in < 1 < r_out");
    if (!(x_hi > x_lo)) throw std::invalid_argument("Contour: empty crossing interval");
    Contour c;
    c.rho_c = 0.5 * (std::log(r_in) + std::log(r_out));
    c.a = 0.5 * (std::log(r_out) - std::log(r_in));
    const double s = c.rho_c / c.a;
    c.phi_c = 0.5 * (x_lo + x_hi);
    c.b = 0.5 * (x_hi - x_lo) / std::sqrt(1.0 - s * s);
    return c;
  }

  Complex w(double t) const { return {rho_c + a * std::cos(t), phi_c + b * std::sin(t)}; }
  Complex dw(double t) const { return {-a * std::sin(t), b * std::cos(t)}; }
};

struct QuadratureOptions {
  int initial_nodes = 512;
  int max_nodes = 1 << 17;
  double rel_tol = 1e-12;
  double r_in = 0.5;
  double r_out = 2.0;
};

namespace detail {

// sum over k = k0, k0 + dk, ... < nodes of F(w_k, xi_k) * xi_k * w'(t_k)
template <typename T, typename F>
T node_sum(const Contour& c, int nodes, int k0, int dk, F&& f, T zero) {
  T acc = zero;
  for (int k = k0; k < nodes; k += dk) {
    const double t = kTwoPi * k / nodes;
    const Complex w = c.w(t);
    const Complex xi = std::exp(w);
    acc += f(w, xi) * (xi * c.dw(t));
  }
  return acc;
}

// trapezoid value of the closed integral with a fixed node count
template <typename T, typename F>
T trapezoid(const Contour& c, int nodes, F&& f, T zero) {
  return node_sum(c, nodes, 0, 1, f, zero) * (kTwoPi / nodes);
}

inline Matrix resolvent(Complex xi, const Matrix& g) {
  return (xi * identity(static_cast<int>(g.rows())) - g).partialPivLu().inverse();
}

// sorted eigenvalue arguments in (0, 2pi]
inline std::vector<double> sorted_args(const SpectralData& s) {
  std::vector<double> a;
  for (const auto& l : s.eigenvalues) a.push_back(arg_0_2pi(l));
  std::sort(a.begin(), a.end());
  return a;
}

// midpoint of the eigenvalue gap containing the angle x (lifted near x)
inline double gap_midpoint(const std::vector<double>& args, double x) {
  double below = args.back() - kTwoPi;
  double above = args.front() + kTwoPi;
  for (double a : args) {
    if (a < x) below = std::max(below, a);
    if (a > x) above = std::min(above, a);
  }
  return 0.5 * (below + above);
}

}  // namespace detail

/// Contour enclosing exactly the eigenvalues between z1 and z2; nullopt when
/// both cut points sit in the same eigenvalue gap (nothing is enclosed).
inline std::optional<Contour> between_contour(const CutPoint& z1, const CutPoint& z2, const SpectralData& s,
                                              double r_in, double r_out) {
  const double lo = std::min(z1.psi(), z2.psi());
  const double hi = std::max(z1.psi(), z2.psi());
  const auto args = detail::sorted_args(s);
  bool any = false;
  for (double a : args) any = any || (lo < a && a < hi);
  if (!any) return std::nullopt;
  return Contour::crossing(detail::gap_midpoint(args, lo), detail::gap_midpoint(args, hi), r_in, r_out);
}

/// Contour C_(g,z) enclosing every eigenvalue with the branch lift of log_z.
inline Contour cut_contour(const CutPoint& z, const SpectralData& s, double r_in, double r_out) {
  const double top = detail::gap_midpoint(detail::sorted_args(s), z.psi());
  return Contour::crossing(top - kTwoPi, top, r_in, r_out);
}

/// (1/2pi i) contour integral of (xi - g)^{-1}, computed by direct inversion.
inline Matrix projector_quadrature(const CutPoint& z1, const CutPoint& z2, const UnitaryPoint& g, int nodes = 512,
                                   double r_in = 0.5, double r_out = 2.0) {
  const auto s = matkit::eig_unitary(g);
  const auto c = between_contour(z1, z2, s, r_in, r_out);
  const int n = g.n();
  if (!c) return Matrix::Zero(n, n);
  const Matrix& gm = g.matrix();
  const Matrix sum = detail::trapezoid(
      *c, nodes, [&](Complex, Complex xi) -> Matrix { return detail::resolvent(xi, gm); }, Matrix(Matrix::Zero(n, n)));
  return sum / (kTwoPi * kI);
}

/// -(1/4pi^2) contour integral of log_z(xi) tr(B (xi - g)^{-1}).
inline Complex beta_quadrature(const YPoint& y, const Matrix& b, int nodes = 512, double r_in = 0.5,
                               double r_out = 2.0) {
  const Contour c = cut_contour(y.z, y.spec, r_in, r_out);
  const Matrix& gm = y.g.matrix();
  const Complex sum = detail::trapezoid(
      c, nodes, [&](Complex w, Complex xi) { return w * (b * detail::resolvent(xi, gm)).trace(); }, Complex{});
  return -sum / (4.0 * kPi * kPi);
}

namespace detail {

inline auto f_integrand(const Matrix& g, const Matrix& v, const Matrix& w) {
  return [&g, &v, &w](Complex lw, Complex xi) {
    const Matrix r = resolvent(xi, g);
    const Matrix r2 = r * r;
    return lw * ((r * v * r2 * w).trace() - (r * w * r2 * v).trace());
  };
}

}  // namespace detail

/// f(V, W) with a fixed trapezoid node count (used for convergence studies).
inline Complex curving_f_fixed(const YPoint& y, const Matrix& v, const Matrix& w, int nodes, double r_in = 0.5,
                               double r_out = 2.0) {
  const Contour c = cut_contour(y.z, y.spec, r_in, r_out);
  const Complex sum = detail::trapezoid(c, nodes, detail::f_integrand(y.g.matrix(), v, w), Complex{});
  return sum / (8.0 * kPi * kPi);
}

class QuadratureFailure : public std::runtime_error {
 public:
  explicit QuadratureFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Curving f evaluated on two dg-tangents V, W at y: trapezoid rule with node
/// doubling until successive values agree to rel_tol (relative to |V||W|).
inline Complex curving_f(const YPoint& y, const Matrix& v, const Matrix& w, const QuadratureOptions& opts = {}) {
  const Contour c = cut_contour(y.z, y.spec, opts.r_in, opts.r_out);
  const auto integrand = detail::f_integrand(y.g.matrix(), v, w);
  const double scale = std::max(frobenius(v) * frobenius(w), std::numeric_limits<double>::min());
  int nodes = opts.initial_nodes;
  Complex raw = detail::node_sum(c, nodes, 0, 1, integrand, Complex{});
  Complex prev = raw * (kTwoPi / nodes);
  while (nodes < opts.max_nodes) {
    // doubling: old nodes are reused, only odd indices are new
    raw += detail::node_sum(c, 2 * nodes, 1, 2, integrand, Complex{});
    nodes *= 2;
    const Complex cur = raw * (kTwoPi / nodes);
    if (std::abs(cur - prev) <= opts.rel_tol * std::max(std::abs(cur), scale)) return cur / (8.0 * kPi * kPi);
    prev = cur;
  }
  throw QuadratureFailure("curving_f: no convergence with " + std::to_string(nodes) + " nodes");
}

/// Closed form on G/T x Y_T:
///   (i/4pi) sum_{i != k} A_ik [tr(P_i dP_k(V) dP_k(W)) - (V <-> W)],
///   A_ik = log_z l_i - log_z l_k + (l_k - l_i)/l_k.
inline Complex curving_f_closed(const GmodTPoint& q, const GmodTTangent& v, const GmodTTangent& w) {
  const int n = q.n();
  std::vector<Complex> logs(n);
  for (int i = 0; i < n; ++i) logs[i] = log_branch(q.z, q.eigenvalues[i]);
  Complex acc{};
  for (int k = 0; k < n; ++k) {
    const Matrix& pk = q.projectors[k];
    const Matrix dv = v.x * pk - pk * v.x;
    const Matrix dw = w.x * pk - pk * w.x;
    const Matrix comm = dv * dw - dw * dv;
    for (int i = 0; i < n; ++i) {
      if (i == k) continue;
      const Complex a = logs[i] - logs[k] + (q.eigenvalues[k] - q.eigenvalues[i]) / q.eigenvalues[k];
      acc += a * (q.projectors[i] * comm).trace();
    }
  }
  return kI / (4.0 * kPi) * acc;
}

/// p_Y(P, lambda, z) = (sum lambda_i P_i, z).
inline YPoint p_Y(const GmodTPoint& q, double eps_cut = kDefaultCut) {
  return YPoint(q.z, UnitaryPoint(q.g(), 1e-10), eps_cut);
}

/// dg of the pushforward: sum_i (i dphi_i lambda_i) P_i + [X, g].
inline Matrix p_Y_push(const GmodTPoint& q, const GmodTTangent& v) {
  const Matrix g = q.g();
  Matrix dg = v.x * g - g * v.x;
  for (int i = 0; i < q.n(); ++i) dg += (kI * v.dphi.at(static_cast<std::size_t>(i)) * q.eigenvalues[i]) * q.projectors[i];
  return dg;
}

// ---------------------------------------------------------------------------
// Spaces, maps and forms.

inline SpaceRef group_space(int n) {
  return excalc::make_space("U(" + std::to_string(n) + ")", {excalc::Factor::unitary(n)});
}

/// Y = {(psi, g)}; psi is a coordinate on (0, 2pi).
inline SpaceRef y_space(int n) {
  return excalc::make_space("Y(" + std::to_string(n) + ")",
                            {excalc::Factor::line(0.0, kTwoPi), excalc::Factor::unitary(n)});
}

/// Right action (z, g).h = (z, h^{-1} g h) of G on Y.
inline simpx::GroupAction y_action(int n) {
  simpx::GroupAction a = simpx::conjugation_action(n);
  const simpx::GroupAction conj = a;
  a.object = y_space(n);
  a.act = [conj](const Point& y, const Point& h) {
    return Point{{y[0], conj.act(Point{{y[1]}}, h)[0]}};
  };
  a.act_push = [conj](const Point& y, const Point& h, const Tangent& vy, const Tangent& vh) {
    return Tangent{{vy[0], conj.act_push(Point{{y[1]}}, h, Tangent{{vy[1]}}, vh)[0]}};
  };
  return a;
}

/// Nerve EG(G) of the conjugation action.
inline simpx::SimplicialSpace group_nerve(int n, int levels = 3) {
  return simpx::eg_nerve(simpx::conjugation_action(n), levels);
}

/// Nerve EG(Y) of the action on Y: levels Y, Y x G, Y x G^2.
inline simpx::SimplicialSpace y_nerve(int n, int levels = 2) { return simpx::eg_nerve(y_action(n), levels); }

/// pi : Y x G^p -> G^{p+1}, forgetting the cut point.
inline excalc::SmoothMap forget_cut(const SpaceRef& source, const SpaceRef& target) {
  auto drop = []<typename T>(const T& x) {
    T out;
    out.parts.assign(x.parts.begin() + 1, x.parts.end());
    return out;
  };
  return excalc::SmoothMap{"pi", source, target, [drop](const Point& p) { return drop(p); },
                           [drop](const Point&, const Tangent& v) { return drop(v); }};
}

inline CutPoint cut_of(const Point& p) { return CutPoint(p.coord(0)); }

/// beta as a 1-form on Y x G (factors psi, g, h); pairs only with dh h^{-1}.
inline Form beta_form(SpaceRef y_g, double eps_cut = kDefaultCut) {
  return Form(std::move(y_g), 1, [eps_cut](const Point& p, Tangents v) {
    const CutPoint z = cut_of(p);
    const SpectralData s = matkit::eig_unitary(p[1]);
    require_off_cut(s, z, eps_cut);
    return beta(z, s, v[0][2] * p[2].adjoint());
  });
}

/// Curving f as a 2-form on Y (quadrature evaluation).
inline Form curving_f_form(SpaceRef y, QuadratureOptions opts = {}, double eps_cut = kDefaultCut) {
  return Form(std::move(y), 2, [opts, eps_cut](const Point& p, Tangents v) {
    const YPoint pt(cut_of(p), UnitaryPoint(p[1], 1e-10), eps_cut);
    return curving_f(pt, v[0][1], v[1][1], opts);
  });
}

/// nu = -(1/24pi^2) tr(g^{-1}dg)^3 on a space whose factor `factor` is U(n).
inline Form nu_form(SpaceRef g_space, std::size_t factor = 0) {
  const MatrixForm theta = excalc::left_mc(g_space, factor);
  return Complex(-1.0 / (24.0 * kPi * kPi)) * excalc::trace3(theta, theta, theta);
}

/// omega = (i/4pi)[tr(th th_h) + tr(th th_hat) - tr(th_hat th_h)] on G x G,
/// th = g^{-1}dg, th_h = dh h^{-1}, th_hat = g^{-1} th_h g.
/// The th_hat th_h term enters with a minus sign: tr(g th_h g^{-1} th_h) equals
/// +tr(th_h th_hat), and only this sign satisfies delta(f) - d beta = pi^* omega.
inline Form omega_form(SpaceRef gg, std::size_t g_factor = 0, std::size_t h_factor = 1) {
  const MatrixForm theta = excalc::left_mc(gg, g_factor);
  const MatrixForm theta_h = excalc::right_mc(gg, h_factor);
  const MatrixForm theta_hat(gg, 1, [g_factor, theta_h](const Point& p, Tangents v) -> Matrix {
    return p[g_factor].adjoint() * theta_h(p, v) * p[g_factor];
  });
  return Complex(kI / (4.0 * kPi)) *
         (excalc::trace2(theta, theta_h) + excalc::trace2(theta, theta_hat) - excalc::trace2(theta_hat, theta_h));
}

/// omega / (2 pi i): the same form in the real normalization used by nu.
inline Form omega_real_form(SpaceRef gg) { return Complex(1.0 / (kTwoPi * kI)) * omega_form(std::move(gg)); }

/// The cochain (0, 0, omega/(2 pi i), nu) on EG(G). f, beta and omega are
/// connection-normalized (i times real forms) while nu is real, so the
/// cocycle pairs nu with omega/(2 pi i).
inline simpx::BigradedCochain thm52_cochain(const simpx::SimplicialSpace& nerve) {
  simpx::BigradedCochain eta;
  eta.emplace(std::make_pair(3, 0), nu_form(nerve.level(0)));
  eta.emplace(std::make_pair(2, 1), omega_real_form(nerve.level(1)));
  return eta;
}

// ---------------------------------------------------------------------------
// Integration targets.

/// omega over the torus U(1) x U(1) in angle coordinates.
inline Complex integrate_omega_u1(int grid) {
  const auto nerve = group_nerve(1, 1);
  const SpaceRef gg = nerve.level(1);
  excalc::Parametrization par;
  par.space = gg;
  par.box = {{0.0, kTwoPi}, {0.0, kTwoPi}};
  par.map = [](std::span<const double> u) {
    return Point{{Matrix::Constant(1, 1, std::polar(1.0, u[0])), Matrix::Constant(1, 1, std::polar(1.0, u[1]))}};
  };
  par.partial = [gg](std::span<const double> u, int axis) {
    return excalc::factor_tangent(*gg, static_cast<std::size_t>(axis),
                                  Matrix::Constant(1, 1, kI * std::polar(1.0, u[static_cast<std::size_t>(axis)])));
  };
  return excalc::integrate_grid(omega_form(gg), par, grid);
}

namespace detail {

inline Matrix rz(double a) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = std::polar(1.0, -0.5 * a);
  m(1, 1) = std::polar(1.0, 0.5 * a);
  return m;
}

inline Matrix ry(double t) {
  Matrix m(2, 2);
  m << std::cos(0.5 * t), -std::sin(0.5 * t), std::sin(0.5 * t), std::cos(0.5 * t);
  return m;
}

inline Matrix half_sigma(char which) {
  Matrix m = Matrix::Zero(2, 2);
  if (which == 'z') {
    m(0, 0) = -0.5 * kI;
    m(1, 1) = 0.5 * kI;
  } else {
    m(0, 1) = -0.5;
    m(1, 0) = 0.5;
  }
  return m;  // -i sigma / 2
}

}  // namespace detail

/// nu over SU(2) via Euler angles g = Rz(phi) Ry(theta) Rz(chi),
/// theta in [0, pi], phi in [0, 2pi), chi in [0, 4pi).
inline Complex integrate_nu_su2(int grid) {
  const SpaceRef g2 = group_space(2);
  excalc::Parametrization par;
  par.space = g2;
  par.box = {{0.0, kPi}, {0.0, kTwoPi}, {0.0, 2.0 * kTwoPi}};
  par.map = [](std::span<const double> u) {
    return Point{{detail::rz(u[1]) * detail::ry(u[0]) * detail::rz(u[2])}};
  };
  par.partial = [](std::span<const double> u, int axis) {
    const Matrix a = detail::rz(u[1]), b = detail::ry(u[0]), c = detail::rz(u[2]);
    switch (axis) {
      case 0: return Tangent{{a * b * detail::half_sigma('y') * c}};
      case 1: return Tangent{{detail::half_sigma('z') * a * b * c}};
      default: return Tangent{{a * b * c * detail::half_sigma('z')}};
    }
  };
  return excalc::integrate_grid(nu_form(g2), par, grid);
}

// ---------------------------------------------------------------------------
// Verification of the cocycle equations.

struct Thm52Config {
  int n = 2;
  int samples = 50;
  std::uint64_t seed = 42;
  double tol_closed = 1e-8;
  double tol_fd = 1e-4;
  double fd_step = excalc::kDefaultStep;
  int tangent_tuples = 3;
  int e4_tuples = 5;
  double eps_cut = kDefaultCut;
  double eps_gap = matkit::kDefaultGap;
  QuadratureOptions quadrature{};
};

struct CheckResult {
  std::string id;
  std::string space;
  int samples = 0;
  double max_abs_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  int worst_sample = -1;
};

struct Thm52Report {
  Thm52Config config;
  std::vector<CheckResult> checks;
  simpx::DResidualReport cocycle;
  int resample_count = 0;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

namespace detail {

struct SampleResidual {
  double e1 = 0.0, e2 = 0.0, e3 = 0.0;
  int resamples = 0;
};

inline double uniform_cut(Rng& rng, double eps) {
  std::uniform_real_distribution<double> u(eps, kTwoPi - eps);
  return u(rng);
}

}  // namespace detail

inline Thm52Report verify_thm52(const Thm52Config& cfg) {
  if (cfg.n < 1 || cfg.n > 4) throw DimensionError("verify_thm52: n must be in [1, 4]");
  if (cfg.samples < 1) throw std::invalid_argument("verify_thm52: samples must be positive");
  const int n = cfg.n;
  const auto ynerve = y_nerve(n, 2);
  const auto gnerve = group_nerve(n, 3);
  const Form f = curving_f_form(ynerve.level(0), cfg.quadrature, cfg.eps_cut);
  const Form b = beta_form(ynerve.level(1), cfg.eps_cut);
  const Form w = omega_form(gnerve.level(1));
  const Form e2 = simpx::delta_form(f, ynerve, 0) - excalc::d_fd(b, cfg.fd_step) -
                  excalc::pullback(forget_cut(ynerve.level(1), gnerve.level(1)), w);
  const Form e3 = simpx::delta_form(b, ynerve, 1);

  const auto per_sample = parallel_map(static_cast<std::size_t>(cfg.samples), [&](std::size_t idx) {
    Rng rng = make_rng(cfg.seed, idx);
    detail::SampleResidual r;
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 1000) throw std::runtime_error("verify_thm52: resampling limit reached");
      try {
        const UnitaryPoint g = matkit::haar_unitary(n, rng());
        const UnitaryPoint h = matkit::haar_unitary(n, rng());
        const UnitaryPoint k = matkit::haar_unitary(n, rng());
        const SpectralData s = matkit::eig_unitary(g, cfg.eps_gap);
        const CutPoint z(detail::uniform_cut(rng, cfg.eps_cut));
        const CutPoint z1(detail::uniform_cut(rng, cfg.eps_cut));
        const CutPoint z2(detail::uniform_cut(rng, cfg.eps_cut));
        require_off_cut(s, z, cfg.eps_cut);
        require_off_cut(s, z1, cfg.eps_cut);
        require_off_cut(s, z2, cfg.eps_cut);

        detail::SampleResidual cur;
        const Point y1{{excalc::scalar(z.psi()), g.matrix(), h.matrix()}};
        const Point y2{{excalc::scalar(z.psi()), g.matrix(), h.matrix(), k.matrix()}};
        for (int t = 0; t < cfg.tangent_tuples; ++t) {
          const Matrix bmat = random_skew_hermitian(n, rng);
          const Complex lhs = alpha(z1, z2, s, bmat, cfg.eps_cut);
          const Complex rhs = beta(z2, s, bmat) - beta(z1, s, bmat);
          cur.e1 = std::max(cur.e1, std::abs(lhs - rhs));

          const Tangent u = excalc::random_tangent(*ynerve.level(1), y1, rng);
          const Tangent v = excalc::random_tangent(*ynerve.level(1), y1, rng);
          cur.e2 = std::max(cur.e2, std::abs(e2(y1, {u, v})));

          const Tangent x = excalc::random_tangent(*ynerve.level(2), y2, rng);
          cur.e3 = std::max(cur.e3, std::abs(e3(y2, {x})));
        }
        cur.resamples = attempt;
        r = cur;
        break;
      } catch (const DegenerateSpectrum&) {
      } catch (const EigenvalueOnCut&) {
      }
    }
    return r;
  });

  Thm52Report report;
  report.config = cfg;
  CheckResult c1{"E1", "Y^[2] x G", cfg.samples, 0.0, cfg.tol_closed};
  CheckResult c2{"E2", ynerve.level(1)->id(), cfg.samples, 0.0, cfg.tol_fd};
  CheckResult c3{"E3", ynerve.level(2)->id(), cfg.samples, 0.0, cfg.tol_closed};
  for (std::size_t i = 0; i < per_sample.size(); ++i) {
    const auto& r = per_sample[i];
    report.resample_count += r.resamples;
    const auto upd = [i](CheckResult& c, double v) {
      if (c.worst_sample < 0 || v > c.max_abs_residual) {
        c.max_abs_residual = v;
        c.worst_sample = static_cast<int>(i);
      }
    };
    upd(c1, r.e1);
    upd(c2, r.e2);
    upd(c3, r.e3);
  }

  simpx::ProbePlan plan;
  plan.points = cfg.samples;
  plan.tuples = cfg.e4_tuples;
  plan.seed = derive_seed(cfg.seed, 0xE4);
  plan.fd = excalc::FdOptions{cfg.fd_step, false};
  report.cocycle = simpx::total_D_residual(thm52_cochain(gnerve), gnerve, plan, 3);
  CheckResult c4{"E4", "EG(" + gnerve.level(0)->id() + ")", cfg.samples, report.cocycle.worst(), cfg.tol_fd};

  for (CheckResult* c : {&c1, &c2, &c3, &c4}) {
    c->pass = c->max_abs_residual < c->tolerance;
    report.checks.push_back(*c);
  }
  return report;
}

}  // namespace gerbelab::basicgerbe

#endif  // GERBELAB_BASICGERBE_HPP
