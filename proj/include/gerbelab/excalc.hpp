#ifndef GERBELAB_EXCALC_HPP
#define GERBELAB_EXCALC_HPP

// Numerical exterior calculus on products of U(n) factors, circles and
// coordinate lines. Forms are evaluators on tangent vectors; charts are only
// used for finite-difference exterior derivatives and grid integration.

#include "gerbelab/core.hpp"
#include "gerbelab/matkit.hpp"
#include "gerbelab/parallel.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <bit>
#include <functional>
#include <initializer_list>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gerbelab::excalc {

enum class FactorKind { Line, Circle, Unitary };

struct Factor {
  FactorKind kind = FactorKind::Line;
  int n = 1;  // matrix size for Unitary factors
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  static Factor line(double lo = -std::numeric_limits<double>::infinity(),
                     double hi = std::numeric_limits<double>::infinity()) {
    return {FactorKind::Line, 1, lo, hi};
  }
  static Factor circle() { return {FactorKind::Circle, 1}; }
  static Factor unitary(int n) { return {FactorKind::Unitary, n}; }

  int dim() const { return kind == FactorKind::Unitary ? n * n : 1; }

  bool operator==(const Factor& o) const {
    return kind == o.kind && n == o.n && lo == o.lo && hi == o.hi;
  }
};

class Space {
 public:
  Space(std::string id, std::vector<Factor> factors) : id_(std::move(id)), factors_(std::move(factors)) {}

  const std::string& id() const { return id_; }
  const std::vector<Factor>& factors() const { return factors_; }
  std::size_t size() const { return factors_.size(); }
  const Factor& factor(std::size_t i) const { return factors_.at(i); }

  int dim() const {
    int d = 0;
    for (const auto& f : factors_) d += f.dim();
    return d;
  }

  bool same_as(const Space& o) const { return id_ == o.id_ && factors_ == o.factors_; }

 private:
  std::string id_;
  std::vector<Factor> factors_;
};

using SpaceRef = std::shared_ptr<const Space>;

inline SpaceRef make_space(std::string id, std::vector<Factor> factors) {
  return std::make_shared<const Space>(std::move(id), std::move(factors));
}

inline SpaceRef product_space(std::string id, std::initializer_list<SpaceRef> parts) {
  std::vector<Factor> fs;
  for (const auto& p : parts) fs.insert(fs.end(), p->factors().begin(), p->factors().end());
  return make_space(std::move(id), std::move(fs));
}

inline void require_same(const Space& a, const Space& b, const char* where) {
  if (!a.same_as(b)) throw SpaceMismatch(std::string(where) + ": space '" + a.id() + "' vs '" + b.id() + "'");
}

/// A point: one matrix per factor. Line and Circle factors hold their real
/// coordinate in a 1x1 matrix; Unitary factors hold the group element.
struct Point {
  std::vector<Matrix> parts;

  const Matrix& operator[](std::size_t i) const { return parts[i]; }
  Matrix& operator[](std::size_t i) { return parts[i]; }
  double coord(std::size_t i) const { return parts[i](0, 0).real(); }
};

/// A tangent vector: ambient matrix per factor (X with g^{-1}X skew-Hermitian
/// for Unitary factors, a real rate for Line/Circle factors).
struct Tangent {
  std::vector<Matrix> parts;

  const Matrix& operator[](std::size_t i) const { return parts[i]; }
  Matrix& operator[](std::size_t i) { return parts[i]; }
  double rate(std::size_t i) const { return parts[i](0, 0).real(); }

  Tangent& operator+=(const Tangent& o) {
    for (std::size_t i = 0; i < parts.size(); ++i) parts[i] += o.parts[i];
    return *this;
  }
  friend Tangent operator+(Tangent a, const Tangent& b) { return a += b; }
  friend Tangent operator*(double s, Tangent a) {
    for (auto& m : a.parts) m *= s;
    return a;
  }
};

inline Matrix scalar(double x) {
  Matrix m(1, 1);
  m(0, 0) = x;
  return m;
}

inline Tangent zero_tangent(const Space& s) {
  Tangent t;
  for (const auto& f : s.factors()) t.parts.push_back(Matrix::Zero(f.n, f.n));
  return t;
}

/// Tangent supported on a single factor.
inline Tangent factor_tangent(const Space& s, std::size_t factor, Matrix value) {
  Tangent t = zero_tangent(s);
  t.parts.at(factor) = std::move(value);
  return t;
}

inline Point random_point(const Space& s, Rng& rng) {
  Point p;
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  std::normal_distribution<double> normal;
  for (const auto& f : s.factors()) {
    switch (f.kind) {
      case FactorKind::Unitary:
        p.parts.push_back(matkit::haar_unitary(f.n, rng()).matrix());
        break;
      case FactorKind::Circle:
        p.parts.push_back(scalar(angle(rng)));
        break;
      case FactorKind::Line: {
        if (std::isfinite(f.lo) && std::isfinite(f.hi)) {
          std::uniform_real_distribution<double> box(f.lo, f.hi);
          p.parts.push_back(scalar(box(rng)));
        } else {
          p.parts.push_back(scalar(normal(rng)));
        }
        break;
      }
    }
  }
  return p;
}

inline Tangent random_tangent(const Space& s, const Point& p, Rng& rng) {
  Tangent t;
  std::normal_distribution<double> normal;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Factor& f = s.factor(i);
    if (f.kind == FactorKind::Unitary) {
      t.parts.push_back(p[i] * random_skew_hermitian(f.n, rng));
    } else {
      t.parts.push_back(scalar(normal(rng)));
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Charts. At a basepoint p the chart is x -> p * exp(X) on Unitary factors
// (X in u(n)) and x -> p + x on Line/Circle factors. Chart coordinates are
// stored as one algebra element per factor.

inline Matrix expm(const Matrix& x) { return x.exp(); }

/// d/ds exp(X + sD) at s = 0, via the block-triangular exponential.
inline Matrix dexp(const Matrix& x, const Matrix& d) {
  const auto n = x.rows();
  Matrix block = Matrix::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = x;
  block.bottomRightCorner(n, n) = x;
  block.topRightCorner(n, n) = d;
  return block.exp().topRightCorner(n, n);
}

/// Chart coordinates of a tangent at p (g^{-1}V on Unitary factors).
inline Tangent to_algebra(const Space& s, const Point& p, const Tangent& v) {
  Tangent c;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.factor(i).kind == FactorKind::Unitary) {
      c.parts.push_back(p[i].adjoint() * v[i]);
    } else {
      c.parts.push_back(v[i]);
    }
  }
  return c;
}

/// Raised when a chart step leaves the coordinate box of a bounded factor.
class OutsideChart : public std::out_of_range {
 public:
  explicit OutsideChart(const std::string& what) : std::out_of_range(what) {}
};

inline Point chart(const Space& s, const Point& p, const Tangent& c) {
  Point q;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Factor& f = s.factor(i);
    if (f.kind == FactorKind::Unitary) {
      q.parts.push_back(p[i] * expm(c[i]));
    } else {
      const double x = p.coord(i) + c.rate(i);
      if (f.kind == FactorKind::Line && (x < f.lo || x > f.hi))
        throw OutsideChart("chart: coordinate leaves the box of factor " + std::to_string(i) + " in '" + s.id() + "'");
      q.parts.push_back(scalar(x));
    }
  }
  return q;
}

/// Tangent at chart(p, c) of the constant coordinate field d.
inline Tangent chart_push(const Space& s, const Point& p, const Tangent& c, const Tangent& d) {
  Tangent t;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.factor(i).kind == FactorKind::Unitary) {
      t.parts.push_back(p[i] * dexp(c[i], d[i]));
    } else {
      t.parts.push_back(d[i]);
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Forms.

using Tangents = std::span<const Tangent>;

class Form {
 public:
  using Fn = std::function<Complex(const Point&, Tangents)>;

  Form(SpaceRef space, int degree, Fn fn) : space_(std::move(space)), degree_(degree), fn_(std::move(fn)) {}

  const SpaceRef& space() const { return space_; }
  int degree() const { return degree_; }

  Complex operator()(const Point& p, Tangents v) const {
    if (static_cast<int>(v.size()) != degree_)
      throw std::invalid_argument("Form: expected " + std::to_string(degree_) + " tangents");
    return fn_(p, v);
  }
  Complex operator()(const Point& p, std::initializer_list<Tangent> v) const {
    return (*this)(p, Tangents(v.begin(), v.size()));
  }

 private:
  SpaceRef space_;
  int degree_;
  Fn fn_;
};

/// Matrix-valued form (Maurer-Cartan forms and their conjugates).
class MatrixForm {
 public:
  using Fn = std::function<Matrix(const Point&, Tangents)>;

  MatrixForm(SpaceRef space, int degree, Fn fn) : space_(std::move(space)), degree_(degree), fn_(std::move(fn)) {}

  const SpaceRef& space() const { return space_; }
  int degree() const { return degree_; }

  Matrix operator()(const Point& p, Tangents v) const {
    if (static_cast<int>(v.size()) != degree_)
      throw std::invalid_argument("MatrixForm: expected " + std::to_string(degree_) + " tangents");
    return fn_(p, v);
  }
  Matrix operator()(const Point& p, std::initializer_list<Tangent> v) const {
    return (*this)(p, Tangents(v.begin(), v.size()));
  }

 private:
  SpaceRef space_;
  int degree_;
  Fn fn_;
};

inline Form zero_form(SpaceRef space, int degree) {
  return Form(std::move(space), degree, [](const Point&, Tangents) { return Complex{}; });
}

inline Form function_form(SpaceRef space, std::function<Complex(const Point&)> f) {
  return Form(std::move(space), 0, [f = std::move(f)](const Point& p, Tangents) { return f(p); });
}

inline Form operator+(const Form& a, const Form& b) {
  require_same(*a.space(), *b.space(), "form sum");
  if (a.degree() != b.degree()) throw std::invalid_argument("form sum: degree mismatch");
  return Form(a.space(), a.degree(), [a, b](const Point& p, Tangents v) { return a(p, v) + b(p, v); });
}

inline Form operator*(Complex s, const Form& a) {
  return Form(a.space(), a.degree(), [a, s](const Point& p, Tangents v) { return s * a(p, v); });
}

inline Form operator-(const Form& a, const Form& b) { return a + Complex(-1.0) * b; }

/// Left Maurer-Cartan form g^{-1}dg of a Unitary factor.
inline MatrixForm left_mc(SpaceRef space, std::size_t factor) {
  return MatrixForm(std::move(space), 1,
                    [factor](const Point& p, Tangents v) -> Matrix { return p[factor].adjoint() * v[0][factor]; });
}

/// Right Maurer-Cartan form dh h^{-1} of a Unitary factor.
inline MatrixForm right_mc(SpaceRef space, std::size_t factor) {
  return MatrixForm(std::move(space), 1,
                    [factor](const Point& p, Tangents v) -> Matrix { return v[0][factor] * p[factor].adjoint(); });
}

/// Basis 1-form of a Line/Circle coordinate.
inline Form coordinate_differential(SpaceRef space, std::size_t factor) {
  return Form(std::move(space), 1, [factor](const Point&, Tangents v) { return Complex(v[0].rate(factor)); });
}

namespace detail {

inline int permutation_sign(std::span<const int> perm) {
  int sign = 1;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) sign = -sign;
  return sign;
}

// Calls visit(first, rest, sign) for every (k, m-k)-shuffle of 0..m-1.
template <typename Visit>
void for_each_shuffle(int m, int k, Visit&& visit) {
  std::vector<int> first, rest, perm;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    if (std::popcount(mask) != k) continue;
    first.clear();
    rest.clear();
    for (int i = 0; i < m; ++i) ((mask >> i) & 1u ? first : rest).push_back(i);
    perm = first;
    perm.insert(perm.end(), rest.begin(), rest.end());
    visit(first, rest, permutation_sign(perm));
  }
}

}  // namespace detail

/// (a ^ b)(V_1..V_{k+l}) = sum over (k,l)-shuffles of sgn * a(V_first) b(V_rest).
inline Form wedge(const Form& a, const Form& b) {
  require_same(*a.space(), *b.space(), "wedge");
  const int k = a.degree();
  const int m = k + b.degree();
  return Form(a.space(), m, [a, b, k, m](const Point& p, Tangents v) {
    Complex acc{};
    std::vector<Tangent> va, vb;
    detail::for_each_shuffle(m, k, [&](const std::vector<int>& first, const std::vector<int>& rest, int sign) {
      va.clear();
      vb.clear();
      for (int i : first) va.push_back(v[i]);
      for (int i : rest) vb.push_back(v[i]);
      acc += static_cast<double>(sign) * a(p, va) * b(p, vb);
    });
    return acc;
  });
}

/// tr(a ^ b) for matrix-valued 1-forms.
inline Form trace2(const MatrixForm& a, const MatrixForm& b) {
  require_same(*a.space(), *b.space(), "trace2");
  if (a.degree() != 1 || b.degree() != 1) throw std::invalid_argument("trace2: 1-forms required");
  return Form(a.space(), 2, [a, b](const Point& p, Tangents v) {
    const Matrix a0 = a(p, {v[0]}), a1 = a(p, {v[1]});
    const Matrix b0 = b(p, {v[0]}), b1 = b(p, {v[1]});
    return (a0 * b1).trace() - (a1 * b0).trace();
  });
}

/// tr(a ^ b ^ c) for matrix-valued 1-forms.
inline Form trace3(const MatrixForm& a, const MatrixForm& b, const MatrixForm& c) {
  require_same(*a.space(), *b.space(), "trace3");
  require_same(*a.space(), *c.space(), "trace3");
  if (a.degree() != 1 || b.degree() != 1 || c.degree() != 1) throw std::invalid_argument("trace3: 1-forms required");
  return Form(a.space(), 3, [a, b, c](const Point& p, Tangents v) {
    Matrix av[3], bv[3], cv[3];
    for (int i = 0; i < 3; ++i) {
      av[i] = a(p, {v[i]});
      bv[i] = b(p, {v[i]});
      cv[i] = c(p, {v[i]});
    }
    static constexpr int perms[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}};
    Complex acc{};
    for (int s = 0; s < 6; ++s) {
      const auto& q = perms[s];
      const Complex term = (av[q[0]] * bv[q[1]] * cv[q[2]]).trace();
      acc += s < 3 ? term : -term;
    }
    return acc;
  });
}

// ---------------------------------------------------------------------------
// Exterior derivative by central differences in the chart centred at the
// evaluation point. Tangents are extended as constant coordinate fields, so
// coordinate brackets vanish and
//   dw(V_0..V_k) = sum_j (-1)^j V_j[w(V_0..^V_j..V_k)].
// A d_fd nested inside another (directly or through sums) keeps differencing
// in the outer chart, so mixed differences land on identical grid points.

inline constexpr double kDefaultStep = 1e-5;

struct FdOptions {
  double step = kDefaultStep;
  bool richardson = false;
};

namespace detail {

struct ChartFrame {
  const Space* space;
  const Point* base;
  Tangent offset;
  const Point* at;
  const std::vector<Tangent>* passed;
  std::vector<Tangent> coords;
};

inline thread_local const ChartFrame* active_frame = nullptr;

inline bool same_values(const Point& a, const Point& b) {
  if (a.parts.size() != b.parts.size()) return false;
  for (std::size_t i = 0; i < a.parts.size(); ++i)
    if (a[i].rows() != b[i].rows() || a[i] != b[i]) return false;
  return true;
}

// The frame applies only when we are handed exactly what the outer d_fd passed down.
inline bool frame_applies(const ChartFrame* f, const Space& s, const Point& p, Tangents v) {
  if (!f || !f->space->same_as(s) || f->passed->size() != v.size() || !same_values(*f->at, p)) return false;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!same_values(Point{(*f->passed)[i].parts}, Point{v[i].parts})) return false;
  return true;
}

// Chart coordinates c expanded in a fixed real basis of each factor:
// i E_kk, E_kl - E_lk, i (E_kl + E_lk) on u(n); the unit vector on a line or circle.
inline std::vector<std::pair<Tangent, double>> basis_expansion(const Space& s, const Tangent& c) {
  std::vector<std::pair<Tangent, double>> out;
  for (std::size_t f = 0; f < s.size(); ++f) {
    const Factor& fac = s.factor(f);
    auto push = [&](double coef, auto&& fill) {
      if (coef == 0.0) return;
      Tangent e = zero_tangent(s);
      fill(e.parts[f]);
      out.emplace_back(std::move(e), coef);
    };
    if (fac.kind != FactorKind::Unitary) {
      push(c.rate(f), [](Matrix& m) { m(0, 0) = 1.0; });
      continue;
    }
    const Matrix& x = c[f];
    for (int k = 0; k < fac.n; ++k) {
      push(x(k, k).imag(), [k](Matrix& m) { m(k, k) = kI; });
      for (int l = k + 1; l < fac.n; ++l) {
        push(x(k, l).real(), [k, l](Matrix& m) {
          m(k, l) = 1.0;
          m(l, k) = -1.0;
        });
        push(x(k, l).imag(), [k, l](Matrix& m) {
          m(k, l) = kI;
          m(l, k) = kI;
        });
      }
    }
  }
  return out;
}

// The derivative slot is expanded in the chart basis, which keeps the result
// exactly linear in it.
inline Complex d_central(const Form& w, const Point& p, Tangents v, double h) {
  const Space& s = *w.space();
  const int k = static_cast<int>(v.size()) - 1;
  const ChartFrame* outer = active_frame;

  const Point* base = &p;
  Tangent offset;
  std::vector<Tangent> coords;
  if (frame_applies(outer, s, p, v)) {
    base = outer->base;
    offset = outer->offset;
    coords = outer->coords;
  } else {
    for (const auto& f : s.factors()) offset.parts.push_back(Matrix::Zero(f.n, f.n));
    for (const auto& t : v) coords.push_back(to_algebra(s, p, t));
  }

  struct Restore {
    const ChartFrame* prev;
    ~Restore() { active_frame = prev; }
  } restore{outer};

  Complex acc{};
  std::vector<Tangent> rest;
  for (int j = 0; j <= k; ++j) {
    std::vector<Tangent> rest_coords;
    for (int i = 0; i <= k; ++i)
      if (i != j) rest_coords.push_back(coords[i]);
    Complex slot{};
    for (const auto& [dir, coef] : basis_expansion(s, coords[j])) {
      Complex diff{};
      for (int side : {+1, -1}) {
        const Tangent shift = offset + (side * h) * dir;
        const Point q = chart(s, *base, shift);
        rest.clear();
        for (const auto& rc : rest_coords) rest.push_back(chart_push(s, *base, shift, rc));
        const ChartFrame frame{&s, base, shift, &q, &rest, rest_coords};
        active_frame = &frame;
        diff += static_cast<double>(side) * w(q, rest);
        active_frame = outer;
      }
      slot += coef * diff;
    }
    acc += (j % 2 == 0 ? 1.0 : -1.0) * slot / (2.0 * h);
  }
  return acc;
}

}  // namespace detail

inline Form d_fd(const Form& w, FdOptions opts = {}) {
  if (!(opts.step > 0.0)) throw std::invalid_argument("d_fd: step must be positive");
  return Form(w.space(), w.degree() + 1, [w, opts](const Point& p, Tangents v) {
    const Complex coarse = detail::d_central(w, p, v, opts.step);
    if (!opts.richardson) return coarse;
    const Complex fine = detail::d_central(w, p, v, 0.5 * opts.step);
    return (4.0 * fine - coarse) / 3.0;
  });
}

inline Form d_fd(const Form& w, double step) { return d_fd(w, FdOptions{step, false}); }

// ---------------------------------------------------------------------------
// Smooth maps with pushforwards.

struct SmoothMap {
  std::string name;
  SpaceRef source;
  SpaceRef target;
  std::function<Point(const Point&)> apply;
  std::function<Tangent(const Point&, const Tangent&)> push;

  Point operator()(const Point& p) const { return apply(p); }
};

/// Pushforward by central differences along the chart curve t -> chart(p, tC).
inline SmoothMap with_fd_pushforward(std::string name, SpaceRef source, SpaceRef target,
                                     std::function<Point(const Point&)> apply, double step = 1e-6) {
  auto push = [source, target, apply, step](const Point& p, const Tangent& v) {
    const Tangent c = to_algebra(*source, p, v);
    const Point plus = apply(chart(*source, p, step * c));
    const Point minus = apply(chart(*source, p, (-step) * c));
    Tangent out;
    for (std::size_t i = 0; i < target->size(); ++i) {
      Matrix diff = plus[i] - minus[i];
      if (target->factor(i).kind == FactorKind::Circle)
        diff(0, 0) = std::remainder(diff(0, 0).real(), kTwoPi);
      out.parts.push_back(diff / (2.0 * step));
    }
    return out;
  };
  return SmoothMap{std::move(name), std::move(source), std::move(target), std::move(apply), std::move(push)};
}

inline SmoothMap identity_map(SpaceRef s) {
  return SmoothMap{"id", s, s, [](const Point& p) { return p; }, [](const Point&, const Tangent& v) { return v; }};
}

/// g o f
inline SmoothMap compose(const SmoothMap& g, const SmoothMap& f) {
  require_same(*f.target, *g.source, "compose");
  return SmoothMap{g.name + "*" + f.name, f.source, g.target, [f, g](const Point& p) { return g(f(p)); },
                   [f, g](const Point& p, const Tangent& v) { return g.push(f(p), f.push(p, v)); }};
}

inline Form pullback(const SmoothMap& f, const Form& w) {
  require_same(*f.target, *w.space(), "pullback");
  return Form(f.source, w.degree(), [f, w](const Point& p, Tangents v) {
    std::vector<Tangent> pushed;
    pushed.reserve(v.size());
    for (const auto& t : v) pushed.push_back(f.push(p, t));
    return w(f(p), pushed);
  });
}

// ---------------------------------------------------------------------------
// Midpoint-rule integration of a top-degree form over a parametrised box.

struct Parametrization {
  SpaceRef space;
  std::vector<std::pair<double, double>> box;
  std::function<Point(std::span<const double>)> map;
  // Optional analytic partials; central differences of `map` otherwise.
  std::function<Tangent(std::span<const double>, int axis)> partial;

  int dim() const { return static_cast<int>(box.size()); }
};

inline Tangent partial_derivative(const Parametrization& par, std::span<const double> u, int axis,
                                  double step = 1e-6) {
  if (par.partial) return par.partial(u, axis);
  std::vector<double> up(u.begin(), u.end()), dn(u.begin(), u.end());
  up[axis] += step;
  dn[axis] -= step;
  const Point a = par.map(up), b = par.map(dn);
  Tangent t;
  for (std::size_t i = 0; i < par.space->size(); ++i) {
    Matrix diff = a[i] - b[i];
    if (par.space->factor(i).kind == FactorKind::Circle) diff(0, 0) = std::remainder(diff(0, 0).real(), kTwoPi);
    t.parts.push_back(diff / (2.0 * step));
  }
  return t;
}

inline Complex integrate_grid(const Form& w, const Parametrization& par, int resolution) {
  require_same(*w.space(), *par.space, "integrate_grid");
  const int d = par.dim();
  if (w.degree() != d) throw std::invalid_argument("integrate_grid: form degree must equal domain dimension");
  if (resolution < 1) throw std::invalid_argument("integrate_grid: resolution must be positive");

  std::vector<double> du(d);
  double cell = 1.0;
  for (int a = 0; a < d; ++a) {
    du[a] = (par.box[a].second - par.box[a].first) / resolution;
    cell *= du[a];
  }
  // One task per slab along the first axis; slabs are summed pairwise.
  std::size_t inner = 1;
  for (int a = 1; a < d; ++a) inner *= static_cast<std::size_t>(resolution);
  const std::size_t slabs = d == 0 ? 1 : static_cast<std::size_t>(resolution);

  auto slab_sum = [&](std::size_t s) {
    std::vector<Complex> vals(inner);
    std::vector<double> u(d);
    std::vector<Tangent> partials(d);
    for (std::size_t c = 0; c < inner; ++c) {
      std::size_t rem = c;
      if (d > 0) u[0] = par.box[0].first + (static_cast<double>(s) + 0.5) * du[0];
      for (int a = d - 1; a >= 1; --a) {
        const auto idx = rem % static_cast<std::size_t>(resolution);
        rem /= static_cast<std::size_t>(resolution);
        u[a] = par.box[a].first + (static_cast<double>(idx) + 0.5) * du[a];
      }
      for (int a = 0; a < d; ++a) partials[a] = partial_derivative(par, u, a);
      vals[c] = w(par.map(u), partials);
    }
    return pairwise_sum(vals);
  };
  const auto sums = parallel_map(slabs, slab_sum);
  return pairwise_sum(sums) * cell;
}

// ---------------------------------------------------------------------------
// Probing helpers for the alternating/multilinear invariants.

/// Max relative violation of antisymmetry and multilinearity over random probes.
inline double form_law_defect(const Form& w, int probes, std::uint64_t seed) {
  const Space& s = *w.space();
  const int k = w.degree();
  if (k == 0) return 0.0;
  double worst = 0.0;
  for (int pr = 0; pr < probes; ++pr) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(pr));
    const Point p = random_point(s, rng);
    std::vector<Tangent> v;
    for (int i = 0; i < k; ++i) v.push_back(random_tangent(s, p, rng));
    const Tangent extra = random_tangent(s, p, rng);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    const double a = coef(rng), b = coef(rng);
    const Complex base = w(p, v);
    const double scale = std::max(1.0, std::abs(base));
    for (int slot = 0; slot < k; ++slot) {
      std::vector<Tangent> mixed = v, other = v;
      mixed[slot] = a * v[slot] + b * extra;
      other[slot] = extra;
      const Complex lhs = w(p, mixed);
      const Complex rhs = a * base + b * w(p, other);
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(scale, std::abs(rhs)));
    }
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) {
        std::vector<Tangent> swapped = v;
        std::swap(swapped[i], swapped[j]);
        worst = std::max(worst, std::abs(w(p, swapped) + base) / scale);
      }
  }
  return worst;
}

}  // namespace gerbelab::excalc

#endif  // GERBELAB_EXCALC_HPP
