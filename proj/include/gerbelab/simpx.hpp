#ifndef GERBELAB_SIMPX_HPP
#define GERBELAB_SIMPX_HPP

// Semi-simplicial spaces (nerves of group actions, fibre-product nerves), the
// alternating-pullback operator on forms, and the total complex
//   D eta_{(p,q)} = ((-1)^q d eta_{(p,q)}, delta eta_{(p,q)})
// with numerical cocycle probing.

#include "gerbelab/excalc.hpp"

#include <map>
#include <utility>

namespace gerbelab::simpx {

using excalc::Form;
using excalc::Point;
using excalc::SmoothMap;
using excalc::Space;
using excalc::SpaceRef;
using excalc::Tangent;

class SimplicialSpace {
 public:
  SimplicialSpace(std::vector<SpaceRef> levels, std::vector<std::vector<SmoothMap>> faces)
      : levels_(std::move(levels)), faces_(std::move(faces)) {
    if (faces_.size() != levels_.size()) throw std::invalid_argument("SimplicialSpace: faces/levels size mismatch");
    for (std::size_t p = 1; p < levels_.size(); ++p)
      if (faces_[p].size() != p + 1) throw std::invalid_argument("SimplicialSpace: level p needs p+1 faces");
  }

  int max_level() const { return static_cast<int>(levels_.size()) - 1; }
  const SpaceRef& level(int p) const { return levels_.at(static_cast<std::size_t>(p)); }

  /// d_i : X_p -> X_{p-1}
  const SmoothMap& face(int p, int i) const {
    if (p < 1 || p > max_level()) throw std::out_of_range("face: level out of range");
    return faces_[static_cast<std::size_t>(p)].at(static_cast<std::size_t>(i));
  }

 private:
  std::vector<SpaceRef> levels_;
  std::vector<std::vector<SmoothMap>> faces_;  // faces_[0] is empty
};

/// Smooth right action of a group G on M, with the group law; all maps carry
/// analytic pushforwards.
struct GroupAction {
  SpaceRef object;  // M
  SpaceRef group;   // G
  std::function<Point(const Point& m, const Point& g)> act;
  std::function<Tangent(const Point& m, const Point& g, const Tangent& vm, const Tangent& vg)> act_push;
  std::function<Point(const Point& a, const Point& b)> mul;
  std::function<Tangent(const Point& a, const Point& b, const Tangent& va, const Tangent& vb)> mul_push;
};

namespace detail {

template <typename T>
T slice(const T& x, std::size_t from, std::size_t count) {
  T out;
  out.parts.assign(x.parts.begin() + static_cast<std::ptrdiff_t>(from),
                   x.parts.begin() + static_cast<std::ptrdiff_t>(from + count));
  return out;
}

template <typename T>
void append(T& into, const T& x) {
  into.parts.insert(into.parts.end(), x.parts.begin(), x.parts.end());
}

}  // namespace detail

/// U(n) acting on itself by m.g = g^{-1} m g.
inline GroupAction conjugation_action(int n) {
  const auto g = excalc::make_space("U(" + std::to_string(n) + ")", {excalc::Factor::unitary(n)});
  GroupAction a;
  a.object = g;
  a.group = g;
  a.act = [](const Point& m, const Point& h) { return Point{{h[0].adjoint() * m[0] * h[0]}}; };
  a.act_push = [](const Point& m, const Point& h, const Tangent& vm, const Tangent& vh) {
    const Matrix moved = h[0].adjoint() * m[0] * h[0];
    const Matrix xh = h[0].adjoint() * vh[0];
    return Tangent{{h[0].adjoint() * vm[0] * h[0] + moved * xh - xh * moved}};
  };
  a.mul = [](const Point& x, const Point& y) { return Point{{x[0] * y[0]}}; };
  a.mul_push = [](const Point& x, const Point& y, const Tangent& vx, const Tangent& vy) {
    return Tangent{{vx[0] * y[0] + x[0] * vy[0]}};
  };
  return a;
}

/// EG(M)_p = M x G^p with
///   d_0(m, g_1..g_p) = (m g_1, g_2..g_p),
///   d_k = (.., g_k g_{k+1}, ..) for 0 < k < p,
///   d_p drops g_p.
inline SimplicialSpace eg_nerve(const GroupAction& action, int max_level) {
  if (max_level < 0) throw std::invalid_argument("eg_nerve: negative level");
  const std::size_t mf = action.object->size();
  const std::size_t gf = action.group->size();

  std::vector<SpaceRef> levels;
  for (int p = 0; p <= max_level; ++p) {
    std::vector<excalc::Factor> fs = action.object->factors();
    for (int i = 0; i < p; ++i) fs.insert(fs.end(), action.group->factors().begin(), action.group->factors().end());
    levels.push_back(excalc::make_space("EG(" + action.object->id() + ")_" + std::to_string(p), std::move(fs)));
  }

  std::vector<std::vector<SmoothMap>> faces(levels.size());
  for (int p = 1; p <= max_level; ++p) {
    for (int k = 0; k <= p; ++k) {
      auto apply = [=](const Point& x) {
        const auto group_at = [&](int i) { return detail::slice(x, mf + gf * static_cast<std::size_t>(i - 1), gf); };
        Point out;
        if (k == 0) {
          detail::append(out, action.act(detail::slice(x, 0, mf), group_at(1)));
          for (int i = 2; i <= p; ++i) detail::append(out, group_at(i));
        } else {
          detail::append(out, detail::slice(x, 0, mf));
          for (int i = 1; i <= p; ++i) {
            if (i == k && k < p) {
              detail::append(out, action.mul(group_at(i), group_at(i + 1)));
              ++i;
            } else if (i == p && k == p) {
              break;
            } else {
              detail::append(out, group_at(i));
            }
          }
        }
        return out;
      };
      auto push = [=](const Point& x, const Tangent& v) {
        const auto gp = [&](int i) { return detail::slice(x, mf + gf * static_cast<std::size_t>(i - 1), gf); };
        const auto gv = [&](int i) { return detail::slice(v, mf + gf * static_cast<std::size_t>(i - 1), gf); };
        Tangent out;
        if (k == 0) {
          detail::append(out, action.act_push(detail::slice(x, 0, mf), gp(1), detail::slice(v, 0, mf), gv(1)));
          for (int i = 2; i <= p; ++i) detail::append(out, gv(i));
        } else {
          detail::append(out, detail::slice(v, 0, mf));
          for (int i = 1; i <= p; ++i) {
            if (i == k && k < p) {
              detail::append(out, action.mul_push(gp(i), gp(i + 1), gv(i), gv(i + 1)));
              ++i;
            } else if (i == p && k == p) {
              break;
            } else {
              detail::append(out, gv(i));
            }
          }
        }
        return out;
      };
      faces[static_cast<std::size_t>(p)].push_back(SmoothMap{"d" + std::to_string(k) + "@" + std::to_string(p),
                                                             levels[static_cast<std::size_t>(p)],
                                                             levels[static_cast<std::size_t>(p - 1)], apply, push});
    }
  }
  return SimplicialSpace(std::move(levels), std::move(faces));
}

/// M^{[p+1]} realised as the cartesian nerve M^{p+1}; d_i omits the i-th factor.
/// (The fibre condition is not enforced; the nerve map lands in it.)
inline SimplicialSpace fibre_product_nerve(const SpaceRef& m, int max_level) {
  const std::size_t mf = m->size();
  std::vector<SpaceRef> levels;
  for (int p = 0; p <= max_level; ++p) {
    std::vector<excalc::Factor> fs;
    for (int i = 0; i <= p; ++i) fs.insert(fs.end(), m->factors().begin(), m->factors().end());
    levels.push_back(excalc::make_space(m->id() + "^[" + std::to_string(p + 1) + "]", std::move(fs)));
  }
  std::vector<std::vector<SmoothMap>> faces(levels.size());
  for (int p = 1; p <= max_level; ++p) {
    for (int k = 0; k <= p; ++k) {
      auto drop = [=]<typename T>(const T& x) {
        T out;
        for (int i = 0; i <= p; ++i)
          if (i != k) detail::append(out, detail::slice(x, mf * static_cast<std::size_t>(i), mf));
        return out;
      };
      faces[static_cast<std::size_t>(p)].push_back(
          SmoothMap{"d" + std::to_string(k) + "@" + std::to_string(p), levels[static_cast<std::size_t>(p)],
                    levels[static_cast<std::size_t>(p - 1)], [drop](const Point& x) { return drop(x); },
                    [drop](const Point&, const Tangent& v) { return drop(v); }});
    }
  }
  return SimplicialSpace(std::move(levels), std::move(faces));
}

/// (m, g_1, .., g_k) -> (m, m g_1, m g_1 g_2, .., m g_1 .. g_k).
inline Point nerve_iso(const GroupAction& action, const Point& m, const std::vector<Point>& gs) {
  Point out = m;
  Point cur = m;
  for (const auto& g : gs) {
    cur = action.act(cur, g);
    detail::append(out, cur);
  }
  return out;
}

/// nerve_iso applied to a packed EG(M)_k point.
inline Point nerve_iso(const GroupAction& action, const Point& packed) {
  const std::size_t mf = action.object->size();
  const std::size_t gf = action.group->size();
  std::vector<Point> gs;
  for (std::size_t at = mf; at < packed.parts.size(); at += gf) gs.push_back(detail::slice(packed, at, gf));
  return nerve_iso(action, detail::slice(packed, 0, mf), gs);
}

/// Distance between two points of the same space (Frobenius per factor,
/// circle coordinates compared modulo 2pi).
inline double point_distance(const Space& s, const Point& a, const Point& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.factor(i).kind == excalc::FactorKind::Circle) {
      worst = std::max(worst, std::abs(std::remainder(a.coord(i) - b.coord(i), kTwoPi)));
    } else {
      worst = std::max(worst, frobenius(a[i] - b[i]));
    }
  }
  return worst;
}

inline double tangent_distance(const Tangent& a, const Tangent& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.parts.size(); ++i) worst = std::max(worst, frobenius(a[i] - b[i]));
  return worst;
}

/// Max residual of d_i d_j = d_{j-1} d_i (i < j) over random points and
/// tangents at every level >= 2; both points and pushforwards are compared.
inline double simplicial_identity_defect(const SimplicialSpace& s, int samples, std::uint64_t seed) {
  double worst = 0.0;
  for (int p = 2; p <= s.max_level(); ++p) {
    const Space& xp = *s.level(p);
    for (int smp = 0; smp < samples; ++smp) {
      Rng rng = make_rng(seed, static_cast<std::uint64_t>(p * 100003 + smp));
      const Point x = excalc::random_point(xp, rng);
      const Tangent v = excalc::random_tangent(xp, x, rng);
      for (int j = 1; j <= p; ++j)
        for (int i = 0; i < j; ++i) {
          const SmoothMap lhs = excalc::compose(s.face(p - 1, i), s.face(p, j));
          const SmoothMap rhs = excalc::compose(s.face(p - 1, j - 1), s.face(p, i));
          worst = std::max(worst, point_distance(*s.level(p - 2), lhs(x), rhs(x)));
          worst = std::max(worst, tangent_distance(lhs.push(x, v), rhs.push(x, v)));
        }
    }
  }
  return worst;
}

/// delta w = sum_{i=0}^{p+1} (-1)^i d_i^* w for w on level p.
inline Form delta_form(const Form& w, const SimplicialSpace& s, int level) {
  if (level < 0 || level >= s.max_level()) throw std::out_of_range("delta_form: level out of range");
  excalc::require_same(*w.space(), *s.level(level), "delta_form");
  std::vector<Form> pulled;
  for (int i = 0; i <= level + 1; ++i) pulled.push_back(excalc::pullback(s.face(level + 1, i), w));
  return Form(s.level(level + 1), w.degree(), [pulled](const Point& p, excalc::Tangents v) {
    Complex acc{};
    for (std::size_t i = 0; i < pulled.size(); ++i) acc += (i % 2 == 0 ? 1.0 : -1.0) * pulled[i](p, v);
    return acc;
  });
}

/// Components eta_{(p,q)}: a p-form on level q.
using BigradedCochain = std::map<std::pair<int, int>, Form>;

/// D applied to a cochain of total degree r. Components with no contributing
/// terms are left out.
inline BigradedCochain total_D(const BigradedCochain& eta, const SimplicialSpace& s, int total_degree,
                               excalc::FdOptions fd = {}) {
  BigradedCochain out;
  for (int p = 0; p <= total_degree + 1; ++p) {
    const int q = total_degree + 1 - p;
    std::optional<Form> acc;
    auto add = [&](const Form& f) { acc = acc ? *acc + f : f; };
    if (auto it = eta.find({p - 1, q}); it != eta.end()) {
      const Form d = excalc::d_fd(it->second, fd);
      add(q % 2 == 0 ? d : Complex(-1.0) * d);
    }
    if (auto it = eta.find({p, q - 1}); it != eta.end()) add(delta_form(it->second, s, q - 1));
    if (acc) out.emplace(std::make_pair(p, q), *acc);
  }
  return out;
}

struct ProbePlan {
  int points = 20;
  int tuples = 5;
  std::uint64_t seed = 0;
  excalc::FdOptions fd{};
};

struct ConditionResidual {
  int form_degree = 0;  // p
  int level = 0;        // q
  bool evaluated = false;
  double max_abs = 0.0;
  int probes = 0;
};

struct DResidualReport {
  std::vector<ConditionResidual> conditions;  // ordered by ascending form degree

  double worst() const {
    double w = 0.0;
    for (const auto& c : conditions) w = std::max(w, c.max_abs);
    return w;
  }
};

/// Max absolute value of a form over random points and tangent tuples.
inline double probe_max_abs(const Form& w, const ProbePlan& plan, std::uint64_t stream) {
  const Space& sp = *w.space();
  const auto per_point = parallel_map(static_cast<std::size_t>(plan.points), [&](std::size_t pt) {
    Rng rng = make_rng(derive_seed(plan.seed, stream), pt);
    const Point x = excalc::random_point(sp, rng);
    double worst = 0.0;
    for (int t = 0; t < plan.tuples; ++t) {
      std::vector<Tangent> v;
      for (int i = 0; i < w.degree(); ++i) v.push_back(excalc::random_tangent(sp, x, rng));
      worst = std::max(worst, std::abs(w(x, v)));
    }
    return worst;
  });
  double worst = 0.0;
  for (double x : per_point) worst = std::max(worst, x);
  return worst;
}

/// Evaluates every component of D eta for a cochain of the given total
/// degree. A condition with no contributing components is reported as an
/// exact zero without probing.
inline DResidualReport total_D_residual(const BigradedCochain& eta, const SimplicialSpace& s,
                                        const ProbePlan& plan, int total_degree = 3) {
  const BigradedCochain d_eta = total_D(eta, s, total_degree, plan.fd);
  DResidualReport report;
  for (int p = 0; p <= total_degree + 1; ++p) {
    const int q = total_degree + 1 - p;
    ConditionResidual c{p, q};
    if (auto it = d_eta.find({p, q}); it != d_eta.end()) {
      c.evaluated = true;
      c.probes = plan.points * plan.tuples;
      c.max_abs = probe_max_abs(it->second, plan, static_cast<std::uint64_t>(p));
    }
    report.conditions.push_back(c);
  }
  return report;
}

}  // namespace gerbelab::simpx

#endif  // GERBELAB_SIMPX_HPP
