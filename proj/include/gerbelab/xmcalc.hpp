#ifndef GERBELAB_XMCALC_HPP
#define GERBELAB_XMCALC_HPP

// Crossed-module words, fibre expressions K^_w / K^*_w and their normal
// forms; face maps of the action 2-groupoid nerve and the Chern-Simons
// 2-gerbe fibre chains.

#include "gerbelab/core.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gerbelab::xmcalc {

enum class Sort { K, L };
enum class Op { Gen, One, Mul, Inv, Embed, Ad };

struct Word;
using WordPtr = std::shared_ptr<const Word>;

/// Node of a sort-checked word. Gen carries the generator index (w# for K,
/// g# for L); Embed is t : K -> L; Ad(l, k) is the L-action on K.
struct Word {
  Op op = Op::One;
  Sort sort = Sort::K;
  int gen = -1;
  std::vector<WordPtr> kids;
  std::size_t pos = 0;  // source offset when parsed
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t pos)
      : std::runtime_error(what + " at offset " + std::to_string(pos)), pos_(pos) {}
  std::size_t pos() const { return pos_; }

 private:
  std::size_t pos_;
};

class SortError : public ParseError {
 public:
  using ParseError::ParseError;
};

inline WordPtr make_word(Op op, Sort sort, int gen, std::vector<WordPtr> kids, std::size_t pos = 0) {
  return std::make_shared<const Word>(Word{op, sort, gen, std::move(kids), pos});
}

inline const char* sort_name(Sort s) { return s == Sort::K ? "K" : "L"; }

inline WordPtr kgen(int i) { return make_word(Op::Gen, Sort::K, i, {}); }
inline WordPtr lgen(int i) { return make_word(Op::Gen, Sort::L, i, {}); }
inline WordPtr one(Sort s) { return make_word(Op::One, s, -1, {}); }

inline WordPtr mul(const WordPtr& a, const WordPtr& b) {
  if (a->sort != b->sort)
    throw SortError(std::string("mul of ") + sort_name(a->sort) + " and " + sort_name(b->sort) + " words", b->pos);
  return make_word(Op::Mul, a->sort, -1, {a, b}, a->pos);
}

/// Left-nested product of one or more words.
inline WordPtr mul(std::initializer_list<WordPtr> ws) {
  WordPtr acc;
  for (const auto& w : ws) acc = acc ? mul(acc, w) : w;
  if (!acc) throw std::invalid_argument("mul: empty product");
  return acc;
}

inline WordPtr inv(const WordPtr& a) { return make_word(Op::Inv, a->sort, -1, {a}, a->pos); }

inline WordPtr embed(const WordPtr& k) {
  if (k->sort != Sort::K) throw SortError("t(...) needs a K-word", k->pos);
  return make_word(Op::Embed, Sort::L, -1, {k}, k->pos);
}

inline WordPtr ad(const WordPtr& l, const WordPtr& k) {
  if (l->sort != Sort::L) throw SortError("ad(...) needs an L-word first", l->pos);
  if (k->sort != Sort::K) throw SortError("ad(...) needs a K-word second", k->pos);
  return make_word(Op::Ad, Sort::K, -1, {l, k}, l->pos);
}

inline std::string to_string(const WordPtr& w) {
  switch (w->op) {
    case Op::Gen: return (w->sort == Sort::K ? "w" : "g") + std::to_string(w->gen);
    case Op::One: return "one";
    case Op::Mul: return "mul(" + to_string(w->kids[0]) + ", " + to_string(w->kids[1]) + ")";
    case Op::Inv: return "inv(" + to_string(w->kids[0]) + ")";
    case Op::Embed: return "t(" + to_string(w->kids[0]) + ")";
    case Op::Ad: return "ad(" + to_string(w->kids[0]) + ", " + to_string(w->kids[1]) + ")";
  }
  return "?";
}

/// One tensor factor: K^_w (sign +1) or its dual K^*_w (sign -1).
struct FiberTerm {
  WordPtr word;
  int sign = 1;
};

using FiberExpr = std::vector<FiberTerm>;

inline std::string to_string(const FiberExpr& e) {
  std::string out;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i) out += " * ";
    out += (e[i].sign > 0 ? "K(" : "Kd(") + to_string(e[i].word) + ")";
  }
  return out;
}

inline FiberExpr dual(FiberExpr e) {
  for (auto& t : e) t.sign = -t.sign;
  return e;
}

inline FiberExpr tensor(FiberExpr a, const FiberExpr& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// ---------------------------------------------------------------------------
// Parser.
//   expr  := term { "*" term }
//   term  := ("K" | "Kd") "(" kword ")"
//   kword := w# | one | mul(kword, kword) | inv(kword) | ad(lword, kword)
//   lword := g# | one | mul(lword, lword) | inv(lword) | t(kword)

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  FiberExpr expr() {
    FiberExpr out;
    out.push_back(term());
    while (peek() == '*') {
      ++i_;
      out.push_back(term());
    }
    skip();
    if (i_ != s_.size()) throw ParseError("unexpected trailing input", i_);
    return out;
  }

 private:
  std::string_view s_;
  std::size_t i_ = 0;

  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  char peek() {
    skip();
    return i_ < s_.size() ? s_[i_] : '\0';
  }
  void expect(char c) {
    if (peek() != c) throw ParseError(std::string("expected '") + c + "'", i_);
    ++i_;
  }
  std::string ident() {
    skip();
    const std::size_t start = i_;
    while (i_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (start == i_) throw ParseError("expected a name", start);
    return std::string(s_.substr(start, i_ - start));
  }

  FiberTerm term() {
    skip();
    const std::size_t at = i_;
    const std::string head = ident();
    if (head != "K" && head != "Kd") throw ParseError("expected K(...) or Kd(...), got '" + head + "'", at);
    expect('(');
    WordPtr w = word(Sort::K);
    expect(')');
    return {w, head == "K" ? 1 : -1};
  }

  static bool generator(const std::string& name, char prefix, int& index) {
    if (name.size() < 2 || name[0] != prefix) return false;
    for (std::size_t k = 1; k < name.size(); ++k)
      if (!std::isdigit(static_cast<unsigned char>(name[k]))) return false;
    index = std::stoi(name.substr(1));
    return true;
  }

  WordPtr word(Sort want) {
    skip();
    const std::size_t at = i_;
    const std::string name = ident();
    int index = -1;
    if (generator(name, 'w', index)) {
      if (want != Sort::K) throw SortError("K-generator " + name + " where an L-word is expected", at);
      return make_word(Op::Gen, Sort::K, index, {}, at);
    }
    if (generator(name, 'g', index)) {
      if (want != Sort::L) throw SortError("L-generator " + name + " where a K-word is expected (missing t?)", at);
      return make_word(Op::Gen, Sort::L, index, {}, at);
    }
    if (name == "one") return make_word(Op::One, want, -1, {}, at);
    if (name == "mul") {
      expect('(');
      WordPtr a = word(want);
      expect(',');
      WordPtr b = word(want);
      expect(')');
      return make_word(Op::Mul, want, -1, {a, b}, at);
    }
    if (name == "inv") {
      expect('(');
      WordPtr a = word(want);
      expect(')');
      return make_word(Op::Inv, want, -1, {a}, at);
    }
    if (name == "ad") {
      if (want != Sort::K) throw SortError("ad(...) is a K-word, an L-word is expected here", at);
      expect('(');
      WordPtr l = word(Sort::L);
      expect(',');
      WordPtr k = word(Sort::K);
      expect(')');
      return make_word(Op::Ad, Sort::K, -1, {l, k}, at);
    }
    if (name == "t") {
      if (want != Sort::L) throw SortError("t(...) is an L-word, a K-word is expected here", at);
      expect('(');
      WordPtr k = word(Sort::K);
      expect(')');
      return make_word(Op::Embed, Sort::L, -1, {k}, at);
    }
    throw ParseError("unknown name '" + name + "'", at);
  }
};

}  // namespace detail

inline FiberExpr parse(std::string_view text) { return detail::Parser(text).expr(); }

// ---------------------------------------------------------------------------
// Normal forms of fibre expressions.

/// Replaces every ad(u, v) by v.
inline WordPtr erase_ad(const WordPtr& w) {
  switch (w->op) {
    case Op::Ad: return erase_ad(w->kids[1]);
    case Op::Mul: return make_word(Op::Mul, w->sort, -1, {erase_ad(w->kids[0]), erase_ad(w->kids[1])}, w->pos);
    case Op::Inv: return make_word(Op::Inv, w->sort, -1, {erase_ad(w->kids[0])}, w->pos);
    case Op::Embed: return make_word(Op::Embed, w->sort, -1, {erase_ad(w->kids[0])}, w->pos);
    default: return w;
  }
}

inline int ad_count(const WordPtr& w) {
  int c = w->op == Op::Ad ? 1 : 0;
  for (const auto& k : w->kids) c += ad_count(k);
  return c;
}

/// K-generator -> exponent; zero entries are never stored.
using ExponentVector = std::map<int, int>;

namespace detail {

inline void count_letters(const WordPtr& w, int sign, ExponentVector& acc) {
  switch (w->op) {
    case Op::Gen:
      if (w->sort == Sort::K) acc[w->gen] += sign;
      break;
    case Op::One: break;
    case Op::Mul:
      count_letters(w->kids[0], sign, acc);
      count_letters(w->kids[1], sign, acc);
      break;
    case Op::Inv: count_letters(w->kids[0], -sign, acc); break;
    case Op::Embed:
    case Op::Ad:
      // not reachable for K-words after erase_ad
      throw std::logic_error("count_letters: unexpected node");
  }
}

}  // namespace detail

inline ExponentVector reduce(const FiberExpr& e) {
  ExponentVector acc;
  for (const auto& t : e) detail::count_letters(erase_ad(t.word), t.sign, acc);
  for (auto it = acc.begin(); it != acc.end();) it = it->second == 0 ? acc.erase(it) : std::next(it);
  return acc;
}

inline bool xm_equal(const FiberExpr& a, const FiberExpr& b) { return reduce(a) == reduce(b); }

inline std::string to_string(const ExponentVector& v) {
  std::string out = "{";
  bool first = true;
  for (const auto& [g, e] : v) {
    if (!first) out += ", ";
    first = false;
    out += "w" + std::to_string(g) + ":" + (e > 0 ? "+" : "") + std::to_string(e);
  }
  return out + "}";
}

// ---------------------------------------------------------------------------
// Evaluation in the free crossed module: L = F(l_i, tau_j), K embedded in L
// as the normal closure of the tau_j (t injective, t(k_j) = tau_j), with
// ad(l, k) = l k l^{-1}. Both axioms t(ad(l,k)) = l t(k) l^{-1} and
// ad(t(k1), k2) = k1 k2 k1^{-1} hold by construction, so words equal under
// the crossed-module relations have equal images.

struct Letter {
  int symbol = 0;  // l_i -> i + 1, tau_j -> -(j + 1)
  int exp = 1;
  bool operator==(const Letter&) const = default;
};

using FreeWord = std::vector<Letter>;

namespace detail {

inline void push_letter(FreeWord& w, Letter x) {
  if (!w.empty() && w.back().symbol == x.symbol && w.back().exp == -x.exp) {
    w.pop_back();
  } else {
    w.push_back(x);
  }
}

inline FreeWord concat(FreeWord a, const FreeWord& b) {
  for (const auto& x : b) push_letter(a, x);
  return a;
}

inline FreeWord inverse(const FreeWord& a) {
  FreeWord out;
  for (auto it = a.rbegin(); it != a.rend(); ++it) out.push_back({it->symbol, -it->exp});
  return out;
}

}  // namespace detail

/// Reduced image of a word (of either sort) in F(l, tau).
inline FreeWord evaluate(const WordPtr& w) {
  switch (w->op) {
    case Op::Gen: return {Letter{w->sort == Sort::L ? w->gen + 1 : -(w->gen + 1), 1}};
    case Op::One: return {};
    case Op::Mul: return detail::concat(evaluate(w->kids[0]), evaluate(w->kids[1]));
    case Op::Inv: return detail::inverse(evaluate(w->kids[0]));
    case Op::Embed: return evaluate(w->kids[0]);
    case Op::Ad: {
      const FreeWord l = evaluate(w->kids[0]);
      return detail::concat(detail::concat(l, evaluate(w->kids[1])), detail::inverse(l));
    }
  }
  return {};
}

/// Drops tau letters: the image in L / t(K), which is what acts on base points.
inline FreeWord base_image(const FreeWord& w) {
  FreeWord out;
  for (const auto& x : w)
    if (x.symbol > 0) detail::push_letter(out, x);
  return out;
}

inline std::string to_string(const FreeWord& w) {
  if (w.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ".";
    const int s = w[i].symbol;
    out += s > 0 ? "g" + std::to_string(s - 1) : "t(w" + std::to_string(-s - 1) + ")";
    if (w[i].exp < 0) out += "^-1";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Nerve face maps on formal tuples (p.base, l_1..l_a, k_1..k_b).

struct XmTuple {
  WordPtr base;  // L-word U in p.U
  std::vector<WordPtr> ls;
  std::vector<WordPtr> ks;
};

struct FaceMap {
  std::string name;
  std::function<XmTuple(const XmTuple&)> apply;
  XmTuple operator()(const XmTuple& x) const { return apply(x); }
};

/// Normal form of a tuple; base points are compared in L / t(K).
struct TupleNormalForm {
  FreeWord base;
  std::vector<FreeWord> ls;
  std::vector<FreeWord> ks;
  bool operator==(const TupleNormalForm&) const = default;
};

inline TupleNormalForm normal_form(const XmTuple& x) {
  TupleNormalForm nf;
  nf.base = base_image(evaluate(x.base));
  for (const auto& l : x.ls) nf.ls.push_back(evaluate(l));
  for (const auto& k : x.ks) nf.ks.push_back(evaluate(k));
  return nf;
}

inline std::string to_string(const TupleNormalForm& nf) {
  std::string out = "(p." + to_string(nf.base);
  for (const auto& l : nf.ls) out += ", " + to_string(l);
  for (const auto& k : nf.ks) out += ", " + to_string(k);
  return out + ")";
}

/// Generic level-q point: base p, l-generators g1..g_a, k-generators w_{k0}...
inline XmTuple generic_tuple(int ls, int ks, int k_first = 1) {
  XmTuple x{one(Sort::L), {}, {}};
  for (int i = 1; i <= ls; ++i) x.ls.push_back(lgen(i));
  for (int j = 0; j < ks; ++j) x.ks.push_back(kgen(k_first + j));
  return x;
}

namespace detail {

inline XmTuple act(const XmTuple& x, const WordPtr& l) { return {mul(x.base, l), {}, {}}; }

inline std::vector<FaceMap> level1_faces() {
  return {{"d0", [](const XmTuple& x) { return act(x, x.ls.at(0)); }},
          {"d1", [](const XmTuple& x) { return XmTuple{x.base, {}, {}}; }}};
}

inline std::vector<FaceMap> level2_faces() {
  return {{"d0", [](const XmTuple& x) { return XmTuple{mul(x.base, x.ls[0]), {x.ls[1]}, {}}; }},
          {"d1", [](const XmTuple& x) { return XmTuple{x.base, {mul({x.ls[0], x.ls[1], embed(x.ks[0])})}, {}}; }},
          {"d2", [](const XmTuple& x) { return XmTuple{x.base, {x.ls[0]}, {}}; }}};
}

}  // namespace detail

/// Faces of the action 2-groupoid nerve, from level `level` to level-1.
///   level 1: d0(p,l) = pl, d1(p,l) = p
///   level 2: d0 = (pl1, l2), d1 = (p, l1 l2 t(k)), d2 = (p, l1)
///   level 3: d0 = (pl1, l2, l3, k3), d1 = (p, l1 l2 t(k1), l3, k2),
///            d2 = (p, l1, l2 l3 t(k3), k3^-1 ad(l3^-1, k1) k2), d3 = (p, l1, l2, k1)
inline std::vector<FaceMap> ek_nerve_faces(int level) {
  if (level == 1) return detail::level1_faces();
  if (level == 2) return detail::level2_faces();
  if (level != 3) throw std::invalid_argument("ek_nerve_faces: level must be 1, 2 or 3");
  return {
      {"d0", [](const XmTuple& x) { return XmTuple{mul(x.base, x.ls[0]), {x.ls[1], x.ls[2]}, {x.ks[2]}}; }},
      {"d1",
       [](const XmTuple& x) {
         return XmTuple{x.base, {mul({x.ls[0], x.ls[1], embed(x.ks[0])}), x.ls[2]}, {x.ks[1]}};
       }},
      {"d2",
       [](const XmTuple& x) {
         return XmTuple{x.base,
                        {x.ls[0], mul({x.ls[1], x.ls[2], embed(x.ks[2])})},
                        {mul({inv(x.ks[2]), ad(inv(x.ls[2]), x.ks[0]), x.ks[1]})}};
       }},
      {"d3", [](const XmTuple& x) { return XmTuple{x.base, {x.ls[0], x.ls[1]}, {x.ks[0]}}; }},
  };
}

/// Faces of the Chern-Simons 2-gerbe submersion (gamma -> l, omega -> k):
///   level 2: d0 = (p gamma1(1), gamma2), d1 = (p, gamma1 gamma2 omega), d2 = (p, gamma1)
///   level 3: d0 = (p gamma1(1), gamma2, gamma3, omega3),
///            d1 = (p, gamma1 gamma2 omega1, gamma3, Ad_{gamma3^-1}(omega1^-1) omega2),
///            d2 = (p, gamma1, gamma2 gamma3 omega3, omega3^-1 omega2),
///            d3 = (p, gamma1, gamma2, omega1)
inline std::vector<FaceMap> cs2_faces(int level) {
  if (level == 1) return detail::level1_faces();
  if (level == 2) return detail::level2_faces();
  if (level != 3) throw std::invalid_argument("cs2_faces: level must be 1, 2 or 3");
  return {
      {"d0", [](const XmTuple& x) { return XmTuple{mul(x.base, x.ls[0]), {x.ls[1], x.ls[2]}, {x.ks[2]}}; }},
      {"d1",
       [](const XmTuple& x) {
         return XmTuple{x.base,
                        {mul({x.ls[0], x.ls[1], embed(x.ks[0])}), x.ls[2]},
                        {mul(ad(inv(x.ls[2]), inv(x.ks[0])), x.ks[1])}};
       }},
      {"d2",
       [](const XmTuple& x) {
         return XmTuple{x.base, {x.ls[0], mul({x.ls[1], x.ls[2], embed(x.ks[2])})}, {mul(inv(x.ks[2]), x.ks[1])}};
       }},
      {"d3", [](const XmTuple& x) { return XmTuple{x.base, {x.ls[0], x.ls[1]}, {x.ks[0]}}; }},
  };
}

/// Faces of the two-fold fibre product (p, gamma1, gamma2, omega0..omega3) -> (p, gamma, omega):
///   d0 = (p gamma1(1), gamma2, omega2),
///   d1 = (p, gamma1 gamma2 omega0, omega0^-1 Ad_{gamma2^-1}(omega1) omega2 omega3),
///   d2 = (p, gamma1, omega1)
inline std::vector<FaceMap> fibre_product_faces() {
  return {
      {"d0", [](const XmTuple& x) { return XmTuple{mul(x.base, x.ls[0]), {x.ls[1]}, {x.ks[2]}}; }},
      {"d1",
       [](const XmTuple& x) {
         return XmTuple{x.base,
                        {mul({x.ls[0], x.ls[1], embed(x.ks[0])})},
                        {mul({inv(x.ks[0]), ad(inv(x.ls[1]), x.ks[1]), x.ks[2], x.ks[3]})}};
       }},
      {"d2", [](const XmTuple& x) { return XmTuple{x.base, {x.ls[0]}, {x.ks[1]}}; }},
  };
}

struct IdentityCheck {
  std::string family;
  int level = 0;
  int i = 0;
  int j = 0;
  bool ok = false;
  std::string lhs;  // normal form of d_i d_j
  std::string rhs;  // normal form of d_{j-1} d_i
};

/// d_i d_j = d_{j-1} d_i for i < j on a generic tuple, with `upper` the faces
/// from level q and `lower` those from level q-1.
inline std::vector<IdentityCheck> check_identities(const std::string& family, int level,
                                                   const std::vector<FaceMap>& upper,
                                                   const std::vector<FaceMap>& lower, const XmTuple& x) {
  std::vector<IdentityCheck> out;
  for (int j = 1; j < static_cast<int>(upper.size()); ++j)
    for (int i = 0; i < j; ++i) {
      const TupleNormalForm a = normal_form(lower[i](upper[j](x)));
      const TupleNormalForm b = normal_form(lower[j - 1](upper[i](x)));
      out.push_back({family, level, i, j, a == b, to_string(a), to_string(b)});
    }
  return out;
}

/// All identity pairs: action-nerve levels 2 and 3, and the 2-gerbe faces at level 3.
inline std::vector<IdentityCheck> nerve_check() {
  std::vector<IdentityCheck> all;
  auto add = [&](std::vector<IdentityCheck> v) { all.insert(all.end(), v.begin(), v.end()); };
  add(check_identities("action-nerve", 2, ek_nerve_faces(2), ek_nerve_faces(1), generic_tuple(2, 1)));
  add(check_identities("action-nerve", 3, ek_nerve_faces(3), ek_nerve_faces(2), generic_tuple(3, 3)));
  add(check_identities("cs2-submersion", 3, cs2_faces(3), cs2_faces(2), generic_tuple(3, 3)));
  return all;
}

// ---------------------------------------------------------------------------
// Fibre chains of the Chern-Simons 2-gerbe.

/// delta(M) at (p, gamma1..3, omega1..3): M has fibre K^*_omega on level 2,
/// so face i contributes K^*_{omega(d_i x)} raised to (-1)^i.
/// `flipped` (if >= 0) reverses the sign of that face; used as a guard.
inline FiberExpr cs2_delta_m_fiber(int flipped = -1) {
  const auto faces = cs2_faces(3);
  const XmTuple x = generic_tuple(3, 3, 1);
  FiberExpr e;
  for (int i = 0; i < static_cast<int>(faces.size()); ++i) {
    int sign = -(i % 2 == 0 ? 1 : -1);
    if (i == flipped) sign = -sign;
    e.push_back({faces[i](x).ks.at(0), sign});
  }
  return e;
}

/// E at (p, gamma1, gamma2, omega0..omega3): delta of the bundle with fibre
/// K^_omega over (p, gamma, omega).
inline FiberExpr cs2_e_fiber(int flipped = -1) {
  const auto faces = fibre_product_faces();
  const XmTuple x = generic_tuple(2, 4, 0);
  FiberExpr e;
  for (int i = 0; i < static_cast<int>(faces.size()); ++i) {
    int sign = i % 2 == 0 ? 1 : -1;
    if (i == flipped) sign = -sign;
    e.push_back({faces[i](x).ks.at(0), sign});
  }
  return e;
}

// ---------------------------------------------------------------------------
// Random expressions and the rewrites reduce must be invariant under.

struct RandomExprOptions {
  int k_generators = 5;
  int l_generators = 4;
  int max_depth = 4;
  int max_terms = 5;
};

namespace detail {

inline WordPtr random_word(Sort s, int depth, const RandomExprOptions& o, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 5);
  const int c = pick(rng);
  const int gens = s == Sort::K ? o.k_generators : o.l_generators;
  switch (c) {
    case 0: {
      std::uniform_int_distribution<int> g(0, gens - 1);
      return make_word(Op::Gen, s, g(rng), {});
    }
    case 1: return std::uniform_int_distribution<int>(0, 3)(rng) == 0 ? one(s) : random_word(s, 0, o, rng);
    case 2: return mul(random_word(s, depth - 1, o, rng), random_word(s, depth - 1, o, rng));
    case 3: return inv(random_word(s, depth - 1, o, rng));
    default:
      if (s == Sort::K) return ad(random_word(Sort::L, depth - 1, o, rng), random_word(Sort::K, depth - 1, o, rng));
      return embed(random_word(Sort::K, depth - 1, o, rng));
  }
}

}  // namespace detail

inline WordPtr random_word(Sort s, Rng& rng, const RandomExprOptions& o = {}) {
  return detail::random_word(s, o.max_depth, o, rng);
}

inline FiberExpr random_expr(Rng& rng, const RandomExprOptions& o = {}) {
  std::uniform_int_distribution<int> terms(0, o.max_terms);
  std::bernoulli_distribution dual_term(0.5);
  FiberExpr e;
  const int m = terms(rng);
  for (int i = 0; i < m; ++i) e.push_back({random_word(Sort::K, rng, o), dual_term(rng) ? -1 : 1});
  return e;
}

/// Wraps one term's word in ad(u, .) for a random L-word u.
inline FiberExpr insert_ad(FiberExpr e, Rng& rng, const RandomExprOptions& o = {}) {
  if (e.empty()) return e;
  std::uniform_int_distribution<std::size_t> at(0, e.size() - 1);
  auto& t = e[at(rng)];
  t.word = ad(random_word(Sort::L, rng, o), t.word);
  return e;
}

/// Splits a term K_{ab} into K_a (x) K_b, writing a product first if needed.
inline FiberExpr split_product(FiberExpr e, Rng& rng, const RandomExprOptions& o = {}) {
  if (e.empty()) return e;
  std::uniform_int_distribution<std::size_t> at(0, e.size() - 1);
  const std::size_t idx = at(rng);
  FiberTerm t = e[idx];
  WordPtr a, b;
  if (t.word->op == Op::Mul) {
    a = t.word->kids[0];
    b = t.word->kids[1];
  } else {
    // w -> (w r) r^{-1} for a random r, then split
    const WordPtr r = random_word(Sort::K, rng, o);
    a = mul(t.word, r);
    b = inv(r);
  }
  e[idx] = {a, t.sign};
  e.insert(e.begin() + static_cast<std::ptrdiff_t>(idx) + 1, FiberTerm{b, t.sign});
  return e;
}

inline FiberExpr double_inverse(FiberExpr e, Rng& rng) {
  if (e.empty()) return e;
  std::uniform_int_distribution<std::size_t> at(0, e.size() - 1);
  auto& t = e[at(rng)];
  t.word = inv(inv(t.word));
  return e;
}

inline FiberExpr permute(FiberExpr e, Rng& rng) {
  std::shuffle(e.begin(), e.end(), rng);
  return e;
}

}  // namespace gerbelab::xmcalc

#endif  // GERBELAB_XMCALC_HPP
