// Fibre chains of the Chern-Simons 2-gerbe, reduced to exponent vectors.

#include "gerbelab/xmcalc.hpp"

#include <iostream>

using namespace gerbelab::xmcalc;

int main() {
  const FiberExpr e = cs2_e_fiber();
  std::cout << to_string(e) << "\n  -> " << to_string(reduce(e)) << "\n";
  const FiberExpr m = cs2_delta_m_fiber();
  std::cout << to_string(m) << "\n  -> " << to_string(reduce(m)) << "\n";

  const FiberExpr a = parse("K(ad(mul(g1, t(w2)), mul(w1, w2)))");
  const FiberExpr b = parse("K(w1) * K(w2)");
  std::cout << to_string(a) << " == " << to_string(b) << " : " << std::boolalpha << xm_equal(a, b) << "\n";

  for (const auto& c : nerve_check())
    std::cout << c.family << " level " << c.level << " d" << c.i << "d" << c.j << ": " << (c.ok ? "ok" : "FAIL")
              << "\n";
}
