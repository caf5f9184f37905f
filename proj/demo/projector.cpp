// Spectral projector between two cut points, by residues and by contour quadrature.

#include "gerbelab/basicgerbe.hpp"

#include <cstdio>

using namespace gerbelab;
using namespace gerbelab::basicgerbe;

int main() {
  const UnitaryPoint g = matkit::haar_unitary(3, 7);
  const auto s = matkit::eig_unitary(g);
  std::printf("eigenvalue arguments:");
  for (const auto& l : s.eigenvalues) std::printf(" %.4f", arg_0_2pi(l));
  std::printf("\n");

  const CutPoint z1(1.0), z2(4.0);
  const Matrix res = projector_between(z1, z2, s);
  std::printf("rank of P(z1, z2): %.0f\n", res.trace().real());
  for (int nodes = 8; nodes <= 512; nodes *= 2)
    std::printf("nodes %4d  |P_res - P_quad| = %.3e\n", nodes, frobenius(res - projector_quadrature(z1, z2, g, nodes)));

  const YPoint y(z1, g);
  Rng rng = make_rng(1);
  const Matrix v = g.matrix() * random_skew_hermitian(3, rng);
  const Matrix w = g.matrix() * random_skew_hermitian(3, rng);
  const Complex f = curving_f(y, v, w);
  std::printf("curving f(V, W) = %.12f %+.12fi\n", f.real(), f.imag());
}
