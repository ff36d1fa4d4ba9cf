#pragma once

#include <vector>

#include "conedex/grid.hpp"

namespace conedex::spectral {

/// Dense discretization M = W_out P_h W_in^{-1} of A d/dt + C(t) with the
/// two-point box (midpoint) scheme in s = asinh(t): each row lives on a cell
/// midpoint and couples only the cell's two endpoint nodes.  The per-channel
/// recurrence of a two-point scheme has exactly one root, which tracks the
/// continuum growth/decay dichotomy; wider stencils carry spurious
/// recurrence roots that can assemble false near-kernel modes anchored at a
/// truncation edge, which no amount of added dissipation removes uniformly
/// across models.  Dirichlet (decay-enforcing) closure: the two edge nodes
/// are pinned to zero and their columns dropped, so the matrix is tall by
/// exactly one block -- matching the cokernel of the finite-interval
/// Dirichlet problem, and small singular values certify genuine
/// near-solutions.
struct DiscretizedOperator {
  Mat M;
  int nodes_interior = 0;
  int dim = 0;
  bool real_valued = false;
};

inline DiscretizedOperator discretize(const RadialOperator& P, const WeightedGrid& g,
                                      const BlockSplit& split, const WeightSpec& w) {
  int N = g.nodes, m = P.dim, ni = N - 2;
  DiscretizedOperator out;
  out.nodes_interior = ni;
  out.dim = m;
  out.M = Mat::Zero((N - 1) * m, ni * m);

  auto wd = build_weights(g, split, w);
  Mat I = Mat::Identity(m, m);
  double q0 = std::sqrt(g.h);
  for (int i = 0; i < N - 1; ++i) {
    double s_mid = g.s[i] + 0.5 * g.h;
    double t_mid = std::sinh(s_mid);
    double r = model::radius(t_mid);
    const auto& blk = split.at(t_mid >= 0 ? Side::Plus : Side::Minus);
    const Mat& Pi0 = blk.projector_V0;
    Mat w_out_mid = (q0 * r) * (std::pow(r, w.alpha) * Pi0 +
                                std::pow(r, w.beta) * (I - Pi0));
    Mat C_mid = P.C(t_mid);
    Mat d = (1.0 / (r * g.h)) * P.clifford;
    for (int k = 0; k < 2; ++k) {
      int j = i + k;
      if (j <= 0 || j >= N - 1) continue;  // Dirichlet: edge columns dropped
      Mat blkM = (k == 0 ? Mat(-d) : d) + 0.5 * C_mid;
      out.M.block(i * m, (j - 1) * m, m, m) += w_out_mid * blkM * wd.w_in_inv[j];
    }
  }
  out.real_valued = out.M.imag().cwiseAbs().maxCoeff() < 1e-14;
  return out;
}

}  // namespace conedex::spectral
