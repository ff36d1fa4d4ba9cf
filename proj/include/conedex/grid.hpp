#pragma once

#include <cmath>
#include <vector>

#include "conedex/indicial.hpp"
#include "conedex/model.hpp"

namespace conedex::spectral {

using model::BlockSplit;
using model::RadialOperator;
using model::Side;

/// Nodes uniform in s = asinh(t): uniform in t on the core, uniform in
/// log<t> in the tails, out to <t> = 10^decades.
struct WeightedGrid {
  int nodes = 0;
  double decades = 0.0;
  double h = 0.0;  // spacing in s
  std::vector<double> s, t;

  static WeightedGrid make(int nodes, double decades) {
    if (nodes < 200) throw Error("grid: need at least 200 nodes");
    WeightedGrid g;
    g.nodes = nodes;
    g.decades = decades;
    double S = std::asinh(std::pow(10.0, decades));
    g.h = 2.0 * S / (nodes - 1);
    if (std::log(10.0) / g.h < 24.0)
      throw Error("grid: tail resolution below 24 nodes per decade");
    g.s.resize(nodes);
    g.t.resize(nodes);
    for (int i = 0; i < nodes; ++i) {
      g.s[i] = -S + g.h * i;
      g.t[i] = std::sinh(g.s[i]);
    }
    return g;
  }

  WeightedGrid refinedNodes() const { return make(int(nodes * 3 / 2), decades); }
  WeightedGrid refinedDecades() const {
    // one more decade at fixed tail resolution
    double per_decade = double(nodes) / decades;
    return make(int(per_decade * (decades + 1.0)), decades + 1.0);
  }
};

struct WeightSpec {
  double alpha = 0.0;  // b-weight on the V0 block
  double beta = 0.5;   // sc-weight on the V1 block; Fredholm line: alpha + 1/2
};

inline void checkWeightMargin(const indicial::BSpectrum& spec, double alpha,
                              double margin = 0.02) {
  for (const auto& r : spec.roots)
    if (std::abs(alpha - r.lambda) < margin)
      throw Error("weight alpha = " + std::to_string(alpha) +
                  " within margin of b-spectrum root " + std::to_string(r.lambda));
}

/// Per-node weight diagonals.  On the V0 block the input carries <t>^{alpha-1}
/// and the output <t>^{alpha}; on the V1 block both carry <t>^{beta}.  The
/// b-half-density quadrature factor <t>*sqrt(h) (from ds = dt/<t>) multiplies
/// both sides, so a kernel mode t^{-lambda} has coordinate size t^{alpha-lambda}:
/// the discrete membership threshold is exactly lambda > alpha.
struct WeightDiagonals {
  std::vector<Mat> w_in, w_out, w_in_inv;  // one block per node
};

inline WeightDiagonals build_weights(const WeightedGrid& g, const BlockSplit& split,
                                     const WeightSpec& w) {
  WeightDiagonals out;
  int dim = int(split.plus.projector_V0.rows());
  Mat I = Mat::Identity(dim, dim);
  out.w_in.reserve(g.nodes);
  out.w_out.reserve(g.nodes);
  out.w_in_inv.reserve(g.nodes);
  double q0 = std::sqrt(g.h);
  for (int i = 0; i < g.nodes; ++i) {
    double t = g.t[i];
    double r = model::radius(t);
    const auto& blk = split.at(t >= 0 ? Side::Plus : Side::Minus);
    const Mat& Pi0 = blk.projector_V0;
    Mat Pi1 = I - Pi0;
    double q = q0 * r;
    double a_in = std::pow(r, w.alpha - 1.0), a_out = std::pow(r, w.alpha);
    double b = std::pow(r, w.beta);
    out.w_in.push_back(q * (a_in * Pi0 + b * Pi1));
    out.w_out.push_back(q * (a_out * Pi0 + b * Pi1));
    out.w_in_inv.push_back((Pi0 / a_in + Pi1 / b) / q);
  }
  return out;
}

}  // namespace conedex::spectral
