#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <functional>

#include "conedex/linalg.hpp"

namespace conedex {

/// Smooth compactly supported cutoff: identically 1 on (0, inner],
/// identically 0 on [outer, infinity), C^infinity transition between.
struct CutoffSpec {
  double inner = 0.5;
  double outer = 2.0;
  int id = 0;

  // smooth step psi: psi(0)=0, psi(1)=1
  static double bumpPiece(double u) { return u > 0 ? std::exp(-1.0 / u) : 0.0; }
  static double bumpPieceD(double u) {
    return u > 0 ? std::exp(-1.0 / u) / (u * u) : 0.0;
  }
  static double step(double u) {
    double f = bumpPiece(u), g = bumpPiece(1.0 - u);
    return f / (f + g);
  }
  static double stepD(double u) {
    double f = bumpPiece(u), g = bumpPiece(1.0 - u);
    double fd = bumpPieceD(u), gd = -bumpPieceD(1.0 - u);
    double den = (f + g) * (f + g);
    return (fd * g - f * gd) / den;
  }

  double operator()(double x) const {
    if (x <= inner) return 1.0;
    if (x >= outer) return 0.0;
    return step((outer - x) / (outer - inner));
  }
  double derivative(double x) const {
    if (x <= inner || x >= outer) return 0.0;
    return -stepD((outer - x) / (outer - inner)) / (outer - inner);
  }
};

/// The three built-in cutoff templates used in cutoff-independence checks.
inline std::array<CutoffSpec, 3> builtinCutoffs() {
  return {CutoffSpec{0.5, 2.0, 0}, CutoffSpec{0.25, 1.25, 1},
          CutoffSpec{1.0, 3.0, 2}};
}

/// Gauss-Legendre quadrature of a smooth function on [a, b], split into
/// panels for safety on wider intervals.
template <typename F>
auto integrateSmooth(F&& f, double a, double b, int panels = 4)
    -> decltype(f(a)) {
  using boost::math::quadrature::gauss;
  decltype(f(a)) total = f(a) * 0.0;
  double w = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    total += gauss<double, 30>::integrate(f, a + p * w, a + (p + 1) * w);
  }
  return total;
}

}  // namespace conedex
