#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "conedex/linalg.hpp"
#include "conedex/model.hpp"
#include "conedex/quadrature.hpp"

namespace conedex::indicial {

using model::BFragment;
using model::RadialOperator;
using model::Side;

/// Evaluate the indicial family I(lambda) = M0 + lambda M1 of a fragment.
inline Mat indicial_family(const BFragment& f, Complex lambda) {
  return f.pencil(lambda);
}

struct Root {
  double lambda = 0.0;
  int order = 0;       // largest Jordan chain length (pole order of I^{-1})
  int alg_mult = 0;    // algebraic multiplicity = dim of the formal nullspace
  Mat nullspace;       // columns: Null I(lambda)
  Side side = Side::Plus;
  bool real_certified = true;
};

struct BSpectrum {
  std::vector<Root> roots;  // ascending in lambda, merged over ends

  std::vector<const Root*> inWindow(double lo, double hi) const {
    std::vector<const Root*> out;
    for (const auto& r : roots)
      if (r.lambda > lo && r.lambda < hi) out.push_back(&r);
    return out;
  }
  void checkOffSpectrum(double alpha) const {
    for (const auto& r : roots)
      if (std::abs(alpha - r.lambda) < 1e-10)
        throw Error("on-spectrum weight alpha = " + std::to_string(alpha));
  }
};

namespace detail {
/// Companion matrix of the affine pencil: I(lambda) singular iff lambda is
/// an eigenvalue of T = -M1^{-1} M0.
inline Mat companion(const BFragment& f) {
  Mat M1 = f.M1();
  return -M1.partialPivLu().solve(f.M0());
}

inline int largestChain(const Mat& T, Complex lambda, int alg_mult) {
  int m = int(T.rows());
  Mat N = T - lambda * Mat::Identity(m, m);
  Mat Pk = Mat::Identity(m, m);
  int prev = 0;
  for (int k = 1; k <= alg_mult; ++k) {
    Pk = Pk * N;
    int null_k = m - numericalRank(Pk, 1e-9);
    if (null_k == prev) return k - 1;  // stabilized one step earlier
    prev = null_k;
    if (null_k >= alg_mult) return k;
  }
  return alg_mult;
}
}  // namespace detail

inline std::vector<Root> b_spectrum_fragment(const BFragment& f, double window_lo = -10.0,
                                             double window_hi = 10.0,
                                             bool require_real = true) {
  if (numericalRank(f.M1()) < f.M1().rows())
    throw Error("b_spectrum: singular leading coefficient (not b-elliptic)");
  Mat T = detail::companion(f);
  Eigen::ComplexEigenSolver<Mat> es(T);
  if (es.info() != Eigen::Success) throw Error("b_spectrum: eigensolver failure");

  std::vector<Complex> evs(es.eigenvalues().data(),
                           es.eigenvalues().data() + es.eigenvalues().size());
  std::vector<Root> out;
  std::vector<bool> used(evs.size(), false);
  for (std::size_t i = 0; i < evs.size(); ++i) {
    if (used[i]) continue;
    std::vector<std::size_t> cluster{i};
    for (std::size_t j = i + 1; j < evs.size(); ++j)
      if (!used[j] && std::abs(evs[j] - evs[i]) < 1e-7) {
        cluster.push_back(j);
        used[j] = true;
      }
    Complex center = 0.0;
    for (auto j : cluster) center += evs[j];
    center /= double(cluster.size());

    Root r;
    r.side = f.side;
    r.alg_mult = int(cluster.size());
    if (std::abs(center.imag()) > 1e-8) {
      if (require_real)
        throw Error("b_spectrum: non-real root " + std::to_string(center.real()) + " + " +
                    std::to_string(center.imag()) + "i for self-adjoint input");
      r.real_certified = false;
    }
    r.lambda = center.real();
    Complex lam = r.real_certified ? Complex(r.lambda, 0.0) : center;
    r.nullspace = nullspaceBasis(f.pencil(lam), 1e-9);
    if (r.nullspace.cols() == 0) throw Error("b_spectrum: empty nullspace at root");
    double resid = (f.pencil(lam) * r.nullspace).norm() / r.nullspace.norm();
    if (resid > 1e-10) throw Error("b_spectrum: root residual too large");
    r.order = detail::largestChain(T, lam, r.alg_mult);
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), [](const Root& a, const Root& b) { return a.lambda < b.lambda; });
  std::vector<Root> filtered;
  for (auto& r : out)
    if (r.lambda > window_lo && r.lambda < window_hi) filtered.push_back(std::move(r));
  return filtered;
}

/// Merged b-spectrum of the V0 fragments at both ends of the model.
inline BSpectrum b_spectrum(const RadialOperator& P, double window_lo = -10.0,
                            double window_hi = 10.0, bool require_real = true) {
  BSpectrum spec;
  for (Side s : {Side::Plus, Side::Minus}) {
    BFragment f = model::conjugate_to_b(P, s);
    auto roots = b_spectrum_fragment(f, window_lo, window_hi, require_real);
    spec.roots.insert(spec.roots.end(), roots.begin(), roots.end());
  }
  std::sort(spec.roots.begin(), spec.roots.end(),
            [](const Root& a, const Root& b) { return a.lambda < b.lambda; });
  return spec;
}

/// s^{lambda0} sum_p (log s)^p v_p.  The Euler equation forces the chain
/// relation I(lambda0) v_p + (p+1) M1 v_{p+1} = 0.
struct FormalSolution {
  double lambda0 = 0.0;
  std::vector<Vec> coeffs;  // v_0 .. v_q, log powers ascending
  Side side = Side::Plus;

  int logDegree() const { return int(coeffs.size()) - 1; }
  Vec evaluate(double s) const {
    Vec acc = Vec::Zero(coeffs[0].size());
    double ls = std::log(s);
    double pw = 1.0;
    for (std::size_t p = 0; p < coeffs.size(); ++p, pw *= ls) acc += pw * coeffs[p];
    return acc * std::pow(s, lambda0);
  }
};

/// Basis of F(P, r) at the fragment's end: one solution per generalized
/// eigenvector, with v_p = (T - r)^p v_0 / p!.
inline std::vector<FormalSolution> formal_nullspace(const BFragment& f, double r) {
  Mat T = detail::companion(f);
  int m = int(T.rows());
  Mat N = T - Complex(r, 0.0) * Mat::Identity(m, m);
  Mat Nm = Mat::Identity(m, m);
  for (int k = 0; k < m; ++k) Nm = Nm * N;  // (T - r)^m kills all chains
  Mat gen = nullspaceBasis(Nm, 1e-9);
  std::vector<FormalSolution> out;
  for (int j = 0; j < gen.cols(); ++j) {
    FormalSolution sol;
    sol.lambda0 = r;
    sol.side = f.side;
    Vec v = gen.col(j);
    double fact = 1.0;
    for (int p = 0; p < m; ++p) {
      if (v.norm() < 1e-12) break;
      sol.coeffs.push_back(v / fact);
      v = (N * v).eval();
      fact *= (p + 1);
    }
    if (!sol.coeffs.empty()) out.push_back(std::move(sol));
  }
  return out;
}

inline int dimFormalNullspace(const BFragment& f, double r) {
  return int(formal_nullspace(f, r).size());
}

/// Residual of applying the Euler operator to a formal solution, through
/// all log orders; zero for genuine elements of F.
inline double eulerResidual(const BFragment& f, const FormalSolution& u) {
  double resid = 0.0;
  Mat I0 = f.pencil(Complex(u.lambda0, 0.0));
  for (std::size_t p = 0; p < u.coeffs.size(); ++p) {
    Vec term = I0 * u.coeffs[p];
    if (p + 1 < u.coeffs.size()) term += double(p + 1) * f.M1() * u.coeffs[p + 1];
    resid += term.norm();
  }
  return resid;
}

/// Generalized Green's pairing B(u, v) between u in F(P, r) at one end and
/// v in F(P*, -r) at the same end, computed by quadrature over the cutoff
/// transition region.  For exponents that do not cancel the value would be
/// cutoff-dependent, which is reported as a divergence.
inline Complex boundary_pairing(const BFragment& fp, const BFragment& fstar,
                                const FormalSolution& u, const FormalSolution& v,
                                const CutoffSpec& cutoff) {
  if (u.side != v.side) return 0.0;  // pairing is per boundary component
  if (std::abs(u.lambda0 + v.lambda0) > 1e-9)
    throw Error("boundary_pairing: divergent (exponents do not cancel)");
  Mat M1p = fp.M1(), M1s = fstar.M1();
  auto integrand = [&](double s) -> Complex {
    double phi = cutoff(s), dphi = cutoff.derivative(s);
    Vec us = u.evaluate(s), vs = v.evaluate(s);
    // I(P)(phi u) = M1 s phi' u  since I(P) u = 0; likewise for the adjoint
    Complex a = (vs.adjoint() * (M1p * us)).value() * (s * dphi * phi);
    Complex b = ((M1s * vs).adjoint() * us).value() * (s * dphi * phi);
    return (a - b) / s;  // measure ds/s
  };
  Complex val = integrateSmooth(integrand, cutoff.inner, cutoff.outer, 8);
  return val / kI;
}

/// ind(P_{alpha1}) - ind(P_{alpha2}) = sum over roots in (alpha1, alpha2),
/// over both ends, of dim F(P, r).
inline int relative_index_ledger(const BSpectrum& spec, double alpha1, double alpha2) {
  if (alpha1 >= alpha2) throw Error("relative_index_ledger: need alpha1 < alpha2");
  spec.checkOffSpectrum(alpha1);
  spec.checkOffSpectrum(alpha2);
  int total = 0;
  for (const Root* r : spec.inWindow(alpha1, alpha2)) total += r->alg_mult;
  return total;
}

/// defect(alpha) = -(1/2) sign(alpha) sum_{|r| < |alpha|} dim F(P, r):
/// the unique antisymmetric function jumping by dim F at each root.
inline int defect(const BSpectrum& spec, double alpha) {
  spec.checkOffSpectrum(alpha);
  int total = 0;
  for (const Root* r : spec.inWindow(-std::abs(alpha), std::abs(alpha)))
    total += r->alg_mult;
  if (total % 2 != 0)
    throw Error("defect: parity violation (odd formal dimension on symmetric window)");
  int sign = (alpha > 0) ? 1 : -1;
  return -sign * total / 2;
}

}  // namespace conedex::indicial
