#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "conedex/discretize.hpp"
#include "conedex/grid.hpp"
#include "conedex/phg.hpp"
#include "conedex/svd.hpp"

namespace conedex::spectral {

struct TolPolicy {
  double gap_ratio = 1e3;     // required separation for an accepted count
  double zero_floor = 1e-9;   // relative floor anchoring the dim-0 verdict
  double zero_ceiling = 1e-6; // relative ceiling below which sigma counts as zero
  bool refine = true;         // run the two mandated refinements
  bool want_vectors = false;  // keep kernel singular vectors for fits
};

struct SvdCount {
  int dim = 0;
  double gap_ratio = 0.0;
  std::vector<double> smallest;  // a few bottom singular values, ascending
};

struct RefinementStep {
  int nodes;
  double decades;
  int dim_ker, dim_coker;
};

struct EndFit {
  phg::LeadingOrderFit v0, v1;
  bool v1_superpolynomial = false;
};

struct KernelVectorFits {
  EndFit plus, minus;
};

struct IndexReport {
  int dim_ker = 0, dim_coker = 0, index = 0;
  double gap_ratio_ker = 0.0, gap_ratio_coker = 0.0;
  double alpha = 0.0, alpha_effective = 0.0;
  int nodes = 0;
  double decades = 0.0;
  std::vector<RefinementStep> refinements;
  std::vector<KernelVectorFits> fits;
  Mat kernel_vectors;  // weighted coordinates, columns; empty unless requested
  std::vector<double> kernel_t;  // grid nodes matching the vectors
};

namespace detail {

/// Adaptive count of near-zero singular values: everything under the
/// relative ceiling is a zero, certified by the relative gap across the cut.
/// A single largest-gap search is not enough, because genuine zeros can sit
/// at very different floors (machine zero for exponentially clipped modes,
/// truncation-limited for power-law modes) and the gap inside the zero
/// cluster may then beat the gap at the cut.
inline SvdCount countZeros(const std::vector<double>& sigma_desc, const TolPolicy& pol) {
  int n = int(sigma_desc.size());
  double smax = sigma_desc.front();
  std::vector<double> asc(sigma_desc.rbegin(), sigma_desc.rend());
  int K = std::min(n, 40);
  double floor_val = pol.zero_floor * smax;
  double ceiling = pol.zero_ceiling * smax;
  int k = 0;
  while (k < K && asc[k] <= ceiling) ++k;
  SvdCount out;
  out.dim = k;
  out.gap_ratio = (k == 0) ? asc[0] / floor_val
                : (k < n) ? asc[k] / std::max(asc[k - 1], 1e-300)
                          : std::numeric_limits<double>::infinity();
  out.smallest.assign(asc.begin(), asc.begin() + std::min(n, 8));
  return out;
}

inline std::vector<double> rootValues(const indicial::BSpectrum& spec) {
  std::vector<double> r;
  for (const auto& root : spec.roots) r.push_back(root.lambda);
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end(),
                      [](double a, double b) { return std::abs(a - b) < 1e-9; }),
          r.end());
  return r;
}

}  // namespace detail

/// The Fredholm index is constant on each interval between b-spectrum roots,
/// so the discrete run may represent the requested weight by the midpoint of
/// its interval — the best-conditioned representative of the same extension
/// (truncation error of a kernel mode scales like T^{-|alpha - root|}).
inline double snapWeight(double alpha, const indicial::BSpectrum& spec) {
  auto roots = detail::rootValues(spec);
  if (roots.empty()) return alpha;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (double r : roots) {
    if (r < alpha) lo = std::max(lo, r);
    if (r > alpha) hi = std::min(hi, r);
  }
  if (std::isfinite(lo) && std::isfinite(hi)) return 0.5 * (lo + hi);
  if (std::isfinite(lo)) return lo + 2.0;
  if (std::isfinite(hi)) return hi - 2.0;
  return alpha;
}

inline SvdCount countKernel(const RadialOperator& P, const WeightedGrid& g,
                            const model::BlockSplit& split, const WeightSpec& w,
                            const TolPolicy& pol, Mat* vectors = nullptr) {
  auto wd = build_weights(g, split, w);
  auto D = discretize(P, g, split, w);
  auto sv = svd(D.M, vectors != nullptr);
  SvdCount c = detail::countZeros(sv.sigma, pol);
  if (vectors != nullptr && c.dim > 0) {
    int n = int(sv.V.cols());
    Mat raw = sv.V.rightCols(std::min(c.dim, n));
    // undo the input weights: physical values at the interior nodes
    *vectors = Mat(raw.rows(), raw.cols());
    int m = P.dim;
    for (int i = 1; i < g.nodes - 1; ++i)
      vectors->middleRows((i - 1) * m, m) = wd.w_in_inv[i] * raw.middleRows((i - 1) * m, m);
  }
  return c;
}

inline indicial::BSpectrum v0Spectrum(const RadialOperator& P) {
  indicial::BSpectrum spec;
  for (model::Side s : {model::Side::Plus, model::Side::Minus}) {
    auto blk = model::splitEnd(P, s);
    if (blk.basis_V0.cols() == 0) continue;  // full-rank end: nothing indicial
    auto roots = indicial::b_spectrum_fragment(model::conjugate_to_b(P, s));
    spec.roots.insert(spec.roots.end(), roots.begin(), roots.end());
  }
  std::sort(spec.roots.begin(), spec.roots.end(),
            [](const indicial::Root& a, const indicial::Root& b) { return a.lambda < b.lambda; });
  return spec;
}

inline IndexReport numerical_index(const RadialOperator& P, const WeightedGrid& g,
                                   double alpha, const TolPolicy& pol = {}) {
  indicial::BSpectrum spec = v0Spectrum(P);
  checkWeightMargin(spec, alpha);
  double ae = snapWeight(alpha, spec);
  auto split = model::split_blocks(P);
  RadialOperator Pstar = model::formal_adjoint(P);

  IndexReport rep;
  rep.alpha = alpha;
  rep.alpha_effective = ae;
  rep.nodes = g.nodes;
  rep.decades = g.decades;

  auto runPair = [&](const WeightedGrid& grid, Mat* vecs) {
    WeightSpec wk{ae, ae + 0.5};
    WeightSpec wc{-ae, -(ae + 0.5)};  // dual weights for the cokernel
    SvdCount k = countKernel(P, grid, split, wk, pol, vecs);
    SvdCount c = countKernel(Pstar, grid, split, wc, pol, nullptr);
    return std::pair<SvdCount, SvdCount>{k, c};
  };

  Mat vecs;
  auto [k0, c0] = runPair(g, pol.want_vectors ? &vecs : nullptr);
  auto decisive = [&](const SvdCount& s, const char* which) {
    if (s.gap_ratio < pol.gap_ratio) {
      std::string diag = "indeterminate index (" + std::string(which) + " gap ratio " +
                         std::to_string(s.gap_ratio) + " < required " +
                         std::to_string(pol.gap_ratio) + "; bottom sigma:";
      for (double v : s.smallest) diag += " " + std::to_string(v);
      throw Error(diag + ")");
    }
  };
  decisive(k0, "kernel");
  decisive(c0, "cokernel");
  rep.dim_ker = k0.dim;
  rep.dim_coker = c0.dim;
  rep.index = k0.dim - c0.dim;
  rep.gap_ratio_ker = k0.gap_ratio;
  rep.gap_ratio_coker = c0.gap_ratio;
  rep.refinements.push_back({g.nodes, g.decades, k0.dim, c0.dim});
  if (pol.want_vectors) {
    rep.kernel_vectors = vecs;
    rep.kernel_t.assign(g.t.begin() + 1, g.t.end() - 1);
  }

  if (pol.refine) {
    for (const WeightedGrid& rg : {g.refinedNodes(), g.refinedDecades()}) {
      auto [k, c] = runPair(rg, nullptr);
      decisive(k, "kernel");
      decisive(c, "cokernel");
      rep.refinements.push_back({rg.nodes, rg.decades, k.dim, c.dim});
      if (k.dim != rep.dim_ker || c.dim != rep.dim_coker)
        throw Error("index unstable under grid refinement");
    }
  }
  return rep;
}

/// Leading-order fits of kernel vectors at both ends: V0 components against
/// x^z (log x)^k, V1 components likewise with a two-window superpolynomial
/// check (rapidly vanishing when the fitted order keeps growing).
inline std::vector<KernelVectorFits> nullspace_asymptotics(const RadialOperator& P,
                                                           const IndexReport& rep) {
  if (rep.kernel_vectors.cols() == 0)
    throw Error("nullspace_asymptotics: no kernel vectors in report");
  auto split = model::split_blocks(P);
  int m = P.dim;
  std::vector<KernelVectorFits> out;
  for (int col = 0; col < rep.kernel_vectors.cols(); ++col) {
    KernelVectorFits kf;
    for (model::Side side : {model::Side::Plus, model::Side::Minus}) {
      const Mat& Pi0 = split.at(side).projector_V0;
      Mat Pi1 = Mat::Identity(m, m) - Pi0;
      double sgn = (side == model::Side::Plus) ? 1.0 : -1.0;
      auto collect = [&](const Mat& proj, double rlo, double rhi) {
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < rep.kernel_t.size(); ++i) {
          double t = rep.kernel_t[i];
          if (t * sgn <= 0) continue;
          double r = model::radius(t);
          if (r < rlo || r > rhi) continue;
          Vec u = rep.kernel_vectors.block(int(i) * m, col, m, 1);
          pts.push_back({1.0 / r, (proj * u).norm()});
        }
        return pts;
      };
      double Rmax = std::pow(10.0, rep.decades - 0.5);
      EndFit ef;
      ef.v0 = phg::fit_leading_order(collect(Pi0, 8.0, Rmax));
      ef.v1 = phg::fit_leading_order(collect(Pi1, 8.0, Rmax));
      if (!ef.v1.vanishing) {
        // superpolynomial: fitted order grows as the window moves out
        auto near = phg::fit_leading_order(collect(Pi1, 5.0, 20.0));
        auto far = phg::fit_leading_order(collect(Pi1, 20.0, 80.0));
        if (far.vanishing || (!near.vanishing && far.z - near.z > 2.0))
          ef.v1_superpolynomial = true;
      } else {
        ef.v1_superpolynomial = true;  // below the floor everywhere sampled
      }
      (side == model::Side::Plus ? kf.plus : kf.minus) = ef;
    }
    out.push_back(kf);
  }
  return out;
}

struct SweepRow {
  double alpha;
  int dim_ker, dim_coker, index;
  double gap_ratio;
  int nodes;
};

inline std::vector<SweepRow> alpha_sweep(const RadialOperator& P, const WeightedGrid& g,
                                         const std::vector<double>& alphas,
                                         TolPolicy pol = {}) {
  pol.refine = false;  // refinement audit is numerical_index's job
  std::vector<SweepRow> rows;
  for (double a : alphas) {
    IndexReport r = numerical_index(P, g, a, pol);
    rows.push_back({a, r.dim_ker, r.dim_coker, r.index,
                    std::min(r.gap_ratio_ker, r.gap_ratio_coker), g.nodes});
  }
  return rows;
}

}  // namespace conedex::spectral
