#pragma once

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "conedex/indicial.hpp"
#include "conedex/model.hpp"
#include "conedex/shooting.hpp"

namespace conedex::index {

using model::RadialOperator;
using model::Side;

/// Graded boundary contribution of one end: half the signature of the
/// hermitian symbol A^{-1} Phi_infinity, oriented by the end.  Zero-rank
/// directions contribute nothing; for the symmetric built-in potentials the
/// signature vanishes identically.
inline double boundary_index_point(const RadialOperator& P, Side side) {
  Mat W = P.clifford.inverse() * P.end(side).phi_infinity;
  if (!isHermitian(W, 1e-10))
    throw Error("boundary_index_point: A^{-1} Phi_infinity is not hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(W);
  int np = 0, nm = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()[i] > 1e-10) ++np;
    else if (es.eigenvalues()[i] < -1e-10) ++nm;
  }
  double s = (side == Side::Plus) ? 1.0 : -1.0;
  return 0.5 * s * double(np - nm);
}

/// Classical Callias count for fully elliptic (full-rank) models: the index
/// is carried entirely by the two boundary points.
inline double callias_index_fullrank(const RadialOperator& P) {
  if (!model::fully_elliptic(P, Side::Plus) || !model::fully_elliptic(P, Side::Minus))
    throw Error("callias_index_fullrank: model is not fully elliptic");
  return boundary_index_point(P, Side::Plus) + boundary_index_point(P, Side::Minus);
}

struct HybridBreakdown {
  double boundary = 0.0;
  int defect = 0;
  double total = 0.0;
};

/// Index formula for hybrid (partially degenerate) potentials: graded
/// boundary term of the full-rank directions plus the defect carried by the
/// b-spectrum inside the weight window.
inline HybridBreakdown hybrid_index(const RadialOperator& P, double alpha) {
  HybridBreakdown out;
  for (Side s : {Side::Plus, Side::Minus}) {
    auto blk = model::splitEnd(P, s);
    if (blk.basis_V1.cols() == 0) continue;
    // grade only the full-rank block
    Mat V1 = blk.basis_V1;
    Mat W = (V1.adjoint() * P.clifford * V1).inverse() *
            (V1.adjoint() * P.end(s).phi_infinity * V1);
    if (!isHermitian(W, 1e-10))
      throw Error("hybrid_index: graded boundary symbol is not hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(W);
    int np = 0, nm = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      if (es.eigenvalues()[i] > 1e-10) ++np;
      else if (es.eigenvalues()[i] < -1e-10) ++nm;
    }
    out.boundary += 0.5 * ((s == Side::Plus) ? 1.0 : -1.0) * double(np - nm);
  }
  out.defect = indicial::defect(indicial::b_spectrum(P), alpha);
  out.total = out.boundary + out.defect;
  return out;
}

/// ---------------------------------------------------------------------
/// Transition (tf) model of one zero-rank end: same indicial data with the
/// b-end re-created at the opposite infinity and a full-rank cap closing
/// the original direction.  Its pencil is the indicial flip of the end's.

inline RadialOperator tf_model(const RadialOperator& P, Side side) {
  auto frag = model::conjugate_to_b(P, side);
  int m = int(frag.A0.rows());
  Mat B0 = frag.B0;
  Mat I = Mat::Identity(m, m);
  RadialOperator tf;
  tf.name = P.name + (side == Side::Plus ? ":tf+" : ":tf-");
  tf.dim = m;
  // frag.A0 already carries the orientation sign of `side`; undoing it
  // recovers the restricted Clifford, and placing the tf model's b-end at
  // the opposite infinity realizes I_tf(lambda) = I_zf(-lambda) exactly.
  tf.clifford = double(model::orientationSign(side)) * frag.A0;
  double scdir = (side == Side::Plus) ? 1.0 : -1.0;  // sc end replaces `side`
  model::ProfileTerm bterm, mass;
  bterm.type = "power-decay";
  bterm.coeff = B0;
  bterm.power = 1.0;
  mass.type = "sigmoid";
  mass.coeff = Complex(0, -1) * I;
  mass.rate = scdir;
  tf.profile = {bterm, mass};
  model::EndData sc_end, b_end;
  sc_end.n = 1;
  sc_end.phi_infinity = Complex(0, -1) * I;
  sc_end.b_term = B0;
  b_end.n = 1;
  b_end.phi_infinity = Mat::Zero(m, m);
  b_end.b_term = B0;
  sc_end.side = (side == Side::Plus) ? Side::Plus : Side::Minus;
  b_end.side = (side == Side::Plus) ? Side::Minus : Side::Plus;
  tf.end_plus = (side == Side::Plus) ? sc_end : b_end;
  tf.end_minus = (side == Side::Plus) ? b_end : sc_end;
  tf.check();
  return tf;
}

struct PencilPair {
  Mat M0_tf, M1_tf, M0_zf, M1_zf;
  bool equal = false;
  double max_diff = 0.0;
};

/// Eq-level identity I(N_tf, lambda) = I(N_zf, -lambda): exact coefficient
/// comparison, zero tolerance.
inline PencilPair indicial_flip_check(const RadialOperator& P, Side side) {
  auto zf = model::conjugate_to_b(P, side);
  auto tf = tf_model(P, side);
  Side tf_b_side = (side == Side::Plus) ? Side::Minus : Side::Plus;
  auto tfb = model::conjugate_to_b(tf, tf_b_side);
  PencilPair out;
  out.M0_zf = zf.M0();
  out.M1_zf = zf.M1();
  out.M0_tf = tfb.M0();
  out.M1_tf = tfb.M1();
  // I_tf(lambda) = M0_tf + lambda M1_tf must equal I_zf(-lambda)
  double d0 = (out.M0_tf - out.M0_zf).cwiseAbs().maxCoeff();
  double d1 = (out.M1_tf + out.M1_zf).cwiseAbs().maxCoeff();
  out.max_diff = std::max(d0, d1);
  out.equal = (out.max_diff == 0.0);
  return out;
}

/// ---------------------------------------------------------------------
/// Deformation family P(tau) = P - i chi(t) tau Pi0: switching on a mass on
/// the zero-rank directions outside |t| = 10 makes every end full rank.

inline RadialOperator deform_family(const RadialOperator& P, double tau) {
  if (tau < 0.0) throw Error("deform_family: tau must be nonnegative");
  auto split = model::split_blocks(P);
  Mat Pi0p = split.plus.projector_V0, Pi0m = split.minus.projector_V0;
  RadialOperator Q = P;
  Q.name = P.name + ":deform";
  for (auto [Pi0, dir] : {std::pair{Pi0p, 1.0}, std::pair{Pi0m, -1.0}}) {
    if (Pi0.norm() == 0.0) continue;
    model::ProfileTerm sw;
    sw.type = "smooth-switch";
    sw.coeff = Complex(0, -1) * tau * Pi0;
    sw.rate = dir;
    Q.profile.push_back(sw);
  }
  Q.end_plus.phi_infinity = P.end_plus.phi_infinity - Complex(0, 1) * tau * Pi0p;
  Q.end_minus.phi_infinity = P.end_minus.phi_infinity - Complex(0, 1) * tau * Pi0m;
  return Q;
}

/// ---------------------------------------------------------------------
/// Transition additivity at a weight: the fully elliptic deformation has
/// index 0, which must split as ind_zf(alpha) + sum of the per-end tf
/// indices at the matching weight.

struct TransitionReport {
  std::vector<double> taus;
  std::vector<int> deformed_index;       // shooting, one per tau
  std::vector<int> deformed_ker, deformed_coker;
  int zf_component = 0;                  // shooting index of P at alpha
  int tf_component = 0;                  // sum over zero-rank ends
  int sum = 0;                           // zf + tf components
};

inline int tf_index(const RadialOperator& P, Side side, double weight) {
  auto tf = tf_model(P, side);
  auto sh = spectral::shooting_oracle(tf, weight);
  if (sh.ill_conditioned) throw Error("tf_index: ill-conditioned matching");
  return sh.dim_ker - sh.dim_coker;
}

inline TransitionReport transition_additivity(const RadialOperator& P, double alpha,
                                              const std::vector<double>& taus) {
  TransitionReport out;
  out.taus = taus;
  for (double tau : taus) {
    auto sh = spectral::shooting_oracle(deform_family(P, tau), 0.0);
    if (sh.ill_conditioned)
      throw Error("transition_additivity: ill-conditioned matching at tau");
    out.deformed_ker.push_back(sh.dim_ker);
    out.deformed_coker.push_back(sh.dim_coker);
    out.deformed_index.push_back(sh.dim_ker - sh.dim_coker);
  }
  auto base = spectral::shooting_oracle(P, alpha);
  out.zf_component = base.dim_ker - base.dim_coker;
  for (Side s : {Side::Plus, Side::Minus}) {
    if (model::splitEnd(P, s).basis_V0.cols() == 0) continue;
    out.tf_component += tf_index(P, s, -alpha);
  }
  out.sum = out.zf_component + out.tf_component;
  return out;
}

/// ---------------------------------------------------------------------
/// Free 3-D channel family: partial-wave radial Dirac system on the
/// half-line with the abelian full-rank potential i c tanh(r).  For each
/// kappa the operator is A d/dr + kappa/r sigma1 + i c tanh(r) I with
/// A = [[0,-1],[1,0]]; indicial roots at r -> 0 are +/-|kappa| and the
/// half-line membership threshold is mu > -1/2.

struct ChannelResult {
  int kappa = 0;
  int degeneracy = 0;  // 2|kappa| for the free 3-D Dirac operator
  int dim_ker = 0, dim_coker = 0, index = 0;
};

namespace channel_detail {

using State = std::vector<Complex>;

// integrate u' = -A^{-1} C(r) u in rho = ln r over [ln r0, ln r1]
inline Mat propagateChannel(const Mat& A, const std::function<Mat(double)>& C, Mat F,
                            double r_from, double r_to) {
  namespace ode = boost::numeric::odeint;
  if (F.cols() == 0) return F;
  int m = int(F.rows()), k = int(F.cols());
  double rho = std::log(r_from), rho_end = std::log(r_to);
  double dir = (rho_end > rho) ? 1.0 : -1.0;
  Mat Ainv = A.inverse();
  auto rhs = [&](const State& y, State& dy, double rv) {
    double r = std::exp(rv);
    Mat U = Eigen::Map<const Mat>(y.data(), m, k);
    Eigen::Map<Mat>(dy.data(), m, k) = (-r) * (Ainv * (C(r) * U));
  };
  auto stepper = ode::make_controlled(1e-10, 1e-10,
                                      ode::runge_kutta_dopri5<State>());
  while (dir * (rho_end - rho) > 1e-12) {
    double r_here = std::exp(rho);
    double rate = r_here * C(r_here).norm() + 1.0;
    double chunk = std::min(0.5, 25.0 / rate);
    double rho_next = rho + dir * chunk;
    if (dir * (rho_end - rho_next) < 0.0) rho_next = rho_end;
    State y(F.data(), F.data() + m * k);
    ode::integrate_adaptive(stepper, rhs, y, rho, rho_next, (rho_next - rho) / 4.0);
    F = Eigen::Map<Mat>(y.data(), m, k);
    F = orthonormalize(F);
    rho = rho_next;
  }
  return F;
}

inline std::pair<int, double> halfLineMatch(const Mat& A, const std::function<Mat(double)>& C,
                                            int kappa, bool adjoint) {
  // origin frame: indicial roots +/-|kappa|; admissible mu > -1/2
  double r0 = 1e-4, r_mid = 1.0, r_inf = 40.0;
  std::vector<Vec> origin_dirs;
  double akap = std::abs(double(kappa));
  for (double mu : {akap, -akap}) {
    if (mu <= -0.5 + 1e-9) continue;
    // (mu A + kappa sigma1) v = 0
    Mat pencil = mu * A + double(kappa) * pauli1();
    Mat ns = nullspaceBasis(pencil, 1e-9);
    for (int j = 0; j < ns.cols(); ++j) origin_dirs.push_back(ns.col(j));
    if (std::abs(mu) < 1e-12) break;  // kappa = 0: double root, take once
  }
  Mat F0(2, origin_dirs.size());
  for (std::size_t j = 0; j < origin_dirs.size(); ++j) F0.col(j) = origin_dirs[j];
  F0 = propagateChannel(A, C, F0, r0, r_mid);
  // infinity frame: decaying eigenvectors of -A^{-1} C(r_inf)
  Mat G = -A.inverse() * C(r_inf);
  Eigen::ComplexEigenSolver<Mat> ges(G);
  std::vector<Vec> inf_dirs;
  for (int i = 0; i < 2; ++i)
    if (ges.eigenvalues()[i].real() < -1e-8)
      inf_dirs.push_back(ges.eigenvectors().col(i));
  Mat Fi(2, inf_dirs.size());
  for (std::size_t j = 0; j < inf_dirs.size(); ++j) Fi.col(j) = inf_dirs[j];
  Fi = propagateChannel(A, C, Fi, r_inf, r_mid);
  int k0 = int(F0.cols()), ki = int(Fi.cols());
  if (k0 + ki == 0) return {0, 1.0};
  Mat J(2, k0 + ki);
  if (k0 > 0) J.leftCols(k0) = F0;
  if (ki > 0) J.rightCols(ki) = Fi;
  Eigen::JacobiSVD<Mat> svd(J);
  const auto& sv = svd.singularValues();
  int rank = 0;
  double smin = sv(0);
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-6 * sv(0)) { ++rank; smin = sv(i); }
  (void)adjoint;
  return {k0 + ki - rank, sv(0) / std::max(smin, 1e-300)};
}

}  // namespace channel_detail

inline ChannelResult channel_index(int kappa, double c) {
  if (kappa == 0) throw Error("channel_index: kappa = 0 is not a Dirac channel");
  ChannelResult out;
  out.kappa = kappa;
  out.degeneracy = 2 * std::abs(kappa);
  Mat A = cliffordSigma();
  auto C = [kappa, c](double r) {
    return Mat(double(kappa) / r * pauli1() + Complex(0, c) * std::tanh(r) *
                                                  Mat::Identity(2, 2));
  };
  // adjoint on the half-line: -A d/dr + C^H; flip A and conjugate C
  Mat Aa = Mat(-A);
  auto Ca = [kappa, c](double r) {
    return Mat(double(kappa) / r * pauli1() - Complex(0, c) * std::tanh(r) *
                                                  Mat::Identity(2, 2));
  };
  auto [k, ck] = channel_detail::halfLineMatch(A, C, kappa, false);
  auto [co, cc] = channel_detail::halfLineMatch(Aa, Ca, kappa, true);
  if (std::max(ck, cc) > 1e8) throw Error("channel_index: ill-conditioned matching");
  out.dim_ker = k;
  out.dim_coker = co;
  out.index = k - co;
  return out;
}

struct ChannelSum {
  std::vector<ChannelResult> channels;
  int weighted_sum = 0;
  bool all_zero = true;
};

inline ChannelSum channel_family(double c, int kappa_max) {
  ChannelSum out;
  for (int a = 1; a <= kappa_max; ++a)
    for (int kappa : {a, -a}) {
      auto r = channel_index(kappa, c);
      out.weighted_sum += r.degeneracy * r.index;
      if (r.index != 0) out.all_zero = false;
      out.channels.push_back(r);
    }
  return out;
}

}  // namespace conedex::index
