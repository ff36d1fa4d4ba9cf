#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "conedex/linalg.hpp"
#include "conedex/phg.hpp"

namespace conedex::model {

using nlohmann::json;

/// t^2 -> (1 + t^2)^{1/2}: smoothed radius, same end asymptotics as |t|.
inline double radius(double t) { return std::sqrt(1.0 + t * t); }

enum class Side { Plus, Minus };

inline const char* sideName(Side s) { return s == Side::Plus ? "plus" : "minus"; }

/// Sign multiplying A in the indicial pencil at each end.  Derivation in
/// x = 1/<t>: at +infinity  t dt = -x dx  so  A dt -> -x A (x dx + B0/...),
/// at -infinity the chain rule flips the sign.  Frozen after calibrating
/// the weight staircase of the two-channel power model against the ODE
/// shooting oracle (decreasing index for increasing weight).
inline int orientationSign(Side s) { return s == Side::Plus ? -1 : +1; }

struct EndData {
  Side side = Side::Plus;
  int n = 1;             // odd dimension parameter
  Mat phi_infinity;      // skew-Hermitian limit of the potential
  Mat b_term;            // Hermitian coefficient of 1/<t>
  double eps = 1.0;      // declared decay of the remainder: O(<t>^{-1-eps})
  double eps_prime = 1.0;
};

/// One named term of the potential profile vocabulary.
struct ProfileTerm {
  std::string type;  // "tanh" | "exp-decay" | "power-decay"
  Mat coeff;
  double rate = 1.0;   // tanh / exp-decay
  double power = 1.0;  // power-decay
};

/// Smooth 0->1 step on [lo, hi] (C-infinity, flat at both endpoints).
inline double smoothStep(double x, double lo, double hi) {
  auto f = [](double y) { return y <= 0.0 ? 0.0 : std::exp(-1.0 / y); };
  double u = (x - lo) / (hi - lo);
  return f(u) / (f(u) + f(1.0 - u));
}

inline Mat evalProfile(const ProfileTerm& p, double t) {
  if (p.type == "tanh") return p.coeff * std::tanh(p.rate * t);
  if (p.type == "exp-decay") return p.coeff * std::exp(-p.rate * radius(t));
  if (p.type == "power-decay") return p.coeff * std::pow(radius(t), -p.power);
  // sigmoid: 0 at rate*t -> -inf, 1 at rate*t -> +inf (transition models)
  if (p.type == "sigmoid") return p.coeff / (1.0 + std::exp(-p.rate * t));
  // smooth-switch: C-infinity cutoff, 0 for rate*t <= 5 and 1 for
  // rate*t >= 10 (deformation families)
  if (p.type == "smooth-switch") return p.coeff * smoothStep(p.rate * t, 5.0, 10.0);
  throw Error("unknown potential profile: " + p.type);
}

struct RadialOperator {
  std::string name;
  int dim = 0;
  Mat clifford;  // A, constant, A* = -A, A*A = I
  std::vector<ProfileTerm> profile;
  EndData end_plus, end_minus;

  Mat C(double t) const {
    Mat acc = Mat::Zero(dim, dim);
    for (const auto& p : profile) acc += evalProfile(p, t);
    return acc;
  }
  const EndData& end(Side s) const { return s == Side::Plus ? end_plus : end_minus; }

  void check() const {
    if (dim <= 0) throw Error("model: nonpositive dimension");
    if (clifford.rows() != dim) throw Error("model: Clifford size mismatch");
    if (!isSkewHermitian(clifford)) throw Error("model: Clifford must be skew-Hermitian");
    Mat u = clifford.adjoint() * clifford;
    if ((u - Mat::Identity(dim, dim)).norm() > 1e-12)
      throw Error("model: Clifford must be unitary (A*A = I)");
    for (const EndData* e : {&end_plus, &end_minus}) {
      if (e->n < 1 || e->n % 2 == 0) throw Error("model: n must be odd and >= 1");
      if (e->phi_infinity.rows() != dim || e->b_term.rows() != dim)
        throw Error("model: end data size mismatch");
    }
  }
};

/// The b-reduced V0 fragment at one end, after the conjugation
/// x^{-(n+1)/2} . x^{(n-1)/2}: pencil I(lambda) = M0 + lambda M1 with
/// M1 = s A0 and M0 = B0 + s A0 (n-1)/2, s the end orientation sign,
/// all restricted to the Phi_infinity nullspace in the projector basis.
struct BFragment {
  Side side = Side::Plus;
  int n = 1;
  Mat A0;       // restricted Clifford times orientation sign (= M1)
  Mat B0;       // restricted b-term
  Mat basis;    // dim x k isometry: columns span Null(Phi_infinity)
  Mat M0() const { return B0 + A0 * double((n - 1) / 2); }
  Mat M1() const { return A0; }
  Mat pencil(Complex lambda) const { return M0() + lambda * M1(); }
};

struct BlockSplit {
  struct EndBlocks {
    Side side;
    Mat projector_V0;   // orthogonal projector onto Null(Phi_infinity)
    Mat basis_V0;       // isometry columns
    Mat basis_V1;
    double offdiag_decay_tag = 0.0;  // declared 1 + eps
  };
  EndBlocks plus, minus;
  const EndBlocks& at(Side s) const { return s == Side::Plus ? plus : minus; }
};

inline BlockSplit::EndBlocks splitEnd(const RadialOperator& P, Side s) {
  const EndData& e = P.end(s);
  // Phi skew-Hermitian: i*Phi is Hermitian, its kernel is V0.
  Eigen::SelfAdjointEigenSolver<Mat> es(kI * e.phi_infinity);
  const auto& vals = es.eigenvalues();
  std::vector<int> null_idx, range_idx;
  for (int i = 0; i < P.dim; ++i) {
    double v = std::abs(vals[i]);
    if (v <= 1e-10)
      null_idx.push_back(i);
    else if (v < 1e-6)
      throw Error("split_blocks: ill-conditioned rank of the end potential");
    else
      range_idx.push_back(i);
  }
  BlockSplit::EndBlocks out;
  out.side = s;
  out.basis_V0 = Mat(P.dim, null_idx.size());
  for (std::size_t j = 0; j < null_idx.size(); ++j)
    out.basis_V0.col(j) = es.eigenvectors().col(null_idx[j]);
  out.basis_V1 = Mat(P.dim, range_idx.size());
  for (std::size_t j = 0; j < range_idx.size(); ++j)
    out.basis_V1.col(j) = es.eigenvectors().col(range_idx[j]);
  out.projector_V0 = out.basis_V0 * out.basis_V0.adjoint();
  out.offdiag_decay_tag = 1.0 + e.eps;
  return out;
}

inline BlockSplit split_blocks(const RadialOperator& P) {
  return {splitEnd(P, Side::Plus), splitEnd(P, Side::Minus)};
}

inline BFragment conjugate_to_b(const RadialOperator& P, Side s) {
  auto blocks = splitEnd(P, s);
  const EndData& e = P.end(s);
  const Mat& V = blocks.basis_V0;
  if (V.cols() == 0) throw Error("conjugate_to_b: empty V0 block at this end");
  BFragment f;
  f.side = s;
  f.n = e.n;
  f.basis = V;
  Mat A0 = V.adjoint() * P.clifford * V;
  if (numericalRank(A0) < A0.rows())
    throw Error("conjugate_to_b: restricted Clifford not invertible");
  f.A0 = double(orientationSign(s)) * A0;
  f.B0 = V.adjoint() * e.b_term * V;
  return f;
}

inline RadialOperator formal_adjoint(const RadialOperator& P) {
  RadialOperator Q = P;
  Q.name = P.name + "*";
  for (auto& p : Q.profile) p.coeff = p.coeff.adjoint().eval();
  for (EndData* e : {&Q.end_plus, &Q.end_minus}) {
    e->phi_infinity = e->phi_infinity.adjoint().eval();
    e->b_term = e->b_term.adjoint().eval();
  }
  return Q;
}

inline Mat scattering_symbol(const RadialOperator& P, Side s, double xi) {
  return P.clifford * Complex(0.0, xi) + P.end(s).phi_infinity;
}

/// Invertibility of A i xi + Phi_infinity for all real xi.  For unit skew
/// Clifford this is equivalent to invertibility of Phi_infinity alone.
inline bool fully_elliptic(const RadialOperator& P, Side s) {
  for (double xi : {0.0, 0.3, -0.7, 1.0, -2.5, 10.0})
    if (numericalRank(scattering_symbol(P, s, xi)) < P.dim) return false;
  return numericalRank(P.end(s).phi_infinity) == P.dim;
}

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::optional<double> measured;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool allPassed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

namespace detail {
inline double slopeFit(const std::vector<std::pair<double, double>>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (auto& [t, v] : pts) {
    double lx = std::log(t), y = std::log(v);
    sx += lx; sy += y; sxx += lx * lx; sxy += lx * y; ++n;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}
}  // namespace detail

inline ValidationReport validate_assumptions(const RadialOperator& P) {
  ValidationReport rep;
  auto push = [&](std::string name, bool ok, std::optional<double> m = {},
                  std::string detail = "") {
    rep.checks.push_back({std::move(name), ok, m, std::move(detail)});
  };

  bool cliff_ok = isSkewHermitian(P.clifford) &&
                  (P.clifford.adjoint() * P.clifford - Mat::Identity(P.dim, P.dim)).norm() < 1e-12;
  push("clifford-unit-skew", cliff_ok);

  for (Side s : {Side::Plus, Side::Minus}) {
    const EndData& e = P.end(s);
    std::string tag = std::string("[") + sideName(s) + "] ";
    push(tag + "phi-skew", isSkewHermitian(e.phi_infinity));
    push(tag + "phi-commutes-clifford", commutes(e.phi_infinity, P.clifford));
    push(tag + "b-term-hermitian", isHermitian(e.b_term));
    int rank = numericalRank(e.phi_infinity);
    push(tag + "phi-rank", true, double(rank),
         "rank " + std::to_string(rank) + " of " + std::to_string(P.dim));

    // Remainder decay: C(t) - Phi_inf - B0/<t> should be O(<t>^{-1-eps}),
    // and likewise for its off-diagonal part in the V0 splitting.
    double sgn = (s == Side::Plus) ? 1.0 : -1.0;
    auto blocks = splitEnd(P, s);
    const Mat& Pi0 = blocks.projector_V0;
    Mat Pi1 = Mat::Identity(P.dim, P.dim) - Pi0;
    std::vector<std::pair<double, double>> rem_pts, off_pts;
    for (double T : {10.0, 100.0, 1000.0, 10000.0}) {
      Mat R = P.C(sgn * T) - e.phi_infinity - e.b_term / radius(T);
      double rn = R.norm();
      double on = (Pi0 * R * Pi1).norm() + (Pi1 * R * Pi0).norm();
      if (rn > 1e-13) rem_pts.push_back({T, rn});
      if (on > 1e-13) off_pts.push_back({T, on});
    }
    auto decayCheck = [&](const char* name, const std::vector<std::pair<double, double>>& pts) {
      if (pts.size() < 2) {
        push(tag + name, true, {}, "remainder below 1e-13 (rapid decay)");
        return;
      }
      double expo = -detail::slopeFit(pts);
      push(tag + name, expo >= 1.0 + e.eps - 0.1, expo,
           "measured exponent " + std::to_string(expo) + ", declared >= " +
               std::to_string(1.0 + e.eps));
    };
    decayCheck("remainder-decay", rem_pts);
    decayCheck("offdiag-decay", off_pts);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// JSON configuration (bit-exact round trip)

inline json matToJson(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j)
      row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(row);
  }
  return rows;
}

inline Mat matFromJson(const json& j) {
  int r = j.size();
  int c = r ? int(j[0].size()) : 0;
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < c; ++k)
      m(i, k) = Complex(j[i][k][0].get<double>(), j[i][k][1].get<double>());
  return m;
}

inline json toJson(const RadialOperator& P) {
  json ends = json::object();
  for (Side s : {Side::Plus, Side::Minus}) {
    const EndData& e = P.end(s);
    ends[sideName(s)] = {{"n", e.n},
                         {"phi_infinity", matToJson(e.phi_infinity)},
                         {"b_term", matToJson(e.b_term)},
                         {"eps", e.eps},
                         {"eps_prime", e.eps_prime}};
  }
  json prof = json::array();
  for (const auto& p : P.profile) {
    json t = {{"type", p.type}, {"coeff", matToJson(p.coeff)}};
    if (p.type == "power-decay") t["power"] = p.power;
    else t["rate"] = p.rate;
    prof.push_back(t);
  }
  return {{"name", P.name}, {"dim", P.dim}, {"clifford", matToJson(P.clifford)},
          {"potential", prof}, {"ends", ends}};
}

inline RadialOperator fromJson(const json& j) {
  RadialOperator P;
  P.name = j.at("name").get<std::string>();
  P.dim = j.at("dim").get<int>();
  P.clifford = matFromJson(j.at("clifford"));
  for (const auto& t : j.at("potential")) {
    ProfileTerm p;
    p.type = t.at("type").get<std::string>();
    p.coeff = matFromJson(t.at("coeff"));
    if (t.contains("rate")) p.rate = t.at("rate").get<double>();
    if (t.contains("power")) p.power = t.at("power").get<double>();
    P.profile.push_back(std::move(p));
  }
  for (Side s : {Side::Plus, Side::Minus}) {
    const json& je = j.at("ends").at(sideName(s));
    EndData e;
    e.side = s;
    e.n = je.at("n").get<int>();
    e.phi_infinity = matFromJson(je.at("phi_infinity"));
    e.b_term = matFromJson(je.at("b_term"));
    e.eps = je.at("eps").get<double>();
    e.eps_prime = je.at("eps_prime").get<double>();
    (s == Side::Plus ? P.end_plus : P.end_minus) = e;
  }
  P.check();
  return P;
}

// ---------------------------------------------------------------------------
// Built-in catalog

/// Full-rank ends: C(t) = i c tanh(t) I, invertible potential at both
/// infinities; the classical nondegenerate regime.
inline RadialOperator modelA(double c = 1.0) {
  RadialOperator P;
  P.name = "MODEL-A";
  P.dim = 2;
  P.clifford = cliffordSigma().cast<Complex>();
  ProfileTerm p{"tanh", kI * c * Mat::Identity(2, 2), 1.0, 1.0};
  P.profile = {p};
  for (Side s : {Side::Plus, Side::Minus}) {
    EndData e;
    e.side = s;
    e.n = 1;
    double sgn = (s == Side::Plus) ? 1.0 : -1.0;
    e.phi_infinity = kI * (sgn * c) * Mat::Identity(2, 2);
    e.b_term = Mat::Zero(2, 2);
    e.eps = 1.0;
    (s == Side::Plus ? P.end_plus : P.end_minus) = e;
  }
  P.check();
  return P;
}

/// Zero-rank ends: C(t) = b sigma1 / <t>, pure Coulomb-type tail, indicial
/// roots at +-b per end.
inline RadialOperator modelB(double b = 0.75) {
  RadialOperator P;
  P.name = "MODEL-B";
  P.dim = 2;
  P.clifford = cliffordSigma().cast<Complex>();
  ProfileTerm p{"power-decay", b * pauli1(), 1.0, 1.0};
  P.profile = {p};
  for (Side s : {Side::Plus, Side::Minus}) {
    EndData e;
    e.side = s;
    e.n = 1;
    e.phi_infinity = Mat::Zero(2, 2);
    e.b_term = b * pauli1();
    e.eps = 1.0;
    (s == Side::Plus ? P.end_plus : P.end_minus) = e;
  }
  P.check();
  return P;
}

/// Hybrid ends: a zero-rank two-channel block stacked over a full-rank
/// block; V0 and V1 both two-dimensional at each end.
inline RadialOperator modelC(double b = 0.75, double c = 1.0) {
  RadialOperator P;
  P.name = "MODEL-C";
  P.dim = 4;
  Mat sig = cliffordSigma().cast<Complex>();
  P.clifford = blockDiag(sig, sig);
  Mat cb = blockDiag(b * pauli1(), Mat::Zero(2, 2));
  Mat ct = blockDiag(Mat::Zero(2, 2), kI * c * Mat::Identity(2, 2));
  P.profile = {ProfileTerm{"power-decay", cb, 1.0, 1.0}, ProfileTerm{"tanh", ct, 1.0, 1.0}};
  for (Side s : {Side::Plus, Side::Minus}) {
    EndData e;
    e.side = s;
    e.n = 1;
    double sgn = (s == Side::Plus) ? 1.0 : -1.0;
    e.phi_infinity = sgn * ct;
    e.b_term = cb;
    e.eps = 1.0;
    (s == Side::Plus ? P.end_plus : P.end_minus) = e;
  }
  P.check();
  return P;
}

/// Zero-rank ends with two distinct channel strengths; staircase with four
/// distinct jump locations per sign.
inline RadialOperator modelD(double b1 = 0.75, double b2 = 1.4) {
  RadialOperator P;
  P.name = "MODEL-D";
  P.dim = 4;
  Mat sig = cliffordSigma().cast<Complex>();
  P.clifford = blockDiag(sig, sig);
  Mat cb = blockDiag(b1 * pauli1(), b2 * pauli1());
  P.profile = {ProfileTerm{"power-decay", cb, 1.0, 1.0}};
  for (Side s : {Side::Plus, Side::Minus}) {
    EndData e;
    e.side = s;
    e.n = 1;
    e.phi_infinity = Mat::Zero(4, 4);
    e.b_term = cb;
    e.eps = 1.0;
    (s == Side::Plus ? P.end_plus : P.end_minus) = e;
  }
  P.check();
  return P;
}

inline std::vector<std::string> catalogNames() {
  return {"MODEL-A", "MODEL-B", "MODEL-C", "MODEL-D"};
}

inline RadialOperator byName(const std::string& name) {
  if (name == "MODEL-A") return modelA();
  if (name == "MODEL-B") return modelB();
  if (name == "MODEL-C") return modelC();
  if (name == "MODEL-D") return modelD();
  throw Error("unknown model: " + name);
}

}  // namespace conedex::model
