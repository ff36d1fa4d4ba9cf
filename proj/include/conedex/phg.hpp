#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "conedex/linalg.hpp"
#include "conedex/quadrature.hpp"

namespace conedex::phg {

constexpr double kExponentTol = 1e-9;
constexpr double kDefaultHorizon = 6.0;

struct IndexEntry {
  double z = 0.0;  // real exponent
  int k = 0;       // log power, >= 0
};

inline bool sameExponent(double a, double b) {
  return std::abs(a - b) <= kExponentTol;
}

/// Finite index set: pairwise distinct (z, k) pairs, truncated at an
/// explicit max-exponent horizon. The empty set stands for rapid vanishing.
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(std::vector<IndexEntry> entries, double horizon = kDefaultHorizon)
      : horizon_(horizon) {
    for (const auto& e : entries) insert(e.z, e.k);
  }

  double horizon() const { return horizon_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const std::vector<IndexEntry>& entries() const { return entries_; }

  void insert(double z, int k) {
    if (k < 0) throw Error("IndexSet: negative log power");
    if (z > horizon_ + kExponentTol) return;  // beyond declared truncation
    for (const auto& e : entries_)
      if (sameExponent(e.z, z) && e.k == k) return;
    entries_.push_back({z, k});
    sortEntries();
  }

  bool contains(double z, int k) const {
    for (const auto& e : entries_)
      if (sameExponent(e.z, z) && e.k == k) return true;
    return false;
  }

  /// min exponent; empty set represents "infinity"
  std::optional<double> leadingExponent() const {
    if (entries_.empty()) return std::nullopt;
    return entries_.front().z;
  }

  /// Closure under the smoothness rule: (z,k) present => (z+n, l) present
  /// for 0 <= l <= k, for all integer n with z+n below the horizon.
  IndexSet smoothClosure() const {
    IndexSet out;
    out.horizon_ = horizon_;
    for (const auto& e : entries_)
      for (double z = e.z; z <= horizon_ + kExponentTol; z += 1.0)
        for (int l = 0; l <= e.k; ++l) out.insert(z, l);
    return out;
  }

  bool isSmooth() const {
    IndexSet c = smoothClosure();
    return c.size() == size();
  }

 private:
  void sortEntries() {
    std::sort(entries_.begin(), entries_.end(), [](const IndexEntry& a, const IndexEntry& b) {
      if (!sameExponent(a.z, b.z)) return a.z < b.z;
      return a.k < b.k;
    });
  }
  std::vector<IndexEntry> entries_;
  double horizon_ = kDefaultHorizon;
};

/// E ol-cup F = E u F u {(z, k+l+1) : (z,k) in E, (z,l) in F}.
inline IndexSet extended_union(const IndexSet& e, const IndexSet& f) {
  IndexSet out({}, std::max(e.horizon(), f.horizon()));
  for (const auto& a : e.entries()) out.insert(a.z, a.k);
  for (const auto& b : f.entries()) out.insert(b.z, b.k);
  for (const auto& a : e.entries())
    for (const auto& b : f.entries())
      if (sameExponent(a.z, b.z)) out.insert(a.z, a.k + b.k + 1);
  return out;
}

inline IndexSet sumSet(const IndexSet& e, const IndexSet& f) {
  IndexSet out({}, std::max(e.horizon(), f.horizon()));
  for (const auto& a : e.entries())
    for (const auto& b : f.entries()) out.insert(a.z + b.z, a.k + b.k);
  return out;
}

/// Finite matrix-valued sum  sum_{(z,k)} a_{z,k} x^z (log x)^k  on (0, 1].
class PhgExpansion {
 public:
  PhgExpansion() = default;
  explicit PhgExpansion(int dim, double horizon = kDefaultHorizon)
      : dim_(dim), horizon_(horizon) {}

  int dim() const { return dim_; }
  bool empty() const { return terms_.empty(); }

  static PhgExpansion identity(int dim) {
    PhgExpansion u(dim);
    u.addTerm(0.0, 0, Mat::Identity(dim, dim));
    return u;
  }
  static PhgExpansion scalarTerm(double z, int k, Complex coeff = 1.0) {
    PhgExpansion u(1);
    Mat m(1, 1);
    m(0, 0) = coeff;
    u.addTerm(z, k, m);
    return u;
  }

  void addTerm(double z, int k, const Mat& coeff) {
    if (coeff.rows() != dim_ || coeff.cols() != dim_)
      throw Error("PhgExpansion: coefficient dimension mismatch");
    if (z > horizon_ + kExponentTol) return;
    for (auto& t : terms_) {
      if (sameExponent(t.z, z) && t.k == k) {
        t.coeff += coeff;
        return;
      }
    }
    terms_.push_back({z, k, coeff});
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) {
      if (!sameExponent(a.z, b.z)) return a.z < b.z;
      return a.k > b.k;  // leading term: smallest z, then largest k
    });
  }

  struct Term {
    double z;
    int k;
    Mat coeff;
  };
  const std::vector<Term>& terms() const { return terms_; }

  IndexSet indexSet() const {
    IndexSet s({}, horizon_);
    for (const auto& t : terms_) s.insert(t.z, t.k);
    return s;
  }

  Mat evaluate(double x) const {
    Mat acc = Mat::Zero(dim_, dim_);
    double lx = std::log(x);
    for (const auto& t : terms_)
      acc += t.coeff * std::pow(x, t.z) * std::pow(lx, t.k);
    return acc;
  }

  std::optional<Term> leadingTerm() const {
    if (terms_.empty()) return std::nullopt;
    return terms_.front();
  }

 private:
  int dim_ = 0;
  double horizon_ = kDefaultHorizon;
  std::vector<Term> terms_;
};

/// Pointwise product: exponents add, log powers add, coefficients multiply.
inline PhgExpansion phg_mul(const PhgExpansion& u, const PhgExpansion& v) {
  if (u.dim() != v.dim()) throw Error("phg_mul: dimension mismatch");
  PhgExpansion out(u.dim());
  for (const auto& a : u.terms())
    for (const auto& b : v.terms()) out.addTerm(a.z + b.z, a.k + b.k, a.coeff * b.coeff);
  return out;
}

/// Mellin transform of the cutoff model term phi(x) x^z (log x)^k against
/// x^{-lambda} dx/x. Absolutely convergent for Re lambda < z; as lambda -> z
/// the value has a pole of order k+1, the probe used to certify expansions.
inline Complex mellin_cutoff_power(double z, int k, const CutoffSpec& cutoff,
                                   Complex lambda) {
  Complex s = Complex(z, 0.0) - lambda;  // integrand is x^{s-1} (log x)^k
  if (std::abs(s) < 1e-14) throw Error("mellin_cutoff_power: lambda equals z (pole)");
  if (s.real() <= 0.0)
    throw Error("mellin_cutoff_power: divergent (requires Re lambda < z)");

  // On (0, a] the cutoff is 1 and the integral has a closed form by the
  // recurrence  I_k = a^s (ln a)^k / s - (k/s) I_{k-1}.
  double a = cutoff.inner;
  Complex as = std::exp(s * std::log(a));
  double la = std::log(a);
  Complex head = as / s;
  for (int j = 1; j <= k; ++j)
    head = (as * std::pow(la, j) - double(j) * head) / s;

  auto integrand = [&](double x) -> Complex {
    double lx = std::log(x);
    return std::exp((s - 1.0) * lx) * std::pow(lx, k) * cutoff(x);
  };
  Complex tail = integrateSmooth(integrand, cutoff.inner, cutoff.outer, 6);
  return head + tail;
}

struct LeadingOrderFit {
  double z = 0.0;
  int k = 0;
  double coeff = 0.0;      // magnitude of the leading coefficient
  double residual = 0.0;   // rms residual of the log-log fit
  bool vanishing = false;  // identically-zero input
  bool low_confidence = false;
};

/// Least-squares fit of log|value| against z*log x + k*log|log x| over
/// candidate integer log powers k in {0, 1, 2}.
inline LeadingOrderFit fit_leading_order(
    const std::vector<std::pair<double, double>>& samples, int max_log_power = 2) {
  LeadingOrderFit best;
  std::vector<std::pair<double, double>> pts;
  for (const auto& [x, v] : samples)
    if (std::abs(v) > 0.0) pts.push_back({x, std::abs(v)});
  if (pts.size() < 4) {
    best.vanishing = true;
    return best;
  }
  double best_res = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= max_log_power; ++k) {
    // linear LSQ: log v - k log|log x| = c + z log x
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& [x, v] : pts) {
      double lx = std::log(x);
      double y = std::log(v) - k * std::log(std::abs(lx));
      sx += lx;
      sy += y;
      sxx += lx * lx;
      sxy += lx * y;
      ++n;
    }
    double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-14) continue;
    double z = (n * sxy - sx * sy) / det;
    double c = (sy * sxx - sx * sxy) / det;
    double res = 0;
    for (const auto& [x, v] : pts) {
      double lx = std::log(x);
      double y = std::log(v) - k * std::log(std::abs(lx));
      double d = y - (c + z * lx);
      res += d * d;
    }
    res = std::sqrt(res / n);
    if (res < best_res) {
      best_res = res;
      best.z = z;
      best.k = k;
      best.coeff = std::exp(c);
      best.residual = res;
    }
  }
  best.low_confidence = best_res > 0.15;
  return best;
}

/// Fitted pole order of lambda -> mellin_cutoff_power(z0, k0, ., z0 - eps)
/// as eps -> 0+, by log-log slope over a geometric eps ladder. Returns the
/// fitted order (should be k0 + 1).
inline double mellinPoleOrderProbe(double z0, int k0, const CutoffSpec& cutoff) {
  std::vector<std::pair<double, double>> pts;
  for (double eps = 1e-2; eps > 1e-5; eps *= 0.5) {
    Complex v = mellin_cutoff_power(z0, k0, cutoff, Complex(z0 - eps, 0.0));
    pts.push_back({eps, std::abs(v)});
  }
  // |v| ~ C eps^{-order}: slope of log|v| vs log eps is -order
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (auto& [e, v] : pts) {
    double lx = std::log(e), y = std::log(v);
    sx += lx;
    sy += y;
    sxx += lx * lx;
    sxy += lx * y;
    ++n;
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return -slope;
}

}  // namespace conedex::phg
