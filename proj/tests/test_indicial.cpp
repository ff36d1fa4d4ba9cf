#include <catch2/catch_amalgamated.hpp>

#include "conedex/indicial.hpp"

using namespace conedex;
using namespace conedex::indicial;
using model::BFragment;
using model::Side;

namespace {
BFragment eulerFragment(const Mat& M1, const Mat& M0, Side s = Side::Plus) {
  // direct fragment with pencil M0 + lambda M1 (n = 1 so M0() == B0)
  BFragment f;
  f.side = s;
  f.n = 1;
  f.A0 = M1;
  f.B0 = M0;
  f.basis = Mat::Identity(M0.rows(), M0.cols());
  return f;
}
}  // namespace

TEST_CASE("indicial family evaluation") {
  // scalar Euler operator s d/ds: pencil = lambda
  Mat one = Mat::Identity(1, 1);
  BFragment euler = eulerFragment(one, Mat::Zero(1, 1));
  CHECK(std::abs(indicial_family(euler, Complex(0.37, 0.0))(0, 0) - Complex(0.37, 0.0)) < 1e-15);

  // two-channel fragment: b sigma1 - i sigma2 lambda
  BFragment f = model::conjugate_to_b(model::modelB(0.75), Side::Plus);
  Mat expect = f.basis.adjoint() * (0.75 * pauli1() - cliffordSigma() * Complex(0.6, 0.0)) * f.basis;
  CHECK((indicial_family(f, Complex(0.6, 0.0)) - expect).norm() < 1e-13);
  CHECK((indicial_family(f, 0.0) - f.B0).norm() < 1e-15);
}

TEST_CASE("b-spectrum of the two-channel model") {
  BFragment f = model::conjugate_to_b(model::modelB(0.75), Side::Plus);
  auto roots = b_spectrum_fragment(f);
  REQUIRE(roots.size() == 2);
  CHECK(roots[0].lambda == Catch::Approx(-0.75).margin(1e-12));
  CHECK(roots[1].lambda == Catch::Approx(0.75).margin(1e-12));
  for (const auto& r : roots) {
    CHECK(r.order == 1);
    CHECK(r.alg_mult == 1);
    CHECK(r.nullspace.cols() == 1);
    CHECK((f.pencil(Complex(r.lambda, 0.0)) * r.nullspace).norm() < 1e-10);
  }
  // window excluding the roots
  CHECK(b_spectrum_fragment(f, 0.0, 0.5).empty());
}

TEST_CASE("b-spectrum of the Euler operator with zero b-term") {
  Mat A = cliffordSigma();
  BFragment f = eulerFragment(-A, Mat::Zero(2, 2));
  auto roots = b_spectrum_fragment(f);
  REQUIRE(roots.size() == 1);
  CHECK(roots[0].lambda == Catch::Approx(0.0).margin(1e-12));
  CHECK(roots[0].alg_mult == 2);
  CHECK(roots[0].nullspace.cols() == 2);  // nullspace = full fiber
  CHECK(roots[0].order == 1);
}

TEST_CASE("b-spectrum rejects degenerate or non-real input") {
  BFragment sing = eulerFragment(Mat::Zero(2, 2), pauli1());
  CHECK_THROWS_AS(b_spectrum_fragment(sing), Error);

  // rotation pencil with complex roots: error under the self-adjoint
  // convention, flagged pass-through otherwise
  Mat M0(2, 2);
  M0 << Complex(0, 0), Complex(1, 0), Complex(-1, 0), Complex(0, 0);
  BFragment rot = eulerFragment(Mat::Identity(2, 2), M0);
  CHECK_THROWS_AS(b_spectrum_fragment(rot), Error);
  auto roots = b_spectrum_fragment(rot, -10, 10, /*require_real=*/false);
  REQUIRE(roots.size() == 2);
  CHECK_FALSE(roots[0].real_certified);
}

TEST_CASE("spectrum symmetry for self-adjoint built-ins") {
  for (const auto& name : {"MODEL-B", "MODEL-C", "MODEL-D"}) {
    BSpectrum spec = b_spectrum(model::byName(name));
    for (const auto& r : spec.roots) {
      bool found = false;
      for (const auto& q : spec.roots)
        if (q.side == r.side && std::abs(q.lambda + r.lambda) < 1e-9 &&
            q.order == r.order && q.alg_mult == r.alg_mult)
          found = true;
      CHECK(found);
    }
  }
}

TEST_CASE("formal nullspace: simple roots") {
  BFragment f = model::conjugate_to_b(model::modelB(0.75), Side::Plus);
  auto sols = formal_nullspace(f, 0.75);
  REQUIRE(sols.size() == 1);
  CHECK(sols[0].logDegree() == 0);
  CHECK(eulerResidual(f, sols[0]) < 1e-10);
  CHECK(dimFormalNullspace(f, 0.75) == 1);
  CHECK(dimFormalNullspace(f, -0.75) == 1);
  // non-root: empty
  CHECK(formal_nullspace(f, 0.3).empty());
}

TEST_CASE("formal nullspace: nilpotent chain produces log solutions") {
  Mat N(2, 2);
  N << Complex(0, 0), Complex(1, 0), Complex(0, 0), Complex(0, 0);
  BFragment f = eulerFragment(Mat::Identity(2, 2), -N);  // T = N nilpotent
  auto sols = formal_nullspace(f, 0.0);
  REQUIRE(sols.size() == 2);
  int max_deg = 0;
  for (const auto& s : sols) {
    max_deg = std::max(max_deg, s.logDegree());
    CHECK(eulerResidual(f, s) < 1e-10);
  }
  CHECK(max_deg == 1);  // one pure power solution, one with a log term
  auto roots = b_spectrum_fragment(f);
  REQUIRE(roots.size() == 1);
  CHECK(roots[0].order == 2);
  CHECK(roots[0].nullspace.cols() == 1);
}

TEST_CASE("boundary pairing") {
  model::RadialOperator P = model::modelB(0.75);
  BFragment f = model::conjugate_to_b(P, Side::Plus);
  BFragment fs = model::conjugate_to_b(model::formal_adjoint(P), Side::Plus);
  auto up = formal_nullspace(f, 0.75);
  auto vm = formal_nullspace(fs, -0.75);
  REQUIRE(up.size() == 1);
  REQUIRE(vm.size() == 1);

  auto cutoffs = builtinCutoffs();
  Complex b0 = boundary_pairing(f, fs, up[0], vm[0], cutoffs[0]);
  // closed form: B = i <M1 v+, v->; for unit vectors here |B| = 1
  CHECK(std::abs(b0) == Catch::Approx(1.0).margin(1e-10));
  CHECK(std::abs(b0.real()) < 1e-10);  // purely imaginary for this model

  // cutoff independence to 1e-8
  for (const auto& c : cutoffs) {
    Complex bc = boundary_pairing(f, fs, up[0], vm[0], c);
    CHECK(std::abs(bc - b0) < 1e-8);
  }

  // bilinearity: scaling u by 2 scales B by 2
  FormalSolution u2 = up[0];
  for (auto& v : u2.coeffs) v *= 2.0;
  CHECK(std::abs(boundary_pairing(f, fs, u2, vm[0], cutoffs[0]) - 2.0 * b0) < 1e-8);

  // different ends pair to zero
  FormalSolution other = vm[0];
  other.side = Side::Minus;
  CHECK(boundary_pairing(f, fs, up[0], other, cutoffs[0]) == Complex(0.0, 0.0));

  // mismatched exponents: divergent
  auto um = formal_nullspace(f, -0.75);
  REQUIRE(um.size() == 1);
  CHECK_THROWS_AS(boundary_pairing(f, fs, um[0], vm[0], cutoffs[0]), Error);
}

TEST_CASE("relative index ledger") {
  BSpectrum spec = b_spectrum(model::modelB(0.75));
  CHECK(relative_index_ledger(spec, 0.0, 1.0) == 2);
  CHECK(relative_index_ledger(spec, -0.5, 0.5) == 0);
  CHECK(relative_index_ledger(spec, -1.0, 1.0) == 4);
  // additivity in the middle weight
  CHECK(relative_index_ledger(spec, -1.0, 0.0) + relative_index_ledger(spec, 0.0, 1.0) ==
        relative_index_ledger(spec, -1.0, 1.0));
  // on-spectrum weight rejected
  CHECK_THROWS_AS(relative_index_ledger(spec, 0.75, 1.0), Error);
}

TEST_CASE("defect index") {
  BSpectrum spec = b_spectrum(model::modelB(0.75));  // roots {+-0.75} per end
  CHECK(defect(spec, 0.2) == 0);
  CHECK(defect(spec, 1.0) == -2);
  CHECK(defect(spec, -1.0) == 2);

  // single-end variant
  BSpectrum one;
  BFragment f = model::conjugate_to_b(model::modelB(0.75), Side::Plus);
  one.roots = b_spectrum_fragment(f);
  CHECK(defect(one, 1.0) == -1);

  // antisymmetry and jump law across a sampled grid avoiding roots
  BSpectrum specd = b_spectrum(model::modelD());
  for (double a : {0.1, 0.5, 1.0, 1.3, 1.7, 5.0}) {
    CHECK(defect(specd, -a) == -defect(specd, a));
  }
  // decreasing through a root drops defect by dim F at that root
  CHECK(defect(specd, 0.5) - defect(specd, 1.0) ==
        relative_index_ledger(specd, 0.5, 1.0));

  // odd formal dimension on the symmetric window: parity error
  BSpectrum bad;
  bad.roots = b_spectrum_fragment(f);
  bad.roots.erase(bad.roots.begin());  // keep only +0.75
  CHECK_THROWS_AS(defect(bad, 1.0), Error);
}
