// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "conedex/index_thm.hpp"
#include "conedex/shooting.hpp"
#include "conedex/spectral.hpp"

using namespace conedex;
using model::Side;

namespace {

int g_failures = 0;

void criterion(int num, const std::string& title, double budget_s,
               const std::function<void(std::ostringstream&)>& body) {
  auto t0 = std::chrono::steady_clock::now();
  std::ostringstream why;
  bool ok = true;
  try {
    body(why);
  } catch (const std::exception& e) {
    ok = false;
    why << " exception: " << e.what();
  }
  if (!why.str().empty()) ok = false;
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0.0 && secs > budget_s) {
    ok = false;
    why << " over budget (" << secs << " s > " << budget_s << " s)";
  }
  std::printf("[%s] criterion %2d: %s (%.2f s)%s\n", ok ? "PASS" : "FAIL", num,
              title.c_str(), secs, why.str().c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

template <typename T>
void expect(std::ostringstream& why, bool cond, const char* what, T got) {
  if (!cond) why << " [" << what << ": got " << got << "]";
}

}  // namespace

int main() {
  // 1. b-spectrum exactness
  criterion(1, "b-spectrum exactness", 1.0, [](std::ostringstream& why) {
    auto P = model::modelB(0.75);
    for (Side s : {Side::Plus, Side::Minus}) {
      auto roots = indicial::b_spectrum_fragment(model::conjugate_to_b(P, s));
      expect(why, roots.size() == 2, "roots per end", roots.size());
      if (roots.size() != 2) return;
      expect(why, std::abs(roots[0].lambda + 0.75) < 1e-10, "root -0.75",
             roots[0].lambda);
      expect(why, std::abs(roots[1].lambda - 0.75) < 1e-10, "root +0.75",
             roots[1].lambda);
      expect(why, std::abs(roots[0].lambda + roots[1].lambda) < 1e-10,
             "symmetry about 0", roots[0].lambda + roots[1].lambda);
      for (const auto& r : roots) {
        expect(why, r.order == 1, "simple (order)", r.order);
        expect(why, r.alg_mult == 1, "simple (mult)", r.alg_mult);
      }
    }
  });

  // 2. relative index staircase
  criterion(2, "relative index staircase", 60.0, [](std::ostringstream& why) {
    auto P = model::modelB();
    auto g = spectral::WeightedGrid::make(1200, 4.0);
    std::vector<double> alphas = {-1.0, -0.2, 0.2, 1.0};
    auto rows = spectral::alpha_sweep(P, g, alphas);
    std::vector<int> want = {2, 0, 0, -2};
    for (std::size_t i = 0; i < rows.size(); ++i)
      expect(why, rows[i].index == want[i], "staircase entry", rows[i].index);
    // antisymmetry ind(-alpha) = -ind(alpha), exact
    expect(why, rows[0].index == -rows[3].index, "antisymmetry outer",
           rows[0].index + rows[3].index);
    expect(why, rows[1].index == -rows[2].index, "antisymmetry inner",
           rows[1].index + rows[2].index);
    // each jump equals the ledger of crossed roots
    auto spec = spectral::v0Spectrum(P);
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      int ledger = indicial::relative_index_ledger(spec, alphas[i], alphas[i + 1]);
      expect(why, rows[i + 1].index - rows[i].index == -ledger, "ledger jump",
             ledger);
    }
    // independent shooting oracle must agree with the SVD pipeline
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      auto sh = spectral::shooting_oracle(P, alphas[i]);
      expect(why, sh.dim_ker - sh.dim_coker == rows[i].index, "shooting index",
             sh.dim_ker - sh.dim_coker);
      expect(why, !sh.ill_conditioned, "shooting conditioning",
             sh.worst_condition);
    }
  });

  // 3. classical Callias identity
  criterion(3, "classical Callias identity", 30.0, [](std::ostringstream& why) {
    auto P = model::modelA();
    auto g = spectral::WeightedGrid::make(500, 4.0);
    spectral::TolPolicy pol;  // both mandated refinements on
    pol.want_vectors = true;
    auto r = spectral::numerical_index(P, g, 0.0, pol);
    expect(why, r.dim_ker == 1, "dim_ker", r.dim_ker);
    expect(why, r.dim_coker == 1, "dim_coker", r.dim_coker);
    expect(why, r.index == 0, "index", r.index);
    expect(why, r.refinements.size() == 3, "refinement steps",
           r.refinements.size());
    for (const auto& s : r.refinements) {
      expect(why, s.dim_ker == 1 && s.dim_coker == 1, "refinement stability",
             s.dim_ker - s.dim_coker);
    }
    double boundary_sum = index::boundary_index_point(P, Side::Plus) +
                          index::boundary_index_point(P, Side::Minus);
    expect(why, double(r.index) == boundary_sum, "boundary sum", boundary_sum);
    auto fits = spectral::nullspace_asymptotics(P, r);
    expect(why, fits.size() == 1, "kernel vectors", fits.size());
    for (const auto& f : fits) {
      expect(why, f.plus.v1_superpolynomial, "superpolynomial decay (+)",
             f.plus.v1.z);
      expect(why, f.minus.v1_superpolynomial, "superpolynomial decay (-)",
             f.minus.v1.z);
    }
  });

  // 4. hybrid index formula
  criterion(4, "hybrid index formula", 120.0, [](std::ostringstream& why) {
    auto P = model::modelC();
    auto g = spectral::WeightedGrid::make(500, 4.0);
    spectral::TolPolicy pol;
    pol.refine = false;
    std::vector<double> alphas = {0.2, -0.2, 1.0, -1.0};
    std::vector<int> want_defect = {0, 0, -2, 2};
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      auto h = index::hybrid_index(P, alphas[i]);
      expect(why, h.boundary == 0.0, "boundary term", h.boundary);
      expect(why, h.defect == want_defect[i], "defect", h.defect);
      expect(why, h.total == double(h.defect), "breakdown sum", h.total);
      auto r = spectral::numerical_index(P, g, alphas[i], pol);
      expect(why, int(h.total) == r.index, "hybrid == numerical", r.index);
      auto sh = spectral::shooting_oracle(P, alphas[i]);
      expect(why, r.index == sh.dim_ker - sh.dim_coker, "oracle agreement",
             sh.dim_ker - sh.dim_coker);
    }
  });

  // 5. nullspace leading order
  criterion(5, "nullspace leading order", 60.0, [](std::ostringstream& why) {
    auto P = model::modelB();
    auto g = spectral::WeightedGrid::make(600, 4.0);
    spectral::TolPolicy pol;
    pol.refine = false;
    pol.want_vectors = true;
    auto r = spectral::numerical_index(P, g, -1.0, pol);
    expect(why, r.dim_ker == 2, "dim_ker", r.dim_ker);
    auto fits = spectral::nullspace_asymptotics(P, r);
    for (const auto& f : fits)
      for (const auto& ef : {f.plus, f.minus}) {
        // leading order <t>^{0.75}: fitted exponent in x = 1/<t> is -0.75
        expect(why, std::abs(-ef.v0.z - 0.75) <= 0.02 * 0.75, "V0 exponent",
               -ef.v0.z);
        expect(why, ef.v0.k == 0, "log power", ef.v0.k);
      }
  });

  // 6. indicial flip identity
  criterion(6, "indicial flip identity", 10.0, [](std::ostringstream& why) {
    for (const char* name : {"MODEL-B", "MODEL-C", "MODEL-D"}) {
      auto P = model::byName(name);
      for (Side s : {Side::Plus, Side::Minus}) {
        auto f = index::indicial_flip_check(P, s);
        expect(why, f.equal && f.max_diff == 0.0, "exact pencil equality",
               f.max_diff);
      }
    }
  });

  // 7. transition additivity
  criterion(7, "transition additivity", 180.0, [](std::ostringstream& why) {
    auto P = model::modelB();
    std::vector<double> taus = {1e-3, 1e-2, 1e-1, 0.5};
    auto tr = index::transition_additivity(P, 1.0, taus);
    for (int ind : tr.deformed_index)
      expect(why, ind == 0, "deformed index", ind);
    expect(why, tr.zf_component == -2, "zf component", tr.zf_component);
    expect(why, tr.tf_component == 2, "tf component", tr.tf_component);
    expect(why, tr.sum == 0, "additivity", tr.sum);
    // SVD cross-check of the deformed invertibility at two strengths
    auto g = spectral::WeightedGrid::make(600, 4.0);
    spectral::TolPolicy pol;
    pol.refine = false;
    for (double tau : {0.1, 0.5}) {
      auto r = spectral::numerical_index(index::deform_family(P, tau), g, 0.0, pol);
      expect(why, r.dim_ker == 0 && r.dim_coker == 0, "deformed SVD check",
             r.index);
    }
    // corollary: jump of ind(N_tf, .) across the root 0.75 equals -dim F
    for (Side s : {Side::Plus, Side::Minus}) {
      int jump = index::tf_index(P, s, 0.8) - index::tf_index(P, s, 0.7);
      expect(why, jump == -1, "tf jump == -dim F", jump);
    }
  });

  // 8. boundary pairing
  criterion(8, "boundary pairing", 10.0, [](std::ostringstream& why) {
    auto P = model::modelB();
    auto f = model::conjugate_to_b(P, Side::Plus);
    auto fs = model::conjugate_to_b(model::formal_adjoint(P), Side::Plus);
    auto up = indicial::formal_nullspace(f, 0.75);
    auto vm = indicial::formal_nullspace(fs, -0.75);
    expect(why, up.size() == 1 && vm.size() == 1, "formal solutions",
           up.size() + vm.size());
    auto cutoffs = builtinCutoffs();
    Complex b0 = indicial::boundary_pairing(f, fs, up[0], vm[0], cutoffs[0]);
    expect(why, std::abs(b0) > 1e-3, "pairing nonzero", std::abs(b0));
    for (const auto& c : cutoffs) {
      Complex bc = indicial::boundary_pairing(f, fs, up[0], vm[0], c);
      expect(why, std::abs(bc - b0) < 1e-8, "cutoff independence",
             std::abs(bc - b0));
    }
    Complex symbolic =
        kI * (vm[0].coeffs[0].adjoint() * (f.M1() * up[0].coeffs[0])).value();
    expect(why, std::abs(b0 - symbolic) < 1e-8, "symbolic commutator",
           std::abs(b0 - symbolic));
  });

  // 9. combinatorics and Mellin probes
  criterion(9, "index-set combinatorics and Mellin poles", 60.0,
            [](std::ostringstream& why) {
    std::mt19937 rng(20260826);
    std::uniform_int_distribution<int> nEntries(0, 4), logPow(0, 2), halves(-4, 8);
    auto randomSet = [&] {
      phg::IndexSet s;
      int n = nEntries(rng);
      for (int i = 0; i < n; ++i) s.insert(0.5 * halves(rng), logPow(rng));
      return s;
    };
    auto equal = [](const phg::IndexSet& a, const phg::IndexSet& b) {
      if (a.size() != b.size()) return false;
      for (const auto& e : a.entries())
        if (!b.contains(e.z, e.k)) return false;
      return true;
    };
    for (int trial = 0; trial < 200; ++trial) {
      phg::IndexSet e = randomSet(), f = randomSet(), h = randomSet();
      auto ef = phg::extended_union(e, f);
      if (!equal(ef, phg::extended_union(f, e)))
        expect(why, false, "commutativity", trial);
      for (const auto& a : e.entries())
        if (!ef.contains(a.z, a.k)) expect(why, false, "contains left", trial);
      for (const auto& b : f.entries())
        if (!ef.contains(b.z, b.k)) expect(why, false, "contains right", trial);
      for (const auto& a : e.entries())
        for (const auto& b : f.entries())
          if (phg::sameExponent(a.z, b.z) && !ef.contains(a.z, a.k + b.k + 1))
            expect(why, false, "interaction entries", trial);
      if (!equal(phg::extended_union(ef, h),
                 phg::extended_union(e, phg::extended_union(f, h))))
        expect(why, false, "associativity", trial);
      if (!equal(phg::extended_union(e, phg::IndexSet{}), e))
        expect(why, false, "neutral element", trial);
      if (why.tellp() > 0) return;  // stop at the first broken trial
    }
    const auto cutoff = builtinCutoffs()[0];
    for (auto [z0, k0] : {std::pair{0.0, 0}, std::pair{0.0, 1},
                          std::pair{1.5, 2}}) {
      double fitted = phg::mellinPoleOrderProbe(z0, k0, cutoff);
      expect(why, std::abs(fitted - double(k0 + 1)) < 2e-2, "pole order",
             fitted);
    }
  });

  // 10. free 3-D channel sanity
  criterion(10, "free 3-D channel sanity", 120.0, [](std::ostringstream& why) {
    auto fam = index::channel_family(1.0, 6);
    expect(why, fam.channels.size() == 12, "channel count",
           fam.channels.size());
    for (const auto& c : fam.channels) {
      expect(why, c.index == 0, "channel index", c.kappa);
      expect(why, c.degeneracy == 2 * std::abs(c.kappa), "degeneracy",
             c.degeneracy);
    }
    expect(why, fam.weighted_sum == 0, "weighted sum", fam.weighted_sum);
  });

  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", g_failures);
  return 1;
}
