// conedex: numerical/symbolic workbench for Callias-type radial Dirac
// operators with degenerate potentials.
//
// Exit codes: 0 success, 2 identity failure, 3 indeterminate numerics,
// 4 bad input or configuration.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "conedex/index_thm.hpp"
#include "conedex/shooting.hpp"
#include "conedex/spectral.hpp"

using namespace conedex;
using model::RadialOperator;
using model::Side;
using ojson = nlohmann::ordered_json;

namespace {

struct Options {
  std::string model_name;
  std::string config_path;
  double alpha = 0.0;
  bool alpha_set = false;
  std::vector<double> alphas;
  std::vector<double> taus = {1e-3, 1e-2, 1e-1, 0.5};
  int grid_nodes = 1200;
  double grid_decades = 4.0;
  double tol_gap = 1e3;
  std::string out_path;
  long seed = 0;  // consumed by randomized property checks only
  std::string format = "json";
  int kappa_max = 6;
};

RadialOperator loadModel(const Options& opt) {
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path);
    if (!in) throw Error("cannot open config: " + opt.config_path);
    nlohmann::json j;
    in >> j;
    return model::fromJson(j);
  }
  if (opt.model_name.empty()) throw Error("no model given: use --model or --config");
  return model::byName(opt.model_name);
}

spectral::WeightedGrid makeGrid(const Options& opt) {
  return spectral::WeightedGrid::make(opt.grid_nodes, opt.grid_decades);
}

spectral::TolPolicy makePolicy(const Options& opt) {
  spectral::TolPolicy pol;
  pol.gap_ratio = opt.tol_gap;
  return pol;
}

void emit(const Options& opt, const std::string& text) {
  if (opt.out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    std::ofstream out(opt.out_path, std::ios::binary);
    if (!out) throw Error("cannot open output: " + opt.out_path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
  }
}

ojson gridMeta(const Options& opt) {
  return {{"nodes", opt.grid_nodes}, {"decades", opt.grid_decades},
          {"tol_gap", opt.tol_gap}, {"seed", opt.seed}};
}

ojson fitToJson(const phg::LeadingOrderFit& f) {
  return {{"z", f.z}, {"log_power", f.k}, {"coeff", f.coeff},
          {"residual", f.residual}, {"vanishing", f.vanishing},
          {"low_confidence", f.low_confidence}};
}

ojson fitsToJson(const std::vector<spectral::KernelVectorFits>& fits) {
  ojson arr = ojson::array();
  for (const auto& kf : fits) {
    ojson entry;
    for (const auto& [name, ef] :
         {std::pair{"plus", kf.plus}, std::pair{"minus", kf.minus}}) {
      entry[name] = {{"v0", fitToJson(ef.v0)}, {"v1", fitToJson(ef.v1)},
                     {"v1_superpolynomial", ef.v1_superpolynomial}};
    }
    arr.push_back(entry);
  }
  return arr;
}

ojson reportToJson(const spectral::IndexReport& r) {
  ojson steps = ojson::array();
  for (const auto& s : r.refinements)
    steps.push_back({{"nodes", s.nodes}, {"decades", s.decades},
                     {"dim_ker", s.dim_ker}, {"dim_coker", s.dim_coker}});
  return {{"alpha", r.alpha}, {"alpha_effective", r.alpha_effective},
          {"dim_ker", r.dim_ker}, {"dim_coker", r.dim_coker},
          {"index", r.index}, {"gap_ratio_ker", r.gap_ratio_ker},
          {"gap_ratio_coker", r.gap_ratio_coker}, {"refinements", steps}};
}

std::string sweepCsv(const std::vector<spectral::SweepRow>& rows) {
  std::ostringstream os;
  os << "alpha,dim_ker,dim_coker,index,gap_ratio,grid_nodes\n";
  for (const auto& r : rows) {
    char line[160];
    std::snprintf(line, sizeof line, "%g,%d,%d,%d,%.6g,%d\n", r.alpha, r.dim_ker,
                  r.dim_coker, r.index, r.gap_ratio, r.nodes);
    os << line;
  }
  return os.str();
}

int cmdModels(const Options& opt) {
  ojson arr = ojson::array();
  for (const char* name : {"MODEL-A", "MODEL-B", "MODEL-C", "MODEL-D"}) {
    auto P = model::byName(name);
    auto v = model::validate_assumptions(P);
    ojson checks = ojson::array();
    for (const auto& c : v.checks)
      checks.push_back({{"name", c.name}, {"passed", c.passed}});
    arr.push_back({{"name", P.name}, {"dim", P.dim},
                   {"fully_elliptic_plus", model::fully_elliptic(P, Side::Plus)},
                   {"fully_elliptic_minus", model::fully_elliptic(P, Side::Minus)},
                   {"checks", checks}, {"config", model::toJson(P)}});
  }
  emit(opt, ojson{{"models", arr}}.dump(2));
  return 0;
}

int cmdBspec(const Options& opt) {
  auto P = loadModel(opt);
  ojson ends;
  for (Side s : {Side::Plus, Side::Minus}) {
    ojson roots = ojson::array();
    if (model::splitEnd(P, s).basis_V0.cols() > 0) {
      auto frag = model::conjugate_to_b(P, s);
      for (const auto& r : indicial::b_spectrum_fragment(frag))
        roots.push_back({{"root", r.lambda}, {"order", r.order},
                         {"nullity", int(r.nullspace.cols())},
                         {"alg_mult", r.alg_mult}});
    }
    ends[s == Side::Plus ? "plus" : "minus"] = roots;
  }
  emit(opt, ojson{{"model", P.name}, {"b_spectrum", ends}}.dump(2));
  return 0;
}

int cmdDefect(const Options& opt) {
  auto P = loadModel(opt);
  auto spec = spectral::v0Spectrum(P);
  std::vector<double> alphas = opt.alphas;
  if (alphas.empty())
    for (double a = -2.0; a <= 2.0 + 1e-12; a += 0.1) alphas.push_back(a);
  std::ostringstream os;
  os << "alpha,defect\n";
  for (double a : alphas) {
    bool on_root = false;
    for (const auto& r : spec.roots)
      if (std::abs(std::abs(a) - std::abs(r.lambda)) < 1e-9) on_root = true;
    if (on_root) continue;
    char line[64];
    std::snprintf(line, sizeof line, "%g,%d\n", a, indicial::defect(spec, a));
    os << line;
  }
  emit(opt, os.str());
  return 0;
}

int cmdIndex(const Options& opt) {
  auto P = loadModel(opt);
  auto pol = makePolicy(opt);
  pol.want_vectors = true;
  auto rep = spectral::numerical_index(P, makeGrid(opt), opt.alpha, pol);
  if (opt.format == "csv") {
    spectral::SweepRow row{rep.alpha, rep.dim_ker, rep.dim_coker, rep.index,
                           std::min(rep.gap_ratio_ker, rep.gap_ratio_coker),
                           rep.nodes};
    emit(opt, sweepCsv({row}));
    return 0;
  }
  ojson j = {{"model", P.name}, {"grid", gridMeta(opt)},
             {"report", reportToJson(rep)}};
  if (rep.dim_ker > 0)
    j["fits"] = fitsToJson(spectral::nullspace_asymptotics(P, rep));
  emit(opt, j.dump(2));
  return 0;
}

int cmdSweep(const Options& opt) {
  auto P = loadModel(opt);
  if (opt.alphas.empty()) throw Error("sweep: --alphas required");
  auto rows = spectral::alpha_sweep(P, makeGrid(opt), opt.alphas, makePolicy(opt));
  if (opt.format == "csv") {
    emit(opt, sweepCsv(rows));
    return 0;
  }
  ojson arr = ojson::array();
  for (const auto& r : rows)
    arr.push_back({{"alpha", r.alpha}, {"dim_ker", r.dim_ker},
                   {"dim_coker", r.dim_coker}, {"index", r.index},
                   {"gap_ratio", r.gap_ratio}, {"grid_nodes", r.nodes}});
  emit(opt, ojson{{"model", P.name}, {"grid", gridMeta(opt)},
                  {"sweep", arr}}.dump(2));
  return 0;
}

int cmdNullspace(const Options& opt) {
  auto P = loadModel(opt);
  auto pol = makePolicy(opt);
  pol.want_vectors = true;
  pol.refine = false;
  auto rep = spectral::numerical_index(P, makeGrid(opt), opt.alpha, pol);
  ojson j = {{"model", P.name}, {"grid", gridMeta(opt)},
             {"alpha", rep.alpha}, {"dim_ker", rep.dim_ker}};
  j["fits"] = (rep.dim_ker > 0)
                  ? fitsToJson(spectral::nullspace_asymptotics(P, rep))
                  : ojson::array();
  emit(opt, j.dump(2));
  return 0;
}

int cmdVerify(const Options& opt) {
  auto P = loadModel(opt);
  ojson checks = ojson::array();
  bool all_ok = true;
  auto record = [&](const std::string& name, bool ok, ojson detail) {
    detail["name"] = name;
    detail["passed"] = ok;
    checks.push_back(detail);
    all_ok = all_ok && ok;
  };

  bool has_b_end = false;
  for (Side s : {Side::Plus, Side::Minus}) {
    if (model::splitEnd(P, s).basis_V0.cols() == 0) continue;
    has_b_end = true;
    auto f = index::indicial_flip_check(P, s);
    record(std::string("indicial_flip_") + (s == Side::Plus ? "plus" : "minus"),
           f.equal, {{"max_diff", f.max_diff}});
  }

  auto sh = spectral::shooting_oracle(P, opt.alpha);
  int numerical = sh.dim_ker - sh.dim_coker;
  if (has_b_end) {
    auto h = index::hybrid_index(P, opt.alpha);
    record("hybrid_index_formula", int(h.total) == numerical,
           {{"boundary", h.boundary}, {"defect", h.defect},
            {"numerical", numerical}});
    auto spec = spectral::v0Spectrum(P);
    record("defect_antisymmetry",
           indicial::defect(spec, -opt.alpha) == -indicial::defect(spec, opt.alpha),
           {});
  } else {
    double cls = index::callias_index_fullrank(P);
    record("classical_callias_identity", int(cls) == numerical,
           {{"boundary_sum", cls}, {"numerical", numerical}});
  }
  record("shooting_well_conditioned", !sh.ill_conditioned,
         {{"worst_condition", sh.worst_condition}});

  ojson j = {{"model", P.name}, {"alpha", opt.alpha},
             {"passed", all_ok}, {"checks", checks}};
  emit(opt, j.dump(2));
  return all_ok ? 0 : 2;
}

int cmdTransition(const Options& opt) {
  auto P = loadModel(opt);
  auto tr = index::transition_additivity(P, opt.alpha, opt.taus);
  if (opt.format == "csv") {
    std::ostringstream os;
    os << "tau,dim_ker,dim_coker,index\n";
    for (std::size_t i = 0; i < tr.taus.size(); ++i) {
      char line[96];
      std::snprintf(line, sizeof line, "%g,%d,%d,%d\n", tr.taus[i],
                    tr.deformed_ker[i], tr.deformed_coker[i], tr.deformed_index[i]);
      os << line;
    }
    emit(opt, os.str());
    return 0;
  }
  ojson rows = ojson::array();
  for (std::size_t i = 0; i < tr.taus.size(); ++i)
    rows.push_back({{"tau", tr.taus[i]}, {"dim_ker", tr.deformed_ker[i]},
                    {"dim_coker", tr.deformed_coker[i]},
                    {"index", tr.deformed_index[i]}});
  emit(opt, ojson{{"model", P.name}, {"alpha", opt.alpha},
                  {"deformed", rows},
                  {"zf_component", tr.zf_component},
                  {"tf_component", tr.tf_component},
                  {"sum", tr.sum}}.dump(2));
  return 0;
}

int cmdChannels(const Options& opt) {
  auto fam = index::channel_family(1.0, opt.kappa_max);
  if (opt.format == "csv") {
    std::ostringstream os;
    os << "kappa,degeneracy,dim_ker,dim_coker,index\n";
    for (const auto& c : fam.channels) {
      char line[96];
      std::snprintf(line, sizeof line, "%d,%d,%d,%d,%d\n", c.kappa, c.degeneracy,
                    c.dim_ker, c.dim_coker, c.index);
      os << line;
    }
    char tail[64];
    std::snprintf(tail, sizeof tail, "sum,,,,%d\n", fam.weighted_sum);
    os << tail;
    emit(opt, os.str());
    return 0;
  }
  ojson rows = ojson::array();
  for (const auto& c : fam.channels)
    rows.push_back({{"kappa", c.kappa}, {"degeneracy", c.degeneracy},
                    {"dim_ker", c.dim_ker}, {"dim_coker", c.dim_coker},
                    {"index", c.index}});
  emit(opt, ojson{{"channels", rows}, {"weighted_sum", fam.weighted_sum},
                  {"all_zero", fam.all_zero}}.dump(2));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conedex: index workbench for radial Callias-type operators"};
  app.require_subcommand(1);
  Options opt;

  auto addCommon = [&](CLI::App* sub) {
    sub->add_option("name", opt.model_name, "built-in model name (positional)");
    sub->add_option("--model", opt.model_name, "built-in model name")
        ->excludes("name");
    sub->add_option("--config", opt.config_path, "JSON model configuration");
    sub->add_option("--grid-nodes", opt.grid_nodes, "grid nodes");
    sub->add_option("--grid-decades", opt.grid_decades, "grid decades");
    sub->add_option("--tol-gap", opt.tol_gap, "required certificate gap ratio");
    sub->add_option("--out", opt.out_path, "output file (default stdout)");
    sub->add_option("--seed", opt.seed, "seed for randomized property checks");
    sub->add_option("--format", opt.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    return sub;
  };
  auto addAlpha = [&](CLI::App* sub) {
    sub->add_option("--alpha", opt.alpha, "weight")->each([&](const std::string&) {
      opt.alpha_set = true;
    });
    return sub;
  };

  auto* c_models = addCommon(app.add_subcommand("models", "catalog summary"));
  auto* c_bspec = addCommon(app.add_subcommand("bspec", "b-spectrum per end"));
  auto* c_defect = addCommon(app.add_subcommand("defect", "defect over a weight grid"));
  c_defect->add_option("--alphas", opt.alphas, "weights")->delimiter(',');
  auto* c_index = addAlpha(addCommon(app.add_subcommand("index", "numerical index")));
  auto* c_sweep = addCommon(app.add_subcommand("sweep", "index over weights"));
  c_sweep->add_option("--alphas", opt.alphas, "weights")->delimiter(',');
  auto* c_null = addAlpha(addCommon(app.add_subcommand("nullspace", "kernel asymptotics")));
  auto* c_verify = addAlpha(addCommon(app.add_subcommand("verify", "identity suite")));
  auto* c_trans = addAlpha(addCommon(app.add_subcommand("transition", "deformation family")));
  c_trans->add_option("--tau-list", opt.taus, "switch-on strengths")->delimiter(',');
  auto* c_chan = addCommon(app.add_subcommand("channels", "free 3-D channel table"));
  c_chan->add_option("--kappa-max", opt.kappa_max, "largest |kappa|");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 4;
  }

  auto t0 = std::chrono::steady_clock::now();
  int rc = 4;
  try {
    if (c_models->parsed()) rc = cmdModels(opt);
    else if (c_bspec->parsed()) rc = cmdBspec(opt);
    else if (c_defect->parsed()) rc = cmdDefect(opt);
    else if (c_index->parsed()) rc = cmdIndex(opt);
    else if (c_sweep->parsed()) rc = cmdSweep(opt);
    else if (c_null->parsed()) rc = cmdNullspace(opt);
    else if (c_verify->parsed()) rc = cmdVerify(opt);
    else if (c_trans->parsed()) rc = cmdTransition(opt);
    else if (c_chan->parsed()) rc = cmdChannels(opt);
  } catch (const Error& e) {
    std::string what = e.what();
    bool indeterminate = what.find("indeterminate") != std::string::npos ||
                         what.find("unstable") != std::string::npos ||
                         what.find("ill-conditioned") != std::string::npos;
    std::cerr << "error: " << what << "\n";
    return indeterminate ? 3 : 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  auto t1 = std::chrono::steady_clock::now();
  std::fprintf(stderr, "wall time: %.0f ms\n",
               std::chrono::duration<double, std::milli>(t1 - t0).count());
  return rc;
}
