// Command-line surface: load JSON inputs, run the constructions and checkers,
// emit JSON/DOT reports.  Exit codes: 0 all checks pass, 1 failed checks,
// 2 malformed input (with a JSON error object on stderr).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mirror/adams.hpp"
#include "mirror/affinoid.hpp"
#include "mirror/atlas.hpp"
#include "mirror/barcode.hpp"
#include "mirror/counts.hpp"
#include "mirror/dot.hpp"
#include "mirror/novikov.hpp"
#include "mirror/sheaf.hpp"

using namespace mirror;
using nlohmann::json;

namespace {

struct RunConfig {
  Rat precision = 8;
  long long denominator = 1;
  std::string atlas_path, sheaf_path, counts_path;
  std::string format = "text";  // json | dot | text
  int jobs = 1;
  unsigned long long seed = 0;
};

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  json j;
  in >> j;
  return j;
}

ChartAtlas load_atlas(const RunConfig& cfg) {
  if (cfg.atlas_path.empty()) throw std::invalid_argument("--atlas is required");
  ChartAtlas atlas = atlas_from_json(load_json(cfg.atlas_path));
  if (atlas.lattice_den != cfg.denominator && cfg.denominator != 1)
    atlas.lattice_den = cfg.denominator;
  return atlas;
}

int fail_input(const std::string& msg) {
  std::cerr << json{{"error", msg}}.dump() << "\n";
  return 2;
}

int report_exit(const ValidationReport& rep, const std::string& format, const char* what) {
  if (format == "json") {
    std::cout << rep.to_json().dump(2) << "\n";
  } else {
    for (auto& e : rep.errors)
      std::cout << what << " error [" << e.code << "] at " << e.where << ": " << e.detail << "\n";
    for (auto& w : rep.warnings)
      std::cout << what << " warning [" << w.code << "] at " << w.where << ": " << w.detail
                << "\n";
    std::cout << what << ": " << (rep.ok() ? "PASS" : "FAIL") << "\n";
  }
  return rep.ok() ? 0 : 1;
}

int cmd_build(const RunConfig& cfg) {
  ChartAtlas atlas = load_atlas(cfg);
  ValidationReport rep = atlas_validate(atlas);
  if (!rep.ok()) return report_exit(rep, cfg.format, "atlas");
  ChartRegistry reg(atlas);
  TwistingCocycle alpha = twisting_cocycle(atlas);
  ValidationReport cocycle = cocycle_check(alpha, reg);

  if (cfg.format == "json") {
    json charts = json::array();
    for (auto& v : atlas.vertices) {
      json bp = json::array();
      for (auto& c : v.basepoint) bp.push_back(rat_str(c));
      charts.push_back({{"id", v.id}, {"basepoint", bp}});
    }
    json alphas = json::array();
    for (auto& [t, m] : alpha.values())
      alphas.push_back({{"triple", t},
                        {"t", rat_str(m.lambda)},
                        {"z", m.cls},
                        {"sign", m.sign}});
    std::cout << json{{"charts", charts},
                      {"alpha", alphas},
                      {"atlas", rep.to_json()},
                      {"cocycle", cocycle.to_json()}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "chart  basepoint\n";
    for (auto& v : atlas.vertices) {
      std::cout << "  " << v.id << "    (";
      for (size_t k = 0; k < v.basepoint.size(); ++k)
        std::cout << (k ? ", " : "") << rat_str(v.basepoint[k]);
      std::cout << ")\n";
    }
    for (auto& [t, m] : alpha.values()) {
      std::cout << "alpha" << chain_str(t) << " = " << (m.sign < 0 ? "-" : "") << "T^{"
                << rat_str(m.lambda) << "} z^(";
      for (size_t k = 0; k < m.cls.size(); ++k) std::cout << (k ? "," : "") << m.cls[k];
      std::cout << ")\n";
    }
    for (auto& w : rep.warnings)
      std::cout << "atlas warning [" << w.code << "] at " << w.where << "\n";
    std::cout << "atlas: PASS\n";
    std::cout << "cocycle: " << (cocycle.ok() ? "PASS" : "FAIL") << "\n";
  }
  return cocycle.ok() ? 0 : 1;
}

int cmd_sheaf_validate(const RunConfig& cfg) {
  ChartAtlas atlas = load_atlas(cfg);
  ChartRegistry reg(atlas);
  TwistingCocycle alpha = twisting_cocycle(atlas);
  TwistedSheaf F = sheaf_from_json(reg, load_json(cfg.sheaf_path), Prec(cfg.precision));
  return report_exit(sheaf_validate(reg, alpha, F, Prec(cfg.precision)), cfg.format, "sheaf");
}

int cmd_sheaf_cohomology(const RunConfig& cfg) {
  ChartAtlas atlas = load_atlas(cfg);
  ChartRegistry reg(atlas);
  TwistingCocycle alpha = twisting_cocycle(atlas);
  TwistedSheaf F = sheaf_from_json(reg, load_json(cfg.sheaf_path), Prec(cfg.precision));
  Barcode bc = cohomology_barcode(reg, alpha, F, F, cfg.precision);
  if (cfg.format == "json") {
    std::cout << bc.to_json().dump(2) << "\n";
  } else {
    for (auto& [d, bars] : bc.bars) {
      std::cout << "degree " << d << ":";
      for (auto& b : bars)
        std::cout << " [" << rat_str(b.birth) << "," << rat_str(b.death) << ")";
      std::cout << "\n";
    }
    for (auto& w : bc.warnings) std::cout << "warning: " << w << "\n";
  }
  return 0;
}

int cmd_adams_sample(const RunConfig&, const std::vector<std::string>& rs,
                     const std::string& s) {
  std::vector<Rat> r;
  for (auto& x : rs) r.push_back(parse_rat(x));
  RVec p = adams_path_eval(r, parse_rat(s));
  for (size_t i = 0; i < p.size(); ++i) std::cout << (i ? " " : "") << rat_str(p[i]);
  std::cout << "\n";
  return 0;
}

int cmd_adams_strata(const RunConfig& cfg, const std::vector<int>& K, const std::string& kind) {
  AdamsCube cube;
  if (kind == "plain") {
    cube = AdamsCube::plain_chain(K);
  } else {
    BarycentricChain vK;
    Chain cur;
    for (int v : K) {
      cur.push_back(v);
      vK.push_back(cur);
    }
    cube = AdamsCube::nested(kind == "input" ? CubeKind::input : CubeKind::output, vK);
  }
  if (cfg.format == "dot") {
    std::cout << strata_poset_dot(cube);
  } else if (cfg.format == "json") {
    json strata = json::array();
    for (auto& s : enumerate_strata(cube)) {
      json factors = json::array();
      auto fs = (cube.kind == CubeKind::input || cube.kind == CubeKind::output)
                    ? nested_stratum_factors(cube, s)
                    : product_factors(cube, s);
      for (auto& f : fs) factors.push_back(f.str());
      strata.push_back(
          {{"label", stratum_str(cube, s)}, {"dim", stratum_dim(s)}, {"factors", factors}});
    }
    std::cout << json{{"cube", cube.str()}, {"dim", cube.dim()}, {"strata", strata}}.dump(2)
              << "\n";
  } else {
    std::cout << cube.str() << " dim " << cube.dim() << ", "
              << enumerate_strata(cube).size() << " strata, " << cube_facets(cube).size()
              << " facets\n";
  }
  return 0;
}

int cmd_annuli_cells(const RunConfig& cfg) {
  ChartAtlas atlas = load_atlas(cfg);
  auto cells = pairs_barycentric_cells(atlas);
  if (cfg.format == "dot") {
    std::cout << cells_poset_dot(cells);
  } else if (cfg.format == "json") {
    json out = json::array();
    for (auto& c : cells) {
      auto fibre = degenerate_annulus_fibre(c);
      out.push_back({{"inner", bchain_str(c.inner)},
                     {"outer", bchain_str(c.outer)},
                     {"dim", c.dim()},
                     {"fibre", fibre.to_json()}});
    }
    std::cout << out.dump(2) << "\n";
  } else {
    for (auto& c : cells)
      std::cout << bchain_str(c.inner) << " < " << bchain_str(c.outer) << "  dim " << c.dim()
                << "  components " << degenerate_annulus_fibre(c).components.size() << "\n";
  }
  return 0;
}

int cmd_functor_check(const RunConfig& cfg) {
  ChartAtlas atlas = load_atlas(cfg);
  ChartRegistry reg(atlas);
  TwistingCocycle alpha = twisting_cocycle(atlas);
  json cj = load_json(cfg.counts_path);
  IntersectionData pts = intersections_from_json(cj.at("points"));
  FormalCountLedger ledger = ledger_from_json(cj.at("counts"));

  ValidationReport rep = ledger_validate(reg, pts, ledger);
  if (!rep.ok()) return report_exit(rep, cfg.format, "ledger");

  CountSystem sys(reg, alpha, pts, ledger, Prec(cfg.precision));
  ValidationReport all;
  auto merge = [&](const std::string& code, const ValidationReport& r) {
    for (auto& e : r.errors) all.errors.push_back({code + "/" + e.code, e.where, e.detail});
  };
  merge("sheaf-L", sys.sheaf_report(false));
  if (sys.points().has_prime()) merge("sheaf-L'", sys.sheaf_report(true));
  for (auto& p : sys.points().pair) {
    SheafMorphism r = sys.cech_residual(p.label);
    if (!r.is_zero())
      all.errors.push_back({"cech", p.label, "chain map residual nonzero"});
    Cochain c = sys.composition_defect(p.label);
    if (!cochain_zero(c))
      all.errors.push_back({"composition", p.label, "defect nonzero"});
  }
  // chain-map residual of P on every truncated basis monomial
  if (cfg.precision > 0) {
    for (auto& g :
         hom_complex_basis(reg, sys.sheaf_l(), sys.sheaf_lp(), cfg.precision)) {
      SheafMorphism xi;
      xi.degree = g.degree;
      AffMat m = AffMat::zero(g.I, atlas.field, Prec(cfg.precision),
                              sys.sheaf_lp().rank(g.I.back()), sys.sheaf_l().rank(g.I.front()));
      m.e[g.tgt][g.src] = AffinoidElement::monomial(reg, g.I, atlas.field, g.norm, g.cls,
                                                    FieldElem::one(atlas.field),
                                                    Prec(cfg.precision));
      xi.set(g.I, std::move(m));
      if (!cochain_zero(sys.floer_residual(xi))) {
        all.errors.push_back({"floer", chain_str(g.I), "chain map residual nonzero"});
        break;
      }
    }
  }
  // A-infinity relations and homomorphism equations up to arity 2
  std::vector<std::string> labels;
  for (auto& p : sys.points().pair) labels.push_back(p.label);
  for (auto& a : labels) {
    if (!cochain_zero(sys.ainfty_relation({a})))
      all.errors.push_back({"ainfty", a, "d=1 relation fails"});
    for (auto& b : labels) {
      if (!cochain_zero(sys.ainfty_relation({a, b})))
        all.errors.push_back({"ainfty", a + "," + b, "d=2 relation fails"});
      if (!sys.ainfty_hom_residual({a, b}).is_zero())
        all.errors.push_back({"ainfty-hom", a + "," + b, "d=2 homomorphism equation fails"});
    }
    if (!sys.ainfty_hom_residual({a}).is_zero())
      all.errors.push_back({"ainfty-hom", a, "d=1 homomorphism equation fails"});
  }
  return report_exit(all, cfg.format, "functor");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rigid-analytic mirror constructions over the Novikov field"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string precision = "8";
  app.add_option("--precision", precision, "working precision E (rational)");
  app.add_option("--denominator", cfg.denominator, "exponent lattice denominator D");
  app.add_option("--format", cfg.format, "output format: text|json|dot");
  app.add_option("--jobs", cfg.jobs, "worker count for parallel checks");
  app.add_option("--seed", cfg.seed, "seed for randomized property suites");

  auto* build = app.add_subcommand("build", "atlas -> chart summary, alpha^v, cocycle check");
  build->add_option("--atlas", cfg.atlas_path)->required();

  auto* sheaf = app.add_subcommand("sheaf", "twisted sheaf operations");
  auto* sheaf_validate_cmd = sheaf->add_subcommand("validate", "check the quadratic equation");
  sheaf_validate_cmd->add_option("--atlas", cfg.atlas_path)->required();
  sheaf_validate_cmd->add_option("--sheaf", cfg.sheaf_path)->required();
  auto* sheaf_cohomology = sheaf->add_subcommand("cohomology", "endomorphism barcode");
  sheaf_cohomology->add_option("--atlas", cfg.atlas_path)->required();
  sheaf_cohomology->add_option("--sheaf", cfg.sheaf_path)->required();

  auto* adams = app.add_subcommand("adams", "Adams moduli combinatorics");
  auto* sample = adams->add_subcommand("sample", "evaluate the Adams path");
  std::vector<std::string> rs;
  std::string svalue = "0";
  int d = 2;
  sample->add_option("--d", d, "simplex dimension");
  sample->add_option("--r", rs, "cube coordinates (rationals)");
  sample->add_option("--s", svalue, "path time");
  auto* strata = adams->add_subcommand("strata", "strata poset of an Adams cube");
  std::vector<int> K{0, 1, 2};
  std::string kind = "plain";
  strata->add_option("--label", K, "ordered vertex labels");
  strata->add_option("--kind", kind, "plain|input|output");

  auto* annuli = app.add_subcommand("annuli", "degenerate annulus combinatorics");
  auto* cells = annuli->add_subcommand("cells", "pairs barycentric cells and fibres");
  cells->add_option("--atlas", cfg.atlas_path)->required();

  auto* functor = app.add_subcommand("functor", "count-ledger evaluators");
  auto* fcheck = functor->add_subcommand("check", "all residual checks");
  fcheck->add_option("--atlas", cfg.atlas_path)->required();
  fcheck->add_option("--counts", cfg.counts_path)->required();

  CLI11_PARSE(app, argc, argv);

  if (const char* env = std::getenv("MIRROR_ATLAS_SEED")) cfg.seed = std::strtoull(env, nullptr, 10);

  try {
    cfg.precision = parse_rat(precision);
    if (cfg.precision <= 0 || cfg.denominator < 1)
      return fail_input("precision must be positive and denominator at least 1");
    if (build->parsed()) return cmd_build(cfg);
    if (sheaf->parsed()) {
      if (sheaf_validate_cmd->parsed()) return cmd_sheaf_validate(cfg);
      if (sheaf_cohomology->parsed()) return cmd_sheaf_cohomology(cfg);
    }
    if (adams->parsed()) {
      if (sample->parsed()) {
        if (static_cast<int>(rs.size()) + 1 != d)
          return fail_input("need d-1 cube coordinates");
        return cmd_adams_sample(cfg, rs, svalue);
      }
      if (strata->parsed()) return cmd_adams_strata(cfg, K, kind);
    }
    if (annuli->parsed() && cells->parsed()) return cmd_annuli_cells(cfg);
    if (functor->parsed() && fcheck->parsed()) return cmd_functor_check(cfg);
    return fail_input("no subcommand");
  } catch (const std::exception& ex) {
    return fail_input(ex.what());
  }
}
