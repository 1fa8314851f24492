#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "bianchi/cusps.hpp"
#include "bianchi/homology.hpp"
#include "bianchi/spectral.hpp"
#include "bianchi/survey.hpp"

using namespace bianchi;
using nlohmann::json;

namespace {

std::vector<long> split_longs(const std::string& s) {
  std::vector<long> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(std::stol(part));
  return out;
}

IdealLattice parse_level_ideal(const QuadraticField& F, const std::string& ideal, const std::string& gen) {
  if (!ideal.empty()) {
    auto v = split_longs(ideal);
    if (v.size() != 3) throw std::invalid_argument("--ideal expects a,b,c");
    IdealLattice I{v[0], v[1], v[2]};
    if (!is_ideal(F, I)) throw std::invalid_argument("--ideal " + ideal + " is not an ideal HNF");
    return I;
  }
  auto v = split_longs(gen.empty() ? "1,0" : gen);
  if (v.size() != 2) throw std::invalid_argument("--gen expects x,y for x + yω");
  return principal_ideal(F, FieldElement(v[0], v[1]));
}

IntegralModule parse_module(const QuadraticField& F, const std::string& w) {
  if (w == "trivial" || w == "trivial-Z") return IntegralModule::trivial_z(F);
  auto v = split_longs(w);
  if (v.size() != 2) throw std::invalid_argument("--weight expects trivial or n1,n2");
  return IntegralModule(F, {int(v[0]), int(v[1])});
}

json report_json(const TorsionReport& r) {
  json divs = json::array();
  for (const auto& d : r.elementary_divisors) divs.push_back(d.get_str());
  return {{"group", r.group_string()},
          {"free_rank", r.free_rank},
          {"torsion_order", r.torsion_order.get_str()},
          {"torsion_factored", r.factored.to_string()},
          {"elementary_divisors", divs}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Congruence subgroups of Bianchi groups: homology, cusps, scattering and surveys"};
  app.require_subcommand(1);

  long d = -1;
  std::string ideal, gen, flavor = "principal", weight = "trivial";
  auto add_level_opts = [&](CLI::App* sub) {
    sub->add_option("--field,-d", d, "squarefree d < 0 of Q(sqrt(d))");
    sub->add_option("--ideal", ideal, "level ideal as HNF a,b,c");
    sub->add_option("--gen", gen, "level ideal generated by x + yω, given as x,y");
    sub->add_option("--flavor", flavor, "principal | hecke | semi");
  };

  auto* field_info = app.add_subcommand("field-info", "field invariants");
  field_info->add_option("--field,-d", d, "squarefree d < 0");

  auto* subgroup = app.add_subcommand("subgroup", "index, quotient order and torsion status of a level");
  add_level_opts(subgroup);

  bool rewriting = false;
  auto* homology = app.add_subcommand("homology", "H0 and H1 of a level with coefficients");
  add_level_opts(homology);
  homology->add_option("--weight", weight, "trivial or n1,n2");
  homology->add_flag("--rewriting", rewriting, "use the rewritten presentation instead of the induced module");

  long local_p = 0;
  int local_k = 0;
  std::string closure;
  double alpha = 0.5;
  auto* cusps = app.add_subcommand("cusps", "cusp lattices, local unipotent counts and closure checks");
  add_level_opts(cusps);
  cusps->add_option("--alpha", alpha, "exponent α of the square-sum comparison");
  cusps->add_option("--local-p", local_p, "run the local analysis at this rational prime");
  cusps->add_option("--local-k", local_k, "exponent k of the local level (0: from the ideal)");
  cusps->add_option("--closure", closure, "closure check over F_q, given as p,degree");

  std::string scattering_s, lp_conductors, t_grid = "0,0.5,1,2,5";
  double eis_s = 0;
  auto* spectral = app.add_subcommand("spectral", "scattering factors, Eisenstein constant terms, log-derivative table");
  spectral->add_option("--field,-d", d, "squarefree d < 0");
  spectral->add_option("--scattering", scattering_s, "evaluate c(s) at s = re,im");
  spectral->add_option("--eisenstein", eis_s, "fit the Eisenstein constant term at this s (classical, ≥ 2.2)");
  spectral->add_option("--log-derivative", lp_conductors, "conductors as x,y;x,y;... for the log-derivative table");
  spectral->add_option("--t-grid", t_grid, "t values for the log-derivative table");

  std::string config_path;
  std::vector<std::string> sets;
  std::string csv_out, json_out, svg_out, cache_dir, s_field, s_weight, s_flavor;
  long max_norm = 0;
  int threads = 0;
  auto add_config_opts = [&](CLI::App* sub) {
    sub->add_option("--config,-c", config_path, "JSON configuration file");
    sub->add_option("--set", sets, "override key=value (repeatable)");
    sub->add_option("--field,-d", s_field, "field override");
    sub->add_option("--weight", s_weight, "weight override: trivial or n1,n2");
    sub->add_option("--flavor", s_flavor, "flavor override");
    sub->add_option("--max-norm", max_norm, "max_norm override");
    sub->add_option("--threads", threads, "threads override");
    sub->add_option("--cache-dir", cache_dir, "cache directory override");
  };
  auto* survey = app.add_subcommand("survey", "batch survey over a level sequence");
  add_config_opts(survey);
  survey->add_option("--csv", csv_out, "CSV output path");
  survey->add_option("--json", json_out, "JSON output path");
  survey->add_option("--svg", svg_out, "SVG output path");

  auto* verify_cmd = app.add_subcommand("verify", "run the verification suites; nonzero exit on failure");
  add_config_opts(verify_cmd);

  std::string emit_in, emit_format, emit_out;
  auto* emit_cmd = app.add_subcommand("emit", "re-emit a JSON survey table as csv, json or svg");
  emit_cmd->add_option("--input", emit_in, "survey table JSON")->required();
  emit_cmd->add_option("--format", emit_format, "csv | json | svg")->required();
  emit_cmd->add_option("--out", emit_out, "output path")->required();

  CLI11_PARSE(app, argc, argv);

  auto build_config = [&]() {
    SurveyConfig cfg = config_path.empty() ? SurveyConfig{} : load_config(config_path);
    std::vector<std::string> ov;
    if (!s_field.empty()) ov.push_back("field=" + s_field);
    if (!s_weight.empty()) ov.push_back("weight=" + s_weight);
    if (!s_flavor.empty()) ov.push_back("flavor=" + s_flavor);
    if (max_norm > 0) ov.push_back("max_norm=" + std::to_string(max_norm));
    if (threads > 0) ov.push_back("threads=" + std::to_string(threads));
    if (!cache_dir.empty()) ov.push_back("cache_dir=" + cache_dir);
    if (!csv_out.empty()) ov.push_back("csv=" + csv_out);
    if (!json_out.empty()) ov.push_back("json=" + json_out);
    if (!svg_out.empty()) ov.push_back("svg=" + svg_out);
    ov.insert(ov.end(), sets.begin(), sets.end());
    return ov.empty() ? cfg : apply_overrides(cfg, ov);
  };

  try {
    if (*field_info) {
      QuadraticField F(d);
      json units = json::array();
      for (const auto& u : F.units()) units.push_back(F.to_string(u));
      auto z2 = dedekind_zeta(F, 2.0, 100000);
      json out{{"d", F.d()},
               {"discriminant", F.disc()},
               {"omega_relation", "w^2 = " + std::to_string(F.p()) + "w + " + std::to_string(F.q())},
               {"units", units},
               {"class_number", class_number(F)},
               {"euclidean", F.euclidean()},
               {"zeta_F(2)", z2.value.real()},
               {"covolume", covolume(F)}};
      std::cout << out.dump(2) << "\n";
    } else if (*subgroup) {
      QuadraticField F(d);
      LevelStructure L{parse_level_ideal(F, ideal, gen), parse_flavor(flavor)};
      auto tf = is_torsion_free(F, L);
      json out{{"level", ideal_to_string(L.ideal) + ":" + flavor_name(L.flavor)},
               {"norm", L.ideal.norm()},
               {"index_sl2", subgroup_index(F, L, std::numeric_limits<long>::max()).get_str()},
               {"contains_minus_identity", level_contains_minus_identity(F, L)},
               {"index_level_bound", check_index_level(F, L)},
               {"torsion_status", torsion_status_name(tf.status)},
               {"torsion_reason", tf.reason}};
      if (L.ideal.norm() <= 2000) {
        auto Q = sl2_quotient(F, L.ideal, presentation(F).images);
        out["quotient_order"] = Q.order.get_str();
        out["quotient_formula_order"] = Q.formula_order.get_str();
        out["generators_surject"] = Q.generated;
      }
      std::cout << out.dump(2) << "\n";
    } else if (*homology) {
      QuadraticField F(d);
      LevelStructure L{parse_level_ideal(F, ideal, gen), parse_flavor(flavor)};
      auto M = parse_module(F, weight);
      HomologyOptions opt;
      opt.via_rewriting = rewriting;
      auto ch = congruence_homology(F, L, M, opt);
      json out{{"level", ideal_to_string(L.ideal) + ":" + flavor_name(L.flavor)},
               {"weight", M.is_trivial_z() ? "trivial-Z" : M.weight().to_string()},
               {"index", ch.table.index},
               {"projective_table", ch.table.projective},
               {"method", ch.homology.method},
               {"cells", {ch.homology.c0, ch.homology.c1, ch.homology.c2}},
               {"H0", report_json(ch.homology.h0)},
               {"H1", report_json(ch.homology.h1)}};
      std::cout << out.dump(2) << "\n";
    } else if (*cusps) {
      QuadraticField F(d);
      json out;
      if (!closure.empty()) {
        auto v = split_longs(closure);
        if (v.size() != 2) throw std::invalid_argument("--closure expects p,degree");
        out["closure"] = to_json(unipotent_closure_check(v[0], int(v[1])));
      }
      if (local_p > 0) {
        if (local_k > 0)
          out["local"] = to_json(local_cusp_analysis(F, local_p, local_k, parse_flavor(flavor)));
        else
          out["local"] = to_json(local_cusp_analysis(F, local_p, {parse_level_ideal(F, ideal, gen), parse_flavor(flavor)}));
      }
      if (closure.empty() && local_p == 0)
        out["cusps"] = to_json(cusp_report(F, {parse_level_ideal(F, ideal, gen), parse_flavor(flavor)}, alpha));
      std::cout << out.dump(2) << "\n";
    } else if (*spectral) {
      QuadraticField F(d);
      json out;
      if (!scattering_s.empty()) {
        std::stringstream ss(scattering_s);
        double re = 0, im = 0;
        char comma;
        ss >> re;
        if (ss >> comma) ss >> im;
        out["scattering"] = to_json(global_scattering(F, trivial_character(F), cplx(re, im)));
      }
      if (eis_s > 0) {
        auto fit = eisenstein_constant_term_fit(F, eis_s);
        out["eisenstein"] = {{"s", fit.s},
                             {"A", fit.A},
                             {"B", fit.B},
                             {"ratio", fit.ratio},
                             {"closed_form", fit.closed_form},
                             {"zeta_F(s)", fit.zeta_s},
                             {"fit_residual", fit.fit_residual},
                             {"tail_bound", fit.tail_bound}};
      }
      if (!lp_conductors.empty()) {
        std::vector<IdealLattice> fs;
        std::stringstream ss(lp_conductors);
        std::string part;
        while (std::getline(ss, part, ';')) fs.push_back(parse_level_ideal(F, "", part));
        std::vector<double> ts;
        std::stringstream st(t_grid);
        while (std::getline(st, part, ',')) ts.push_back(std::stod(part));
        std::cout << log_derivative_csv(log_derivative_experiment(F, fs, ts));
      }
      if (!out.is_null()) std::cout << out.dump(2) << "\n";
    } else if (*survey) {
      SurveyConfig cfg = build_config();
      auto t = run_survey(cfg);
      if (!cfg.csv.empty()) emit(t, "csv", cfg.csv);
      if (!cfg.json.empty()) emit(t, "json", cfg.json);
      if (!cfg.svg.empty()) emit(t, "svg", cfg.svg);
      if (cfg.csv.empty() && cfg.json.empty() && cfg.svg.empty()) std::cout << table_to_csv(t);
      long failed = 0;
      for (const auto& r : t.rows) failed += r.status != "ok";
      std::cerr << "rows " << t.rows.size() << ", computed " << t.computed << ", cache hits " << t.cache_hits
                << ", failed " << failed << ", target " << (t.target.value ? std::to_string(*t.target.value) : "none")
                << " (" << t.target.provenance << "; report only)\n";
      for (const auto& r : t.rows)
        if (r.status != "ok") std::cerr << "  " << r.level << ": " << r.status << "\n";
    } else if (*verify_cmd) {
      SurveyConfig cfg = build_config();
      auto rep = verify(cfg);
      for (const auto& s : rep.suites)
        std::cout << (s.pass ? "PASS " : (s.budget_exhausted ? "BUDGET " : "FAIL ")) << s.name << ": " << s.detail
                  << "\n";
      bool failed = std::any_of(rep.suites.begin(), rep.suites.end(),
                                [](const SuiteResult& s) { return !s.pass && !s.budget_exhausted; });
      if (failed) return 1;
      return rep.budget_exhausted() ? 2 : 0;
    } else if (*emit_cmd) {
      std::ifstream is(emit_in);
      if (!is) throw std::runtime_error("cannot read " + emit_in);
      json j;
      is >> j;
      emit(table_from_json(j), emit_format, emit_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
