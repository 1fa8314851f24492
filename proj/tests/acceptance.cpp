#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>

#include "bianchi/cusps.hpp"
#include "bianchi/homology.hpp"
#include "bianchi/spectral.hpp"
#include "bianchi/survey.hpp"
#include "oracles.hpp"

using namespace bianchi;
namespace fs = std::filesystem;

namespace {

const long kFields[] = {-1, -2, -3, -7, -11};

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << x;
  return os.str();
}

SparseIntMatrix from_longs(const std::vector<std::vector<long>>& A) {
  long m = long(A.size()), n = m ? long(A[0].size()) : 0;
  SparseIntMatrix M(m, n);
  for (long i = 0; i < m; ++i)
    for (long j = 0; j < n; ++j)
      if (A[i][j]) M.add(i, j, int64_t(A[i][j]));
  M.finalize();
  return M;
}

Outcome snf_oracle() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(20240611);
  long mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    int m = 1 + int(rng() % 8), n = 1 + int(rng() % 8);
    std::vector<std::vector<long>> A(m, std::vector<long>(n));
    for (auto& row : A)
      for (auto& x : row) x = long(rng() % 19) - 9;
    if (smith_normal_form(from_longs(A)).invariant_factors != oracle::invariant_factors_by_minors(A)) ++mismatches;
  }
  long sparse_ok = 0;
  for (int trial = 0; trial < 20; ++trial) {
    SparseIntMatrix M(200, 200);
    for (long i = 0; i < 200; ++i)
      for (long j = 0; j < 200; ++j)
        if (rng() % 50 == 0) {
          int64_t v = 1 + int64_t(rng() % 5);
          M.add(i, j, rng() % 2 ? v : -v);
        }
    M.finalize();
    auto r = smith_normal_form(M);
    modular_double_check(M, r, 77 + trial);
    ++sparse_ok;
  }
  double secs = seconds_since(t0);
  return {mismatches == 0 && sparse_ok == 20 && secs < 60,
          "500 small: " + std::to_string(mismatches) + " mismatches; 20 sparse 200x200 double-checked; " +
              fmt(secs) + " s"};
}

Outcome group_orders() {
  long ideals = 0, bad = 0, skipped = 0;
  for (long d : {-1L, -3L}) {
    QuadraticField F(d);
    for (const auto& I : ideals_up_to_norm(F, 200)) {
      if (I.norm() == 1) continue;
      auto q = sl2_quotient(F, I, {}, 10000, 20000000);
      ++ideals;
      if (!q.fully_enumerated) ++skipped;
      if (q.order != sl2_order_formula(F, I) || !q.generated) ++bad;
    }
  }
  return {bad == 0 && skipped == 0, std::to_string(ideals) + " ideals of norm <= 200 in Q(i), Q(sqrt-3); " +
                                        std::to_string(bad) + " mismatches, " + std::to_string(skipped) +
                                        " not enumerated"};
}

Outcome index_level() {
  long n = 0, bad = 0;
  for (long d : kFields) {
    QuadraticField F(d);
    for (const auto& L : standard_levels(F, 500)) {
      ++n;
      if (!check_index_level(F, L)) ++bad;
    }
  }
  return {bad == 0, std::to_string(n) + " standard levels of norm <= 500 over 5 fields; " + std::to_string(bad) +
                        " violations"};
}

Outcome presentation_sanity() {
  long relators = 0, ideals = 0, bad = 0;
  for (long d : kFields) {
    QuadraticField F(d);
    auto P = presentation(F);
    auto r = verify_presentation(F, P);
    relators += long(P.relators.size());
    if (!r.pass) ++bad;
    for (const auto& I : ideals_up_to_norm(F, 50)) {
      if (I.norm() == 1) continue;
      ++ideals;
      if (!sl2_quotient(F, I, P.images).generated) ++bad;
    }
  }
  return {bad == 0, std::to_string(relators) + " relators over 5 fields, surjection checked for " +
                        std::to_string(ideals) + " ideals of norm <= 50; " + std::to_string(bad) + " failures"};
}

Outcome homology_cross_check() {
  QuadraticField F(-1);
  auto Z = IntegralModule::trivial_z(F);
  long n = 0, bad = 0;
  std::ostringstream os;
  for (const auto& I : ideals_up_to_norm(F, 20)) {
    LevelStructure lvl{I, Flavor::Principal};
    auto P = presentation_for_level(F, lvl, Z, true);
    auto Q = rewrite_subgroup(F, P, coset_table(F, P, lvl));
    auto fox = group_homology(Q, Z).h1;
    auto ab = abelianization(Q);
    auto induced = congruence_homology(F, lvl, Z).homology.h1;
    ++n;
    if (fox.free_rank != ab.free_rank || fox.elementary_divisors != ab.torsion ||
        induced.free_rank != ab.free_rank || induced.elementary_divisors != ab.torsion) {
      ++bad;
      os << " " << ideal_to_string(I);
    }
  }
  return {bad == 0, std::to_string(n) + " principal levels of norm <= 20; " + std::to_string(bad) + " mismatches" +
                        os.str()};
}

Outcome degree_zero_bound() {
  QuadraticField F(-1);
  IntegralModule M(F, {2, 0});
  BigInt N = binomial_constant({2, 0});
  long n = 0, bad = 0;
  double worst = 0;
  for (const auto& I : ideals_up_to_norm(F, 50)) {
    auto h0 = level_coinvariants(F, {I, Flavor::Principal}, M);
    BigInt bound = 1;
    for (int i = 0; i < M.rank(); ++i) bound *= N * I.norm();
    ++n;
    if (h0.free_rank != 0 || h0.torsion_order > bound) ++bad;
    worst = std::max(worst, std::log(h0.torsion_order.get_d()) / std::log(bound.get_d()));
  }
  return {bad == 0, std::to_string(n) + " principal levels of norm <= 50, N = " + N.get_str() + "; " +
                        std::to_string(bad) + " violations; max log|H0|/log bound = " + fmt(worst)};
}

Outcome torus_complex_bound() {
  QuadraticField F(-1);
  auto Z = IntegralModule::trivial_z(F);
  IntegralModule V(F, {2, 0});
  BigInt N = binomial_constant({2, 0});
  long n = 0, bad_trivial = 0, bad_bound = 0;
  for (long index = 1; index <= 100; ++index)
    for (long a = 1; a <= index; ++a) {
      if (index % a) continue;
      long c = index / a;
      for (long b = 0; b < c; ++b) {
        // sublattice with basis a and b + c·i
        Mat2 u1{FieldElement(1), FieldElement(a), FieldElement(0), FieldElement(1)};
        Mat2 u2{FieldElement(1), FieldElement(b, c), FieldElement(0), FieldElement(1)};
        ++n;
        auto t = torus_homology(Z, u1, u2);
        if (t[0].group_string() != "Z" || t[1].group_string() != "Z^2" || t[2].group_string() != "Z") ++bad_trivial;
        auto h = torus_homology(V, u1, u2);
        BigInt bound = 1;
        for (int i = 0; i < V.rank(); ++i) bound *= N * index;
        if (h[0].torsion_order > bound) ++bad_bound;
      }
    }
  return {bad_trivial == 0 && bad_bound == 0,
          std::to_string(n) + " sublattices of index <= 100; trivial-coefficient mismatches " +
              std::to_string(bad_trivial) + ", bound violations " + std::to_string(bad_bound)};
}

Outcome local_dl() {
  QuadraticField F(-1);
  bool ok = true;
  std::ostringstream os;
  for (auto [p, k] : std::vector<std::pair<long, int>>{{3, 2}, {5, 2}})
    for (Flavor f : {Flavor::Principal, Flavor::Hecke, Flavor::Semi}) {
      auto a = local_cusp_analysis(F, p, k, f);
      ok = ok && a.dl_estimate_holds;
      os << "(" << p << "," << k << "," << flavor_name(f) << ") d_0=" << a.d_l[0] << "/" << fmt(a.d_l_bound[0])
         << "; ";
    }
  return {ok, "Q(i): " + os.str()};
}

Outcome unipotent_closures() {
  auto t0 = Clock::now();
  bool ok = true;
  std::ostringstream os;
  for (auto [p, deg] : std::vector<std::pair<long, int>>{{5, 1}, {7, 1}, {3, 2}}) {
    auto r = unipotent_closure_check(p, deg);
    ok = ok && r.pass;
    os << "F_" << (deg == 1 ? p : p * p) << ": full " << r.full << ", subfield " << r.subfield_type << ", other "
       << r.other << "; ";
  }
  double secs = seconds_since(t0);
  os << fmt(secs) << " s";
  if (!ok) os << " (F_9 pairs close to 2.A5 subgroups of order 120)";
  return {ok && secs < 120, os.str()};
}

Outcome unitarity() {
  QuadraticField F(-1);
  double worst = 0;
  for (double t : {0.5, 1.0, 2.0, 5.0})
    worst = std::max(worst, std::abs(std::abs(global_scattering(F, trivial_character(F), cplx(0.5, t)).value) - 1.0));
  return {worst < 1e-6, "max ||c(1/2+it)| - 1| = " + fmt(worst)};
}

Outcome maass_selberg_degeneration() {
  auto sc = synthetic_scattering(1.0);
  const double s = 0.8, Y = 2.0, delta = 1e-4;
  cplx nd = maass_selberg(sc, 1.0, s, s + delta, Y);
  double d_real = std::abs(nd - maass_selberg_real(sc, 1.0, s, Y));
  double d_limit = std::abs(nd - maass_selberg_limit(sc, 1.0, s, Y));
  return {d_real < 1e-6, "|nondegenerate - real form| = " + fmt(d_real) + "; against the s'->s limit " +
                             fmt(d_limit) + " (first order in |s - s'|)"};
}

Outcome eisenstein_two_methods() {
  auto t0 = Clock::now();
  QuadraticField F(-1);
  auto fit = eisenstein_constant_term_fit(F, 2.5);
  double secs = seconds_since(t0);
  double rel = std::abs(fit.ratio - fit.closed_form) / std::abs(fit.closed_form);
  return {rel < 1e-4 && secs < 30, "fitted ratio " + fmt(fit.ratio, 10) + ", closed form " +
                                       fmt(fit.closed_form, 10) + ", rel. diff " + fmt(rel) + ", " + fmt(secs) + " s"};
}

Outcome regularized_trace() {
  const double t = 1.0, d0 = 2.0, lambda_v = 0.5;
  SyntheticSpectrum spec;
  spec.discrete = {{0.25, 1}, {3.0, 2}};
  spec.weights = {{0, d0}};
  spec.lambda_v = lambda_v;
  spec.psi = [](int, double u) { return std::exp(cplx(0, std::atan(u))); };
  spec.dpsi = [](int, double u) { return cplx(0, 1) / (1 + u * u) * std::exp(cplx(0, std::atan(u))); };
  auto phi = [&](double x) { return std::exp(t * (x - 4.0 - lambda_v)); };
  auto tv = regularized_trace_eval(spec, phi);
  cplx expect = phi(0.25) + 2 * phi(3.0) + 0.25 * d0 - cplx(0, 0.5) * std::exp(t) * std::erfc(std::sqrt(t)) * d0;
  double err = std::abs(tv.value - expect);

  SyntheticSpectrum plain;
  plain.discrete = spec.discrete;
  auto tp = regularized_trace_eval(plain, phi);
  bool exact = tp.value == cplx(phi(0.25) + 2 * phi(3.0), 0);
  return {err < 1e-6 && exact, "|trace - closed form| = " + fmt(err) + "; plain trace exact: " +
                                   std::string(exact ? "yes" : "no")};
}

Outcome growth_trend(const fs::path& work) {
  SurveyConfig cfg;
  cfg.d = -1;
  cfg.trivial_weight = false;
  cfg.weight = {2, 0};
  cfg.levels = "primes";
  cfg.max_norm = 60;
  cfg.cache_dir = (work / "growth-cache").string();
  auto t = run_survey(cfg);
  long ok = 0, positive = 0;
  long max_ok_norm = 0;
  for (const auto& r : t.rows)
    if (r.status == "ok") {
      ++ok;
      max_ok_norm = std::max(max_ok_norm, r.level_norm);
      positive += r.log_torsion_over_vol > 0;
    }
  bool svg_ok = false, target_line = false;
  try {
    auto svg = table_to_svg(t);
    svg_ok = true;
    target_line = svg.find("class=\"target\"") != std::string::npos;
  } catch (const std::exception&) {
  }
  std::ostringstream os;
  os << t.rows.size() << " prime levels of norm <= 60, " << ok << " within budget (norm <= " << max_ok_norm << "), "
     << positive << " positive; svg " << (svg_ok ? "rendered" : "failed") << ", target line "
     << (target_line ? "present" : "absent (" + t.target.provenance + ")") << "; report only";
  return {ok == long(t.rows.size()) && positive == ok && svg_ok && target_line, os.str()};
}

Outcome determinism(const fs::path& work) {
  SurveyConfig cfg;
  cfg.d = -1;
  cfg.levels = "primes";
  cfg.max_norm = 20;
  cfg.cache_dir = (work / "det-a").string();
  auto a = table_to_csv(run_survey(cfg));
  cfg.cache_dir = (work / "det-b").string();
  auto b = table_to_csv(run_survey(cfg));
  long lines = std::count(a.begin(), a.end(), '\n');
  return {a == b, "trivial weight, prime levels of norm <= 20: " + std::to_string(lines - 1) + " rows, " +
                      (a == b ? "byte-identical" : "different")};
}

}  // namespace

int main() {
  fs::path work = fs::temp_directory_path() / ("bianchi-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(work);
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"SNF oracle equivalence", snf_oracle},
      {"group-order formula", group_orders},
      {"index lower bound", index_level},
      {"presentation sanity", presentation_sanity},
      {"homology cross-check", homology_cross_check},
      {"degree-zero coinvariant bound", degree_zero_bound},
      {"torus complex", torus_complex_bound},
      {"local d_l estimate", local_dl},
      {"unipotent pair closures", unipotent_closures},
      {"scattering unitarity", unitarity},
      {"Maass-Selberg degeneration", maass_selberg_degeneration},
      {"Eisenstein two-method check", eisenstein_two_methods},
      {"regularized trace evaluator", regularized_trace},
      {"growth trend (report only)", [&] { return growth_trend(work); }},
      {"determinism", [&] { return determinism(work); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::error_code ec;
  fs::remove_all(work, ec);
  std::printf("%d of %zu criteria pass\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
