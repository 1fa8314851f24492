#include <cmath>

#include "bianchi/cusps.hpp"
#include "doctest.h"

using namespace bianchi;

namespace {

constexpr double kCatalan = 0.915965594177219015054603514932384110774;

LevelStructure level(const QuadraticField& F, long x, long y, Flavor f) {
  return {principal_ideal(F, FieldElement(x, y)), f};
}

// successive minima by exhaustive search over small coefficient vectors
std::pair<double, double> brute_minima(cplx u, cplx v) {
  double m1 = 1e300;
  cplx best;
  for (long a = -40; a <= 40; ++a)
    for (long b = -40; b <= 40; ++b) {
      if (a == 0 && b == 0) continue;
      cplx w = double(a) * u + double(b) * v;
      if (std::abs(w) < m1 - 1e-12) m1 = std::abs(w), best = w;
    }
  double m2 = 1e300;
  for (long a = -40; a <= 40; ++a)
    for (long b = -40; b <= 40; ++b) {
      cplx w = double(a) * u + double(b) * v;
      if (std::abs(w.real() * best.imag() - w.imag() * best.real()) < 1e-9) continue;
      m2 = std::min(m2, std::abs(w));
    }
  return {m1, m2};
}

}  // namespace

TEST_CASE("cusp counts of small Gaussian levels") {
  QuadraticField F(-1);
  struct Case {
    long x, y;
    Flavor f;
    long h, index;
  };
  for (auto c : std::vector<Case>{{1, 0, Flavor::Principal, 1, 1},
                                  {3, 0, Flavor::Hecke, 2, 10},
                                  {3, 0, Flavor::Principal, 20, 360},
                                  {1, 1, Flavor::Principal, 3, 6},
                                  {2, 1, Flavor::Principal, 6, 60}}) {
    auto r = cusp_report(F, level(F, c.x, c.y, c.f));
    CHECK(r.h == c.h);
    CHECK(r.index == c.index);
  }
}

TEST_CASE("cusp lattices of the full level 3 subgroup are 3·Z[i]") {
  QuadraticField F(-1);
  auto r = cusp_report(F, level(F, 3, 0, Flavor::Principal));
  REQUIRE(r.alphas.size() == 20);
  for (auto [a1, a2] : r.alphas) {
    CHECK(a1 == doctest::Approx(3.0));
    CHECK(a2 == doctest::Approx(3.0));
  }
  CHECK(r.sup_ratio == doctest::Approx(1.0));
}

TEST_CASE("level one volume matches the closed form for Q(i)") {
  QuadraticField F(-1);
  auto r = cusp_report(F, level(F, 1, 0, Flavor::Principal));
  CHECK(r.volume == doctest::Approx(kCatalan / 3).epsilon(1e-12));
  auto r3 = cusp_report(F, level(F, 3, 0, Flavor::Principal));
  CHECK(r3.volume == doctest::Approx(360 * kCatalan / 3).epsilon(1e-12));
}

TEST_CASE("lattice reduction agrees with brute-force successive minima") {
  const double s3 = std::sqrt(3.0);
  for (auto [u, v] : std::vector<std::pair<cplx, cplx>>{{{1, 0}, {0, 1}},
                                                       {{1, 0}, {30, 1}},
                                                       {{2, 0}, {1, s3}},
                                                       {{3, 1}, {7, 2.5}},
                                                       {{0.5, 0}, {17.25, 4}},
                                                       {{5, 0}, {2, 0.1}}}) {
    auto L = reduce_lattice(u, v);
    auto [m1, m2] = brute_minima(u, v);
    CHECK(L.alpha1 == doctest::Approx(m1).epsilon(1e-10));
    CHECK(L.alpha2 == doctest::Approx(m2).epsilon(1e-10));
    CHECK(L.ratio() >= 1.0);
  }
}

TEST_CASE("local double coset sum equals the rewritten sum over the projective line") {
  QuadraticField F(-1);
  for (auto [p, k, f] : std::vector<std::tuple<long, int, Flavor>>{{3, 1, Flavor::Hecke},
                                                                   {3, 2, Flavor::Principal},
                                                                   {3, 2, Flavor::Hecke},
                                                                   {3, 2, Flavor::Semi},
                                                                   {5, 2, Flavor::Hecke},
                                                                   {5, 2, Flavor::Semi}}) {
    auto a = local_cusp_analysis(F, p, k, f);
    CHECK(a.sp_direct == doctest::Approx(a.sp_formula).epsilon(1e-9));
    if (p == 3) CHECK(a.points == 10 * long(std::pow(9, k - 1)));
    if (p == 5) CHECK(a.points == 900);
    CHECK(a.generators_verified);
    CHECK(a.hypothesis);
  }
}

TEST_CASE("local d_l tables over Q(i)") {
  QuadraticField F(-1);
  auto a = local_cusp_analysis(F, 3, 2, Flavor::Hecke);
  CHECK(a.d_l == std::vector<long>{9, 0, 81});
  CHECK(a.double_cosets == 10);
  auto b = local_cusp_analysis(F, 3, 2, Flavor::Semi);
  CHECK(b.d_l == std::vector<long>{1, 8, 81});
  auto c = local_cusp_analysis(F, 3, 2, Flavor::Principal);
  CHECK(c.d_l == std::vector<long>{0, 0, 90});
  auto d = local_cusp_analysis(F, 5, 2, Flavor::Semi);
  CHECK(d.d_l == std::vector<long>{59, 216, 625});
  for (const auto* x : {&a, &b, &c, &d}) {
    long total = 0;
    for (long v : x->d_l) total += v;
    CHECK(total == x->points);
    CHECK(x->dl_estimate_holds);
  }
}

TEST_CASE("unit level fails the local hypothesis") {
  QuadraticField F(-1);
  auto a = local_cusp_analysis(F, 3, {unit_ideal(), Flavor::Principal}, 1);
  CHECK_FALSE(a.hypothesis);
  CHECK(a.double_cosets == 1);
}

TEST_CASE("unipotent pairs generate SL2 over prime fields") {
  for (long p : {5L, 7L}) {
    auto r = unipotent_closure_check(p, 1);
    CHECK(r.pass);
    CHECK(r.other == 0);
    CHECK(r.full == r.pairs);
    CHECK(r.unipotents == p * p - 1);
  }
}

TEST_CASE("unipotent pair closures over F_9 include proper subgroups") {
  auto r = unipotent_closure_check(3, 2);
  CHECK(r.group_order == 720);
  CHECK(r.unipotents == 80);
  CHECK(r.full + r.subfield_type + r.other == r.pairs);
  CHECK(r.other > 0);
  CHECK_FALSE(r.pass);
}

TEST_CASE("geodesic lifts in a normal level subgroup") {
  QuadraticField F(-1);
  auto P = psl_presentation(F);
  Mat2 g{FieldElement(2), FieldElement(1), FieldElement(1), FieldElement(1)};
  for (auto [x, y] : std::vector<std::pair<long, long>>{{3, 0}, {2, 1}}) {
    auto t = coset_table(F, P, level(F, x, y, Flavor::Principal));
    CHECK(count_geodesic_lifts(F, P, g, t) == 0);
    CHECK(count_geodesic_lifts(F, P, mat_identity(), t) == long(t.index));
  }
}
