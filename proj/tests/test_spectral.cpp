#include <cmath>

#include "bianchi/spectral.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bianchi;

namespace {

constexpr double kPiT = 3.14159265358979323846;

// 2·ζ_F′/ζ_F(w) by a central difference of the factored zeta oracle
cplx zeta_log_derivative(long D, cplx w) {
  const double h = 1e-5;
  return 2.0 * (oracle::dedekind_zeta_factored(D, w + h) - oracle::dedekind_zeta_factored(D, w - h)) /
         (2.0 * h * oracle::dedekind_zeta_factored(D, w));
}

}  // namespace

TEST_CASE("unramified local factor matches its geometric series") {
  CHECK(local_unramified_factor(9, 1.0, 1.0).real() == doctest::Approx(10.0 / 9.0).epsilon(1e-14));
  CHECK(std::abs(local_unramified_series(9, 1.0, 1.0) - 10.0 / 9.0) < 1e-12);
  for (auto [q, chi, s] : std::vector<std::tuple<double, cplx, cplx>>{{5, {0, 1}, {0.9, 0.3}},
                                                                     {4, {-1, 0}, {1.2, -2.0}},
                                                                     {49, std::polar(1.0, 0.7), {0.75, 5.0}}}) {
    CHECK(std::abs(local_unramified_factor(q, chi, s) - local_unramified_series(q, chi, s)) < 1e-10);
  }
}

TEST_CASE("ramified local norms") {
  CHECK(ramified_local_norm(9, 1) == doctest::Approx(1.0 / 9.0));
  CHECK(ramified_local_norm(2, 4) == doctest::Approx(1.0 / 16.0));
  CHECK_THROWS_AS(ramified_local_norm(9, 0), std::invalid_argument);
}

TEST_CASE("archimedean factor") {
  CHECK(std::abs(archimedean_factor(1.0) - kPiT) < 1e-13);
  CHECK(std::abs(archimedean_factor(1.5) - kPiT / 2) < 1e-13);
  CHECK_THROWS_AS(archimedean_factor(0.5), std::domain_error);
  for (cplx s : {cplx(0.8, 0.0), cplx(0.5, 3.0), cplx(1.7, -0.4)}) {
    const double h = 1e-6;
    cplx fd = (archimedean_factor(s + h) - archimedean_factor(s - h)) / (2 * h);
    CHECK(std::abs(archimedean_factor_derivative(s) - fd) < 1e-7);
  }
}

TEST_CASE("scattering factor is unitary on the critical line") {
  for (long d : {-1L, -2L, -3L, -7L}) {
    QuadraticField F(d);
    auto chi = trivial_character(F);
    for (double t : {0.25, 1.0, 3.5, 5.0}) {
      auto c = global_scattering(F, chi, cplx(0.5, t));
      CHECK(std::abs(std::abs(c.value) - 1.0) < 1e-10);
      auto c2 = global_scattering(F, chi, cplx(0.5, -t));
      CHECK(std::abs(c.value * c2.value - 1.0) < 1e-10);
    }
    cplx s(0.8, 1.3);
    CHECK(std::abs(global_scattering(F, chi, s).value * global_scattering(F, chi, 1.0 - s).value - 1.0) < 1e-9);
  }
}

TEST_CASE("classical scattering matches the factored zeta oracle") {
  for (long d : {-1L, -2L, -3L, -7L}) {
    QuadraticField F(d);
    long D = F.disc();
    for (double sigma : {2.5, 3.0}) {
      cplx oracle = 2.0 / std::sqrt(double(-D)) * kPiT / (sigma - 1.0) * oracle::dedekind_zeta_factored(D, sigma - 1.0) /
                    oracle::dedekind_zeta_factored(D, sigma);
      CHECK(std::abs(classical_scattering(F, sigma) - oracle) < 1e-9 * std::abs(oracle));
    }
  }
}

TEST_CASE("Eisenstein constant term fit recovers zeta and the scattering coefficient") {
  for (long d : {-1L, -2L, -3L, -7L}) {
    QuadraticField F(d);
    EisensteinOptions o;
    o.grid = 8;
    auto fit = eisenstein_constant_term_fit(F, 2.5, o);
    CHECK(fit.A == doctest::Approx(oracle::dedekind_zeta_factored(F.disc(), 2.5).real()).epsilon(1e-8));
    CHECK(fit.ratio == doctest::Approx(fit.closed_form).epsilon(1e-8));
    CHECK(fit.tail_bound <= o.tolerance);
  }
}

TEST_CASE("Eisenstein fit is independent of the torus grid") {
  QuadraticField F(-1);
  EisensteinOptions a, b;
  a.grid = 8;
  b.grid = 12;
  auto fa = eisenstein_constant_term_fit(F, 3.0, a);
  auto fb = eisenstein_constant_term_fit(F, 3.0, b);
  CHECK(std::abs(fa.ratio - fb.ratio) < 1e-6);
  CHECK(std::abs(fa.A - fb.A) < 1e-6);
}

TEST_CASE("Eisenstein series is translation invariant and dominated by its constant term high in the cusp") {
  QuadraticField F(-1);
  cplx z(0.3, 0.2);
  auto v1 = eisenstein_lattice_sum(F, 2.5, z, 1.3);
  auto v2 = eisenstein_lattice_sum(F, 2.5, z + cplx(0, 1), 1.3);
  auto v3 = eisenstein_lattice_sum(F, 2.5, z * cplx(0, 1), 1.3);
  CHECK(v1.value == doctest::Approx(v2.value).epsilon(1e-12));
  CHECK(v1.value == doctest::Approx(v3.value).epsilon(1e-12));
  EisensteinOptions o;
  o.grid = 8;
  auto fit = eisenstein_constant_term_fit(F, 2.5, o);
  double r = 3.0;
  auto v = eisenstein_lattice_sum(F, 2.5, z, r);
  CHECK(v.value == doctest::Approx(fit.A * std::pow(r, 2.5) + fit.B * std::pow(r, -0.5)).epsilon(1e-8));
}

TEST_CASE("Maass-Selberg relations for a synthetic scattering function") {
  auto sc = synthetic_scattering(1.0);
  for (double t : {0.3, 2.0}) CHECK(std::abs(std::abs(sc.c(cplx(0.5, t))) - 1.0) < 1e-14);
  cplx s(0.9, 0.4), s2(0.7, -1.1);
  cplx a = maass_selberg(sc, 1.0, s, s2, 2.0);
  cplx b = maass_selberg(sc, 1.0, s2, s, 2.0);
  CHECK(std::abs(a - std::conj(b)) < 1e-12);
  cplx n = maass_selberg(sc, 1.0, s, s, 2.0);
  CHECK(std::abs(n.imag()) < 1e-12);
  CHECK(n.real() > 0);
  CHECK_THROWS_AS(maass_selberg(sc, 1.0, cplx(0.5, 1), cplx(0.5, 1), 2.0), std::domain_error);
}

TEST_CASE("Maass-Selberg real form: Y-derivative and the s' -> s limit") {
  auto sc = synthetic_scattering(1.0);
  for (double s : {0.7, 0.8, 1.3}) {
    for (double Y : {1.5, 2.0, 4.0}) {
      const double h = 1e-6;
      cplx fd = (maass_selberg_real(sc, 1.0, s, Y + h) - maass_selberg_real(sc, 1.0, s, Y - h)) / (2 * h);
      CHECK(std::abs(fd - maass_selberg_real_dY(sc, 1.0, s, Y)) < 1e-6);
      cplx near = maass_selberg(sc, 1.0, s, s + 1e-7, Y);
      CHECK(std::abs(near - maass_selberg_limit(sc, 1.0, s, Y)) < 1e-4);
    }
  }
  CHECK(std::abs(maass_selberg(sc, 1.0, 0.8, 0.8, 2.0) - maass_selberg_limit(sc, 1.0, 0.8, 2.0)) < 1e-14);
}

TEST_CASE("regularized trace against a closed-form integral") {
  const double t = 1.0, d0 = 3.0, lambda_v = 0.5;
  SyntheticSpectrum spec;
  spec.discrete = {{0.25, 1}, {2.0, 2}};
  spec.weights = {{0, d0}};
  spec.lambda_v = lambda_v;
  spec.psi = [](int, double u) { return std::exp(cplx(0, std::atan(u))); };
  spec.dpsi = [](int, double u) { return cplx(0, 1) / (1 + u * u) * std::exp(cplx(0, std::atan(u))); };
  const double x0 = 4.0 + lambda_v;
  auto phi = [&](double x) { return std::exp(t * (x - x0)); };
  auto tv = regularized_trace_eval(spec, phi);
  cplx integral = -cplx(0, 0.5) * std::exp(t) * std::erfc(std::sqrt(t)) * d0;
  CHECK(std::abs(tv.integral - integral) < 1e-10);
  CHECK(std::abs(tv.residual - 0.25 * d0) < 1e-14);
  CHECK(std::abs(tv.discrete - (phi(0.25) + 2 * phi(2.0))) < 1e-14);
  CHECK(tv.tail_estimate <= 1e-10);

  auto phi2 = [&](double x) { return std::exp(2 * t * (x - x0)); };
  auto sum = regularized_trace_eval(spec, [&](double x) { return phi(x) + phi2(x); });
  auto tv2 = regularized_trace_eval(spec, phi2);
  CHECK(std::abs(sum.value - tv.value - tv2.value) < 1e-10);
}

TEST_CASE("regularized trace without scattering is the plain trace") {
  SyntheticSpectrum spec;
  spec.discrete = {{1.0, 3}, {5.0, 1}};
  auto tv = regularized_trace_eval(spec, [](double x) { return std::exp(-x); });
  CHECK(std::abs(tv.value - (3 * std::exp(-1.0) + std::exp(-5.0))) < 1e-15);
  spec.discrete.push_back({-1.0, 1});
  CHECK_THROWS_AS(regularized_trace_eval(spec, [](double x) { return x; }), std::invalid_argument);
}

TEST_CASE("regularized trace refuses a slowly decaying test function") {
  SyntheticSpectrum spec;
  spec.weights = {{0, 1.0}};
  spec.psi = [](int, double u) { return std::exp(cplx(0, std::atan(u))); };
  spec.dpsi = [](int, double u) { return cplx(0, 1) / (1 + u * u) * std::exp(cplx(0, std::atan(u))); };
  CHECK_THROWS_AS(regularized_trace_eval(spec, [](double) { return 1.0; }), std::runtime_error);
}

TEST_CASE("Hecke characters modulo 7 over Q(i)") {
  QuadraticField F(-1);
  auto chars = characters_mod(F, principal_ideal(F, FieldElement(7, 0)));
  REQUIRE(chars.size() == 12);
  CHECK(chars[0].is_trivial());
  long primitive = 0;
  for (const auto& c : chars) {
    CHECK(character_is_consistent(F, c));
    primitive += c.primitive;
  }
  CHECK(primitive == 11);
  CHECK(std::abs(character_at(F, chars[3], FieldElement(0, 1)) - 1.0) < 1e-14);
  auto one = characters_mod(F, principal_ideal(F, FieldElement(2, 1)));
  CHECK(one.size() == 1);
}

TEST_CASE("log-derivative proxy for the trivial character matches the Dedekind zeta oracle") {
  for (long d : {-1L, -3L}) {
    QuadraticField F(d);
    for (double t : {0.0, 1.0, 4.0}) {
      double proxy = log_derivative_proxy(F, trivial_character(F), t, 0.5, 20000);
      double oracle = std::abs(zeta_log_derivative(F.disc(), cplx(1.5, 2 * t)));
      CHECK(proxy == doctest::Approx(oracle).epsilon(2e-2));
    }
  }
}

TEST_CASE("log-derivative CSV carries the non-rigorous marker") {
  QuadraticField F(-1);
  auto rows = log_derivative_experiment(F, {principal_ideal(F, FieldElement(2, 1))}, {0.0, 1.0}, {0.5, 2000});
  REQUIRE(rows.size() == 2);
  CHECK(std::abs(rows[0].value - rows[0].doubled_cutoff_value) < 0.1);
  auto csv = log_derivative_csv(rows);
  CHECK(csv.rfind("# non-rigorous", 0) == 0);
  CHECK(csv.find("conductor_norm,t,value,reference_curve\n") != std::string::npos);
}
