#include "bianchi/spectral.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "bianchi/special_functions.hpp"

namespace bianchi {

namespace {

constexpr double kPi = std::numbers::pi;

long mod_pos(long x, long m) { return ((x % m) + m) % m; }

// the ideal f·P⁻¹ for a prime factor P of f
IdealLattice remove_prime(const QuadraticField& F, const std::vector<PrimeFactor>& factors, std::size_t which) {
  IdealLattice out = unit_ideal();
  for (std::size_t i = 0; i < factors.size(); ++i) {
    int e = factors[i].exponent - (i == which ? 1 : 0);
    if (e > 0) out = ideal_mul(F, out, ideal_pow(F, factors[i].prime, e));
  }
  return out;
}

}  // namespace

cplx HeckeCharacterSpec::value(uint32_t residue) const {
  if (residue >= angle.size() || angle[residue] < 0) return 0.0;
  return std::polar(1.0, 2.0 * kPi * double(angle[residue]) / double(den));
}

bool HeckeCharacterSpec::is_trivial() const {
  return std::all_of(angle.begin(), angle.end(), [](long a) { return a <= 0; });
}

HeckeCharacterSpec trivial_character(const QuadraticField&) {
  HeckeCharacterSpec chi;
  chi.conductor = unit_ideal();
  chi.angle = {0};
  chi.primitive = true;
  return chi;
}

std::vector<HeckeCharacterSpec> characters_mod(const QuadraticField& F, const IdealLattice& f) {
  if (f.norm() == 1) return {trivial_character(F)};
  if (f.norm() > 4000) throw std::invalid_argument("characters_mod: conductor norm above 4000");
  ResidueRing R(F, f);
  const uint32_t n = R.size();
  const auto& U = R.units();

  // subgroup chain H0 = image of O^× ⊂ H1 ⊂ ... ⊂ (O/f)^×
  std::vector<char> in_h(n, 0);
  std::vector<uint32_t> h{R.one()};
  in_h[R.one()] = 1;
  for (const auto& u : F.units()) {
    uint32_t g = R.reduce(u);
    for (std::size_t i = 0; i < h.size(); ++i) {
      uint32_t y = R.mul(h[i], g);
      if (!in_h[y]) {
        in_h[y] = 1;
        h.push_back(y);
      }
    }
  }
  const long den = long(U.size() / h.size());
  struct Step {
    uint32_t g;
    long e;
    uint32_t ge;
    std::vector<uint32_t> base;
  };
  std::vector<Step> steps;
  while (h.size() < U.size()) {
    uint32_t g = *std::find_if(U.begin(), U.end(), [&](uint32_t x) { return !in_h[x]; });
    long e = 1;
    uint32_t ge = g;
    while (!in_h[ge]) {
      ge = R.mul(ge, g);
      ++e;
    }
    Step st{g, e, ge, h};
    uint32_t gj = R.one();
    for (long j = 1; j < e; ++j) {
      gj = R.mul(gj, g);
      for (uint32_t x : st.base) {
        uint32_t y = R.mul(x, gj);
        in_h[y] = 1;
        h.push_back(y);
      }
    }
    steps.push_back(std::move(st));
  }

  std::vector<long> base_table(n, -1);
  {
    std::vector<char> h0(n, 0);
    std::vector<uint32_t> list{R.one()};
    h0[R.one()] = 1;
    for (const auto& u : F.units())
      for (std::size_t i = 0; i < list.size(); ++i) {
        uint32_t y = R.mul(list[i], R.reduce(u));
        if (!h0[y]) {
          h0[y] = 1;
          list.push_back(y);
        }
      }
    for (uint32_t x : list) base_table[x] = 0;
  }
  std::vector<std::vector<long>> tables{base_table};
  for (const auto& st : steps) {
    std::vector<std::vector<long>> next;
    for (const auto& T : tables) {
      long a = T[st.ge];
      for (long b = 0; b < den; ++b) {
        if (mod_pos(st.e * b - a, den) != 0) continue;
        std::vector<long> T2 = T;
        uint32_t gj = R.one();
        for (long j = 1; j < st.e; ++j) {
          gj = R.mul(gj, st.g);
          for (uint32_t x : st.base) T2[R.mul(x, gj)] = mod_pos(T[x] + j * b, den);
        }
        next.push_back(std::move(T2));
      }
    }
    tables = std::move(next);
  }
  if (long(tables.size()) != den) throw std::logic_error("characters_mod: wrong number of characters");

  const auto& factors = R.prime_factors();
  std::vector<std::vector<uint32_t>> one_mod_divisor;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    IdealLattice g = remove_prime(F, factors, i);
    std::vector<uint32_t> xs;
    for (uint32_t x : U) {
      FieldElement y = F.sub(R.lift(x), FieldElement(1));
      if (ideal_contains(g, y)) xs.push_back(x);
    }
    one_mod_divisor.push_back(std::move(xs));
  }
  std::vector<HeckeCharacterSpec> out;
  for (auto& T : tables) {
    HeckeCharacterSpec chi;
    chi.conductor = f;
    chi.den = den;
    chi.angle = std::move(T);
    chi.primitive = std::all_of(one_mod_divisor.begin(), one_mod_divisor.end(), [&](const auto& xs) {
      return std::any_of(xs.begin(), xs.end(), [&](uint32_t x) { return chi.angle[x] != 0; });
    });
    out.push_back(std::move(chi));
  }
  return out;
}

bool character_is_consistent(const QuadraticField& F, const HeckeCharacterSpec& chi) {
  if (chi.conductor.norm() == 1) return chi.angle.size() == 1 && chi.angle[0] == 0;
  ResidueRing R(F, chi.conductor);
  if (chi.angle.size() != R.size()) return false;
  for (uint32_t x = 0; x < R.size(); ++x)
    if ((chi.angle[x] >= 0) != R.is_unit(x)) return false;
  for (const auto& u : F.units())
    if (chi.angle[R.reduce(u)] != 0) return false;
  for (uint32_t x : R.units())
    for (uint32_t y : R.units())
      if (chi.angle[R.mul(x, y)] != mod_pos(chi.angle[x] + chi.angle[y], chi.den)) return false;
  return true;
}

cplx character_at(const QuadraticField& F, const HeckeCharacterSpec& chi, const FieldElement& x) {
  if (chi.conductor.norm() == 1) return x.is_zero() ? 0.0 : 1.0;
  ResidueRing R(F, chi.conductor);
  return chi.value(R.reduce(x));
}

cplx local_unramified_factor(double q, cplx chi_pi, cplx s) {
  if (!(q >= 2)) throw std::invalid_argument("local_unramified_factor: q must be at least 2");
  cplx den = 1.0 - chi_pi * std::pow(q, 1.0 - 2.0 * s);
  if (std::abs(den) < 1e-12) throw std::domain_error("local_unramified_factor: pole of the denominator");
  return (1.0 - chi_pi * std::pow(q, -2.0 * s)) / den;
}

cplx local_unramified_series(double q, cplx chi_pi, cplx s, int terms) {
  if (!(s.real() > 0.5)) throw std::domain_error("local_unramified_series: needs Re(s) > 1/2");
  cplx x = chi_pi * std::pow(q, 1.0 - 2.0 * s);
  cplx sum = 1.0, xl = 1.0;
  for (int l = 1; l <= terms; ++l) {
    xl *= x;
    sum += (1.0 - 1.0 / q) * xl;
    if (std::abs(xl) < 1e-18) break;
  }
  return sum;
}

double ramified_local_norm(double q, int m) {
  if (m < 1) throw std::invalid_argument("ramified_local_norm: m must be at least 1");
  if (!(q >= 2)) throw std::invalid_argument("ramified_local_norm: q must be at least 2");
  return std::pow(q, -double(m));
}

cplx archimedean_factor(cplx s) {
  cplx z = 2.0 * s - 1.0;
  if (std::abs(z) < 1e-12) throw std::domain_error("archimedean_factor: pole at s = 1/2");
  return kPi * gamma(z) / gamma(z + 1.0);
}

cplx archimedean_factor_derivative(cplx s) {
  cplx z = 2.0 * s - 1.0;
  if (std::abs(z) < 1e-12) throw std::domain_error("archimedean_factor: pole at s = 1/2");
  return -2.0 * kPi / (z * z);
}

ScatteringFactor global_scattering(const QuadraticField& F, const HeckeCharacterSpec& chi, cplx s) {
  if (!F.euclidean()) throw std::invalid_argument("global_scattering: field must be Euclidean");
  if (!chi.is_trivial() || chi.conductor.norm() != 1)
    throw std::invalid_argument("global_scattering: only the trivial character of conductor one is supported");
  ScatteringFactor c;
  c.s = s;
  c.pole_distance = std::min(std::abs(s - 1.0), std::abs(s - 0.5));
  if (c.pole_distance < 1e-9)
    throw std::domain_error("global_scattering: s is within " + std::to_string(c.pole_distance) + " of a pole");
  c.archimedean = archimedean_factor(s);
  c.l_ratio = dedekind_zeta_epstein(F, 2.0 * s - 1.0).value / dedekind_zeta_epstein(F, 2.0 * s).value;
  c.normalization = 2.0 / std::sqrt(double(-F.disc()));
  c.value = c.normalization * c.archimedean * c.l_ratio * c.ramified;
  return c;
}

nlohmann::json to_json(const ScatteringFactor& c) {
  auto z = [](cplx x) { return nlohmann::json::array({x.real(), x.imag()}); };
  return {{"s", z(c.s)},
          {"value", z(c.value)},
          {"archimedean", z(c.archimedean)},
          {"l_ratio", z(c.l_ratio)},
          {"ramified", z(c.ramified)},
          {"normalization", z(c.normalization)},
          {"pole_distance", c.pole_distance}};
}

cplx classical_scattering(const QuadraticField& F, double s_classical) {
  return global_scattering(F, trivial_character(F), cplx(s_classical / 2.0, 0.0)).value;
}

namespace {

// Γ(a, x)·x^{−a} for real a and x > 0
double gamma_tail_scaled(double a, double x) {
  if (a > 0) return boost::math::tgamma(a, x) * std::pow(x, -a);
  if (a == 0) return boost::math::expint(1, x);
  // Γ(a, x) = (Γ(a+1, x) − x^a e^{−x}) / a
  return (x * gamma_tail_scaled(a + 1.0, x) - std::exp(-x)) / a;
}

// Σ_{v ≠ 0, π vᵀGv ≤ X} Γ(a, π Q(v)) (π Q(v))^{−a}, summing ±v once and doubling
double incomplete_sum(const Eigen::Matrix4d& G, const Eigen::Matrix4d& Ginv, double a, double X, long& terms) {
  const double R = X / kPi;
  std::array<long, 4> bound;
  for (int i = 0; i < 4; ++i) bound[i] = long(std::floor(std::sqrt(R * Ginv(i, i))));
  double sum = 0;
  Eigen::Vector4d v;
  for (long v0 = 0; v0 <= bound[0]; ++v0)
    for (long v1 = (v0 == 0 ? 0 : -bound[1]); v1 <= bound[1]; ++v1)
      for (long v2 = (v0 == 0 && v1 == 0 ? 0 : -bound[2]); v2 <= bound[2]; ++v2)
        for (long v3 = (v0 == 0 && v1 == 0 && v2 == 0 ? 1 : -bound[3]); v3 <= bound[3]; ++v3) {
          v << double(v0), double(v1), double(v2), double(v3);
          double q = v.dot(G * v);
          if (q > R) continue;
          sum += 2.0 * gamma_tail_scaled(a, kPi * q);
          terms += 2;
        }
  return sum;
}

}  // namespace

EisensteinValue eisenstein_lattice_sum(const QuadraticField& F, double s, cplx z, double r,
                                       const EisensteinOptions& opt) {
  if (s < 2.2) throw std::invalid_argument("eisenstein_lattice_sum: needs s ≥ 2.2");
  if (!(r > 0)) throw std::invalid_argument("eisenstein_lattice_sum: height must be positive");
  if (class_number(F) != 1) throw std::invalid_argument("eisenstein_lattice_sum: class number must be one");
  const cplx w = F.omega_complex();
  const cplx wz = w * z;
  // v = (c₁, c₂, d₁, d₂) ↦ (cz + d, r·c) in R⁴
  Eigen::Matrix4d M;
  M << z.real(), wz.real(), 1.0, w.real(),
       z.imag(), wz.imag(), 0.0, w.imag(),
       r, r * w.real(), 0.0, 0.0,
       0.0, r * w.imag(), 0.0, 0.0;
  Eigen::Matrix4d G = M.transpose() * M;
  Eigen::Matrix4d Ginv = G.inverse();
  const double det = G.determinant();
  const double sq = std::sqrt(det);
  EisensteinValue out;
  double s1 = incomplete_sum(G, Ginv, s, opt.cutoff, out.terms);
  double s2 = incomplete_sum(Ginv, G, 2.0 - s, opt.cutoff, out.terms);
  double bracket = s1 + s2 / sq - 1.0 / s + 1.0 / (sq * (s - 2.0));
  double pre = std::pow(kPi, s) / std::tgamma(s);
  double scale = std::pow(r, s) / double(F.unit_count());
  out.value = pre * bracket * scale;
  // dropped terms: at most 4·e^{−X}·(X + 2)/√det in each sum, up to the lattice-point count slack
  double tail = 16.0 * std::exp(-opt.cutoff) * (opt.cutoff + 2.0) * (1.0 / sq + 1.0);
  out.tail_bound = pre * tail * scale;
  if (out.tail_bound > opt.tolerance)
    throw std::runtime_error("eisenstein_lattice_sum: cutoff too small, tail bound " + std::to_string(out.tail_bound));
  return out;
}

double torus_average(const QuadraticField& F, double s, double r, const EisensteinOptions& opt) {
  if (opt.grid < 1) throw std::invalid_argument("torus_average: grid must be positive");
  const cplx w = F.omega_complex();
  double sum = 0;
  for (int j = 0; j < opt.grid; ++j)
    for (int k = 0; k < opt.grid; ++k) {
      cplx z = (double(j) + double(k) * w) / double(opt.grid);
      sum += eisenstein_lattice_sum(F, s, z, r, opt).value;
    }
  return sum / double(opt.grid * opt.grid);
}

EisensteinFit eisenstein_constant_term_fit(const QuadraticField& F, double s, const EisensteinOptions& opt) {
  if (opt.heights.size() < 2) throw std::invalid_argument("eisenstein_constant_term_fit: needs two heights");
  const long m = long(opt.heights.size());
  Eigen::MatrixXd A(m, 2);
  Eigen::VectorXd b(m);
  EisensteinFit fit;
  fit.s = s;
  for (long i = 0; i < m; ++i) {
    double r = opt.heights[i];
    A(i, 0) = std::pow(r, s);
    A(i, 1) = std::pow(r, 2.0 - s);
    b(i) = torus_average(F, s, r, opt);
    fit.constant_terms.push_back(b(i));
    fit.tail_bound = std::max(fit.tail_bound, eisenstein_lattice_sum(F, s, 0.0, r, opt).tail_bound);
  }
  Eigen::Vector2d x = A.colPivHouseholderQr().solve(b);
  fit.A = x(0);
  fit.B = x(1);
  fit.ratio = fit.B / fit.A;
  fit.fit_residual = (A * x - b).cwiseAbs().maxCoeff();
  fit.closed_form = classical_scattering(F, s).real();
  fit.zeta_s = dedekind_zeta_epstein(F, s).value.real();
  return fit;
}

ScalarScattering synthetic_scattering(double a) {
  if (!(a > 0)) throw std::invalid_argument("synthetic_scattering: a must be positive");
  ScalarScattering sc;
  sc.c = [a](cplx s) { return (a + 1.0 - s) / (a + s); };
  sc.dc = [a](cplx s) { return -(2.0 * a + 1.0) / ((a + s) * (a + s)); };
  return sc;
}

cplx maass_selberg(const ScalarScattering& sc, cplx phi_psi, cplx s, cplx s2, double Y) {
  if (!(Y >= 1.0)) throw std::invalid_argument("maass_selberg: truncation height must be at least 1");
  cplx s2b = std::conj(s2);
  cplx e1 = s + s2b - 1.0;
  cplx e2 = s - s2b;
  if (std::abs(e1) < 1e-14 || std::abs(e2) < 1e-14) {
    if (std::abs(s - s2) < 1e-14 && std::abs(s.imag()) < 1e-14 && std::abs(e1) >= 1e-14)
      return maass_selberg_limit(sc, phi_psi, s.real(), Y);
    throw std::domain_error("maass_selberg: degenerate exponents");
  }
  const double L = std::log(Y);
  cplx cs = sc.c(s), cs2 = std::conj(sc.c(s2));
  cplx t1 = (std::exp(2.0 * e1 * L) - std::exp(-2.0 * e1 * L) * cs * cs2) / (2.0 * e1);
  cplx t2 = (std::exp(2.0 * e2 * L) * cs2 - std::exp(-2.0 * e2 * L) * cs) / (2.0 * e2);
  return (t1 + t2) * phi_psi;
}

cplx maass_selberg_real(const ScalarScattering& sc, cplx phi_psi, double s, double Y) {
  if (!(Y >= 1.0)) throw std::invalid_argument("maass_selberg_real: truncation height must be at least 1");
  if (std::abs(4.0 * s - 2.0) < 1e-14) throw std::domain_error("maass_selberg_real: s = 1/2");
  cplx c = sc.c(s);
  double k = 4.0 * s - 2.0;
  double L = std::log(Y);
  cplx du = cplx(0, 1) * sc.dc(s);
  return (std::pow(Y, k) / k - std::pow(Y, -k) * std::norm(c) / k + L * c + du) * phi_psi;
}

cplx maass_selberg_limit(const ScalarScattering& sc, cplx phi_psi, double s, double Y) {
  if (!(Y >= 1.0)) throw std::invalid_argument("maass_selberg_limit: truncation height must be at least 1");
  if (std::abs(4.0 * s - 2.0) < 1e-14) throw std::domain_error("maass_selberg_limit: s = 1/2");
  cplx c = sc.c(s);
  double k = 4.0 * s - 2.0;
  double L = std::log(Y);
  return (std::pow(Y, k) / k - std::pow(Y, -k) * std::norm(c) / k + 2.0 * L * c - sc.dc(s) / 2.0) * phi_psi;
}

cplx maass_selberg_real_dY(const ScalarScattering& sc, cplx phi_psi, double s, double Y) {
  cplx c = sc.c(s);
  double k = 4.0 * s - 2.0;
  return (std::pow(Y, k - 1.0) + std::pow(Y, -k - 1.0) * std::norm(c) + c / Y) * phi_psi;
}

TraceValue regularized_trace_eval(const SyntheticSpectrum& spec, const std::function<double(double)>& phi,
                                  const TraceOptions& opt) {
  for (auto [lambda, m] : spec.discrete)
    if (lambda < 0 || m < 0) throw std::invalid_argument("regularized_trace_eval: negative eigenvalue or multiplicity");
  TraceValue tv;
  for (auto [lambda, m] : spec.discrete) tv.discrete += double(m) * phi(lambda);
  if (spec.psi && !spec.weights.empty()) {
    for (auto [l, d] : spec.weights)
      tv.residual += 0.25 * d * phi(-double(l * l) + 4.0 + spec.lambda_v) * spec.psi(l, 0.0);
    auto integrand = [&](double u) {
      cplx sum = 0;
      for (auto [l, d] : spec.weights)
        sum += d * phi(-u * u + 4.0 - double(l * l) + spec.lambda_v) * spec.dpsi(l, u) / spec.psi(l, u);
      return sum;
    };
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    double err_re = 0, err_im = 0;
    double re = GK::integrate([&](double u) { return integrand(u).real(); }, -opt.u_max, opt.u_max, 15,
                              opt.tolerance * 1e-2, &err_re);
    double im = GK::integrate([&](double u) { return integrand(u).imag(); }, -opt.u_max, opt.u_max, 15,
                              opt.tolerance * 1e-2, &err_im);
    tv.integral = -cplx(re, im) / (2.0 * kPi);
    // ∫_{|u| > U} |integrand|, by a double-exponential rule on each half-line
    boost::math::quadrature::exp_sinh<double> tail_rule;
    auto abs_tail = [&](double sign) {
      try {
        return tail_rule.integrate([&](double x) { return std::abs(integrand(sign * (opt.u_max + x))); });
      } catch (const std::exception&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    tv.tail_estimate = (abs_tail(1.0) + abs_tail(-1.0)) / (2.0 * kPi) + (err_re + err_im) / (2.0 * kPi);
    if (!(tv.tail_estimate <= opt.tolerance))
      throw std::runtime_error("regularized_trace_eval: tail estimate " + std::to_string(tv.tail_estimate) +
                               " above tolerance");
  }
  tv.value = tv.discrete + tv.residual + tv.integral;
  return tv;
}

namespace {

struct PrimeEntry {
  double norm;
  double log_norm;
  uint32_t residue;
};

// Prime ideals of norm ≤ bound coprime to f, one generator per ideal, as (N𝔭, log N𝔭, generator mod f).
std::vector<PrimeEntry> prime_table(const QuadraticField& F, const IdealLattice& f, long bound) {
  std::vector<char> composite(bound + 1, 0);
  composite[0] = composite[1] = 1;
  for (long i = 2; i * i <= bound; ++i)
    if (!composite[i])
      for (long j = i * i; j <= bound; j += i) composite[j] = 1;
  ResidueRing R(F, f);
  const long p = F.p(), q = F.q();
  std::vector<PrimeEntry> out;
  // N(x + yω) = x² + pxy − qy² = (x + py/2)² + (−q − p²/4) y²
  const double c2 = -double(q) - double(p * p) / 4.0;
  long ymax = long(std::sqrt(double(bound) / c2)) + 1;
  for (long y = -ymax; y <= ymax; ++y) {
    double rest = double(bound) - c2 * double(y) * double(y);
    if (rest < 0) continue;
    double center = -double(p * y) / 2.0;
    long x0 = long(std::floor(center - std::sqrt(rest))) - 1, x1 = long(std::ceil(center + std::sqrt(rest))) + 1;
    for (long x = x0; x <= x1; ++x) {
      long n = x * x + p * x * y - q * y * y;
      if (n < 2 || n > bound || composite[n]) continue;
      // keep one associate: the one with the smallest (x, y) in the unit orbit
      FieldElement e(x, y);
      bool smallest = true;
      for (const auto& u : F.units()) {
        FieldElement a = F.mul(e, u);
        if (a.a < x || (a.a == x && a.b < y)) smallest = false;
      }
      if (!smallest) continue;
      if (f.norm() > 1 && ideal_contains(f, e)) continue;
      out.push_back({double(n), std::log(double(n)), R.reduce(x, y)});
    }
  }
  for (long ell = 2; ell * ell <= bound; ++ell) {
    if (composite[ell] || kronecker_symbol(F.disc(), ell) != -1) continue;
    if (f.norm() > 1 && ideal_contains(f, FieldElement(ell))) continue;
    out.push_back({double(ell * ell), 2.0 * std::log(double(ell)), R.reduce(ell, 0)});
  }
  std::sort(out.begin(), out.end(), [](const PrimeEntry& a, const PrimeEntry& b) {
    return a.norm != b.norm ? a.norm < b.norm : a.residue < b.residue;
  });
  return out;
}

double proxy_from_table(const std::vector<PrimeEntry>& primes, const HeckeCharacterSpec& chi, double t, double eta,
                        long cutoff) {
  const double X = double(cutoff);
  const double limit = 30.0 * X;
  const cplx w(1.0 + eta, 2.0 * t);
  cplx sum = 0;
  for (const auto& e : primes) {
    if (e.norm > limit) break;
    cplx c = chi.conductor.norm() == 1 ? cplx(1.0) : chi.value(e.residue);
    cplx ck = c;
    double nk = e.norm;
    for (int k = 1; nk <= limit; ++k) {
      sum += e.log_norm * ck * std::exp(-w * std::log(nk)) * std::exp(-nk / X);
      ck *= c;
      nk *= e.norm;
    }
  }
  return std::abs(2.0 * sum);
}

}  // namespace

double log_derivative_proxy(const QuadraticField& F, const HeckeCharacterSpec& chi, double t, double eta,
                            long cutoff) {
  if (cutoff < 10) throw std::invalid_argument("log_derivative_proxy: cutoff must be at least 10");
  auto primes = prime_table(F, chi.conductor, 30 * cutoff);
  return proxy_from_table(primes, chi, t, eta, cutoff);
}

std::vector<LogDerivativeRow> log_derivative_experiment(const QuadraticField& F,
                                                        const std::vector<IdealLattice>& conductors,
                                                        const std::vector<double>& t_grid,
                                                        const LogDerivativeOptions& opt) {
  std::vector<LogDerivativeRow> rows;
  for (const auto& f : conductors) {
    if (f.norm() > 200) throw std::invalid_argument("log_derivative_experiment: conductor norm above 200");
    auto chars = characters_mod(F, f);
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < chars.size(); ++i)
      if (chars[i].primitive) chosen.push_back(i);
    if (chosen.empty()) chosen.push_back(0);
    auto primes = prime_table(F, f, 60 * opt.cutoff);
    double lf = std::log(double(f.norm()));
    for (std::size_t i : chosen)
      for (double t : t_grid) {
        LogDerivativeRow row;
        row.conductor_norm = f.norm();
        row.conductor = ideal_to_string(f);
        row.character = int(i);
        row.primitive = chars[i].primitive;
        row.t = t;
        row.value = proxy_from_table(primes, chars[i], t, opt.eta, opt.cutoff);
        row.doubled_cutoff_value = proxy_from_table(primes, chars[i], t, opt.eta, 2 * opt.cutoff);
        row.reference_curve = lf * lf;
        rows.push_back(row);
      }
  }
  return rows;
}

std::string log_derivative_csv(const std::vector<LogDerivativeRow>& rows) {
  std::ostringstream os;
  os << "# non-rigorous: |2 L'/L(chi, 1 + eta + 2it)| from smoothed prime sums, not critical-line values\n";
  os << "conductor_norm,t,value,reference_curve\n";
  os << std::setprecision(10);
  for (const auto& r : rows) os << r.conductor_norm << ',' << r.t << ',' << r.value << ',' << r.reference_curve << '\n';
  return os.str();
}

}  // namespace bianchi
