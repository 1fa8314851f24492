#include "bianchi/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bianchi {

namespace {

constexpr double kLanczosG = 7.0;
constexpr double kLanczosCoef[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

cplx lanczos_sum(cplx z) {
  cplx x = kLanczosCoef[0];
  for (int i = 1; i < 9; ++i) x += kLanczosCoef[i] / (z + double(i));
  return x;
}

}  // namespace

cplx gamma(cplx z) {
  const double pi = std::numbers::pi;
  if (z.real() < 0.5) {
    return pi / (std::sin(pi * z) * gamma(1.0 - z));
  }
  z -= 1.0;
  cplx t = z + kLanczosG + 0.5;
  return std::sqrt(2.0 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * lanczos_sum(z);
}

cplx log_gamma(cplx z) {
  const double pi = std::numbers::pi;
  if (z.real() < 0.5) {
    return std::log(pi) - std::log(std::sin(pi * z)) - log_gamma(1.0 - z);
  }
  z -= 1.0;
  cplx t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t + std::log(lanczos_sum(z));
}

namespace {

// Series for the lower incomplete gamma: γ(a,x) = x^a e^{-x} Σ x^n / (a(a+1)...(a+n)).
cplx lower_incomplete_series(cplx a, double x) {
  cplx term = 1.0 / a;
  cplx sum = term;
  for (int n = 1; n < 100000; ++n) {
    term *= x / (a + double(n));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum * std::exp(a * std::log(x) - x);
}

// Continued fraction for Γ(a,x), modified Lentz.
cplx upper_incomplete_cf(cplx a, double x) {
  const double tiny = 1e-300;
  cplx b = x + 1.0 - a;
  cplx c = 1.0 / tiny;
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 1; i < 100000; ++i) {
    cplx an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    cplx delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(a * std::log(x) - x) * h;
}

}  // namespace

cplx upper_incomplete_gamma(cplx a, double x) {
  if (!(x > 0.0)) throw std::domain_error("upper_incomplete_gamma: x must be positive");
  if (x >= 1.5 && x > a.real() + 1.0) return upper_incomplete_cf(a, x);
  // The continued fraction still converges for small x; the series route would
  // need Γ(a), which has poles at nonpositive integers.
  if (a.real() < 0.5) return upper_incomplete_cf(a, x);
  return gamma(a) - lower_incomplete_series(a, x);
}

double riemann_zeta_real(double s) {
  if (!(s > 1.0)) throw std::domain_error("riemann_zeta_real: s must exceed 1");
  // Euler–Maclaurin with N terms and Bernoulli corrections.
  const int n = 20;
  double sum = 0.0;
  for (int k = 1; k < n; ++k) sum += std::pow(double(k), -s);
  double nn = n;
  sum += std::pow(nn, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(nn, -s);
  const double b2k[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6};
  double fact = 1.0;
  double rising = s;
  double power = std::pow(nn, -s - 1.0);
  for (int k = 1; k <= 7; ++k) {
    fact *= (2.0 * k - 1.0) * (2.0 * k);
    sum += b2k[k - 1] / fact * rising * power;
    rising *= (s + 2.0 * k - 1.0) * (s + 2.0 * k);
    power /= nn * nn;
  }
  return sum;
}

}  // namespace bianchi
