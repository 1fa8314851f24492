#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bianchi/number_field.hpp"
#include "bianchi/special_functions.hpp"

namespace bianchi {

std::vector<long> ideal_counts(const QuadraticField& F, long bound) {
  std::vector<long> spf(bound + 1, 0);
  for (long i = 2; i <= bound; ++i) {
    if (spf[i] == 0) {
      for (long j = i; j <= bound; j += i) {
        if (spf[j] == 0) spf[j] = i;
      }
    }
  }
  std::vector<long> a(bound + 1, 0);
  if (bound >= 1) a[1] = 1;
  for (long n = 2; n <= bound; ++n) {
    long p = spf[n], m = n;
    int e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    int chi = kronecker_symbol(F.disc(), p);
    long local = chi == 1 ? e + 1 : (chi == 0 ? 1 : (e % 2 == 0 ? 1 : 0));
    a[n] = a[m] * local;
  }
  return a;
}

ZetaValue dedekind_zeta(const QuadraticField& F, cplx s, long cutoff) {
  if (cutoff < 10) throw std::invalid_argument("dedekind_zeta: cutoff must be at least 10");
  if (std::abs(s - 1.0) < 1e-12) throw std::domain_error("dedekind_zeta: pole at s = 1");
  double sigma = s.real();
  if (sigma <= 1.0) return dedekind_zeta_epstein(F, s);
  std::vector<long> a = ideal_counts(F, cutoff);
  cplx sum = 0.0;
  for (long n = cutoff; n >= 1; --n) {
    if (a[n] == 0) continue;
    sum += double(a[n]) * std::exp(-s * std::log(double(n)));
  }
  double X = double(cutoff);
  double lx = std::log(X);
  double tail = sigma * std::pow(X, 1.0 - sigma) *
                ((lx + 1.0) / (sigma - 1.0) + 1.0 / ((sigma - 1.0) * (sigma - 1.0)));
  return {sum, tail, "dirichlet-partial-sum"};
}

namespace {

// π^{-s}Γ(s)·Z_Q(s) for the form Q = a x² + b xy + c y², via the theta splitting
// at t = k = 2/√|D|.
cplx epstein_completed(long a, long b, long c, cplx s, double& err) {
  const double pi = std::numbers::pi;
  long absd = 4 * a * c - b * b;
  double k = 2.0 / std::sqrt(double(absd));
  const double xmax = 60.0;
  double qmax = xmax / (pi * k);
  double ymax = std::sqrt(4.0 * a * qmax / double(absd));
  cplx sum = 0.0;
  double boundary = 0.0;
  for (long y = -long(ymax) - 1; y <= long(ymax) + 1; ++y) {
    double rest = qmax - double(absd) * y * y / (4.0 * a);
    if (rest < 0) continue;
    double r = std::sqrt(rest / a);
    double center = -double(b) * y / (2.0 * a);
    for (long x = long(std::floor(center - r)) - 1; x <= long(std::ceil(center + r)) + 1; ++x) {
      if (x == 0 && y == 0) continue;
      double Q = double(a) * x * x + double(b) * x * y + double(c) * y * y;
      double arg = pi * k * Q;
      if (arg > xmax) continue;
      double lq = std::log(pi * Q);
      cplx t1 = std::exp(-s * lq) * upper_incomplete_gamma(s, arg);
      cplx t2 = std::exp((s - 1.0) * lq) * upper_incomplete_gamma(1.0 - s, arg);
      sum += t1 + std::pow(k, 2.0 * s - 1.0) * t2;
      ++boundary;
    }
  }
  cplx ks = std::pow(k, s);
  sum += ks / (s - 1.0) - ks / s;
  // terms beyond the cutoff are bounded by a multiple of e^{-xmax}
  err = boundary * std::exp(-xmax) * (1.0 + std::abs(s)) * 1e3;
  return sum;
}

}  // namespace

ZetaValue dedekind_zeta_epstein(const QuadraticField& F, cplx s) {
  const double pi = std::numbers::pi;
  if (std::abs(s - 1.0) < 1e-12) throw std::domain_error("dedekind_zeta: pole at s = 1");
  auto forms = reduced_forms(F.disc());
  double w = F.unit_count();
  if (std::abs(s) < 1e-12) return {cplx(-double(forms.size()) / w, 0.0), 1e-15, "epstein-limit"};
  cplx total = 0.0;
  double err = 0.0;
  for (const auto& f : forms) {
    double e = 0.0;
    total += epstein_completed(f[0], f[1], f[2], s, e);
    err += e;
  }
  cplx factor = std::exp(s * std::log(pi)) / gamma(s) / w;
  return {total * factor, err * std::abs(factor) + 1e-14 * std::abs(total * factor), "epstein-continuation"};
}

double covolume(const QuadraticField& F) {
  const double pi = std::numbers::pi;
  double D = -double(F.disc());
  double z2 = dedekind_zeta_epstein(F, cplx(2.0, 0.0)).value.real();
  return std::pow(D, 1.5) * z2 / (4.0 * pi * pi);
}

}  // namespace bianchi
