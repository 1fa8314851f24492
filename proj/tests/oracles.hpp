#pragma once
// Independent reference computations used only by the test suites.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

inline int kronecker(long D, long n) {
  int result = 1;
  for (long p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      n /= p;
      int chi;
      if (p == 2) {
        long r = ((D % 8) + 8) % 8;
        chi = (D % 2 == 0) ? 0 : ((r == 1 || r == 7) ? 1 : -1);
      } else {
        long a = ((D % p) + p) % p;
        if (a == 0) {
          chi = 0;
        } else {
          long e = (p - 1) / 2, r = 1, b = a;
          while (e) {
            if (e & 1) r = r * b % p;
            b = b * b % p;
            e >>= 1;
          }
          chi = r == 1 ? 1 : -1;
        }
      }
      result *= chi;
    }
  }
  if (n > 1) {
    long p = n;
    int chi;
    if (p == 2) {
      long r = ((D % 8) + 8) % 8;
      chi = (D % 2 == 0) ? 0 : ((r == 1 || r == 7) ? 1 : -1);
    } else {
      long a = ((D % p) + p) % p;
      if (a == 0) {
        chi = 0;
      } else {
        long e = (p - 1) / 2, r = 1, b = a;
        while (e) {
          if (e & 1) r = r * b % p;
          b = b * b % p;
          e >>= 1;
        }
        chi = r == 1 ? 1 : -1;
      }
    }
    result *= chi;
  }
  return result;
}

// Hurwitz zeta by Euler–Maclaurin summation, complex s ≠ 1, a > 0.
inline cplx hurwitz(cplx s, double a) {
  const int N = 40;
  cplx sum = 0.0;
  for (int n = 0; n < N; ++n) sum += std::exp(-s * std::log(n + a));
  double x = N + a;
  sum += std::exp((1.0 - s) * std::log(x)) / (s - 1.0);
  sum += 0.5 * std::exp(-s * std::log(x));
  const double b2k[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6, -3617.0 / 510};
  double fact = 1.0;
  cplx rising = s;
  for (int k = 1; k <= 8; ++k) {
    fact *= (2.0 * k - 1.0) * (2.0 * k);
    sum += b2k[k - 1] / fact * rising * std::exp((-s - double(2 * k - 1)) * std::log(x));
    rising *= (s + double(2 * k - 1)) * (s + double(2 * k));
  }
  return sum;
}

// ζ_F(s) = ζ(s)·L(s, χ_D)
inline cplx dedekind_zeta_factored(long D, cplx s) {
  long m = -D;
  cplx L = 0.0;
  for (long a = 1; a <= m; ++a) {
    int chi = kronecker(D, a);
    if (chi != 0) L += double(chi) * hurwitz(s, double(a) / double(m));
  }
  L *= std::exp(-s * std::log(double(m)));
  return hurwitz(s, 1.0) * L;
}

// gcd of all k×k minors, via Bareiss determinants
inline mpz_class det_bareiss(std::vector<std::vector<mpz_class>> m) {
  int n = int(m.size());
  mpz_class prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m[k][k] == 0) {
      int r = k + 1;
      while (r < n && m[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(m[k], m[r]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) {
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
      }
    }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

inline void combinations(int n, int k, std::vector<std::vector<int>>& out) {
  std::vector<int> c(k);
  for (int i = 0; i < k; ++i) c[i] = i;
  for (;;) {
    out.push_back(c);
    int i = k - 1;
    while (i >= 0 && c[i] == n - k + i) --i;
    if (i < 0) return;
    ++c[i];
    for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  }
}

inline std::vector<mpz_class> invariant_factors_by_minors(const std::vector<std::vector<long>>& A) {
  int rows = int(A.size());
  int cols = rows ? int(A[0].size()) : 0;
  std::vector<mpz_class> dk;  // d_k = gcd of k×k minors
  dk.push_back(1);
  for (int k = 1; k <= std::min(rows, cols); ++k) {
    std::vector<std::vector<int>> rs, cs;
    combinations(rows, k, rs);
    combinations(cols, k, cs);
    mpz_class g = 0;
    for (const auto& r : rs) {
      for (const auto& c : cs) {
        std::vector<std::vector<mpz_class>> m(k, std::vector<mpz_class>(k));
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j) m[i][j] = A[r[i]][c[j]];
        g = gcd(g, det_bareiss(m));
        if (g == 1) break;
      }
      if (g == 1) break;
    }
    if (g == 0) break;
    dk.push_back(g);
  }
  std::vector<mpz_class> out;
  for (std::size_t k = 1; k < dk.size(); ++k) out.push_back(dk[k] / dk[k - 1]);
  return out;
}

}  // namespace oracle
