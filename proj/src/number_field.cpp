#include "bianchi/number_field.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace bianchi {

namespace {

bool squarefree(long n) {
  n = std::labs(n);
  for (long f = 2; f * f <= n; ++f) {
    if (n % (f * f) == 0) return false;
  }
  return true;
}

long floor_div(long x, long y) {
  long q = x / y;
  if ((x % y != 0) && ((x < 0) != (y < 0))) --q;
  return q;
}

long mod_pos(long x, long m) {
  long r = x % m;
  return r < 0 ? r + m : r;
}

long to_long(const BigInt& x) {
  if (!x.fits_slong_p()) throw std::overflow_error("integer does not fit in 64 bits");
  return x.get_si();
}

std::vector<long> rational_prime_factors(long n) {
  std::vector<long> out;
  for (long f = 2; f * f <= n; ++f) {
    if (n % f == 0) {
      out.push_back(f);
      while (n % f == 0) n /= f;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

// Row HNF of a list of integer vectors spanning a full-rank sublattice of Z².
IdealLattice hnf_rows(std::vector<std::pair<BigInt, BigInt>> rows) {
  // Column 0 gcd by repeated reduction.
  for (;;) {
    std::size_t best = rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].first != 0 && (best == rows.size() || abs(rows[i].first) < abs(rows[best].first))) best = i;
    }
    if (best == rows.size()) throw std::invalid_argument("lattice is not of full rank");
    bool done = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == best || rows[i].first == 0) continue;
      BigInt qt = rows[i].first / rows[best].first;
      rows[i].first -= qt * rows[best].first;
      rows[i].second -= qt * rows[best].second;
      if (rows[i].first != 0) done = false;
    }
    if (done) {
      std::swap(rows[0], rows[best]);
      break;
    }
  }
  if (rows[0].first < 0) {
    rows[0].first = -rows[0].first;
    rows[0].second = -rows[0].second;
  }
  BigInt c = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) c = gcd(c, rows[i].second);
  if (c == 0) throw std::invalid_argument("lattice is not of full rank");
  BigInt b = rows[0].second % c;
  if (b < 0) b += c;
  return IdealLattice{to_long(rows[0].first), to_long(b), to_long(c)};
}

}  // namespace

QuadraticField::QuadraticField(long d) : d_(d) {
  if (d >= 0) throw std::invalid_argument("make_field: d must be negative");
  if (!squarefree(d)) throw std::invalid_argument("make_field: d must be squarefree");
  if (mod_pos(d, 4) == 1) {
    disc_ = d;
    p_ = 1;
    q_ = (d - 1) / 4;
  } else {
    disc_ = 4 * d;
    p_ = 0;
    q_ = d;
  }
}

QuadraticField make_field(long d) { return QuadraticField(d); }

FieldElement QuadraticField::add(const FieldElement& x, const FieldElement& y) const {
  return {x.a + y.a, x.b + y.b};
}
FieldElement QuadraticField::sub(const FieldElement& x, const FieldElement& y) const {
  return {x.a - y.a, x.b - y.b};
}
FieldElement QuadraticField::neg(const FieldElement& x) const { return {-x.a, -x.b}; }

FieldElement QuadraticField::mul(const FieldElement& x, const FieldElement& y) const {
  BigInt bb = x.b * y.b;
  return {x.a * y.a + q_ * bb, x.a * y.b + x.b * y.a + p_ * bb};
}

FieldElement QuadraticField::conj(const FieldElement& x) const { return {x.a + p_ * x.b, -x.b}; }

BigInt QuadraticField::norm(const FieldElement& x) const {
  return x.a * x.a + p_ * x.a * x.b - q_ * x.b * x.b;
}

BigInt QuadraticField::trace(const FieldElement& x) const { return 2 * x.a + p_ * x.b; }

bool QuadraticField::divides(const FieldElement& y, const FieldElement& x) const {
  if (y.is_zero()) return x.is_zero();
  FieldElement num = mul(x, conj(y));
  BigInt n = norm(y);
  return num.a % n == 0 && num.b % n == 0;
}

FieldElement QuadraticField::div_exact(const FieldElement& x, const FieldElement& y) const {
  if (y.is_zero()) throw std::domain_error("division by zero");
  FieldElement num = mul(x, conj(y));
  BigInt n = norm(y);
  if (num.a % n != 0 || num.b % n != 0) throw std::domain_error("inexact division");
  return {num.a / n, num.b / n};
}

FieldElement QuadraticField::round_div(const FieldElement& x, const FieldElement& y) const {
  FieldElement num = mul(x, conj(y));
  BigInt n = norm(y);
  auto rnd = [&](const BigInt& v) {
    BigInt twice = 2 * v + n;
    BigInt q;
    mpz_fdiv_q(q.get_mpz_t(), twice.get_mpz_t(), BigInt(2 * n).get_mpz_t());
    return q;
  };
  return {rnd(num.a), rnd(num.b)};
}

cplx QuadraticField::omega_complex() const {
  double s = std::sqrt(double(-d_));
  return p_ == 1 ? cplx(0.5, 0.5 * s) : cplx(0.0, s);
}

cplx QuadraticField::embed(const FieldElement& x) const {
  return x.a.get_d() + x.b.get_d() * omega_complex();
}

std::vector<FieldElement> QuadraticField::units() const {
  if (d_ == -1) return {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  if (d_ == -3) return {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}};
  return {{1, 0}, {-1, 0}};
}

int QuadraticField::unit_count() const { return int(units().size()); }

bool QuadraticField::euclidean() const {
  return d_ == -1 || d_ == -2 || d_ == -3 || d_ == -7 || d_ == -11;
}

std::string QuadraticField::to_string(const FieldElement& x) const {
  std::ostringstream os;
  os << x.a.get_str();
  if (x.b != 0) os << (x.b > 0 ? "+" : "-") << BigInt(abs(x.b)).get_str() << "w";
  return os.str();
}

bool IdealLattice::operator<(const IdealLattice& o) const {
  if (norm() != o.norm()) return norm() < o.norm();
  if (a != o.a) return a < o.a;
  if (b != o.b) return b < o.b;
  return c < o.c;
}

IdealLattice unit_ideal() { return {1, 0, 1}; }

IdealLattice ideal_from_generators(const QuadraticField& F, const std::vector<FieldElement>& gens) {
  std::vector<std::pair<BigInt, BigInt>> rows;
  for (const auto& g : gens) {
    if (g.is_zero()) continue;
    rows.emplace_back(g.a, g.b);
    FieldElement gw = F.mul(g, F.omega());
    rows.emplace_back(gw.a, gw.b);
  }
  if (rows.empty()) throw std::invalid_argument("ideal_from_generators: zero ideal");
  return hnf_rows(std::move(rows));
}

IdealLattice principal_ideal(const QuadraticField& F, const FieldElement& x) {
  return ideal_from_generators(F, {x});
}

IdealLattice ideal_mul(const QuadraticField& F, const IdealLattice& I, const IdealLattice& J) {
  FieldElement i1{I.a, I.b}, i2{0, I.c}, j1{J.a, J.b}, j2{0, J.c};
  return ideal_from_generators(F, {F.mul(i1, j1), F.mul(i1, j2), F.mul(i2, j1), F.mul(i2, j2)});
}

IdealLattice ideal_pow(const QuadraticField& F, const IdealLattice& I, int e) {
  IdealLattice r = unit_ideal();
  for (int i = 0; i < e; ++i) r = ideal_mul(F, r, I);
  return r;
}

IdealLattice ideal_add(const QuadraticField& F, const IdealLattice& I, const IdealLattice& J) {
  return ideal_from_generators(F, {{I.a, I.b}, {0, I.c}, {J.a, J.b}, {0, J.c}});
}

bool ideal_contains(const IdealLattice& I, long x, long y) {
  if (x % I.a != 0) return false;
  long k = x / I.a;
  return mod_pos(y - k * I.b, I.c) == 0;
}

bool ideal_contains(const IdealLattice& I, const FieldElement& x) {
  BigInt k;
  if (!mpz_divisible_ui_p(x.a.get_mpz_t(), I.a)) return false;
  k = x.a / I.a;
  BigInt r = x.b - k * I.b;
  return mpz_divisible_ui_p(r.get_mpz_t(), I.c) != 0;
}

bool ideal_subset(const IdealLattice& I, const IdealLattice& J) {
  return ideal_contains(J, I.a, I.b) && ideal_contains(J, 0, I.c);
}

bool is_ideal(const QuadraticField& F, const IdealLattice& I) {
  if (I.a <= 0 || I.c <= 0 || I.b < 0 || I.b >= I.c) return false;
  // (a + bω)ω = qb + (a + pb)ω ; cω·ω = cq + cpω
  return ideal_contains(I, F.q() * I.b, I.a + F.p() * I.b) && ideal_contains(I, F.q() * I.c, F.p() * I.c);
}

bool principal_generator(const QuadraticField& F, const IdealLattice& I, FieldElement& gen) {
  long n = I.norm();
  long absd = -F.disc();
  // N(x + yω) = (x + p·y/2)² + |D|·y²/4
  long ymax = long(std::floor(2.0 * std::sqrt(double(n) / double(absd)))) + 1;
  for (long y = 0; y <= ymax; ++y) {
    for (int sgn = 0; sgn < 2; ++sgn) {
      long yy = sgn ? -y : y;
      if (sgn && y == 0) continue;
      double rest = double(n) - double(absd) * yy * yy / 4.0;
      if (rest < -0.5) continue;
      double r = std::sqrt(std::max(0.0, rest));
      long lo = long(std::floor(-F.p() * yy / 2.0 - r)) - 1;
      long hi = long(std::ceil(-F.p() * yy / 2.0 + r)) + 1;
      for (long x = lo; x <= hi; ++x) {
        FieldElement e{x, yy};
        if (F.norm(e) == n && ideal_contains(I, x, yy)) {
          gen = e;
          return true;
        }
      }
    }
  }
  return false;
}

std::string ideal_to_string(const IdealLattice& I) {
  std::ostringstream os;
  os << "[" << I.a << "," << I.b << ";0," << I.c << "]";
  return os.str();
}

int kronecker_symbol(long D, long p) {
  if (p == 2) {
    if (D % 2 == 0) return 0;
    long r = mod_pos(D, 8);
    return (r == 1 || r == 7) ? 1 : -1;
  }
  long a = mod_pos(D, p);
  if (a == 0) return 0;
  // Euler's criterion
  long e = (p - 1) / 2, result = 1, base = a;
  while (e > 0) {
    if (e & 1) result = (__int128)result * base % p;
    base = (__int128)base * base % p;
    e >>= 1;
  }
  return result == 1 ? 1 : -1;
}

std::vector<PrimeFactor> primes_over(const QuadraticField& F, long ell) {
  std::vector<long> roots;
  for (long r = 0; r < ell; ++r) {
    __int128 v = (__int128)r * r - (__int128)F.p() * r - F.q();
    if (mod_pos(long(v % ell), ell) == 0) roots.push_back(r);
  }
  int chi = kronecker_symbol(F.disc(), ell);
  std::vector<PrimeFactor> out;
  if (roots.empty()) {
    if (chi != -1) throw std::logic_error("splitting type disagrees with Kronecker symbol");
    PrimeFactor pf;
    pf.prime = principal_ideal(F, FieldElement(ell));
    pf.rational_prime = ell;
    pf.type = Splitting::Inert;
    pf.residue_degree = 2;
    out.push_back(pf);
    return out;
  }
  if (roots.size() == 1 || (roots.size() == 2 && ell == 2 && roots[0] == roots[1])) {
    if (chi != 0) throw std::logic_error("splitting type disagrees with Kronecker symbol");
  } else if (chi != 1) {
    throw std::logic_error("splitting type disagrees with Kronecker symbol");
  }
  for (long r : roots) {
    PrimeFactor pf;
    pf.prime = ideal_from_generators(F, {FieldElement(ell), FieldElement(-r, 1)});
    pf.rational_prime = ell;
    pf.type = roots.size() == 1 ? Splitting::Ramified : Splitting::Split;
    pf.residue_degree = 1;
    out.push_back(pf);
  }
  std::sort(out.begin(), out.end(), [](const PrimeFactor& x, const PrimeFactor& y) { return x.prime < y.prime; });
  return out;
}

std::vector<PrimeFactor> factor_ideal(const QuadraticField& F, const IdealLattice& I) {
  std::vector<PrimeFactor> out;
  for (long ell : rational_prime_factors(I.norm())) {
    for (PrimeFactor pf : primes_over(F, ell)) {
      IdealLattice power = pf.prime;
      int e = 0;
      while (power.norm() <= I.norm() && ideal_subset(I, power)) {
        ++e;
        power = ideal_mul(F, power, pf.prime);
      }
      if (e > 0) {
        pf.exponent = e;
        out.push_back(pf);
      }
    }
  }
  return out;
}

std::vector<IdealLattice> ideals_up_to_norm(const QuadraticField& F, long bound) {
  std::vector<IdealLattice> out;
  for (long a = 1; a <= bound; ++a) {
    for (long c = 1; a * c <= bound; ++c) {
      for (long b = 0; b < c; ++b) {
        IdealLattice I{a, b, c};
        if (is_ideal(F, I)) out.push_back(I);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<IdealLattice> prime_ideals_up_to_norm(const QuadraticField& F, long bound) {
  std::vector<IdealLattice> out;
  for (long ell = 2; ell <= bound; ++ell) {
    if (rational_prime_factors(ell).size() != 1 || rational_prime_factors(ell)[0] != ell) continue;
    for (const auto& pf : primes_over(F, ell)) {
      if (pf.prime.norm() <= bound) out.push_back(pf.prime);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::array<long, 3>> reduced_forms(long D) {
  if (D >= 0 || mod_pos(D, 4) > 1) throw std::invalid_argument("reduced_forms: bad discriminant");
  std::vector<std::array<long, 3>> out;
  for (long a = 1; 3 * a * a <= -D; ++a) {
    for (long b = -a + 1; b <= a; ++b) {
      if (mod_pos(b - D, 2) != 0) continue;
      long num = b * b - D;
      if (num % (4 * a) != 0) continue;
      long c = num / (4 * a);
      if (c < a) continue;
      if ((std::labs(b) == a || a == c) && b < 0) continue;
      out.push_back({a, b, c});
    }
  }
  return out;
}

long class_number(const QuadraticField& F) { return long(reduced_forms(F.disc()).size()); }

ResidueRing::ResidueRing(const QuadraticField& F, const IdealLattice& I)
    : p_(F.p()), q_(F.q()), ideal_(I) {
  if (I.norm() > (1L << 31)) throw std::invalid_argument("ResidueRing: ideal norm too large");
  n_ = uint32_t(I.norm());
  one_ = reduce(1, 0);
  primes_ = factor_ideal(F, I);
  unit_flag_.assign(n_, 0);
  for (uint32_t i = 0; i < n_; ++i) {
    auto [x, y] = coords(i);
    bool unit = true;
    for (const auto& pf : primes_) {
      if (ideal_contains(pf.prime, x, y)) {
        unit = false;
        break;
      }
    }
    if (unit) {
      unit_flag_[i] = 1;
      units_.push_back(i);
    }
  }
  inverse_.assign(n_, 0);
  uint64_t order = units_.size();
  for (uint32_t u : units_) {
    uint64_t e = order - 1;
    uint32_t r = one_, base = u;
    while (e > 0) {
      if (e & 1) r = mul(r, base);
      base = mul(base, base);
      e >>= 1;
    }
    inverse_[u] = r;
  }
}

uint32_t ResidueRing::reduce(long x, long y) const {
  long k = floor_div(x, ideal_.a);
  x -= k * ideal_.a;
  y -= k * ideal_.b;
  y = mod_pos(y, ideal_.c);
  return uint32_t(x + ideal_.a * y);
}

uint32_t ResidueRing::reduce(const FieldElement& e) const {
  long m = ideal_.a * ideal_.c;
  BigInt x = e.a % m, y = e.b % m;
  return reduce(x.get_si(), y.get_si());
}

FieldElement ResidueRing::lift(uint32_t i) const {
  auto [x, y] = coords(i);
  return {x, y};
}

uint32_t ResidueRing::add(uint32_t u, uint32_t v) const {
  auto [x1, y1] = coords(u);
  auto [x2, y2] = coords(v);
  return reduce(x1 + x2, y1 + y2);
}

uint32_t ResidueRing::sub(uint32_t u, uint32_t v) const {
  auto [x1, y1] = coords(u);
  auto [x2, y2] = coords(v);
  return reduce(x1 - x2, y1 - y2);
}

uint32_t ResidueRing::neg(uint32_t u) const {
  auto [x, y] = coords(u);
  return reduce(-x, -y);
}

uint32_t ResidueRing::mul(uint32_t u, uint32_t v) const {
  auto [x1, y1] = coords(u);
  auto [x2, y2] = coords(v);
  __int128 bb = (__int128)y1 * y2;
  __int128 x = (__int128)x1 * x2 + (__int128)q_ * bb;
  __int128 y = (__int128)x1 * y2 + (__int128)x2 * y1 + (__int128)p_ * bb;
  long m = ideal_.a * ideal_.c;
  return reduce(long(x % m), long(y % m));
}

uint32_t ResidueRing::inverse(uint32_t x) const {
  if (!is_unit(x)) throw std::domain_error("ResidueRing::inverse: not a unit");
  return inverse_[x];
}

}  // namespace bianchi
