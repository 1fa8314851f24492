#pragma once

#include <gmpxx.h>

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace bianchi {

using BigInt = mpz_class;
using cplx = std::complex<double>;

// a + b·ω
struct FieldElement {
  BigInt a = 0;
  BigInt b = 0;
  FieldElement() = default;
  FieldElement(long x) : a(x), b(0) {}
  FieldElement(BigInt x, BigInt y) : a(std::move(x)), b(std::move(y)) {}
  bool is_zero() const { return a == 0 && b == 0; }
  bool operator==(const FieldElement& o) const { return a == o.a && b == o.b; }
  bool operator!=(const FieldElement& o) const { return !(*this == o); }
};

class QuadraticField {
 public:
  explicit QuadraticField(long d);

  long d() const { return d_; }
  long disc() const { return disc_; }
  // true when ω = (1+√d)/2, false when ω = √d
  bool half_integral_omega() const { return p_ == 1; }
  // ω² = p·ω + q
  long p() const { return p_; }
  long q() const { return q_; }

  FieldElement omega() const { return {0, 1}; }
  FieldElement add(const FieldElement& x, const FieldElement& y) const;
  FieldElement sub(const FieldElement& x, const FieldElement& y) const;
  FieldElement neg(const FieldElement& x) const;
  FieldElement mul(const FieldElement& x, const FieldElement& y) const;
  FieldElement conj(const FieldElement& x) const;
  BigInt norm(const FieldElement& x) const;
  BigInt trace(const FieldElement& x) const;
  // exact division when y | x, throws otherwise
  FieldElement div_exact(const FieldElement& x, const FieldElement& y) const;
  bool divides(const FieldElement& y, const FieldElement& x) const;
  // nearest-integer quotient for the Euclidean algorithm
  FieldElement round_div(const FieldElement& x, const FieldElement& y) const;

  cplx omega_complex() const;
  cplx embed(const FieldElement& x) const;

  std::vector<FieldElement> units() const;
  int unit_count() const;
  bool is_unit(const FieldElement& x) const { return norm(x) == 1; }
  bool euclidean() const;
  std::string to_string(const FieldElement& x) const;

  bool operator==(const QuadraticField& o) const { return d_ == o.d_; }

 private:
  long d_;
  long disc_;
  long p_;
  long q_;
};

QuadraticField make_field(long d);

// Row HNF [[a, b], [0, c]] in basis (1, ω): Z-basis {a + bω, cω}, 0 ≤ b < c.
struct IdealLattice {
  long a = 1;
  long b = 0;
  long c = 1;
  long norm() const { return a * c; }
  bool operator==(const IdealLattice& o) const { return a == o.a && b == o.b && c == o.c; }
  bool operator!=(const IdealLattice& o) const { return !(*this == o); }
  bool operator<(const IdealLattice& o) const;
};

IdealLattice unit_ideal();
IdealLattice ideal_from_generators(const QuadraticField& F, const std::vector<FieldElement>& gens);
IdealLattice principal_ideal(const QuadraticField& F, const FieldElement& x);
IdealLattice ideal_mul(const QuadraticField& F, const IdealLattice& I, const IdealLattice& J);
IdealLattice ideal_pow(const QuadraticField& F, const IdealLattice& I, int e);
IdealLattice ideal_add(const QuadraticField& F, const IdealLattice& I, const IdealLattice& J);
bool ideal_contains(const IdealLattice& I, long x, long y);
bool ideal_contains(const IdealLattice& I, const FieldElement& x);
// I ⊆ J
bool ideal_subset(const IdealLattice& I, const IdealLattice& J);
bool is_ideal(const QuadraticField& F, const IdealLattice& I);
// canonical generator when the ideal is principal (always the case for h = 1)
bool principal_generator(const QuadraticField& F, const IdealLattice& I, FieldElement& gen);
std::string ideal_to_string(const IdealLattice& I);

int kronecker_symbol(long D, long p);

enum class Splitting { Split, Inert, Ramified };

struct PrimeFactor {
  IdealLattice prime;
  int exponent = 0;
  long rational_prime = 0;
  Splitting type = Splitting::Split;
  int residue_degree = 1;
};

std::vector<PrimeFactor> factor_ideal(const QuadraticField& F, const IdealLattice& I);
// prime ideals lying over the rational prime p
std::vector<PrimeFactor> primes_over(const QuadraticField& F, long p);
std::vector<IdealLattice> ideals_up_to_norm(const QuadraticField& F, long bound);
std::vector<IdealLattice> prime_ideals_up_to_norm(const QuadraticField& F, long bound);

long class_number(const QuadraticField& F);
std::vector<std::array<long, 3>> reduced_forms(long disc);

// O/I with representatives x + yω, 0 ≤ x < a, 0 ≤ y < c, indexed x + a·y.
class ResidueRing {
 public:
  ResidueRing(const QuadraticField& F, const IdealLattice& I);

  const IdealLattice& ideal() const { return ideal_; }
  uint32_t size() const { return n_; }
  uint32_t reduce(long x, long y) const;
  uint32_t reduce(const FieldElement& x) const;
  std::pair<long, long> coords(uint32_t i) const { return {long(i % ideal_.a), long(i / ideal_.a)}; }
  FieldElement lift(uint32_t i) const;
  uint32_t zero() const { return 0; }
  uint32_t one() const { return one_; }
  uint32_t add(uint32_t x, uint32_t y) const;
  uint32_t sub(uint32_t x, uint32_t y) const;
  uint32_t neg(uint32_t x) const;
  uint32_t mul(uint32_t x, uint32_t y) const;
  bool is_unit(uint32_t x) const { return unit_flag_[x] != 0; }
  const std::vector<uint32_t>& units() const { return units_; }
  // inverse of a unit, throws on non-units
  uint32_t inverse(uint32_t x) const;
  const std::vector<PrimeFactor>& prime_factors() const { return primes_; }

 private:
  long p_, q_;
  IdealLattice ideal_;
  uint32_t n_;
  uint32_t one_;
  std::vector<PrimeFactor> primes_;
  std::vector<uint8_t> unit_flag_;
  std::vector<uint32_t> units_;
  std::vector<uint32_t> inverse_;
};

struct ZetaValue {
  cplx value;
  double error_bound = 0.0;
  std::string method;
};

// Re(s) > 1: Dirichlet partial sum over ideal norms ≤ cutoff plus rigorous tail bound.
// Otherwise: Epstein-zeta continuation (cutoff ignored).
ZetaValue dedekind_zeta(const QuadraticField& F, cplx s, long cutoff);
// Epstein continuation everywhere except the pole.
ZetaValue dedekind_zeta_epstein(const QuadraticField& F, cplx s);
// number of ideals of norm n, for n = 1..bound
std::vector<long> ideal_counts(const QuadraticField& F, long bound);

double covolume(const QuadraticField& F);

}  // namespace bianchi
