#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "bianchi/number_field.hpp"
#include "bianchi/presentations.hpp"
#include "bianchi/snf.hpp"

namespace bianchi {

using IntMat = Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic>;

struct WeightPair {
  int n1 = 0;
  int n2 = 0;
  bool strongly_acyclic() const { return n1 != n2; }
  std::string to_string() const { return "(" + std::to_string(n1) + "," + std::to_string(n2) + ")"; }
};

// Z-lattice V_Z = (Sym^{n1} O² ⊗ Sym^{n2} conj(O²)) viewed over Z, or the rank-1 trivial module.
class IntegralModule {
 public:
  IntegralModule(const QuadraticField& F, WeightPair w, int degree_bound = 6);
  static IntegralModule trivial_z(const QuadraticField& F);

  const QuadraticField& field() const { return F_; }
  WeightPair weight() const { return w_; }
  bool is_trivial_z() const { return trivial_z_; }
  int rank() const { return rank_; }
  // number of O_F-basis monomials, (n1+1)(n2+1)
  int monomial_count() const { return (w_.n1 + 1) * (w_.n2 + 1); }
  // Z-basis index of (e₁^a e₂^{n1−a} ⊗ ē₁^b ē₂^{n2−b}) · ω^k, k ∈ {0, 1}
  int index(int a, int b, int k) const { return (a * (w_.n2 + 1) + b) * 2 + k; }
  std::string label(int i) const;
  // cache tag of the lattice choice
  std::string lattice_tag() const;

  // O_F-matrix of γ on the monomial basis, entries as field elements
  std::vector<std::vector<FieldElement>> field_action(const Mat2& g) const;
  IntMat action(const Mat2& g) const;

 private:
  IntegralModule(const QuadraticField& F) : F_(F) {}
  QuadraticField F_;
  WeightPair w_;
  bool trivial_z_ = false;
  int rank_ = 0;
};

// Integer matrix of multiplication by x on O_F in basis (1, ω).
IntMat multiplication_matrix(const QuadraticField& F, const FieldElement& x);

struct PairingData {
  // gram = gram_num / gram_den
  IntMat gram_num;
  int64_t gram_den = 1;
  // O_F-valued determinant pairing on the monomial basis, scaled by o_den
  std::vector<std::vector<FieldElement>> o_gram_num;
  int64_t o_den = 1;
  // V_Z' = (1/dual_den) · column span of dual_basis (column HNF)
  DenseIntMatrix dual_basis;
  BigInt dual_den = 1;
  // m = n1!·n2!
  int64_t m = 1;
};

PairingData pairing(const IntegralModule& M);

// Column Hermite normal form of the lattice spanned by the columns of A (zero columns dropped).
DenseIntMatrix column_hnf(const DenseIntMatrix& A);
// Dual of (1/den)·span(B) with respect to the rational gram matrix.
void dual_lattice(const IntMat& gram_num, int64_t gram_den, const DenseIntMatrix& B, const BigInt& den,
                  DenseIntMatrix& out_basis, BigInt& out_den);

// Saturated basis (columns) of ker(action(u) − 1).
DenseIntMatrix unipotent_invariants(const IntegralModule& M, const Mat2& u);

// Product of all binomial coefficients C(n1, k) and C(n2, k).
BigInt binomial_constant(WeightPair w);

IntMat to_intmat(const DenseIntMatrix& A);
DenseIntMatrix to_dense(const IntMat& A);

}  // namespace bianchi
