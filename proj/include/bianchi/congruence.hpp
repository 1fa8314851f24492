#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bianchi/number_field.hpp"
#include "bianchi/presentations.hpp"

namespace bianchi {

enum class Flavor { Principal, Hecke, Semi };

std::string flavor_name(Flavor f);
Flavor parse_flavor(const std::string& s);

struct LevelStructure {
  IdealLattice ideal;
  Flavor flavor = Flavor::Principal;
};

// Exact membership predicate: Γ(I): a,d ≡ 1, b,c ≡ 0; Γ₀(I): c ≡ 0; Γ₁(I): c ≡ 0, a,d ≡ 1.
bool level_contains(const QuadraticField& F, const LevelStructure& level, const Mat2& g);
bool level_contains_minus_identity(const QuadraticField& F, const LevelStructure& level);

// Residue ring with lookup tables for small norms.
class FastResidueRing {
 public:
  FastResidueRing(const QuadraticField& F, const IdealLattice& I);
  uint32_t size() const { return n_; }
  const ResidueRing& ring() const { return ring_; }
  uint32_t mul(uint32_t x, uint32_t y) const { return mul_.empty() ? ring_.mul(x, y) : mul_[std::size_t(x) * n_ + y]; }
  uint32_t add(uint32_t x, uint32_t y) const { return add_.empty() ? ring_.add(x, y) : add_[std::size_t(x) * n_ + y]; }
  uint32_t neg(uint32_t x) const { return ring_.neg(x); }

 private:
  ResidueRing ring_;
  uint32_t n_;
  std::vector<uint32_t> mul_, add_;
};

// |SL₂(O/I)| = N(I)³ ∏_{p|I} (1 − N(p)^{−2})
BigInt sl2_order_formula(const QuadraticField& F, const IdealLattice& I);
// Size of the subgroup of SL₂(O/I) generated by the reductions of gens, by BFS closure.
BigInt enumerate_generated_order(const QuadraticField& F, const IdealLattice& I, const std::vector<Mat2>& gens);

struct QuotientFactor {
  IdealLattice ideal;
  BigInt enumerated_order;
  BigInt formula_order;
  // false when the formula order exceeded the enumeration budget and was not enumerated
  bool enumerated = true;
};

struct FiniteQuotient {
  IdealLattice ideal;
  std::vector<QuotientFactor> factors;  // one per prime-power factor
  BigInt order;                         // CRT product of the enumerated factor orders
  BigInt formula_order;
  bool generated = true;                // every enumerated factor reached the formula order
  bool fully_enumerated = true;         // no factor was skipped by the budget
};

// Elementary generators S, T, U, used when no presentation is given.
std::vector<Mat2> elementary_generators();

FiniteQuotient sl2_quotient(const QuadraticField& F, const IdealLattice& I, const std::vector<Mat2>& gens = {},
                            long norm_bound = 10000, uint64_t enumeration_budget = 20000000);

// Index in SL₂(O_F) (closed forms: |SL₂(O/I)|, #unimodular rows, |P¹(O/I)|).
BigInt subgroup_index(const QuadraticField& F, const LevelStructure& level, long norm_bound = 10000);
bool check_index_level(const QuadraticField& F, const LevelStructure& level);

// Permutation action of the presentation generators on right cosets Γ_level·x.
// For projective presentations the cosets are those of ±Γ_level.
struct CosetTable {
  LevelStructure level;
  long d = 0;
  bool projective = false;
  bool minus_identity_in_level = false;
  long index = 0;
  // action[g][c] = c·g, inverse_action[g][c] = c·g⁻¹
  std::vector<std::vector<uint32_t>> action;
  std::vector<std::vector<uint32_t>> inverse_action;
  // Schreier tree: coset c = parent[c]·letter[c]; root 0 has parent −1
  std::vector<int32_t> parent;
  std::vector<int> letter;

  uint32_t act(uint32_t c, int letter) const {
    return letter > 0 ? action[letter - 1][c] : inverse_action[-letter - 1][c];
  }
  uint32_t act_word(uint32_t c, const Word& w) const;
  // permutation c ↦ c·w
  std::vector<uint32_t> permutation(const Word& w) const;
  Word transversal_word(uint32_t c) const;
  bool is_transitive() const;
};

CosetTable coset_table(const QuadraticField& F, const FinitePresentation& p, const LevelStructure& level);

enum class TorsionStatus { CertifiedFree, HasTorsion, Unknown };
std::string torsion_status_name(TorsionStatus s);

struct TorsionVerdict {
  TorsionStatus status = TorsionStatus::Unknown;
  std::optional<Mat2> witness;
  std::string reason;
};

TorsionVerdict is_torsion_free(const QuadraticField& F, const LevelStructure& level);

// All ideals of norm ≤ bound paired with each flavor.
std::vector<LevelStructure> standard_levels(const QuadraticField& F, long max_norm);

}  // namespace bianchi
