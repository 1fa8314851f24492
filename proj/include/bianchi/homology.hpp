#pragma once

#include <array>
#include <string>
#include <vector>

#include "bianchi/congruence.hpp"
#include "bianchi/modules.hpp"
#include "bianchi/presentations.hpp"
#include "bianchi/snf.hpp"

namespace bianchi {

struct TorsionReport {
  long free_rank = 0;
  BigInt torsion_order = 1;
  std::vector<BigInt> elementary_divisors;  // invariant factors ≠ 1
  Factorization factored;
  // provenance
  std::string field;
  std::string level;
  std::string weight;
  std::string lattice;

  std::string group_string() const;  // e.g. "Z^2 + Z/2 + Z/6"
};

TorsionReport make_report(long free_rank, const std::vector<BigInt>& invariant_factors);

// Reidemeister–Schreier presentation of the subgroup stabilizing coset 0. Schreier generators
// s_{c,g} = t_c·g·t_{c·g}⁻¹ for non-tree edges; relators t_c·r·t_c⁻¹ rewritten, empty words dropped.
// Generator images are lifted to the level subgroup when the input presentation is projective and
// −I is not in the level.
struct SchreierData {
  FinitePresentation presentation;
  // for each Schreier generator, its (coset, parent-generator index)
  std::vector<std::pair<uint32_t, int>> origin;
};

SchreierData rewrite_subgroup_data(const QuadraticField& F, const FinitePresentation& p, const CosetTable& t);
FinitePresentation rewrite_subgroup(const QuadraticField& F, const FinitePresentation& p, const CosetTable& t);

struct FoxComplex {
  // d2ᵀ : rows are 2-cells ⊗ basis, columns 1-cells ⊗ basis; d1 : C₁ → C₀
  SparseIntMatrix d2t;
  SparseIntMatrix d1;
  long c0 = 0, c1 = 0, c2 = 0;
  SparseIntMatrix d2() const { return d2t.transpose(); }
};

// Cellular chain complex of the presentation complex with coefficients in m.
// d1 block of g is action(g) − 1; d2 block (g, r) is the action of the Fox derivative
// ∂r/∂g = Σ_{x_i = g} x_{i+1}…x_L − Σ_{x_i = g⁻¹} x_i…x_L. Throws when a relator does not act trivially.
FoxComplex fox_complex(const FinitePresentation& p, const IntegralModule& m);

// The same complex for the subgroup of index t.index through the induced module Z[cosets] ⊗ V,
// with g·(e_c ⊗ v) = e_{c·g⁻¹} ⊗ g·v. Homotopy equivalent to the complex of the rewritten presentation.
FoxComplex induced_fox_complex(const FinitePresentation& p, const CosetTable& t, const IntegralModule& m);

struct HomologyOptions {
  // kernel-saturation method when dim C₁ is at most this; larger complexes use tors H₁ = tors coker d2
  long kernel_method_limit = 400;
  bool modular_check = false;
  uint64_t seed = 1;
  // build the complex from the Reidemeister–Schreier presentation instead of the induced module
  bool via_rewriting = false;
};

struct GroupHomology {
  TorsionReport h0;
  TorsionReport h1;
  long c0 = 0, c1 = 0, c2 = 0;
  long rank_d1 = 0, rank_d2 = 0;
  std::string method;
};

GroupHomology homology_of_complex(FoxComplex&& cx, const HomologyOptions& opt = {});
GroupHomology group_homology(const FinitePresentation& p, const IntegralModule& m, const HomologyOptions& opt = {});

// Presentation used for a level. Rewriting: projective when −I ∉ level (images are lifted into the level).
// Induced module: projective when −I ∉ level and −I acts trivially on m. Otherwise the SL lift.
FinitePresentation presentation_for_level(const QuadraticField& F, const LevelStructure& level,
                                          const IntegralModule& m, bool via_rewriting);

struct CongruenceHomology {
  CosetTable table;
  GroupHomology homology;
  long schreier_generators = 0;
  long schreier_relators = 0;
};

CongruenceHomology congruence_homology(const QuadraticField& F, const LevelStructure& level, const IntegralModule& m,
                                       const HomologyOptions& opt = {});

// H₀(Γ; V) = V / Σ_γ (γ − 1)V over the Schreier generators of the level subgroup, computed in V/MV where
// M is the exponent of the quotient by the elementary matrices of the principal level.
TorsionReport level_coinvariants(const QuadraticField& F, const LevelStructure& level, const IntegralModule& m);

struct TorusComplexData {
  IntMat u1, u2;   // actions of the lattice generators
  IntMat d1, d2;   // d1 : V² → V, d2 : V → V²
};

TorusComplexData torus_complex(const IntegralModule& m, const Mat2& u1, const Mat2& u2);
// H₀, H₁, H₂ of Z² = ⟨u1, u2⟩ with coefficients in m
std::array<TorsionReport, 3> torus_homology(const IntegralModule& m, const Mat2& u1, const Mat2& u2);

}  // namespace bianchi
