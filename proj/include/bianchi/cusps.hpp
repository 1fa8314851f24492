#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "bianchi/congruence.hpp"
#include "bianchi/presentations.hpp"
#include "json.hpp"

namespace bianchi {

struct Cusp {
  // representative (a : c) = t·∞ for the transversal element t of the orbit's first coset
  FieldElement a{1}, c{0};
  uint32_t coset = 0;           // orbit representative
  std::vector<uint32_t> orbit;  // cosets in the Borel orbit, sorted
  Mat2 transversal;
};

// Cusps of the level subgroup: orbits of the Borel words on the cosets. Requires class number one.
std::vector<Cusp> cusp_orbits(const QuadraticField& F, const FinitePresentation& p, const CosetTable& t);

struct CuspLattice {
  // Z-coordinates in the basis (1, ω) of a reduced basis, and its complex embedding
  std::array<long, 2> b1{}, b2{};
  cplx v1, v2;
  double alpha1 = 0, alpha2 = 0;
  double ratio() const { return alpha2 / alpha1; }
};

// Successive minima of the lattice spanned by two independent complex numbers, by Lagrange-Gauss
// reduction certified by enumeration in the ball of radius α₂.
CuspLattice reduce_lattice(cplx u, cplx v);

// Translations x ∈ O_F with t·n(x)·t⁻¹ in the level subgroup, found as the stabilizer of the cusp's coset
// under the translation words of the presentation.
CuspLattice cusp_lattice(const QuadraticField& F, const FinitePresentation& p, const CosetTable& t, const Cusp& c);

struct CuspReport {
  std::string level;
  long index = 0;
  double volume = 0;
  long h = 0;
  std::vector<std::pair<double, double>> alphas;
  double sup_ratio = 0;
  double sum_ratio = 0;
  double sum_ratio_sq = 0;
  // Σ(α₂/α₁)² ≤ vol^{1−α}
  double alpha_exponent = 0;
  bool square_bound = false;
};

CuspReport cusp_report(const QuadraticField& F, const LevelStructure& level, double alpha_exponent = 0.5);
// The same comparison for a list of precomputed lattices.
CuspReport lattice_report(const std::string& name, const std::vector<CuspLattice>& lattices, double volume,
                          double alpha_exponent);

struct UniformityReport {
  std::vector<CuspReport> levels;
  double sup_ratio = 0;
  bool all_square_bounds = true;
};

UniformityReport uniformity_report(const QuadraticField& F, const std::vector<LevelStructure>& levels,
                                   double alpha_exponent = 0.5);

// Number of cosets fixed by γ ∈ SL₂(O_F); p is the presentation the table was built from.
long count_geodesic_lifts(const QuadraticField& F, const FinitePresentation& p, const Mat2& gamma,
                          const CosetTable& t);

// Volume of the quotient of H³ by the level subgroup: PSL index times the covolume of PSL₂(O_F).
double level_volume(const QuadraticField& F, const CosetTable& t);

nlohmann::json to_json(const CuspReport& r);

// Local unipotent analysis in SL₂(O/p^k) for an unramified rational prime p.
struct LocalAnalysis {
  long d = 0;
  long p = 0;
  int k = 0;
  std::string level;
  long points = 0;              // |K_p / B_p K_p(p^k)| = |P¹(O/p^k)|
  BigInt local_index;           // [K_p : K_p']
  double sp_formula = 0;        // rewritten sum over P¹
  double sp_direct = 0;         // sum over double cosets N_p \ K_p / K_p'
  long double_cosets = 0;
  std::vector<long> d_l;        // l = 0..k
  std::vector<std::vector<long>> q;  // q[l][j], j = 0..k−1
  std::vector<bool> product_bound;   // d_l ≤ ∏_j q[l][j]
  std::vector<double> d_l_bound;     // p^{17k/9}
  bool dl_estimate_holds = true;     // for every l ≤ k/3
  bool hypothesis = true;            // K_p(p^{k−1}) ⊄ K_p'
  // the elementary generators of K_p' / K_p(p^k) were checked to generate a group of the right order
  bool generators_verified = false;
};

// Local level at an ideal I supported at p. k = 0 picks the smallest k with p^k ∈ I.
LocalAnalysis local_cusp_analysis(const QuadraticField& F, long p, const LevelStructure& level, int k = 0);
// The standard local level p^k·O_F.
LocalAnalysis local_cusp_analysis(const QuadraticField& F, long p, int k, Flavor flavor);

nlohmann::json to_json(const LocalAnalysis& a);

struct ClosureReport {
  long p = 0;
  int degree = 1;           // F_q with q = p^degree
  long group_order = 0;
  long unipotents = 0;      // nontrivial
  long pairs = 0;           // ordered noncommuting pairs
  long distinct_closures = 0;
  std::map<long, long> closure_orders;  // order → number of pairs
  long full = 0;
  long subfield_type = 0;   // conjugate in GL₂(F_q) to SL₂(F_p)
  long other = 0;
  long max_noncommuting_in_proper = 0;
  bool pass = false;
};

// Closure of every noncommuting pair of unipotents in SL₂(F_q), q = p^degree (degree 1 or 2).
ClosureReport unipotent_closure_check(long p, int degree);

nlohmann::json to_json(const ClosureReport& r);

}  // namespace bianchi
