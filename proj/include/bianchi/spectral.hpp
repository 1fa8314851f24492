#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bianchi/number_field.hpp"
#include "json.hpp"

namespace bianchi {

// Finite-order character of (O/f)^× trivial on the image of O^×, with values exp(2πi·angle[x]/den).
struct HeckeCharacterSpec {
  IdealLattice conductor;
  long den = 1;
  std::vector<long> angle;     // indexed by residue; −1 on non-units
  bool primitive = false;      // not induced from a proper divisor of the conductor
  cplx value(uint32_t residue) const;
  bool is_trivial() const;
};

HeckeCharacterSpec trivial_character(const QuadraticField& F);
// All characters of (O/f)^× / O^×, trivial character first.
std::vector<HeckeCharacterSpec> characters_mod(const QuadraticField& F, const IdealLattice& f);
// Exact multiplicativity and triviality on units, over the angle table.
bool character_is_consistent(const QuadraticField& F, const HeckeCharacterSpec& chi);
// χ(π) for an element coprime to the conductor
cplx character_at(const QuadraticField& F, const HeckeCharacterSpec& chi, const FieldElement& x);

// (1 − χ(π)q^{−2s}) / (1 − χ(π)q^{1−2s}); throws std::domain_error at a pole of the denominator
cplx local_unramified_factor(double q, cplx chi_pi, cplx s);
// the geometric series 1 + Σ_{l≥1} (1 − q^{−1}) q^l χ(π)^l q^{−2sl}, for Re(s) > 1/2
cplx local_unramified_series(double q, cplx chi_pi, cplx s, int terms = 4000);
// |J_v|² / |φ_v|² = q^{−m}, m ≥ 1
double ramified_local_norm(double q, int m);
// π Γ(2s − 1) / Γ(2s); throws std::domain_error at s = 1/2
cplx archimedean_factor(cplx s);
cplx archimedean_factor_derivative(cplx s);

struct ScatteringFactor {
  cplx s;
  cplx value;
  cplx archimedean;
  cplx l_ratio;        // ζ_F(2s − 1) / ζ_F(2s)
  cplx ramified = 1;   // product of local J_v factors (empty for level one)
  cplx normalization;  // 2 / √|D|
  double pole_distance = 0;
};

// c(s) = (2/√|D|) · π Γ(2s−1)/Γ(2s) · ζ_F(2s−1)/ζ_F(2s), trivial character, level one.
// Unitary on Re(s) = 1/2.
ScatteringFactor global_scattering(const QuadraticField& F, const HeckeCharacterSpec& chi, cplx s);
nlohmann::json to_json(const ScatteringFactor& c);

// Classical normalization: E(P, s) = Σ_{(c,d) coprime / units} (r / (|cz + d|² + |c|²r²))^s, with
// constant term r^s + φ(s) r^{2−s}. The variable change is s_classical = 2·s.
cplx classical_scattering(const QuadraticField& F, double s_classical);

struct EisensteinOptions {
  double cutoff = 40.0;      // terms with π·Q(v) above the cutoff are dropped in both Epstein sums
  int grid = 12;             // torus samples per direction
  std::vector<double> heights{1.0, 1.25, 1.5, 1.75, 2.0};
  double tolerance = 1e-9;   // maximum admissible tail bound
};

struct EisensteinValue {
  double value = 0;       // Σ over all nonzero pairs / units; equals ζ_F(s)·E(P, s)
  double tail_bound = 0;
  long terms = 0;
};

// Lattice sum at P = (z, r) by the incomplete-gamma splitting of the 4-dimensional Epstein sum.
EisensteinValue eisenstein_lattice_sum(const QuadraticField& F, double s, cplx z, double r,
                                       const EisensteinOptions& opt = {});

struct EisensteinFit {
  double s = 0;
  double A = 0, B = 0;        // constant term A·r^s + B·r^{2−s}
  double ratio = 0;           // B / A
  double closed_form = 0;     // φ(s) from global_scattering at s/2
  double zeta_s = 0;          // ζ_F(s), expected value of A
  double fit_residual = 0;
  double tail_bound = 0;
  std::vector<double> constant_terms;
};

// Torus-averaged constant terms at the configured heights, least-squares fitted.
EisensteinFit eisenstein_constant_term_fit(const QuadraticField& F, double s, const EisensteinOptions& opt = {});
double torus_average(const QuadraticField& F, double s, double r, const EisensteinOptions& opt);

// Scalar scattering data for the Maass–Selberg relations.
struct ScalarScattering {
  std::function<cplx(cplx)> c;
  std::function<cplx(cplx)> dc;  // d/ds
};

// c(s) = (a + 1 − s)/(a + s), unitary on Re(s) = 1/2
ScalarScattering synthetic_scattering(double a);

// ⟨T^Y E(s, φ), T^Y E(s′, ψ)⟩ with Ψ(s) = c(s) scalar; requires s + s̄′ ≠ 1 and s ≠ s̄′.
cplx maass_selberg(const ScalarScattering& sc, cplx phi_psi, cplx s, cplx s2, double Y);
// The real-s form as printed: Y^{4s−2}/(4s−2)⟨φ,ψ⟩ − Y^{2−4s}/(4s−2)|c|²⟨φ,ψ⟩ + log Y·c⟨φ,ψ⟩ + ⟨dΨ(s+iu)/du φ,ψ⟩.
cplx maass_selberg_real(const ScalarScattering& sc, cplx phi_psi, double s, double Y);
// The s′ → s limit of the nondegenerate form: the last two terms become 2·log Y·c(s) − c′(s)/2.
cplx maass_selberg_limit(const ScalarScattering& sc, cplx phi_psi, double s, double Y);
// d/dY of maass_selberg_real
cplx maass_selberg_real_dY(const ScalarScattering& sc, cplx phi_psi, double s, double Y);

struct SyntheticSpectrum {
  std::vector<std::pair<double, long>> discrete;  // (λ, multiplicity)
  std::vector<std::pair<int, double>> weights;    // (l, d_l)
  double lambda_v = 0;
  // scalar Ψ_l(iu) and its u-derivative; empty means no scattering terms
  std::function<cplx(int, double)> psi;
  std::function<cplx(int, double)> dpsi;
};

struct TraceOptions {
  double u_max = 40.0;
  double tolerance = 1e-10;
};

struct TraceValue {
  cplx value;
  cplx discrete;
  cplx residual;   // (1/4) Σ d_l φ(·) tr Ψ_l(0)
  cplx integral;   // −(1/2π) ∫ …
  double tail_estimate = 0;
};

TraceValue regularized_trace_eval(const SyntheticSpectrum& spec, const std::function<double(double)>& phi,
                                  const TraceOptions& opt = {});

struct LogDerivativeRow {
  long conductor_norm = 0;
  std::string conductor;
  int character = 0;
  bool primitive = false;
  double t = 0;
  double value = 0;
  double doubled_cutoff_value = 0;
  double reference_curve = 0;  // (log N f)²
};

struct LogDerivativeOptions {
  double eta = 0.5;      // evaluate at w = 1 + eta + 2it, inside the region of absolute convergence
  long cutoff = 20000;   // smoothing scale X for the weight exp(−N/X)
};

// |2·L′/L(χ, 1 + η + 2it)| from smoothed Euler-product sums; non-rigorous proxy for the critical line.
std::vector<LogDerivativeRow> log_derivative_experiment(const QuadraticField& F,
                                                        const std::vector<IdealLattice>& conductors,
                                                        const std::vector<double>& t_grid,
                                                        const LogDerivativeOptions& opt = {});
// the same proxy for a single character
double log_derivative_proxy(const QuadraticField& F, const HeckeCharacterSpec& chi, double t, double eta,
                            long cutoff);
std::string log_derivative_csv(const std::vector<LogDerivativeRow>& rows);

}  // namespace bianchi
