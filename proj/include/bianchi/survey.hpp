#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bianchi/congruence.hpp"
#include "bianchi/modules.hpp"
#include "json.hpp"

namespace bianchi {

constexpr const char* kPipelineVersion = "bianchi-survey-3";

struct SurveyConfig {
  long d = -1;
  bool trivial_weight = true;
  WeightPair weight{0, 0};
  Flavor flavor = Flavor::Principal;
  // "primes": prime ideals of norm ≤ max_norm; "all": all ideals of norm ≤ max_norm; "list": explicit ideals
  std::string levels = "primes";
  long max_norm = 20;
  std::vector<IdealLattice> ideals;
  double alpha = 0.5;
  // rows with index_sl2 · rank(V)² above the budget are marked failed without running the pipeline
  long budget = 40000;
  int threads = 1;
  std::optional<double> target;  // overrides the built-in growth target
  std::string csv, json, svg;
  std::string cache_dir;

  // verify suites
  long verify_index_norm = 500;
  long verify_h0_norm = 50;
  std::vector<std::array<long, 2>> verify_closure{{5, 1}, {7, 1}, {3, 2}};
  double verify_ms_tolerance = 1e-6;
  std::string presentation_file;
};

// Unknown keys and malformed values throw std::invalid_argument naming the key.
SurveyConfig config_from_json(const nlohmann::json& j, const SurveyConfig& base = {});
SurveyConfig load_config(const std::string& path);
// Scalar overrides "key=value"; same key names as the file.
SurveyConfig apply_overrides(SurveyConfig cfg, const std::vector<std::string>& overrides);
nlohmann::json config_to_json(const SurveyConfig& cfg);
void validate(const SurveyConfig& cfg);
std::string weight_label(const SurveyConfig& cfg);
// Resolution order: explicit config value, BIANCHI_CACHE_DIR, ".bianchi-cache".
std::string resolve_cache_dir(const SurveyConfig& cfg);

struct GrowthTarget {
  std::optional<double> value;
  std::string provenance;
};

// |t⁽²⁾(V)| for the trivial and tautological modules; other weights have no built-in target.
GrowthTarget growth_target(const SurveyConfig& cfg);

struct SurveyRow {
  std::string level;
  long level_norm = 0;
  BigInt index_sl2 = 0;
  bool psl_correction = false;  // SL index halved because −I ∉ Γ
  double volume = 0;
  long h = 0;                   // cusp count
  double sup_alpha_ratio = 0;
  long free_rank = 0;
  BigInt torsion_order = 1;
  std::string torsion_factored;
  std::string torsion_group;
  double log_torsion_over_vol = 0;
  std::optional<double> target;
  std::string torsion_status;
  std::string status = "ok";
  bool cache_hit = false;

  bool operator==(const SurveyRow& o) const;
};

struct SurveyTable {
  std::string field;
  std::string weight;
  std::string flavor;
  GrowthTarget target;
  std::vector<SurveyRow> rows;
  long cache_hits = 0;
  long computed = 0;
};

std::vector<IdealLattice> survey_levels(const QuadraticField& F, const SurveyConfig& cfg);
SurveyRow compute_row(const QuadraticField& F, const SurveyConfig& cfg, const IdealLattice& I);
SurveyTable run_survey(const SurveyConfig& cfg);

std::string cache_key(const SurveyConfig& cfg, const IdealLattice& I);
nlohmann::json row_to_json(const SurveyRow& r);
SurveyRow row_from_json(const nlohmann::json& j);

std::string table_to_csv(const SurveyTable& t);
nlohmann::json table_to_json(const SurveyTable& t);
SurveyTable table_from_json(const nlohmann::json& j);
std::string table_to_svg(const SurveyTable& t);
// format ∈ {csv, json, svg}; I/O errors throw std::runtime_error with the path
void emit(const SurveyTable& t, const std::string& format, const std::string& path);

struct SuiteResult {
  std::string name;
  bool pass = false;
  bool budget_exhausted = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<SuiteResult> suites;
  bool pass() const;
  bool budget_exhausted() const;
};

VerifyReport verify(const SurveyConfig& cfg);
nlohmann::json to_json(const VerifyReport& r);

}  // namespace bianchi
