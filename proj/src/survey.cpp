#include "bianchi/survey.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "bianchi/cusps.hpp"
#include "bianchi/homology.hpp"
#include "bianchi/spectral.hpp"

namespace bianchi {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kConfigKeys{
    "field",     "weight",  "flavor", "levels",    "max_norm",          "ideals",           "alpha",
    "budget",    "threads", "target", "csv",       "json",              "svg",              "cache_dir",
    "verify_index_norm",    "verify_h0_norm",    "verify_closure",    "verify_ms_tolerance", "presentation_file"};

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw std::invalid_argument("config: key '" + key + "': " + what);
}

template <class T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    bad(key, "malformed value " + v.dump());
  }
}

void parse_weight(SurveyConfig& cfg, const json& v) {
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s == "trivial" || s == "trivial-Z") {
      cfg.trivial_weight = true;
      cfg.weight = {0, 0};
      return;
    }
    auto comma = s.find(',');
    if (comma == std::string::npos) bad("weight", "expected \"trivial\" or \"n1,n2\"");
    try {
      cfg.weight = {std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
    } catch (const std::exception&) {
      bad("weight", "expected \"trivial\" or \"n1,n2\"");
    }
  } else if (v.is_array() && v.size() == 2) {
    cfg.weight = {get_as<int>(v[0], "weight"), get_as<int>(v[1], "weight")};
  } else {
    bad("weight", "expected \"trivial\", \"n1,n2\" or [n1, n2]");
  }
  cfg.trivial_weight = false;
}

IdealLattice parse_ideal(const QuadraticField& F, const json& v) {
  if (!v.is_array() || (v.size() != 2 && v.size() != 3)) bad("ideals", "each ideal is [x, y] or [a, b, c]");
  if (v.size() == 2) {
    FieldElement g(get_as<long>(v[0], "ideals"), get_as<long>(v[1], "ideals"));
    if (g.is_zero()) bad("ideals", "zero generator");
    return principal_ideal(F, g);
  }
  IdealLattice I{get_as<long>(v[0], "ideals"), get_as<long>(v[1], "ideals"), get_as<long>(v[2], "ideals")};
  if (I.a <= 0 || I.c <= 0 || I.b < 0 || I.b >= I.c || !is_ideal(F, I)) bad("ideals", "not an ideal HNF: " + v.dump());
  return I;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

double log_bigint(const BigInt& n) {
  long e = 0;
  double m = mpz_get_d_2exp(&e, n.get_mpz_t());
  return std::log(m) + double(e) * std::log(2.0);
}

std::string sha256_hex(const std::string& s) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(s.data(), s.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256: digest failed");
  std::ostringstream os;
  for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

void write_atomic(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ostringstream tmpname;
  tmpname << path.filename().string() << ".tmp." << ::getpid() << "." << std::this_thread::get_id();
  fs::path tmp = path.parent_path() / tmpname.str();
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << content;
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

IntegralModule module_for(const QuadraticField& F, const SurveyConfig& cfg) {
  return cfg.trivial_weight ? IntegralModule::trivial_z(F) : IntegralModule(F, cfg.weight);
}

}  // namespace

SurveyConfig config_from_json(const json& j, const SurveyConfig& base) {
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!kConfigKeys.count(it.key())) throw std::invalid_argument("config: unknown key '" + it.key() + "'");
  SurveyConfig cfg = base;
  if (j.contains("field")) cfg.d = get_as<long>(j["field"], "field");
  if (j.contains("weight")) parse_weight(cfg, j["weight"]);
  if (j.contains("flavor")) {
    try {
      cfg.flavor = parse_flavor(get_as<std::string>(j["flavor"], "flavor"));
    } catch (const std::invalid_argument& e) {
      bad("flavor", e.what());
    }
  }
  if (j.contains("levels")) cfg.levels = get_as<std::string>(j["levels"], "levels");
  if (j.contains("max_norm")) cfg.max_norm = get_as<long>(j["max_norm"], "max_norm");
  if (j.contains("alpha")) cfg.alpha = get_as<double>(j["alpha"], "alpha");
  if (j.contains("budget")) cfg.budget = get_as<long>(j["budget"], "budget");
  if (j.contains("threads")) cfg.threads = get_as<int>(j["threads"], "threads");
  if (j.contains("target")) {
    if (j["target"].is_null())
      cfg.target.reset();
    else
      cfg.target = get_as<double>(j["target"], "target");
  }
  for (const char* k : {"csv", "json", "svg", "cache_dir", "presentation_file"})
    if (j.contains(k)) {
      std::string v = get_as<std::string>(j[k], k);
      if (std::string(k) == "csv") cfg.csv = v;
      if (std::string(k) == "json") cfg.json = v;
      if (std::string(k) == "svg") cfg.svg = v;
      if (std::string(k) == "cache_dir") cfg.cache_dir = v;
      if (std::string(k) == "presentation_file") cfg.presentation_file = v;
    }
  if (j.contains("verify_index_norm")) cfg.verify_index_norm = get_as<long>(j["verify_index_norm"], "verify_index_norm");
  if (j.contains("verify_h0_norm")) cfg.verify_h0_norm = get_as<long>(j["verify_h0_norm"], "verify_h0_norm");
  if (j.contains("verify_ms_tolerance"))
    cfg.verify_ms_tolerance = get_as<double>(j["verify_ms_tolerance"], "verify_ms_tolerance");
  if (j.contains("verify_closure")) {
    const json& v = j["verify_closure"];
    if (!v.is_array()) bad("verify_closure", "expected a list of [p, degree]");
    cfg.verify_closure.clear();
    for (const auto& e : v) {
      if (!e.is_array() || e.size() != 2) bad("verify_closure", "expected a list of [p, degree]");
      cfg.verify_closure.push_back({get_as<long>(e[0], "verify_closure"), get_as<long>(e[1], "verify_closure")});
    }
  }
  if (j.contains("ideals")) {
    if (!j["ideals"].is_array()) bad("ideals", "expected a list");
    QuadraticField F(cfg.d);
    cfg.ideals.clear();
    for (const auto& e : j["ideals"]) cfg.ideals.push_back(parse_ideal(F, e));
  }
  validate(cfg);
  return cfg;
}

void validate(const SurveyConfig& cfg) {
  static const std::set<long> fields{-1, -2, -3, -7, -11};
  if (!fields.count(cfg.d)) bad("field", "supported fields are d ∈ {−1, −2, −3, −7, −11}");
  if (!cfg.trivial_weight && (cfg.weight.n1 < 0 || cfg.weight.n2 < 0 || cfg.weight.n1 + cfg.weight.n2 > 6))
    bad("weight", "needs 0 ≤ n1, n2 and n1 + n2 ≤ 6");
  if (cfg.levels != "primes" && cfg.levels != "all" && cfg.levels != "list")
    bad("levels", "expected \"primes\", \"all\" or \"list\"");
  if (cfg.levels == "list" && cfg.ideals.empty()) bad("ideals", "levels = \"list\" needs a nonempty list");
  if (cfg.levels != "list" && (cfg.max_norm < 1 || cfg.max_norm > 10000)) bad("max_norm", "needs 1 ≤ max_norm ≤ 10000");
  if (!(cfg.alpha > 0 && cfg.alpha < 1)) bad("alpha", "needs 0 < α < 1");
  if (cfg.budget < 1) bad("budget", "must be positive");
  if (cfg.threads < 1 || cfg.threads > 256) bad("threads", "needs 1 ≤ threads ≤ 256");
  if (cfg.target && !(*cfg.target > 0)) bad("target", "must be positive");
  if (cfg.verify_index_norm < 1) bad("verify_index_norm", "must be positive");
  if (cfg.verify_h0_norm < 1) bad("verify_h0_norm", "must be positive");
  if (!(cfg.verify_ms_tolerance > 0)) bad("verify_ms_tolerance", "must be positive");
  for (auto [p, deg] : cfg.verify_closure)
    if (p < 2 || deg < 1 || deg > 2) bad("verify_closure", "entries are [p, degree] with degree 1 or 2");
}

SurveyConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read config " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

SurveyConfig apply_overrides(SurveyConfig cfg, const std::vector<std::string>& overrides) {
  json j = json::object();
  for (const auto& o : overrides) {
    auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("override '" + o + "' is not key=value");
    std::string key = o.substr(0, eq), value = o.substr(eq + 1);
    json v;
    try {
      v = json::parse(value);
    } catch (const json::exception&) {
      v = value;
    }
    j[key] = v;
  }
  return config_from_json(j, cfg);
}

nlohmann::json config_to_json(const SurveyConfig& cfg) {
  json ideals = json::array();
  for (const auto& I : cfg.ideals) ideals.push_back({I.a, I.b, I.c});
  json closure = json::array();
  for (auto [p, deg] : cfg.verify_closure) closure.push_back({p, deg});
  return {{"field", cfg.d},
          {"weight", cfg.trivial_weight ? json("trivial") : json::array({cfg.weight.n1, cfg.weight.n2})},
          {"flavor", flavor_name(cfg.flavor)},
          {"levels", cfg.levels},
          {"max_norm", cfg.max_norm},
          {"ideals", ideals},
          {"alpha", cfg.alpha},
          {"budget", cfg.budget},
          {"threads", cfg.threads},
          {"target", cfg.target ? json(*cfg.target) : json(nullptr)},
          {"csv", cfg.csv},
          {"json", cfg.json},
          {"svg", cfg.svg},
          {"cache_dir", cfg.cache_dir},
          {"verify_index_norm", cfg.verify_index_norm},
          {"verify_h0_norm", cfg.verify_h0_norm},
          {"verify_closure", closure},
          {"verify_ms_tolerance", cfg.verify_ms_tolerance},
          {"presentation_file", cfg.presentation_file}};
}

std::string weight_label(const SurveyConfig& cfg) { return cfg.trivial_weight ? "trivial-Z" : cfg.weight.to_string(); }

std::string resolve_cache_dir(const SurveyConfig& cfg) {
  if (!cfg.cache_dir.empty()) return cfg.cache_dir;
  if (const char* env = std::getenv("BIANCHI_CACHE_DIR"); env && *env) return env;
  return ".bianchi-cache";
}

GrowthTarget growth_target(const SurveyConfig& cfg) {
  const double pi = std::numbers::pi;
  if (cfg.target) return {cfg.target, "config"};
  if (cfg.trivial_weight || (cfg.weight.n1 == 0 && cfg.weight.n2 == 0)) return {1.0 / (6.0 * pi), "trivial: 1/(6π)"};
  if ((cfg.weight.n1 == 1 && cfg.weight.n2 == 0) || (cfg.weight.n1 == 0 && cfg.weight.n2 == 1))
    return {11.0 / (12.0 * pi), "tautological: 11/(12π)"};
  return {std::nullopt, "none built in for this weight"};
}

bool SurveyRow::operator==(const SurveyRow& o) const {
  return level == o.level && level_norm == o.level_norm && index_sl2 == o.index_sl2 &&
         psl_correction == o.psl_correction && volume == o.volume && h == o.h && sup_alpha_ratio == o.sup_alpha_ratio &&
         free_rank == o.free_rank && torsion_order == o.torsion_order && torsion_factored == o.torsion_factored &&
         torsion_group == o.torsion_group && log_torsion_over_vol == o.log_torsion_over_vol && target == o.target &&
         torsion_status == o.torsion_status && status == o.status;
}

std::vector<IdealLattice> survey_levels(const QuadraticField& F, const SurveyConfig& cfg) {
  if (cfg.levels == "list") return cfg.ideals;
  if (cfg.levels == "primes") return prime_ideals_up_to_norm(F, cfg.max_norm);
  auto all = ideals_up_to_norm(F, cfg.max_norm);
  all.erase(std::remove_if(all.begin(), all.end(), [](const IdealLattice& I) { return I.norm() == 1; }), all.end());
  return all;
}

std::string cache_key(const SurveyConfig& cfg, const IdealLattice& I) {
  QuadraticField F(cfg.d);
  std::ostringstream os;
  os << "disc=" << F.disc() << ";ideal=" << I.a << "," << I.b << "," << I.c << ";flavor=" << flavor_name(cfg.flavor)
     << ";weight=" << weight_label(cfg) << ";alpha=" << fmt(cfg.alpha) << ";pipeline=" << kPipelineVersion;
  return sha256_hex(os.str());
}

SurveyRow compute_row(const QuadraticField& F, const SurveyConfig& cfg, const IdealLattice& I) {
  SurveyRow row;
  row.level = ideal_to_string(I);
  row.level_norm = I.norm();
  row.target = growth_target(cfg).value;
  LevelStructure L{I, cfg.flavor};
  try {
    row.index_sl2 = subgroup_index(F, L, std::numeric_limits<long>::max());
    row.psl_correction = !level_contains_minus_identity(F, L);
    BigInt psl_index = row.psl_correction ? BigInt(row.index_sl2 / 2) : row.index_sl2;
    row.volume = psl_index.get_d() * covolume(F);
    auto M = module_for(F, cfg);
    BigInt cost = row.index_sl2 * M.rank() * M.rank();
    if (cost > cfg.budget) {
      row.status = "failed: budget (index·rank² = " + cost.get_str() + " > " + std::to_string(cfg.budget) + ")";
      return row;
    }
    auto ch = congruence_homology(F, L, M);
    double table_volume = level_volume(F, ch.table);
    if (std::abs(table_volume - row.volume) > 1e-9 * row.volume)
      throw std::logic_error("volume mismatch between the index formula and the coset table");
    auto P = psl_presentation(F);
    auto t = coset_table(F, P, L);
    if (std::abs(level_volume(F, t) - row.volume) > 1e-9 * row.volume)
      throw std::logic_error("volume mismatch for the cusp table");
    auto cusps = cusp_orbits(F, P, t);
    row.h = long(cusps.size());
    for (const auto& c : cusps) row.sup_alpha_ratio = std::max(row.sup_alpha_ratio, cusp_lattice(F, P, t, c).ratio());
    const auto& h1 = ch.homology.h1;
    row.free_rank = h1.free_rank;
    row.torsion_order = h1.torsion_order;
    row.torsion_factored = h1.factored.to_string();
    row.torsion_group = h1.group_string();
    row.log_torsion_over_vol = log_bigint(row.torsion_order) / row.volume;
    row.torsion_status = torsion_status_name(is_torsion_free(F, L).status);
  } catch (const std::exception& e) {
    row.status = std::string("failed: ") + e.what();
  }
  return row;
}

nlohmann::json row_to_json(const SurveyRow& r) {
  return {{"level", r.level},
          {"level_norm", r.level_norm},
          {"index_sl2", r.index_sl2.get_str()},
          {"psl_correction", r.psl_correction},
          {"volume", r.volume},
          {"h_n", r.h},
          {"sup_alpha_ratio", r.sup_alpha_ratio},
          {"free_rank", r.free_rank},
          {"torsion_order", r.torsion_order.get_str()},
          {"torsion_factored", r.torsion_factored},
          {"torsion_group", r.torsion_group},
          {"log_torsion_over_vol", r.log_torsion_over_vol},
          {"target", r.target ? json(*r.target) : json(nullptr)},
          {"torsion_status", r.torsion_status},
          {"status", r.status}};
}

SurveyRow row_from_json(const nlohmann::json& j) {
  SurveyRow r;
  r.level = j.at("level").get<std::string>();
  r.level_norm = j.at("level_norm").get<long>();
  r.index_sl2 = BigInt(j.at("index_sl2").get<std::string>());
  r.psl_correction = j.at("psl_correction").get<bool>();
  r.volume = j.at("volume").get<double>();
  r.h = j.at("h_n").get<long>();
  r.sup_alpha_ratio = j.at("sup_alpha_ratio").get<double>();
  r.free_rank = j.at("free_rank").get<long>();
  r.torsion_order = BigInt(j.at("torsion_order").get<std::string>());
  r.torsion_factored = j.at("torsion_factored").get<std::string>();
  r.torsion_group = j.at("torsion_group").get<std::string>();
  r.log_torsion_over_vol = j.at("log_torsion_over_vol").get<double>();
  if (!j.at("target").is_null()) r.target = j.at("target").get<double>();
  r.torsion_status = j.at("torsion_status").get<std::string>();
  r.status = j.at("status").get<std::string>();
  return r;
}

SurveyTable run_survey(const SurveyConfig& cfg) {
  validate(cfg);
  QuadraticField F(cfg.d);
  SurveyTable table;
  table.field = "Q(sqrt(" + std::to_string(cfg.d) + "))";
  table.weight = weight_label(cfg);
  table.flavor = flavor_name(cfg.flavor);
  table.target = growth_target(cfg);
  auto levels = survey_levels(F, cfg);
  const fs::path dir = resolve_cache_dir(cfg);
  std::vector<SurveyRow> rows(levels.size());
  std::atomic<std::size_t> next{0};
  std::atomic<long> hits{0}, computed{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < levels.size(); i = next++) {
      fs::path file = dir / (cache_key(cfg, levels[i]) + ".json");
      std::ifstream is(file);
      if (is) {
        try {
          json j;
          is >> j;
          rows[i] = row_from_json(j);
          rows[i].cache_hit = true;
          ++hits;
          continue;
        } catch (const std::exception&) {
        }
      }
      rows[i] = compute_row(F, cfg, levels[i]);
      ++computed;
      if (rows[i].status == "ok") write_atomic(file, row_to_json(rows[i]).dump(1) + "\n");
    }
  };
  int n = std::min<int>(cfg.threads, std::max<int>(1, int(levels.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  std::stable_sort(rows.begin(), rows.end(), [](const SurveyRow& a, const SurveyRow& b) {
    if (a.volume != b.volume) return a.volume < b.volume;
    return a.level < b.level;
  });
  table.rows = std::move(rows);
  table.cache_hits = hits;
  table.computed = computed;
  return table;
}

std::string table_to_csv(const SurveyTable& t) {
  std::ostringstream os;
  os << "level_norm,index_sl2,psl_correction,volume,h_n,sup_alpha_ratio,free_rank,torsion_order,log_torsion_over_vol,"
        "target\n";
  for (const auto& r : t.rows) {
    bool ok = r.status == "ok";
    os << r.level_norm << ',' << r.index_sl2.get_str() << ',' << (r.psl_correction ? 1 : 0) << ',' << fmt(r.volume)
       << ',';
    if (ok)
      os << r.h << ',' << fmt(r.sup_alpha_ratio) << ',' << r.free_rank << ',' << r.torsion_order.get_str() << ','
         << fmt(r.log_torsion_over_vol);
    else
      os << ",,,,";
    os << ',' << (r.target ? fmt(*r.target) : "") << '\n';
  }
  return os.str();
}

nlohmann::json table_to_json(const SurveyTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) rows.push_back(row_to_json(r));
  return {{"metadata",
           {{"field", t.field},
            {"weight", t.weight},
            {"flavor", t.flavor},
            {"target", t.target.value ? json(*t.target.value) : json(nullptr)},
            {"target_provenance", t.target.provenance},
            {"target_convention",
             "absolute value |t2(V)|; the limit is stated with t2(V) < 0 alongside positive values, the positive "
             "value is used"},
            {"growth_comparison", "report only, no convergence assertion"},
            {"pipeline_version", kPipelineVersion}}},
          {"rows", rows}};
}

SurveyTable table_from_json(const nlohmann::json& j) {
  SurveyTable t;
  const json& m = j.at("metadata");
  t.field = m.at("field").get<std::string>();
  t.weight = m.at("weight").get<std::string>();
  t.flavor = m.at("flavor").get<std::string>();
  if (!m.at("target").is_null()) t.target.value = m.at("target").get<double>();
  t.target.provenance = m.at("target_provenance").get<std::string>();
  for (const auto& r : j.at("rows")) t.rows.push_back(row_from_json(r));
  return t;
}

std::string table_to_svg(const SurveyTable& t) {
  std::vector<const SurveyRow*> pts;
  for (const auto& r : t.rows)
    if (r.status == "ok") pts.push_back(&r);
  if (pts.empty()) throw std::invalid_argument("svg: table has no completed rows");
  const double W = 640, H = 400, left = 70, right = 20, top = 30, bottom = 50;
  double xmax = 0, ymax = 0;
  for (auto* r : pts) {
    xmax = std::max(xmax, r->volume);
    ymax = std::max(ymax, r->log_torsion_over_vol);
  }
  if (t.target.value) ymax = std::max(ymax, *t.target.value);
  xmax = xmax > 0 ? xmax * 1.05 : 1.0;
  ymax = ymax > 0 ? ymax * 1.1 : 1.0;
  auto X = [&](double x) { return left + (W - left - right) * x / xmax; };
  auto Y = [&](double y) { return H - bottom - (H - top - bottom) * y / ymax; };
  std::ostringstream os;
  os << std::setprecision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\">\n";
  os << "<title>log|H1 tors| / vol against vol, " << t.field << ", weight " << t.weight << "</title>\n";
  os << "<g class=\"axes\" stroke=\"black\">\n";
  os << "<path d=\"M" << left << ' ' << top << " V" << H - bottom << " H" << W - right << "\" fill=\"none\"/>\n";
  os << "</g>\n";
  os << "<text x=\"" << (W / 2) << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"13\">volume</text>\n";
  os << "<text x=\"16\" y=\"" << H / 2 << "\" transform=\"rotate(-90 16 " << H / 2
     << ")\" text-anchor=\"middle\" font-size=\"13\">log|H1 tors| / vol</text>\n";
  for (int k = 0; k <= 4; ++k) {
    double xv = xmax * k / 4, yv = ymax * k / 4;
    os << "<text x=\"" << X(xv) << "\" y=\"" << H - bottom + 16 << "\" text-anchor=\"middle\" font-size=\"10\">"
       << std::setprecision(3) << xv << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << Y(yv) + 3 << "\" text-anchor=\"end\" font-size=\"10\">" << yv
       << "</text>\n";
  }
  os << std::setprecision(6);
  if (t.target.value)
    os << "<line class=\"target\" x1=\"" << left << "\" y1=\"" << Y(*t.target.value) << "\" x2=\"" << W - right
       << "\" y2=\"" << Y(*t.target.value) << "\" stroke=\"firebrick\" stroke-dasharray=\"6 4\"/>\n";
  for (auto* r : pts)
    os << "<circle class=\"point\" cx=\"" << X(r->volume) << "\" cy=\"" << Y(r->log_torsion_over_vol)
       << "\" r=\"4\" fill=\"steelblue\"><title>" << r->level << "</title></circle>\n";
  os << "</svg>\n";
  return os.str();
}

void emit(const SurveyTable& t, const std::string& format, const std::string& path) {
  std::string content;
  if (format == "csv")
    content = table_to_csv(t);
  else if (format == "json")
    content = table_to_json(t).dump(2) + "\n";
  else if (format == "svg")
    content = table_to_svg(t);
  else
    throw std::invalid_argument("emit: unknown format '" + format + "'");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("emit: cannot open " + path);
  os << content;
  if (!os) throw std::runtime_error("emit: write failed for " + path);
}

bool VerifyReport::pass() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.pass; });
}

bool VerifyReport::budget_exhausted() const {
  return std::any_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.budget_exhausted; });
}

VerifyReport verify(const SurveyConfig& cfg) {
  validate(cfg);
  QuadraticField F(cfg.d);
  VerifyReport rep;
  auto run = [&](const std::string& name, auto&& body) {
    SuiteResult s;
    s.name = name;
    try {
      body(s);
    } catch (const std::out_of_range& e) {
      s.pass = false;
      s.budget_exhausted = true;
      s.detail = std::string("budget exhausted: ") + e.what();
    } catch (const std::exception& e) {
      s.pass = false;
      s.detail = std::string("error: ") + e.what();
    }
    rep.suites.push_back(s);
  };

  run("presentation relators", [&](SuiteResult& s) {
    FinitePresentation P;
    if (!cfg.presentation_file.empty()) {
      std::ifstream is(cfg.presentation_file);
      if (!is) throw std::runtime_error("cannot read " + cfg.presentation_file);
      json j;
      is >> j;
      P = presentation_from_json(j);
    } else {
      P = presentation(F);
    }
    auto r = verify_presentation(F, P);
    s.pass = r.pass;
    std::ostringstream os;
    os << P.relators.size() << " relators";
    for (const auto& c : r.relators)
      if (!c.pass) {
        os << "; relator " << c.index << " = " << word_to_string(P, P.relators[c.index]) << " evaluates to "
           << mat_to_string(F, c.value);
        break;
      }
    if (!r.determinants_ok) os << "; a generator image has determinant ≠ 1";
    s.detail = os.str();
  });

  run("index lower bound", [&](SuiteResult& s) {
    long n = 0, bad_count = 0;
    for (const auto& L : standard_levels(F, cfg.verify_index_norm)) {
      ++n;
      if (!check_index_level(F, L)) ++bad_count;
    }
    s.pass = bad_count == 0;
    s.detail = std::to_string(n) + " levels of norm ≤ " + std::to_string(cfg.verify_index_norm) + ", " +
               std::to_string(bad_count) + " violations";
  });

  run("degree-zero bound, weight (2,0)", [&](SuiteResult& s) {
    IntegralModule M(F, {2, 0});
    BigInt N = binomial_constant({2, 0});
    long n = 0, bad_count = 0;
    for (const auto& I : ideals_up_to_norm(F, cfg.verify_h0_norm)) {
      auto h0 = level_coinvariants(F, {I, Flavor::Principal}, M);
      BigInt bound = 1;
      for (int i = 0; i < M.rank(); ++i) bound *= N * I.norm();
      ++n;
      if (h0.free_rank != 0 || h0.torsion_order > bound) ++bad_count;
    }
    s.pass = bad_count == 0;
    s.detail = std::to_string(n) + " principal levels of norm ≤ " + std::to_string(cfg.verify_h0_norm) + ", " +
               std::to_string(bad_count) + " violations";
  });

  run("local d_l estimate", [&](SuiteResult& s) {
    std::ostringstream os;
    bool ok = true;
    for (auto [p, k] : std::vector<std::pair<long, int>>{{3, 2}, {5, 2}})
      for (Flavor fl : {Flavor::Principal, Flavor::Hecke, Flavor::Semi}) {
        if (kronecker_symbol(F.disc(), p) == 0) continue;
        auto a = local_cusp_analysis(F, p, k, fl);
        ok = ok && a.dl_estimate_holds;
        os << "p=" << p << " k=" << k << " " << flavor_name(fl) << ": d_0=" << a.d_l[0] << " bound "
           << fmt(a.d_l_bound[0]) << (a.dl_estimate_holds ? "" : " FAIL") << "; ";
      }
    s.pass = ok;
    s.detail = os.str();
  });

  run("unipotent pair closures", [&](SuiteResult& s) {
    std::ostringstream os;
    bool ok = true;
    for (auto [p, deg] : cfg.verify_closure) {
      long q = deg == 1 ? p : p * p;
      if (q > 225) throw std::out_of_range("closure check over F_" + std::to_string(q) + " exceeds q ≤ 225");
      auto r = unipotent_closure_check(p, int(deg));
      ok = ok && r.pass;
      os << "F_" << q << ": " << r.pairs << " pairs, full " << r.full << ", subfield " << r.subfield_type
         << ", other " << r.other << (r.pass ? "" : " FAIL") << "; ";
    }
    s.pass = ok;
    s.detail = os.str();
  });

  run("scattering unitarity", [&](SuiteResult& s) {
    double worst = 0;
    for (double t : {0.5, 1.0, 2.0, 5.0})
      worst = std::max(worst, std::abs(std::abs(global_scattering(F, trivial_character(F), cplx(0.5, t)).value) - 1.0));
    s.pass = worst < 1e-6;
    s.detail = "max ||c(1/2+it)| − 1| = " + fmt(worst);
  });

  run("Maass-Selberg degeneration", [&](SuiteResult& s) {
    auto sc = synthetic_scattering(1.0);
    const double s0 = 0.8, Y = 2.0, delta = 1e-4;
    cplx nd = maass_selberg(sc, 1.0, s0, s0 + delta, Y);
    double d_printed = std::abs(nd - maass_selberg_real(sc, 1.0, s0, Y));
    double d_limit = std::abs(nd - maass_selberg_limit(sc, 1.0, s0, Y));
    s.pass = d_printed < cfg.verify_ms_tolerance;
    s.detail = "|nondegenerate − real form| = " + fmt(d_printed) + ", |nondegenerate − s′→s limit| = " + fmt(d_limit) +
               " at |s − s′| = 1e-4, tolerance " + fmt(cfg.verify_ms_tolerance);
  });
  return rep;
}

nlohmann::json to_json(const VerifyReport& r) {
  json suites = json::array();
  for (const auto& s : r.suites)
    suites.push_back({{"name", s.name}, {"pass", s.pass}, {"budget_exhausted", s.budget_exhausted}, {"detail", s.detail}});
  return {{"pass", r.pass()}, {"budget_exhausted", r.budget_exhausted()}, {"suites", suites}};
}

}  // namespace bianchi
