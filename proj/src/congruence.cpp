#include "bianchi/congruence.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <stdexcept>

namespace bianchi {

std::string flavor_name(Flavor f) {
  switch (f) {
    case Flavor::Principal:
      return "principal";
    case Flavor::Hecke:
      return "hecke";
    case Flavor::Semi:
      return "semi";
  }
  return "?";
}

Flavor parse_flavor(const std::string& s) {
  if (s == "principal" || s == "PRINCIPAL") return Flavor::Principal;
  if (s == "hecke" || s == "HECKE") return Flavor::Hecke;
  if (s == "semi" || s == "SEMI") return Flavor::Semi;
  throw std::invalid_argument("unknown flavor: " + s);
}

bool level_contains(const QuadraticField& F, const LevelStructure& level, const Mat2& g) {
  (void)F;
  const IdealLattice& I = level.ideal;
  auto in = [&](const FieldElement& x) { return ideal_contains(I, x); };
  auto minus_one = [](const FieldElement& x) { return FieldElement(x.a - 1, x.b); };
  switch (level.flavor) {
    case Flavor::Principal:
      return in(minus_one(g.a)) && in(g.b) && in(g.c) && in(minus_one(g.d));
    case Flavor::Hecke:
      return in(g.c);
    case Flavor::Semi:
      return in(g.c) && in(minus_one(g.a)) && in(minus_one(g.d));
  }
  return false;
}

bool level_contains_minus_identity(const QuadraticField& F, const LevelStructure& level) {
  return level_contains(F, level, mat_minus_identity());
}

FastResidueRing::FastResidueRing(const QuadraticField& F, const IdealLattice& I) : ring_(F, I), n_(ring_.size()) {
  if (n_ <= 2048) {
    mul_.resize(std::size_t(n_) * n_);
    add_.resize(std::size_t(n_) * n_);
    for (uint32_t x = 0; x < n_; ++x)
      for (uint32_t y = 0; y < n_; ++y) {
        mul_[std::size_t(x) * n_ + y] = ring_.mul(x, y);
        add_[std::size_t(x) * n_ + y] = ring_.add(x, y);
      }
  }
}

namespace {

// Open-addressing map from 64-bit keys to 32-bit values.
class KeyMap {
 public:
  static constexpr uint64_t kEmpty = ~uint64_t(0);
  explicit KeyMap(std::size_t expected = 16) {
    std::size_t cap = 16;
    while (cap < 2 * expected) cap <<= 1;
    keys_.assign(cap, kEmpty);
    vals_.assign(cap, 0);
    mask_ = cap - 1;
  }
  // returns the stored value; inserts val when absent
  uint32_t insert(uint64_t key, uint32_t val, bool& inserted) {
    if (2 * (size_ + 1) > keys_.size()) grow();
    std::size_t h = hash(key) & mask_;
    while (keys_[h] != kEmpty) {
      if (keys_[h] == key) {
        inserted = false;
        return vals_[h];
      }
      h = (h + 1) & mask_;
    }
    keys_[h] = key;
    vals_[h] = val;
    ++size_;
    inserted = true;
    return val;
  }
  int64_t find(uint64_t key) const {
    std::size_t h = hash(key) & mask_;
    while (keys_[h] != kEmpty) {
      if (keys_[h] == key) return vals_[h];
      h = (h + 1) & mask_;
    }
    return -1;
  }
  std::size_t size() const { return size_; }

 private:
  static uint64_t hash(uint64_t k) {
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    k *= 0xc4ceb9fe1a85ec53ULL;
    k ^= k >> 33;
    return k;
  }
  void grow() {
    std::vector<uint64_t> ok;
    std::vector<uint32_t> ov;
    ok.swap(keys_);
    ov.swap(vals_);
    keys_.assign(ok.size() * 2, kEmpty);
    vals_.assign(ok.size() * 2, 0);
    mask_ = keys_.size() - 1;
    size_ = 0;
    for (std::size_t i = 0; i < ok.size(); ++i) {
      if (ok[i] == kEmpty) continue;
      bool ins;
      insert(ok[i], ov[i], ins);
    }
  }
  std::vector<uint64_t> keys_;
  std::vector<uint32_t> vals_;
  std::size_t mask_ = 0;
  std::size_t size_ = 0;
};

using RMat = std::array<uint32_t, 4>;

RMat reduce_mat(const ResidueRing& R, const Mat2& m) { return {R.reduce(m.a), R.reduce(m.b), R.reduce(m.c), R.reduce(m.d)}; }

RMat rmul(const FastResidueRing& R, const RMat& x, const RMat& y) {
  return {R.add(R.mul(x[0], y[0]), R.mul(x[1], y[2])), R.add(R.mul(x[0], y[1]), R.mul(x[1], y[3])),
          R.add(R.mul(x[2], y[0]), R.mul(x[3], y[2])), R.add(R.mul(x[2], y[1]), R.mul(x[3], y[3]))};
}

uint64_t encode4(const RMat& m, uint64_t n) { return m[0] + n * (m[1] + n * (m[2] + n * m[3])); }

RMat decode4(uint64_t k, uint64_t n) {
  RMat m;
  for (int i = 0; i < 4; ++i) {
    m[i] = uint32_t(k % n);
    k /= n;
  }
  return m;
}

}  // namespace

BigInt sl2_order_formula(const QuadraticField& F, const IdealLattice& I) {
  BigInt n = I.norm();
  BigInt num = n * n * n, den = 1;
  for (const auto& pf : factor_ideal(F, I)) {
    BigInt q = pf.prime.norm();
    num *= q * q - 1;
    den *= q * q;
  }
  return num / den;
}

BigInt enumerate_generated_order(const QuadraticField& F, const IdealLattice& I, const std::vector<Mat2>& gens) {
  FastResidueRing R(F, I);
  uint64_t n = R.size();
  std::vector<RMat> g;
  for (const auto& m : gens) g.push_back(reduce_mat(R.ring(), m));
  RMat id = reduce_mat(R.ring(), mat_identity());
  BigInt formula = sl2_order_formula(F, I);
  std::size_t expected = formula.fits_ulong_p() ? formula.get_ui() : 1;
  KeyMap seen(std::min<std::size_t>(expected, std::size_t(1) << 26));
  std::vector<uint64_t> queue;
  queue.reserve(expected);
  bool ins;
  seen.insert(encode4(id, n), 0, ins);
  queue.push_back(encode4(id, n));
  for (std::size_t head = 0; head < queue.size(); ++head) {
    RMat x = decode4(queue[head], n);
    for (const auto& h : g) {
      uint64_t k = encode4(rmul(R, x, h), n);
      seen.insert(k, 0, ins);
      if (ins) queue.push_back(k);
    }
  }
  return BigInt(std::to_string(queue.size()));
}

std::vector<Mat2> elementary_generators() {
  Mat2 S{FieldElement(0), FieldElement(-1), FieldElement(1), FieldElement(0)};
  Mat2 T{FieldElement(1), FieldElement(1), FieldElement(0), FieldElement(1)};
  Mat2 U{FieldElement(1), FieldElement(BigInt(0), BigInt(1)), FieldElement(0), FieldElement(1)};
  return {S, T, U};
}

FiniteQuotient sl2_quotient(const QuadraticField& F, const IdealLattice& I, const std::vector<Mat2>& gens_in,
                            long norm_bound, uint64_t enumeration_budget) {
  if (I.norm() > norm_bound)
    throw std::invalid_argument("sl2_quotient: norm " + std::to_string(I.norm()) + " exceeds the bound " +
                                std::to_string(norm_bound));
  std::vector<Mat2> gens = gens_in.empty() ? elementary_generators() : gens_in;
  FiniteQuotient Q;
  Q.ideal = I;
  Q.order = 1;
  Q.formula_order = sl2_order_formula(F, I);
  for (const auto& pf : factor_ideal(F, I)) {
    QuotientFactor f;
    f.ideal = ideal_pow(F, pf.prime, pf.exponent);
    f.formula_order = sl2_order_formula(F, f.ideal);
    if (f.formula_order > BigInt(std::to_string(enumeration_budget))) {
      f.enumerated = false;
      f.enumerated_order = 0;
      Q.fully_enumerated = false;
      Q.order *= f.formula_order;
      Q.factors.push_back(f);
      continue;
    }
    f.enumerated_order = enumerate_generated_order(F, f.ideal, gens);
    if (f.enumerated_order != f.formula_order) Q.generated = false;
    Q.order *= f.enumerated_order;
    Q.factors.push_back(f);
  }
  return Q;
}

BigInt subgroup_index(const QuadraticField& F, const LevelStructure& level, long norm_bound) {
  const IdealLattice& I = level.ideal;
  if (I.norm() > norm_bound)
    throw std::invalid_argument("subgroup_index: norm " + std::to_string(I.norm()) + " exceeds the bound " +
                                std::to_string(norm_bound));
  BigInt n = I.norm();
  switch (level.flavor) {
    case Flavor::Principal:
      return sl2_order_formula(F, I);
    case Flavor::Semi: {
      BigInt num = n * n, den = 1;
      for (const auto& pf : factor_ideal(F, I)) {
        BigInt q = pf.prime.norm();
        num *= q * q - 1;
        den *= q * q;
      }
      return num / den;
    }
    case Flavor::Hecke: {
      BigInt num = n, den = 1;
      for (const auto& pf : factor_ideal(F, I)) {
        BigInt q = pf.prime.norm();
        num *= q + 1;
        den *= q;
      }
      return num / den;
    }
  }
  return 0;
}

bool check_index_level(const QuadraticField& F, const LevelStructure& level) {
  // index ≥ N^{1/3}/3  ⟺  27·index³ ≥ N
  BigInt idx = subgroup_index(F, level, std::numeric_limits<long>::max());
  return 27 * idx * idx * idx >= BigInt(level.ideal.norm());
}

uint32_t CosetTable::act_word(uint32_t c, const Word& w) const {
  for (int x : w) c = act(c, x);
  return c;
}

std::vector<uint32_t> CosetTable::permutation(const Word& w) const {
  std::vector<uint32_t> p(index);
  for (long c = 0; c < index; ++c) p[c] = act_word(uint32_t(c), w);
  return p;
}

Word CosetTable::transversal_word(uint32_t c) const {
  Word w;
  while (parent[c] >= 0) {
    w.push_back(letter[c]);
    c = uint32_t(parent[c]);
  }
  std::reverse(w.begin(), w.end());
  return w;
}

bool CosetTable::is_transitive() const {
  std::vector<uint8_t> seen(index, 0);
  std::vector<uint32_t> stack{0};
  seen[0] = 1;
  long count = 1;
  while (!stack.empty()) {
    uint32_t c = stack.back();
    stack.pop_back();
    for (std::size_t g = 0; g < action.size(); ++g) {
      for (uint32_t e : {action[g][c], inverse_action[g][c]}) {
        if (!seen[e]) {
          seen[e] = 1;
          ++count;
          stack.push_back(e);
        }
      }
    }
  }
  return count == index;
}

namespace {

// Canonical keys for right cosets Γ_level·x, computed from a residue representative of x.
class CosetKeys {
 public:
  CosetKeys(const QuadraticField& F, const LevelStructure& level, bool projective)
      : flavor_(level.flavor), projective_(projective), R_(F, level.ideal) {
    if (flavor_ == Flavor::Hecke) {
      for (const auto& pf : factor_ideal(F, level.ideal)) {
        IdealLattice Q = ideal_pow(F, pf.prime, pf.exponent);
        Local loc{ResidueRing(F, Q), {}};
        loc.reduce.resize(R_.size());
        for (uint32_t x = 0; x < R_.size(); ++x) {
          auto [a, b] = R_.ring().coords(x);
          loc.reduce[x] = loc.ring.reduce(a, b);
        }
        locals_.push_back(std::move(loc));
      }
    }
  }

  const FastResidueRing& ring() const { return R_; }
  // number of residue entries carried per coset
  int width() const { return flavor_ == Flavor::Principal ? 4 : 2; }

  uint64_t key(const uint32_t* r) const {
    uint64_t n = R_.size();
    if (flavor_ == Flavor::Principal) {
      uint64_t k = encode4({r[0], r[1], r[2], r[3]}, n);
      if (projective_) k = std::min(k, encode4({R_.neg(r[0]), R_.neg(r[1]), R_.neg(r[2]), R_.neg(r[3])}, n));
      return k;
    }
    if (flavor_ == Flavor::Semi) {
      uint64_t k = r[0] + n * r[1];
      if (projective_) k = std::min(k, uint64_t(R_.neg(r[0])) + n * R_.neg(r[1]));
      return k;
    }
    // point of P¹(O/I), normalized locally at each prime-power factor
    uint64_t k = 0, radix = 1;
    for (const auto& loc : locals_) {
      uint32_t c = loc.reduce[r[0]], d = loc.reduce[r[1]];
      uint64_t m = loc.ring.size();
      uint64_t local;
      if (loc.ring.is_unit(d)) {
        local = loc.ring.mul(c, loc.ring.inverse(d));
      } else {
        local = m + loc.ring.mul(d, loc.ring.inverse(c));
      }
      k += radix * local;
      radix *= 2 * m;
    }
    return k;
  }

  // representative · g
  void act(const uint32_t* r, const RMat& g, uint32_t* out) const {
    if (flavor_ == Flavor::Principal) {
      RMat p = rmul(R_, {r[0], r[1], r[2], r[3]}, g);
      std::copy(p.begin(), p.end(), out);
      return;
    }
    out[0] = R_.add(R_.mul(r[0], g[0]), R_.mul(r[1], g[2]));
    out[1] = R_.add(R_.mul(r[0], g[1]), R_.mul(r[1], g[3]));
  }

  std::vector<uint32_t> identity() const {
    uint32_t one = R_.ring().one();
    if (flavor_ == Flavor::Principal) return {one, 0, 0, one};
    return {0, one};
  }

 private:
  struct Local {
    ResidueRing ring;
    std::vector<uint32_t> reduce;
  };
  Flavor flavor_;
  bool projective_;
  FastResidueRing R_;
  std::vector<Local> locals_;
};

}  // namespace

CosetTable coset_table(const QuadraticField& F, const FinitePresentation& p, const LevelStructure& level) {
  if (p.d != F.d()) throw std::invalid_argument("coset_table: presentation field does not match");
  CosetTable t;
  t.level = level;
  t.d = F.d();
  t.projective = p.projective;
  t.minus_identity_in_level = level_contains_minus_identity(F, level);
  BigInt expected = subgroup_index(F, level, std::numeric_limits<long>::max());
  if (p.projective && !t.minus_identity_in_level) expected /= 2;
  if (!expected.fits_ulong_p() || expected > BigInt(1) << 31) throw std::invalid_argument("coset_table: index too large");

  CosetKeys K(F, level, p.projective);
  const int w = K.width();
  std::size_t ng = p.generators.size();
  std::vector<RMat> fwd(ng), inv(ng);
  for (std::size_t g = 0; g < ng; ++g) {
    fwd[g] = reduce_mat(K.ring().ring(), p.images[g]);
    inv[g] = reduce_mat(K.ring().ring(), mat_inverse(F, p.images[g]));
  }
  std::size_t n_expected = expected.get_ui();
  KeyMap index(n_expected);
  std::vector<uint32_t> reps;
  reps.reserve(n_expected * w);
  std::vector<uint32_t> id = K.identity();
  bool ins;
  index.insert(K.key(id.data()), 0, ins);
  reps.insert(reps.end(), id.begin(), id.end());
  t.parent.push_back(-1);
  t.letter.push_back(0);
  t.action.assign(ng, {});
  t.inverse_action.assign(ng, {});
  std::vector<uint32_t> out(w);
  for (std::size_t c = 0; c < t.parent.size(); ++c) {
    for (std::size_t g = 0; g < ng; ++g) {
      for (int sign : {1, -1}) {
        K.act(&reps[c * w], sign > 0 ? fwd[g] : inv[g], out.data());
        uint32_t next = uint32_t(t.parent.size());
        uint32_t e = index.insert(K.key(out.data()), next, ins);
        if (ins) {
          if (t.parent.size() >= n_expected)
            throw std::runtime_error("coset_table: more cosets than the index formula allows");
          reps.insert(reps.end(), out.begin(), out.end());
          t.parent.push_back(int32_t(c));
          t.letter.push_back(sign * int(g + 1));
        }
        auto& row = sign > 0 ? t.action[g] : t.inverse_action[g];
        if (row.size() <= c) row.resize(c + 1);
        row[c] = e;
      }
    }
  }
  t.index = long(t.parent.size());
  if (std::size_t(t.index) != n_expected)
    throw std::runtime_error("coset_table: generator images do not generate the finite quotient (" +
                             std::to_string(t.index) + " cosets, expected " + expected.get_str() + ")");
  return t;
}

std::string torsion_status_name(TorsionStatus s) {
  switch (s) {
    case TorsionStatus::CertifiedFree:
      return "certified-free";
    case TorsionStatus::HasTorsion:
      return "has-torsion";
    case TorsionStatus::Unknown:
      return "unknown";
  }
  return "?";
}

namespace {

// Non-central elements of trace 0, ±1 in the level with small entries.
std::optional<Mat2> search_finite_order(const QuadraticField& F, const LevelStructure& level) {
  const IdealLattice& I = level.ideal;
  const int box = 3;
  std::vector<FieldElement> cs;
  for (int i = -box; i <= box; ++i)
    for (int j = -box; j <= box; ++j) {
      FieldElement c(BigInt(long(i) * I.a), BigInt(long(i) * I.b + long(j) * I.c));
      if (!c.is_zero()) cs.push_back(c);
    }
  for (long t : {0L, 1L, -1L}) {
    for (int x = -box; x <= box; ++x)
      for (int y = -box; y <= box; ++y) {
        FieldElement a(x, y);
        FieldElement d = F.sub(FieldElement(t), a);
        FieldElement adm1 = F.sub(F.mul(a, d), FieldElement(1));
        if (adm1.is_zero()) {
          Mat2 m{a, FieldElement(0), FieldElement(0), d};
          if (level_contains(F, level, m)) return m;
        }
        for (const auto& c : cs) {
          if (!F.divides(c, adm1)) continue;
          Mat2 m{a, F.div_exact(adm1, c), c, d};
          if (level_contains(F, level, m)) return m;
        }
      }
  }
  return std::nullopt;
}

}  // namespace

TorsionVerdict is_torsion_free(const QuadraticField& F, const LevelStructure& level) {
  TorsionVerdict v;
  const IdealLattice& I = level.ideal;
  bool two_in = ideal_contains(I, 2L, 0L);
  bool three_in = ideal_contains(I, 3L, 0L);
  bool three_in_sq = ideal_contains(ideal_mul(F, I, I), 3L, 0L);
  if (I.norm() > 1) {
    if (level.flavor == Flavor::Principal && !two_in && !three_in_sq) {
      v.status = TorsionStatus::CertifiedFree;
      v.reason = "g = 1 + X with X ≡ 0 mod I: finite order forces det X ∈ {2, 3} to lie in I², and −I ∉ Γ(I)";
      return v;
    }
    if (level.flavor == Flavor::Semi && !two_in && !three_in) {
      v.status = TorsionStatus::CertifiedFree;
      v.reason = "trace ≡ 2 mod I excludes traces 0, ±1, and −I ∉ Γ₁(I)";
      return v;
    }
  }
  if (auto m = search_finite_order(F, level)) {
    v.status = TorsionStatus::HasTorsion;
    v.witness = m;
    v.reason = "non-central element of finite order found";
    return v;
  }
  if (level_contains_minus_identity(F, level)) {
    v.status = TorsionStatus::HasTorsion;
    v.witness = mat_minus_identity();
    v.reason = "−I lies in the subgroup";
    return v;
  }
  v.reason = "no certificate and no witness in the search box";
  return v;
}

std::vector<LevelStructure> standard_levels(const QuadraticField& F, long max_norm) {
  std::vector<LevelStructure> out;
  for (const auto& I : ideals_up_to_norm(F, max_norm))
    for (Flavor f : {Flavor::Principal, Flavor::Hecke, Flavor::Semi}) out.push_back({I, f});
  return out;
}

}  // namespace bianchi
