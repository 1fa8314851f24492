#include "bianchi/homology.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace bianchi {

std::string TorsionReport::group_string() const {
  std::ostringstream os;
  bool first = true;
  if (free_rank > 0) {
    os << "Z";
    if (free_rank > 1) os << "^" << free_rank;
    first = false;
  }
  for (const auto& d : elementary_divisors) {
    if (!first) os << " + ";
    os << "Z/" << d.get_str();
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

TorsionReport make_report(long free_rank, const std::vector<BigInt>& invariant_factors) {
  TorsionReport r;
  r.free_rank = free_rank;
  for (const auto& d : invariant_factors)
    if (d != 1) {
      r.elementary_divisors.push_back(d);
      r.torsion_order *= d;
    }
  r.factored = factor_integer(r.torsion_order);
  return r;
}

namespace {

// exact product with overflow detection
IntMat mul_checked(const IntMat& A, const IntMat& B) {
  IntMat C(A.rows(), B.cols());
  for (long i = 0; i < A.rows(); ++i)
    for (long j = 0; j < B.cols(); ++j) {
      __int128 s = 0;
      for (long k = 0; k < A.cols(); ++k) s += __int128(A(i, k)) * B(k, j);
      if (s > INT64_MAX || s < -INT64_MAX) throw std::overflow_error("module action entries exceed 64 bits");
      C(i, j) = int64_t(s);
    }
  return C;
}

bool is_identity(const IntMat& A) { return A == IntMat::Identity(A.rows(), A.cols()); }

std::string field_tag(long d) { return "Q(sqrt(" + std::to_string(d) + "))"; }

std::string weight_tag(const IntegralModule& m) { return m.is_trivial_z() ? "trivial-Z" : m.weight().to_string(); }

}  // namespace

SchreierData rewrite_subgroup_data(const QuadraticField& F, const FinitePresentation& p, const CosetTable& t) {
  const long n = t.index;
  const int ng = int(p.generators.size());
  if (long(t.action.size()) != ng) throw std::invalid_argument("rewrite_subgroup: table does not match presentation");
  for (const auto& r : p.relators)
    for (long c = 0; c < n; ++c)
      if (t.act_word(uint32_t(c), r) != uint32_t(c))
        throw std::invalid_argument("rewrite_subgroup: inconsistent coset table (a relator moves a coset)");

  // images of transversal words, in BFS order
  std::vector<Mat2> trans(n);
  std::vector<uint32_t> order(n);
  {
    std::vector<std::vector<uint32_t>> children(n);
    for (long c = 1; c < n; ++c) children[t.parent[c]].push_back(uint32_t(c));
    std::size_t head = 0, tail = 0;
    order[tail++] = 0;
    trans[0] = mat_identity();
    while (head < tail) {
      uint32_t c = order[head++];
      for (uint32_t ch : children[c]) {
        int x = t.letter[ch];
        const Mat2& g = p.images[std::abs(x) - 1];
        trans[ch] = mat_mul(F, trans[c], x > 0 ? g : mat_inverse(F, g));
        order[tail++] = ch;
      }
    }
  }
  auto is_tree = [&](uint32_t c, int g) {
    uint32_t e = t.action[g][c];
    return (t.parent[e] == int32_t(c) && t.letter[e] == g + 1) || (t.parent[c] == int32_t(e) && t.letter[c] == -(g + 1));
  };
  // generator numbering
  std::vector<std::vector<int32_t>> gen_id(ng, std::vector<int32_t>(n, 0));
  SchreierData out;
  FinitePresentation& q = out.presentation;
  q.d = p.d;
  q.projective = p.projective && t.minus_identity_in_level;
  bool lift = p.projective && !t.minus_identity_in_level;
  for (long c = 0; c < n; ++c)
    for (int g = 0; g < ng; ++g) {
      if (is_tree(uint32_t(c), g)) continue;
      uint32_t e = t.action[g][c];
      Mat2 img = mat_mul(F, mat_mul(F, trans[c], p.images[g]), mat_inverse(F, trans[e]));
      if (lift && !level_contains(F, t.level, img)) img = mat_neg(F, img);
      if (!p.projective || lift) {
        if (!level_contains(F, t.level, img))
          throw std::logic_error("rewrite_subgroup: Schreier generator image outside the level");
      }
      q.images.push_back(img);
      q.generators.push_back("s" + std::to_string(c) + "_" + p.generators[g]);
      out.origin.emplace_back(uint32_t(c), g);
      gen_id[g][c] = int32_t(q.images.size());
    }
  for (long c = 0; c < n; ++c)
    for (const auto& r : p.relators) {
      Word w;
      uint32_t e = uint32_t(c);
      for (int x : r) {
        int g = std::abs(x) - 1;
        if (x > 0) {
          if (gen_id[g][e]) w.push_back(gen_id[g][e]);
          e = t.action[g][e];
        } else {
          uint32_t f = t.inverse_action[g][e];
          if (gen_id[g][f]) w.push_back(-gen_id[g][f]);
          e = f;
        }
      }
      w = free_reduce(w);
      if (!w.empty()) q.relators.push_back(std::move(w));
    }
  return out;
}

FinitePresentation rewrite_subgroup(const QuadraticField& F, const FinitePresentation& p, const CosetTable& t) {
  return rewrite_subgroup_data(F, p, t).presentation;
}

FoxComplex fox_complex(const FinitePresentation& p, const IntegralModule& m) {
  const long r = m.rank();
  const long ng = long(p.generators.size()), nr = long(p.relators.size());
  std::vector<IntMat> act(ng), inv(ng);
  for (long g = 0; g < ng; ++g) {
    act[g] = m.action(p.images[g]);
    inv[g] = m.action(mat_inverse(m.field(), p.images[g]));
  }
  FoxComplex cx;
  cx.c0 = r;
  cx.c1 = ng * r;
  cx.c2 = nr * r;
  cx.d1 = SparseIntMatrix(r, ng * r);
  for (long g = 0; g < ng; ++g) {
    IntMat B = act[g] - IntMat::Identity(r, r);
    for (long i = 0; i < r; ++i)
      for (long j = 0; j < r; ++j)
        if (B(i, j)) cx.d1.add(i, g * r + j, B(i, j));
  }
  cx.d1.finalize();
  cx.d2t = SparseIntMatrix(nr * r, ng * r);
  for (long ri = 0; ri < nr; ++ri) {
    const Word& w = p.relators[ri];
    std::map<int, IntMat> blocks;
    IntMat S = IntMat::Identity(r, r);
    for (long i = long(w.size()) - 1; i >= 0; --i) {
      int x = w[i];
      int g = std::abs(x) - 1;
      auto it = blocks.find(g);
      if (it == blocks.end()) it = blocks.emplace(g, IntMat::Zero(r, r)).first;
      if (x > 0) {
        it->second += S;
        S = mul_checked(act[g], S);
      } else {
        S = mul_checked(inv[g], S);
        it->second -= S;
      }
    }
    if (!is_identity(S))
      throw std::invalid_argument("fox_complex: relator " + std::to_string(ri) + " does not act trivially on the module");
    for (long k = 0; k < r; ++k) {
      std::vector<std::pair<int32_t, int64_t>> cells;
      for (const auto& [g, B] : blocks)
        for (long i = 0; i < r; ++i)
          if (B(i, k)) cells.emplace_back(int32_t(g * r + i), B(i, k));
      cx.d2t.append_sorted_row(ri * r + k, cells);
    }
  }
  cx.d2t.finalize();
  return cx;
}

FoxComplex induced_fox_complex(const FinitePresentation& p, const CosetTable& t, const IntegralModule& m) {
  const long r = m.rank();
  const long n = t.index;
  const long ng = long(p.generators.size()), nr = long(p.relators.size());
  if (long(t.action.size()) != ng) throw std::invalid_argument("induced_fox_complex: table does not match presentation");
  std::vector<IntMat> act(ng), inv(ng);
  for (long g = 0; g < ng; ++g) {
    act[g] = m.action(p.images[g]);
    inv[g] = m.action(mat_inverse(m.field(), p.images[g]));
  }
  FoxComplex cx;
  cx.c0 = n * r;
  cx.c1 = ng * n * r;
  cx.c2 = nr * n * r;
  // C₁ column of (g, c, k) is (g·n + c)·r + k; C₀ row of (c, k) is c·r + k
  cx.d1 = SparseIntMatrix(n * r, ng * n * r);
  for (long g = 0; g < ng; ++g) {
    for (long c = 0; c < n; ++c) {
      long e = t.inverse_action[g][c];
      for (long k = 0; k < r; ++k) {
        long col = (g * n + c) * r + k;
        for (long i = 0; i < r; ++i)
          if (act[g](i, k)) cx.d1.add(e * r + i, col, act[g](i, k));
        cx.d1.add(c * r + k, col, int64_t(-1));
      }
    }
  }
  cx.d1.finalize();

  cx.d2t = SparseIntMatrix(nr * n * r, ng * n * r);
  struct Term {
    int g;
    bool positive;
    IntMat value;  // ±action of the derivative term
    Word coset_word;  // word w with target coset c·w
  };
  std::vector<std::pair<int64_t, int64_t>> row;  // (col, value)
  std::vector<std::pair<int32_t, int64_t>> cells;
  for (long ri = 0; ri < nr; ++ri) {
    const Word& w = p.relators[ri];
    const long L = long(w.size());
    // suffix actions and the coset shift of each term
    std::vector<Term> terms;
    IntMat S = IntMat::Identity(r, r);
    Word shift;  // S_i⁻¹ as a word
    for (long i = L - 1; i >= 0; --i) {
      int x = w[i];
      int g = std::abs(x) - 1;
      if (x > 0) {
        terms.push_back({g, true, S, shift});
        S = mul_checked(act[g], S);
        shift.push_back(-x);
      } else {
        S = mul_checked(inv[g], S);
        shift.push_back(-x);
        terms.push_back({g, false, -S, shift});
      }
    }
    if (!is_identity(S))
      throw std::invalid_argument("induced_fox_complex: relator " + std::to_string(ri) +
                                  " does not act trivially on the module");
    for (long c = 0; c < n; ++c) {
      std::vector<long> target(terms.size());
      for (std::size_t ti = 0; ti < terms.size(); ++ti) target[ti] = t.act_word(uint32_t(c), terms[ti].coset_word);
      for (long k = 0; k < r; ++k) {
        row.clear();
        for (std::size_t ti = 0; ti < terms.size(); ++ti) {
          const Term& tm = terms[ti];
          long base = (tm.g * n + target[ti]) * r;
          for (long i = 0; i < r; ++i)
            if (tm.value(i, k)) row.emplace_back(base + i, tm.value(i, k));
        }
        std::sort(row.begin(), row.end());
        cells.clear();
        for (const auto& [col, v] : row) {
          if (!cells.empty() && cells.back().first == col)
            cells.back().second += v;
          else
            cells.emplace_back(int32_t(col), v);
        }
        cells.erase(std::remove_if(cells.begin(), cells.end(), [](const auto& e) { return e.second == 0; }), cells.end());
        cx.d2t.append_sorted_row((ri * n + c) * r + k, cells);
      }
    }
  }
  cx.d2t.finalize();
  return cx;
}

GroupHomology homology_of_complex(FoxComplex&& cx, const HomologyOptions& opt) {
  GroupHomology out;
  out.c0 = cx.c0;
  out.c1 = cx.c1;
  out.c2 = cx.c2;
  SnfOptions so;
  so.modular_check = opt.modular_check;
  so.seed = opt.seed;
  auto s1 = smith_normal_form(cx.d1, so);
  out.rank_d1 = s1.rank;
  out.h0 = make_report(cx.c0 - s1.rank, s1.invariant_factors);
  if (cx.c1 <= opt.kernel_method_limit) {
    out.method = "kernel-saturation";
    DenseIntMatrix K = integer_kernel(cx.d1.to_dense());
    long k = K.empty() ? 0 : long(K[0].size());
    DenseIntMatrix D2 = cx.d2t.to_dense();  // c2 × c1
    std::vector<BigInt> factors;
    long rank_x = 0;
    if (k > 0 && cx.c2 > 0) {
      auto sk = dense_smith_normal_form(K, true);
      // left inverse of the saturated kernel basis: R·(first k rows of L)
      DenseIntMatrix Lk(sk.left->begin(), sk.left->begin() + k);
      DenseIntMatrix P = dense_mul(*sk.right, Lk);
      DenseIntMatrix D2c(cx.c1, std::vector<BigInt>(cx.c2));
      for (long i = 0; i < cx.c2; ++i)
        for (long j = 0; j < cx.c1; ++j) D2c[j][i] = D2[i][j];
      DenseIntMatrix X = dense_mul(P, D2c);
      auto sx = dense_smith_normal_form(X, false);
      rank_x = sx.rank;
      factors = sx.invariant_factors;
    }
    out.rank_d2 = rank_x;
    out.h1 = make_report(k - rank_x, factors);
  } else {
    out.method = "cokernel";
    so.rank_prepass = true;
    auto s2 = smith_normal_form_consume(std::move(cx.d2t), so);
    out.rank_d2 = s2.rank;
    out.h1 = make_report(cx.c1 - s1.rank - s2.rank, s2.invariant_factors);
  }
  return out;
}

GroupHomology group_homology(const FinitePresentation& p, const IntegralModule& m, const HomologyOptions& opt) {
  auto g = homology_of_complex(fox_complex(p, m), opt);
  std::string field = field_tag(p.d);
  for (TorsionReport* r : {&g.h0, &g.h1}) {
    r->field = field;
    r->weight = weight_tag(m);
    r->lattice = m.lattice_tag();
  }
  return g;
}

FinitePresentation presentation_for_level(const QuadraticField& F, const LevelStructure& level,
                                          const IntegralModule& m, bool via_rewriting) {
  bool minus_in = level_contains_minus_identity(F, level);
  bool even = m.is_trivial_z() || (m.weight().n1 + m.weight().n2) % 2 == 0;
  bool projective = !minus_in && (via_rewriting || even);
  return projective ? psl_presentation(F) : presentation(F);
}

CongruenceHomology congruence_homology(const QuadraticField& F, const LevelStructure& level, const IntegralModule& m,
                                       const HomologyOptions& opt) {
  CongruenceHomology out;
  auto P = presentation_for_level(F, level, m, opt.via_rewriting);
  out.table = coset_table(F, P, level);
  if (opt.via_rewriting) {
    auto Q = rewrite_subgroup(F, P, out.table);
    out.schreier_generators = long(Q.generators.size());
    out.schreier_relators = long(Q.relators.size());
    out.homology = homology_of_complex(fox_complex(Q, m), opt);
    out.homology.method += "/rewriting";
  } else {
    out.schreier_generators = long(P.generators.size()) * (out.table.index - 1) + 1;
    out.homology = homology_of_complex(induced_fox_complex(P, out.table, m), opt);
    out.homology.method += "/induced";
  }
  std::string lvl = ideal_to_string(level.ideal) + ":" + flavor_name(level.flavor);
  for (TorsionReport* r : {&out.homology.h0, &out.homology.h1}) {
    r->field = field_tag(F.d());
    r->level = lvl;
    r->weight = weight_tag(m);
    r->lattice = m.lattice_tag();
  }
  return out;
}

namespace {

// Row echelon lattice in Z^r modulo M·Z^r, entries kept in [0, M).
class ModularLattice {
 public:
  ModularLattice(long r, int64_t M) : r_(r), M_(M), rows_(r) {}

  void insert(std::vector<int64_t> v) {
    for (auto& x : v) x = mod(x);
    for (long c = 0; c < r_; ++c) {
      if (v[c] == 0) continue;
      auto& b = rows_[c];
      if (b.empty()) {
        b = std::move(v);
        ++rank_;
        return;
      }
      // gcd step on column c
      int64_t x = b[c], y = v[c];
      int64_t s0 = 1, t0 = 0, s1 = 0, t1 = 1;
      while (y != 0) {
        int64_t q = x / y;
        std::swap(x, y);
        y -= q * x;
        std::swap(s0, s1);
        s1 -= q * s0;
        std::swap(t0, t1);
        t1 -= q * t0;
      }
      // x = s0·b[c] + t0·v[c]; the pair (s1, t1) annihilates column c
      std::vector<int64_t> nb(r_), nv(r_);
      for (long j = 0; j < r_; ++j) {
        nb[j] = mod(mulmod(mod(s0), b[j]) + mulmod(mod(t0), v[j]));
        nv[j] = mod(mulmod(mod(s1), b[j]) + mulmod(mod(t1), v[j]));
      }
      b = std::move(nb);
      v = std::move(nv);
    }
  }

  bool full_unimodular() const {
    for (long c = 0; c < r_; ++c)
      if (rows_[c].empty() || std::gcd(rows_[c][c], M_) != 1) return false;
    return true;
  }

  // rows together with M·e_i
  DenseIntMatrix basis() const {
    DenseIntMatrix out;
    for (const auto& b : rows_)
      if (!b.empty()) {
        std::vector<BigInt> row(r_);
        for (long j = 0; j < r_; ++j) row[j] = BigInt(long(b[j]));
        out.push_back(row);
      }
    for (long i = 0; i < r_; ++i) {
      std::vector<BigInt> row(r_, 0);
      row[i] = BigInt(long(M_));
      out.push_back(row);
    }
    return out;
  }

 private:
  int64_t mod(int64_t x) const { return ((x % M_) + M_) % M_; }
  int64_t mulmod(int64_t a, int64_t b) const { return int64_t((__int128)a * b % M_); }
  long r_;
  int64_t M_;
  std::vector<std::vector<int64_t>> rows_;
  long rank_ = 0;
};

// a + bω reduced coordinatewise modulo M
struct ResidueElement {
  int64_t a = 0, b = 0;
};

struct ResidueMat {
  ResidueElement a, b, c, d;
};

}  // namespace

TorsionReport level_coinvariants(const QuadraticField& F, const LevelStructure& level, const IntegralModule& m) {
  auto tag = [&](TorsionReport r) {
    r.field = field_tag(F.d());
    r.level = ideal_to_string(level.ideal) + ":" + flavor_name(level.flavor);
    r.weight = weight_tag(m);
    r.lattice = m.lattice_tag();
    return r;
  };
  if (m.is_trivial_z()) return tag(make_report(1, {}));
  const long r = m.rank();
  const IdealLattice& I = level.ideal;
  DenseIntMatrix elem;
  for (const FieldElement& x : {FieldElement(I.a, I.b), FieldElement(0, I.c)}) {
    Mat2 up{FieldElement(1), x, FieldElement(0), FieldElement(1)};
    Mat2 lo{FieldElement(1), FieldElement(0), x, FieldElement(1)};
    for (const Mat2* g : {&up, &lo}) {
      IntMat A = m.action(*g) - IntMat::Identity(r, r);
      for (long j = 0; j < r; ++j) {
        std::vector<BigInt> row(r);
        for (long i = 0; i < r; ++i) row[i] = BigInt(long(A(i, j)));
        elem.push_back(row);
      }
    }
  }
  auto s0 = dense_smith_normal_form(elem, false);
  if (s0.rank < r) throw std::invalid_argument("level_coinvariants: elementary quotient is infinite");
  const BigInt Mbig = s0.invariant_factors.back();
  if (Mbig == 1) return tag(make_report(0, {}));
  const int deg = m.weight().n1 + m.weight().n2;
  double bits = std::log2(Mbig.get_d()) * std::max(deg, 1) + 8;
  if (bits > 60 || Mbig > BigInt(1L << 30))
    throw std::out_of_range("level_coinvariants: modulus " + Mbig.get_str() + " too large");
  const int64_t M = Mbig.get_si();
  auto md = [&](int64_t x) { return ((x % M) + M) % M; };
  const long p = F.p(), q = F.q();
  auto emul = [&](ResidueElement x, ResidueElement y) {
    __int128 bd = (__int128)x.b * y.b % M;
    return ResidueElement{md(int64_t(((__int128)x.a * y.a + q * bd) % M)),
                          md(int64_t(((__int128)x.a * y.b + (__int128)x.b * y.a + p * bd) % M))};
  };
  auto eadd = [&](ResidueElement x, ResidueElement y) { return ResidueElement{md(x.a + y.a), md(x.b + y.b)}; };
  auto mmul = [&](const ResidueMat& x, const ResidueMat& y) {
    return ResidueMat{eadd(emul(x.a, y.a), emul(x.b, y.c)), eadd(emul(x.a, y.b), emul(x.b, y.d)),
                      eadd(emul(x.c, y.a), emul(x.d, y.c)), eadd(emul(x.c, y.b), emul(x.d, y.d))};
  };
  auto eneg = [&](ResidueElement x) { return ResidueElement{md(-x.a), md(-x.b)}; };
  auto minv = [&](const ResidueMat& x) { return ResidueMat{x.d, eneg(x.b), eneg(x.c), x.a}; };
  auto reduce = [&](const FieldElement& x) {
    BigInt a = x.a % Mbig, b = x.b % Mbig;
    return ResidueElement{md(a.get_si()), md(b.get_si())};
  };
  auto to_mat2 = [](const ResidueMat& x) {
    auto fe = [](ResidueElement e) { return FieldElement(BigInt(long(e.a)), BigInt(long(e.b))); };
    return Mat2{fe(x.a), fe(x.b), fe(x.c), fe(x.d)};
  };

  auto P = presentation_for_level(F, level, m, false);
  auto t = coset_table(F, P, level);
  std::vector<ResidueMat> gens, gens_inv;
  for (const auto& g : P.images) {
    gens.push_back({reduce(g.a), reduce(g.b), reduce(g.c), reduce(g.d)});
    gens_inv.push_back(minv(gens.back()));
  }
  std::vector<std::vector<long>> children(t.index);
  for (long c = 1; c < t.index; ++c) children[t.parent[c]].push_back(c);
  const ResidueElement one{md(1), 0}, zero{0, 0};
  std::vector<ResidueMat> trans(t.index);
  trans[0] = {one, zero, zero, one};
  std::vector<long> order{0};
  for (std::size_t h = 0; h < order.size(); ++h)
    for (long ch : children[order[h]]) {
      int l = t.letter[ch];
      trans[ch] = mmul(trans[order[h]], l > 0 ? gens[l - 1] : gens_inv[-l - 1]);
      order.push_back(ch);
    }

  ModularLattice L(r, M);
  for (const auto& row : elem) {
    std::vector<int64_t> v(r);
    for (long i = 0; i < r; ++i) v[i] = BigInt(row[i] % Mbig).get_si();
    L.insert(std::move(v));
  }
  std::set<std::array<int64_t, 8>> seen;
  for (long c = 0; c < t.index && !L.full_unimodular(); ++c)
    for (std::size_t g = 0; g < gens.size(); ++g) {
      long target = t.action[g][c];
      if (t.parent[target] == c && t.letter[target] == int(g) + 1) continue;
      ResidueMat s = mmul(mmul(trans[c], gens[g]), minv(trans[target]));
      std::array<int64_t, 8> key{s.a.a, s.a.b, s.b.a, s.b.b, s.c.a, s.c.b, s.d.a, s.d.b};
      if (!seen.insert(key).second) continue;
      IntMat A = m.action(to_mat2(s)) - IntMat::Identity(r, r);
      for (long j = 0; j < r; ++j) {
        std::vector<int64_t> v(r);
        for (long i = 0; i < r; ++i) v[i] = A(i, j);
        L.insert(std::move(v));
      }
    }
  auto snf = dense_smith_normal_form(L.basis(), false);
  return tag(make_report(r - snf.rank, snf.invariant_factors));
}

TorusComplexData torus_complex(const IntegralModule& m, const Mat2& u1, const Mat2& u2) {
  const QuadraticField& F = m.field();
  for (const Mat2* u : {&u1, &u2}) {
    if (mat_det(F, *u) != FieldElement(1) || mat_trace(F, *u) != FieldElement(2) || mat_is_identity(*u))
      throw std::invalid_argument("torus_complex: generators must be nontrivial unipotent matrices");
  }
  if (mat_mul(F, u1, u2) != mat_mul(F, u2, u1)) throw std::invalid_argument("torus_complex: generators do not commute");
  if (u1.c.is_zero() && u2.c.is_zero()) {
    const FieldElement &x = u1.b, &y = u2.b;
    if (x.a * y.b - x.b * y.a == 0) throw std::invalid_argument("torus_complex: generators are dependent");
  }
  TorusComplexData T;
  long r = m.rank();
  T.u1 = m.action(u1);
  T.u2 = m.action(u2);
  IntMat I = IntMat::Identity(r, r);
  T.d1.resize(r, 2 * r);
  T.d1 << I - T.u1, I - T.u2;
  T.d2.resize(2 * r, r);
  T.d2 << I - T.u2, T.u1 - I;
  return T;
}

std::array<TorsionReport, 3> torus_homology(const IntegralModule& m, const Mat2& u1, const Mat2& u2) {
  auto T = torus_complex(m, u1, u2);
  long r = m.rank();
  FoxComplex cx;
  cx.c0 = r;
  cx.c1 = 2 * r;
  cx.c2 = r;
  cx.d1 = SparseIntMatrix::from_dense(to_dense(T.d1));
  cx.d2t = SparseIntMatrix::from_dense(to_dense(IntMat(T.d2.transpose())));
  HomologyOptions opt;
  opt.kernel_method_limit = 1L << 30;
  auto g = homology_of_complex(std::move(cx), opt);
  std::array<TorsionReport, 3> out;
  out[0] = g.h0;
  out[1] = g.h1;
  out[2] = make_report(r - g.rank_d2, {});
  for (auto& rep : out) {
    rep.field = field_tag(m.field().d());
    rep.weight = weight_tag(m);
    rep.lattice = m.lattice_tag();
  }
  return out;
}

}  // namespace bianchi
