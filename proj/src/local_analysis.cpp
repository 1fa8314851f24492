#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "bianchi/cusps.hpp"

namespace bianchi {

namespace {

long ipow(long b, int e) {
  long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

int vp(long x, long p, int cap) {
  if (x == 0) return cap;
  int v = 0;
  while (x % p == 0 && v < cap) {
    x /= p;
    ++v;
  }
  return v;
}

struct LocalRing {
  const ResidueRing& R;
  long p;
  int k;
  long pk;
  std::vector<uint32_t> minus_one;  // x − 1
  std::vector<int> val;             // p-adic valuation of x + yω, capped at k

  LocalRing(const ResidueRing& ring, long p_, int k_) : R(ring), p(p_), k(k_), pk(ipow(p_, k_)) {
    uint32_t n = R.size();
    minus_one.resize(n);
    val.resize(n);
    for (uint32_t x = 0; x < n; ++x) {
      minus_one[x] = R.sub(x, R.one());
      auto [a, b] = R.coords(x);
      val[x] = std::min(vp(a, p, k), vp(b, p, k));
    }
  }
  // reduction of x modulo p^m, as an index of the same ring
  uint32_t reduce_mod(uint32_t x, int m) const {
    auto [a, b] = R.coords(x);
    long q = ipow(p, m);
    return R.reduce(a % q, b % q);
  }
};

struct Membership {
  Flavor flavor;
  std::vector<uint8_t> in_ideal;
  const LocalRing* L;
  bool operator()(uint32_t a, uint32_t b, uint32_t c, uint32_t d) const {
    switch (flavor) {
      case Flavor::Principal:
        return in_ideal[L->minus_one[a]] && in_ideal[b] && in_ideal[c] && in_ideal[L->minus_one[d]];
      case Flavor::Hecke:
        return in_ideal[c] != 0;
      case Flavor::Semi:
        return in_ideal[c] && in_ideal[L->minus_one[a]] && in_ideal[L->minus_one[d]];
    }
    return false;
  }
};

// greedy generating set of a finite subgroup given as a list of its elements
template <class Op>
std::vector<uint32_t> greedy_generators(const std::vector<uint32_t>& elems, uint32_t identity, uint32_t n, Op op) {
  std::vector<uint8_t> in(n, 0);
  in[identity] = 1;
  std::vector<uint32_t> members{identity}, gens;
  for (uint32_t x : elems) {
    if (in[x]) continue;
    gens.push_back(x);
    for (std::size_t h = 0; h < members.size(); ++h)
      for (uint32_t g : gens) {
        uint32_t y = op(members[h], g);
        if (!in[y]) {
          in[y] = 1;
          members.push_back(y);
        }
      }
  }
  return gens;
}

}  // namespace

LocalAnalysis local_cusp_analysis(const QuadraticField& F, long p, const LevelStructure& level, int k) {
  auto primes = primes_over(F, p);
  if (primes.empty()) throw std::invalid_argument("local_cusp_analysis: p is not prime");
  for (const auto& pf : primes)
    if (pf.type == Splitting::Ramified) throw std::invalid_argument("local_cusp_analysis: p ramifies");
  const IdealLattice& I = level.ideal;
  for (const auto& pf : factor_ideal(F, I))
    if (pf.rational_prime != p) throw std::invalid_argument("local_cusp_analysis: level not supported at p");
  if (k <= 0) {
    k = 0;
    while (!ideal_contains(I, FieldElement(ipow(p, k)))) ++k;
    if (k == 0) throw std::invalid_argument("local_cusp_analysis: unit level needs an explicit k");
  } else if (!ideal_contains(I, FieldElement(ipow(p, k)))) {
    throw std::invalid_argument("local_cusp_analysis: K_p(p^k) is not contained in the level");
  }
  if (ipow(p, 3 * k) > 1000000) throw std::invalid_argument("local_cusp_analysis: enumeration budget exceeded");

  IdealLattice Pk = principal_ideal(F, FieldElement(ipow(p, k)));
  ResidueRing ring(F, Pk);
  LocalRing L(ring, p, k);
  const uint32_t n = ring.size();
  Membership in{level.flavor, std::vector<uint8_t>(n), &L};
  for (uint32_t x = 0; x < n; ++x) in.in_ideal[x] = ideal_contains(I, ring.lift(x)) ? 1 : 0;

  LocalAnalysis out;
  out.d = F.d();
  out.p = p;
  out.k = k;
  out.level = ideal_to_string(I) + ":" + flavor_name(level.flavor);
  out.hypothesis = k == 0 || !ideal_contains(I, FieldElement(ipow(p, k - 1)));
  out.local_index = subgroup_index(F, level);
  BigInt group_order = sl2_order_formula(F, Pk);
  BigInt kprime_order = group_order / out.local_index;

  // primitive vectors: not both in a prime over p
  std::vector<uint8_t> prime_mask(n, 0);
  for (uint32_t x = 0; x < n; ++x)
    for (std::size_t i = 0; i < primes.size(); ++i)
      if (ideal_contains(primes[i].prime, ring.lift(x))) prime_mask[x] |= uint8_t(1u << i);
  auto primitive = [&](uint32_t a, uint32_t c) { return (prime_mask[a] & prime_mask[c]) == 0; };
  const auto& units = ring.units();

  // L_v = {t : 1 + t·[[−ac, a²], [−c², ac]] ∈ K'}; returns (m1, m1 + m2)
  auto exponents = [&](uint32_t a, uint32_t c) {
    uint32_t ac = ring.mul(a, c), aa = ring.mul(a, a), cc = ring.mul(c, c);
    int m1 = k;
    long size = 0;
    for (uint32_t t = 0; t < n; ++t) {
      uint32_t x = ring.mul(t, ac);
      uint32_t one = ring.one();
      if (!in(ring.sub(one, x), ring.mul(t, aa), ring.neg(ring.mul(t, cc)), ring.add(one, x))) continue;
      ++size;
      if (t != 0) m1 = std::min(m1, L.val[t]);
    }
    // [O_p : L] = p^{2k} / |L|
    long index = ipow(p, 2 * k) / size;
    int total = 0;
    while (index > 1) {
      index /= p;
      ++total;
    }
    return std::pair<int, int>{m1, total};
  };

  // P¹(O/p^k): unimodular pairs modulo units
  std::vector<int32_t> point_of(std::size_t(n) * n, -1);
  std::vector<std::pair<uint32_t, uint32_t>> points;
  for (uint32_t a = 0; a < n; ++a)
    for (uint32_t c = 0; c < n; ++c) {
      if (!primitive(a, c) || point_of[std::size_t(a) * n + c] >= 0) continue;
      for (uint32_t u : units) point_of[std::size_t(ring.mul(u, a)) * n + ring.mul(u, c)] = int32_t(points.size());
      points.emplace_back(a, c);
    }
  out.points = long(points.size());

  // the exponents are invariant under scaling the vector by a unit
  std::vector<int> m1_of(points.size()), total_of(points.size());
  double inv_sq = 0;
  out.d_l.assign(k + 1, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto [m1, tot] = exponents(points[i].first, points[i].second);
    m1_of[i] = m1;
    total_of[i] = tot;
    out.d_l[m1]++;
    inv_sq += std::pow(double(p), -2.0 * m1);
  }
  out.sp_formula = out.local_index.get_d() / double(points.size()) * inv_sq;

  // point keys modulo p^m for m = 0..k
  auto key_mod = [&](uint32_t a, uint32_t c, int m) {
    uint64_t best = UINT64_MAX;
    for (uint32_t u : units) {
      uint64_t key = uint64_t(L.reduce_mod(ring.mul(u, a), m)) * n + L.reduce_mod(ring.mul(u, c), m);
      best = std::min(best, key);
    }
    return best;
  };
  std::vector<std::vector<uint64_t>> keys(k + 1, std::vector<uint64_t>(points.size()));
  for (int m = 0; m <= k; ++m)
    for (std::size_t i = 0; i < points.size(); ++i) keys[m][i] = key_mod(points[i].first, points[i].second, m);
  out.q.assign(k + 1, std::vector<long>(k, 0));
  for (int l = 0; l <= k; ++l) {
    BigInt prod = 1;
    for (int j = 0; j < k; ++j) {
      std::map<uint64_t, std::set<uint64_t>> fibers;
      for (std::size_t i = 0; i < points.size(); ++i)
        if (m1_of[i] == l) fibers[keys[j][i]].insert(keys[j + 1][i]);
      long q = 0;
      for (const auto& [key, s] : fibers) q = std::max(q, long(s.size()));
      out.q[l][j] = q;
      prod *= q;
    }
    out.product_bound.push_back(BigInt(out.d_l[l]) <= prod);
  }
  double bound = std::pow(double(p), 17.0 * k / 9.0);
  for (int l = 0; l <= k; ++l) {
    out.d_l_bound.push_back(bound);
    if (3 * l <= k && double(out.d_l[l]) > bound) out.dl_estimate_holds = false;
  }

  // K'-orbits on primitive vectors ↔ double cosets N_p \ K_p / K_p'
  std::vector<uint32_t> upper, lower, diag;
  for (uint32_t x = 0; x < n; ++x) {
    if (in(ring.one(), x, 0, ring.one())) upper.push_back(x);
    if (in(ring.one(), 0, x, ring.one())) lower.push_back(x);
  }
  for (uint32_t u : units)
    if (in(u, 0, 0, ring.inverse(u))) diag.push_back(u);
  auto add_op = [&](uint32_t x, uint32_t y) { return ring.add(x, y); };
  auto mul_op = [&](uint32_t x, uint32_t y) { return ring.mul(x, y); };
  auto gu = greedy_generators(upper, 0, n, add_op);
  auto gl = greedy_generators(lower, 0, n, add_op);
  auto gd = greedy_generators(diag, ring.one(), n, mul_op);

  std::vector<uint8_t> seen(std::size_t(n) * n, 0);
  for (uint32_t a = 0; a < n; ++a)
    for (uint32_t c = 0; c < n; ++c) {
      if (point_of[std::size_t(a) * n + c] < 0 || seen[std::size_t(a) * n + c]) continue;
      ++out.double_cosets;
      int32_t pt = point_of[std::size_t(a) * n + c];
      out.sp_direct += std::pow(double(p), double(total_of[pt] - 2 * m1_of[pt]));
      std::vector<std::pair<uint32_t, uint32_t>> stack{{a, c}};
      seen[std::size_t(a) * n + c] = 1;
      while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        auto push = [&](uint32_t x2, uint32_t y2) {
          auto& s = seen[std::size_t(x2) * n + y2];
          if (!s) {
            s = 1;
            stack.emplace_back(x2, y2);
          }
        };
        for (uint32_t b : gu) push(ring.add(x, ring.mul(b, y)), y);
        for (uint32_t b : gl) push(x, ring.add(y, ring.mul(b, x)));
        for (uint32_t u : gd) push(ring.mul(u, x), ring.mul(ring.inverse(u), y));
      }
    }

  // closure of the generators as matrices when the group is small
  if (kprime_order <= 1000000) {
    auto enc = [&](uint32_t a, uint32_t b, uint32_t c, uint32_t d) {
      return ((uint64_t(a) * n + b) * n + c) * n + d;
    };
    struct M {
      uint32_t a, b, c, d;
    };
    std::vector<M> gens;
    for (uint32_t b : gu) gens.push_back({ring.one(), b, 0, ring.one()});
    for (uint32_t c : gl) gens.push_back({ring.one(), 0, c, ring.one()});
    for (uint32_t u : gd) gens.push_back({u, 0, 0, ring.inverse(u)});
    std::unordered_set<uint64_t> group{enc(ring.one(), 0, 0, ring.one())};
    std::vector<M> frontier{{ring.one(), 0, 0, ring.one()}};
    for (std::size_t h = 0; h < frontier.size(); ++h) {
      M x = frontier[h];
      for (const M& g : gens) {
        M y{ring.add(ring.mul(x.a, g.a), ring.mul(x.b, g.c)), ring.add(ring.mul(x.a, g.b), ring.mul(x.b, g.d)),
            ring.add(ring.mul(x.c, g.a), ring.mul(x.d, g.c)), ring.add(ring.mul(x.c, g.b), ring.mul(x.d, g.d))};
        if (group.insert(enc(y.a, y.b, y.c, y.d)).second) frontier.push_back(y);
      }
    }
    out.generators_verified = BigInt(long(group.size())) == kprime_order;
  }
  return out;
}

LocalAnalysis local_cusp_analysis(const QuadraticField& F, long p, int k, Flavor flavor) {
  return local_cusp_analysis(F, p, {principal_ideal(F, FieldElement(ipow(p, k))), flavor}, k);
}

nlohmann::json to_json(const LocalAnalysis& a) {
  return {{"d", a.d},
          {"p", a.p},
          {"k", a.k},
          {"level", a.level},
          {"points", a.points},
          {"local_index", a.local_index.get_str()},
          {"sp_formula", a.sp_formula},
          {"sp_direct", a.sp_direct},
          {"double_cosets", a.double_cosets},
          {"d_l", a.d_l},
          {"q", a.q},
          {"product_bound", a.product_bound},
          {"d_l_bound", a.d_l_bound},
          {"dl_estimate_holds", a.dl_estimate_holds},
          {"hypothesis", a.hypothesis},
          {"generators_verified", a.generators_verified}};
}

namespace {

// F_q for q = p or p², elements x + y·s with s² = nonresidue
struct FiniteField {
  long p, q;
  int degree;
  std::vector<uint16_t> add_t, mul_t, inv_t;
  FiniteField(long p_, int deg) : p(p_), degree(deg) {
    if (deg != 1 && deg != 2) throw std::invalid_argument("unipotent_closure_check: degree must be 1 or 2");
    if (p < 2 || p > 15) throw std::invalid_argument("unipotent_closure_check: unsupported p");
    for (long x = 2; x * x <= p; ++x)
      if (p % x == 0) throw std::invalid_argument("unipotent_closure_check: p is not prime");
    if (deg == 2 && p == 2) throw std::invalid_argument("unipotent_closure_check: unsupported p");
    q = deg == 1 ? p : p * p;
    long nr = 0;
    if (deg == 2) {
      for (long c = 2; c < p && !nr; ++c) {
        bool square = false;
        for (long x = 1; x < p; ++x)
          if (x * x % p == c) square = true;
        if (!square) nr = c;
      }
    }
    add_t.resize(q * q);
    mul_t.resize(q * q);
    inv_t.assign(q, 0);
    for (long u = 0; u < q; ++u)
      for (long v = 0; v < q; ++v) {
        long a = u % p, b = u / p, c = v % p, d = v / p;
        add_t[u * q + v] = uint16_t((a + c) % p + p * ((b + d) % p));
        long re = (a * c + nr * b * d) % p, im = (a * d + b * c) % p;
        mul_t[u * q + v] = uint16_t(re + p * im);
        if (mul_t[u * q + v] == 1) inv_t[u] = uint16_t(v);
      }
  }
  long add(long x, long y) const { return add_t[x * q + y]; }
  long mul(long x, long y) const { return mul_t[x * q + y]; }
  long neg(long x) const { return (p - x % p) % p + p * ((p - x / p) % p); }
  long sub(long x, long y) const { return add(x, neg(y)); }
};

using Key = uint32_t;

struct Mat {
  long a, b, c, d;
};

}  // namespace

ClosureReport unipotent_closure_check(long p, int degree) {
  FiniteField K(p, degree);
  const long q = K.q;
  auto enc = [&](const Mat& m) { return Key(((m.a * q + m.b) * q + m.c) * q + m.d); };
  auto dec = [&](Key k) {
    Mat m;
    m.d = k % q;
    k /= q;
    m.c = k % q;
    k /= q;
    m.b = k % q;
    m.a = k / q;
    return m;
  };
  auto mul = [&](const Mat& x, const Mat& y) {
    return Mat{K.add(K.mul(x.a, y.a), K.mul(x.b, y.c)), K.add(K.mul(x.a, y.b), K.mul(x.b, y.d)),
               K.add(K.mul(x.c, y.a), K.mul(x.d, y.c)), K.add(K.mul(x.c, y.b), K.mul(x.d, y.d))};
  };
  auto det = [&](const Mat& m) { return K.sub(K.mul(m.a, m.d), K.mul(m.b, m.c)); };

  ClosureReport r;
  r.p = p;
  r.degree = degree;
  r.group_order = q * (q * q - 1);
  std::vector<Mat> unip;
  std::vector<Mat> gl;
  for (long a = 0; a < q; ++a)
    for (long b = 0; b < q; ++b)
      for (long c = 0; c < q; ++c)
        for (long d = 0; d < q; ++d) {
          Mat m{a, b, c, d};
          long dt = det(m);
          if (dt == 0) continue;
          gl.push_back(m);
          if (dt == 1 && K.add(a, d) == 2 % p && !(a == 1 && d == 1 && b == 0 && c == 0)) unip.push_back(m);
        }
  r.unipotents = long(unip.size());

  auto closure = [&](const Mat& u, const Mat& v) {
    std::unordered_set<Key> seen{enc({1, 0, 0, 1})};
    std::vector<Mat> frontier{{1, 0, 0, 1}};
    for (std::size_t h = 0; h < frontier.size(); ++h)
      for (const Mat& g : {u, v}) {
        Mat y = mul(frontier[h], g);
        if (seen.insert(enc(y)).second) frontier.push_back(y);
      }
    std::vector<Key> out(seen.begin(), seen.end());
    std::sort(out.begin(), out.end());
    return out;
  };

  // GL₂(F_q)-conjugates of the standard SL₂(F_p)
  std::set<std::vector<Key>> subfield_conjugates;
  {
    std::vector<Mat> base;
    for (long a = 0; a < p; ++a)
      for (long b = 0; b < p; ++b)
        for (long c = 0; c < p; ++c)
          for (long d = 0; d < p; ++d)
            if (det({a, b, c, d}) == 1) base.push_back({a, b, c, d});
    for (const Mat& x : gl) {
      long di = K.inv_t[det(x)];
      Mat xi{K.mul(x.d, di), K.mul(K.neg(x.b), di), K.mul(K.neg(x.c), di), K.mul(x.a, di)};
      std::vector<Key> conj;
      for (const Mat& m : base) conj.push_back(enc(mul(mul(x, m), xi)));
      std::sort(conj.begin(), conj.end());
      subfield_conjugates.insert(std::move(conj));
    }
  }

  // fixed line of a nontrivial unipotent, normalized
  auto root_line = [&](const Mat& m) {
    long x = K.sub(m.a, 1), y = m.c;
    // kernel of m − I is spanned by (−(m.b), m.a − 1) or (m.d − 1, −m.c)
    long v0 = K.neg(m.b), v1 = x;
    if (v0 == 0 && v1 == 0) {
      v0 = K.sub(m.d, 1);
      v1 = K.neg(y);
    }
    long s = v0 != 0 ? K.inv_t[v0] : K.inv_t[v1];
    return std::pair<long, long>{K.mul(v0, s), K.mul(v1, s)};
  };

  std::map<std::vector<Key>, long> closures;
  for (std::size_t i = 0; i < unip.size(); ++i)
    for (std::size_t j = i + 1; j < unip.size(); ++j) {
      const Mat &u = unip[i], &v = unip[j];
      if (enc(mul(u, v)) == enc(mul(v, u))) continue;
      r.pairs += 2;
      closures[closure(u, v)] += 2;
    }
  r.distinct_closures = long(closures.size());
  for (const auto& [H, count] : closures) {
    long order = long(H.size());
    r.closure_orders[order] += count;
    if (order == r.group_order) {
      r.full += count;
      continue;
    }
    if (subfield_conjugates.count(H))
      r.subfield_type += count;
    else
      r.other += count;
    std::set<std::pair<long, long>> lines;
    for (Key key : H) {
      Mat m = dec(key);
      bool identity = m.a == 1 && m.d == 1 && m.b == 0 && m.c == 0;
      if (!identity && K.add(m.a, m.d) == 2 % p) lines.insert(root_line(m));
    }
    r.max_noncommuting_in_proper = std::max(r.max_noncommuting_in_proper, long(lines.size()));
  }
  r.pass = r.other == 0 && r.max_noncommuting_in_proper <= p + 1;
  return r;
}

nlohmann::json to_json(const ClosureReport& r) {
  nlohmann::json orders = nlohmann::json::object();
  for (auto [o, c] : r.closure_orders) orders[std::to_string(o)] = c;
  return {{"p", r.p},
          {"degree", r.degree},
          {"group_order", r.group_order},
          {"unipotents", r.unipotents},
          {"pairs", r.pairs},
          {"distinct_closures", r.distinct_closures},
          {"closure_orders", orders},
          {"full", r.full},
          {"subfield_type", r.subfield_type},
          {"other", r.other},
          {"max_noncommuting_in_proper", r.max_noncommuting_in_proper},
          {"pass", r.pass}};
}

}  // namespace bianchi
