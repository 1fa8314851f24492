#include "bianchi/cusps.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bianchi {

namespace {

bool is_translation(const Mat2& m, long x, long y) {
  return m.a == FieldElement(1) && m.d == FieldElement(1) && m.c.is_zero() && m.b == FieldElement(BigInt(x), BigInt(y));
}

Word find_translation_word(const QuadraticField& F, const FinitePresentation& p, long x, long y) {
  for (const auto& w : p.borel)
    if (is_translation(evaluate_word(F, p.images, w), x, y)) return w;
  for (std::size_t g = 0; g < p.images.size(); ++g)
    if (is_translation(p.images[g], x, y)) return {int(g) + 1};
  throw std::invalid_argument("presentation has no word for the translation by " + std::to_string(x) + " + " +
                              std::to_string(y) + "ω");
}

// Row-reduced basis of the subgroup of Z² spanned by vecs.
std::vector<std::array<long, 2>> lattice_basis(const std::vector<std::array<long, 2>>& vecs) {
  std::array<long, 2> r1{0, 0};
  long y2 = 0;
  for (auto v : vecs) {
    // fold v into r1 by the Euclidean algorithm on first coordinates
    while (v[0] != 0) {
      if (r1[0] == 0 || std::labs(v[0]) < std::labs(r1[0])) std::swap(r1, v);
      long q = v[0] / r1[0];
      v[0] -= q * r1[0];
      v[1] -= q * r1[1];
    }
    y2 = std::gcd(y2, v[1]);
  }
  if (r1[0] < 0) r1 = {-r1[0], -r1[1]};
  std::vector<std::array<long, 2>> out;
  if (r1[0] != 0) out.push_back(r1);
  if (y2 != 0) {
    if (!out.empty()) out[0][1] = ((out[0][1] % y2) + y2) % y2;
    out.push_back({0, y2});
  }
  return out;
}

}  // namespace

std::vector<Cusp> cusp_orbits(const QuadraticField& F, const FinitePresentation& p, const CosetTable& t) {
  if (class_number(F) != 1)
    throw std::invalid_argument("cusp_orbits: class number " + std::to_string(class_number(F)) +
                                " > 1 is not supported");
  if (p.borel.empty()) throw std::invalid_argument("cusp_orbits: presentation has no Borel words");
  std::vector<std::vector<uint32_t>> perms;
  for (const auto& w : p.borel) perms.push_back(t.permutation(w));
  std::vector<int32_t> orbit_id(t.index, -1);
  std::vector<Cusp> cusps;
  for (uint32_t s = 0; s < uint32_t(t.index); ++s) {
    if (orbit_id[s] >= 0) continue;
    Cusp c;
    c.coset = s;
    std::vector<uint32_t> stack{s};
    orbit_id[s] = int32_t(cusps.size());
    while (!stack.empty()) {
      uint32_t x = stack.back();
      stack.pop_back();
      c.orbit.push_back(x);
      for (const auto& pm : perms) {
        uint32_t y = pm[x];
        if (orbit_id[y] < 0) {
          orbit_id[y] = int32_t(cusps.size());
          stack.push_back(y);
        }
      }
    }
    std::sort(c.orbit.begin(), c.orbit.end());
    c.transversal = evaluate_word(F, p.images, t.transversal_word(s));
    c.a = c.transversal.a;
    c.c = c.transversal.c;
    cusps.push_back(std::move(c));
  }
  return cusps;
}

CuspLattice reduce_lattice(cplx u, cplx v) {
  std::array<long, 2> cu{1, 0}, cv{0, 1};
  double det = std::abs(std::imag(std::conj(u) * v));
  if (det < 1e-300) throw std::invalid_argument("reduce_lattice: dependent vectors");
  for (int it = 0; it < 10000; ++it) {
    if (std::norm(u) > std::norm(v)) {
      std::swap(u, v);
      std::swap(cu, cv);
    }
    double m = std::round(std::real(v * std::conj(u)) / std::norm(u));
    if (m == 0) break;
    v -= m * u;
    cv[0] -= long(m) * cu[0];
    cv[1] -= long(m) * cu[1];
  }
  CuspLattice L;
  L.v1 = u;
  L.v2 = v;
  L.b1 = cu;
  L.b2 = cv;
  L.alpha1 = std::abs(u);
  L.alpha2 = std::abs(v);
  // certification in the ball of radius α₂
  const double tol = 1e-9 * L.alpha2;
  long bx = long(std::ceil(L.alpha2 * std::abs(v) / det)) + 1;
  long by = long(std::ceil(L.alpha2 * std::abs(u) / det)) + 1;
  for (long x = -bx; x <= bx; ++x)
    for (long y = -by; y <= by; ++y) {
      if (x == 0 && y == 0) continue;
      double len = std::abs(double(x) * u + double(y) * v);
      if (len < L.alpha1 - tol) throw std::logic_error("reduce_lattice: shorter vector found");
      if (y != 0 && len < L.alpha2 - tol) throw std::logic_error("reduce_lattice: second minimum not attained");
    }
  return L;
}

CuspLattice cusp_lattice(const QuadraticField& F, const FinitePresentation& p, const CosetTable& t, const Cusp& c) {
  auto pt = t.permutation(find_translation_word(F, p, 1, 0));
  auto pu = t.permutation(find_translation_word(F, p, 0, 1));
  std::vector<uint32_t> pz;
  if (!t.projective && p.central_generator >= 0) pz = t.permutation(Word{p.central_generator + 1});
  // BFS over the orbit of the abelian group generated by the translations and ±I
  struct Coord {
    long a, b;
    int z;
  };
  std::vector<int8_t> seen(t.index, 0);
  std::vector<Coord> coord(t.index);
  std::vector<std::array<long, 2>> stab;
  std::vector<uint32_t> queue{c.coset};
  seen[c.coset] = 1;
  coord[c.coset] = {0, 0, 0};
  for (std::size_t h = 0; h < queue.size(); ++h) {
    uint32_t x = queue[h];
    Coord cx = coord[x];
    auto visit = [&](uint32_t y, Coord cy) {
      if (!seen[y]) {
        seen[y] = 1;
        coord[y] = cy;
        queue.push_back(y);
      } else if (coord[y].a != cy.a || coord[y].b != cy.b) {
        stab.push_back({cy.a - coord[y].a, cy.b - coord[y].b});
      }
    };
    visit(pt[x], {cx.a + 1, cx.b, cx.z});
    visit(pu[x], {cx.a, cx.b + 1, cx.z});
    if (!pz.empty()) visit(pz[x], {cx.a, cx.b, cx.z ^ 1});
  }
  auto basis = lattice_basis(stab);
  if (basis.size() < 2) throw std::logic_error("cusp_lattice: translation lattice has rank < 2");
  cplx w = F.omega_complex();
  auto emb = [&](const std::array<long, 2>& v) { return double(v[0]) + double(v[1]) * w; };
  CuspLattice L = reduce_lattice(emb(basis[0]), emb(basis[1]));
  auto combo = [&](const std::array<long, 2>& co) {
    return std::array<long, 2>{co[0] * basis[0][0] + co[1] * basis[1][0], co[0] * basis[0][1] + co[1] * basis[1][1]};
  };
  L.b1 = combo(L.b1);
  L.b2 = combo(L.b2);
  return L;
}

double level_volume(const QuadraticField& F, const CosetTable& t) {
  double psl_index = double(t.index);
  if (!t.projective && !t.minus_identity_in_level) psl_index /= 2.0;
  return psl_index * covolume(F);
}

CuspReport lattice_report(const std::string& name, const std::vector<CuspLattice>& lattices, double volume,
                          double alpha_exponent) {
  CuspReport r;
  r.level = name;
  r.volume = volume;
  r.h = long(lattices.size());
  r.alpha_exponent = alpha_exponent;
  for (const auto& L : lattices) {
    r.alphas.emplace_back(L.alpha1, L.alpha2);
    double q = L.ratio();
    r.sup_ratio = std::max(r.sup_ratio, q);
    r.sum_ratio += q;
    r.sum_ratio_sq += q * q;
  }
  r.square_bound = r.sum_ratio_sq <= std::pow(volume, 1.0 - alpha_exponent);
  return r;
}

CuspReport cusp_report(const QuadraticField& F, const LevelStructure& level, double alpha_exponent) {
  auto P = psl_presentation(F);
  auto t = coset_table(F, P, level);
  std::vector<CuspLattice> lattices;
  for (const auto& c : cusp_orbits(F, P, t)) lattices.push_back(cusp_lattice(F, P, t, c));
  auto r = lattice_report(ideal_to_string(level.ideal) + ":" + flavor_name(level.flavor), lattices,
                          level_volume(F, t), alpha_exponent);
  r.index = t.index;
  return r;
}

UniformityReport uniformity_report(const QuadraticField& F, const std::vector<LevelStructure>& levels,
                                   double alpha_exponent) {
  UniformityReport u;
  for (const auto& l : levels) {
    u.levels.push_back(cusp_report(F, l, alpha_exponent));
    u.sup_ratio = std::max(u.sup_ratio, u.levels.back().sup_ratio);
    u.all_square_bounds = u.all_square_bounds && u.levels.back().square_bound;
  }
  return u;
}

long count_geodesic_lifts(const QuadraticField& F, const FinitePresentation& p, const Mat2& gamma,
                          const CosetTable& t) {
  if (mat_det(F, gamma) != FieldElement(1)) throw std::invalid_argument("count_geodesic_lifts: det is not 1");
  std::vector<std::vector<long>> children(t.index);
  for (long c = 1; c < t.index; ++c) children[t.parent[c]].push_back(c);
  std::vector<Mat2> trans(t.index);
  std::vector<long> order{0};
  for (std::size_t h = 0; h < order.size(); ++h)
    for (long ch : children[order[h]]) {
      int l = t.letter[ch];
      const Mat2& g = p.images[std::abs(l) - 1];
      trans[ch] = mat_mul(F, trans[order[h]], l > 0 ? g : mat_inverse(F, g));
      order.push_back(ch);
    }
  const bool up_to_sign = t.projective && !t.minus_identity_in_level;
  long fixed = 0;
  for (long c = 0; c < t.index; ++c) {
    Mat2 x = mat_mul(F, mat_mul(F, trans[c], gamma), mat_inverse(F, trans[c]));
    if (level_contains(F, t.level, x) || (up_to_sign && level_contains(F, t.level, mat_neg(F, x)))) ++fixed;
  }
  return fixed;
}

nlohmann::json to_json(const CuspReport& r) {
  nlohmann::json a = nlohmann::json::array();
  for (auto [x, y] : r.alphas) a.push_back({x, y});
  return {{"level", r.level},         {"index", r.index},         {"volume", r.volume},
          {"h", r.h},                 {"alphas", a},              {"sup_ratio", r.sup_ratio},
          {"sum_ratio", r.sum_ratio}, {"sum_ratio_sq", r.sum_ratio_sq}, {"alpha_exponent", r.alpha_exponent},
          {"square_bound", r.square_bound}};
}

}  // namespace bianchi
