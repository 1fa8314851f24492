#include "bianchi/presentations.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "bianchi/snf.hpp"

namespace bianchi {

Mat2 mat_identity() { return {}; }

Mat2 mat_minus_identity() { return {FieldElement(-1), FieldElement(0), FieldElement(0), FieldElement(-1)}; }

Mat2 mat_mul(const QuadraticField& F, const Mat2& x, const Mat2& y) {
  return {F.add(F.mul(x.a, y.a), F.mul(x.b, y.c)), F.add(F.mul(x.a, y.b), F.mul(x.b, y.d)),
          F.add(F.mul(x.c, y.a), F.mul(x.d, y.c)), F.add(F.mul(x.c, y.b), F.mul(x.d, y.d))};
}

Mat2 mat_inverse(const QuadraticField& F, const Mat2& x) { return {x.d, F.neg(x.b), F.neg(x.c), x.a}; }

Mat2 mat_neg(const QuadraticField& F, const Mat2& x) { return {F.neg(x.a), F.neg(x.b), F.neg(x.c), F.neg(x.d)}; }

FieldElement mat_det(const QuadraticField& F, const Mat2& x) { return F.sub(F.mul(x.a, x.d), F.mul(x.b, x.c)); }

FieldElement mat_trace(const QuadraticField& F, const Mat2& x) { return F.add(x.a, x.d); }

bool mat_is_identity(const Mat2& x) { return x == mat_identity(); }

bool mat_is_minus_identity(const Mat2& x) { return x == mat_minus_identity(); }

std::string mat_to_string(const QuadraticField& F, const Mat2& x) {
  return "[[" + F.to_string(x.a) + ", " + F.to_string(x.b) + "], [" + F.to_string(x.c) + ", " + F.to_string(x.d) + "]]";
}

Word word_inverse(const Word& w) {
  Word r(w.rbegin(), w.rend());
  for (int& x : r) x = -x;
  return r;
}

Word word_concat(const Word& x, const Word& y) {
  Word r = x;
  r.insert(r.end(), y.begin(), y.end());
  return r;
}

Word word_power(const Word& w, int n) {
  Word base = n < 0 ? word_inverse(w) : w;
  Word r;
  for (int i = 0; i < std::abs(n); ++i) r.insert(r.end(), base.begin(), base.end());
  return r;
}

Word free_reduce(const Word& w) {
  Word r;
  for (int x : w) {
    if (!r.empty() && r.back() == -x) {
      r.pop_back();
    } else {
      r.push_back(x);
    }
  }
  return r;
}

Mat2 evaluate_word(const QuadraticField& F, const std::vector<Mat2>& images, const Word& w) {
  Mat2 m = mat_identity();
  for (int x : w) {
    std::size_t g = std::size_t(std::abs(x)) - 1;
    if (x == 0 || g >= images.size()) throw std::out_of_range("evaluate_word: generator index");
    m = mat_mul(F, m, x > 0 ? images[g] : mat_inverse(F, images[g]));
  }
  return m;
}

std::string word_to_string(const FinitePresentation& p, const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += " ";
    s += p.generators[std::abs(w[i]) - 1];
    if (w[i] < 0) s += "^-1";
  }
  return s;
}

namespace {

FieldElement fe(long a, long b) { return FieldElement(BigInt(a), BigInt(b)); }

Mat2 mat(FieldElement a, FieldElement b, FieldElement c, FieldElement d) { return {a, b, c, d}; }

Word commutator(int x, int y) { return {x, y, -x, -y}; }

}  // namespace

FinitePresentation psl_presentation(const QuadraticField& F) {
  FinitePresentation p;
  p.d = F.d();
  p.projective = true;
  const Mat2 A = mat(fe(0, 0), fe(-1, 0), fe(1, 0), fe(0, 0));
  const Mat2 T = mat(fe(1, 0), fe(1, 0), fe(0, 0), fe(1, 0));
  const Mat2 U = mat(fe(1, 0), fe(0, 1), fe(0, 0), fe(1, 0));
  switch (F.d()) {
    case -1: {
      // a=1, l=2, t=3, u=4
      const Mat2 L = mat(fe(0, 1), fe(0, 0), fe(0, 0), fe(0, -1));
      p.generators = {"a", "l", "t", "u"};
      p.images = {A, L, T, U};
      p.relators = {{1, 1}, {2, 2}, {1, 2, 1, 2}, {3, 2, 3, 2}, {4, 2, 4, 2}, {1, 3, 1, 3, 1, 3},
                    {4, 1, 2, 4, 1, 2, 4, 1, 2}, commutator(3, 4)};
      p.borel = {{3}, {4}, {2}};
      break;
    }
    case -3: {
      // ω = (1+√−3)/2 is a primitive sixth root of unity; l = diag(ω, ω̄)
      const Mat2 L = mat(fe(0, 1), fe(0, 0), fe(0, 0), fe(1, -1));
      p.generators = {"a", "l", "t", "u"};
      p.images = {A, L, T, U};
      p.relators = {{1, 1},
                    {2, 2, 2},
                    {1, 2, 1, 2},
                    {1, 3, 1, 3, 1, 3},
                    commutator(3, 4),
                    {2, 3, -2, 3, -4},
                    {2, 4, -2, 3},
                    {3, 2, 3, 2, 3, 2},
                    {4, 2, 4, 2, 4, 2}};
      p.borel = {{3}, {4}, {2}};
      break;
    }
    case -2:
      p.generators = {"a", "t", "u"};
      p.images = {A, T, U};
      p.relators = {{1, 1}, {1, 2, 1, 2, 1, 2}, commutator(2, 3), {-3, 1, 3, 1, -3, 1, 3, 1}};
      p.borel = {{2}, {3}};
      break;
    case -7:
      p.generators = {"a", "t", "u"};
      p.images = {A, T, U};
      p.relators = {{1, 1}, {1, 2, 1, 2, 1, 2}, commutator(2, 3), word_power({1, 2, -3, 1, 3}, 2)};
      p.borel = {{2}, {3}};
      break;
    case -11:
      p.generators = {"a", "t", "u"};
      p.images = {A, T, U};
      p.relators = {{1, 1}, {1, 2, 1, 2, 1, 2}, commutator(2, 3), word_power({1, 2, -3, 1, 3}, 3)};
      p.borel = {{2}, {3}};
      break;
    default:
      throw std::invalid_argument("no embedded presentation for d = " + std::to_string(F.d()));
  }
  return p;
}

FinitePresentation lift_to_sl(const QuadraticField& F, const FinitePresentation& p) {
  if (!p.projective) return p;
  FinitePresentation s = p;
  s.projective = false;
  int z = int(p.generators.size()) + 1;
  s.generators.push_back("z");
  s.images.push_back(mat_minus_identity());
  s.central_generator = z - 1;
  s.relators.clear();
  for (const auto& r : p.relators) {
    Mat2 v = evaluate_word(F, p.images, r);
    Word lifted = r;
    if (mat_is_minus_identity(v)) {
      lifted.push_back(-z);
    } else if (!mat_is_identity(v)) {
      throw std::logic_error("lift_to_sl: relator is not central");
    }
    s.relators.push_back(lifted);
  }
  s.relators.push_back({z, z});
  for (int g = 1; g < z; ++g) s.relators.push_back(commutator(z, g));
  s.borel.push_back({z});
  return s;
}

FinitePresentation presentation(const QuadraticField& F) { return lift_to_sl(F, psl_presentation(F)); }

PresentationReport verify_presentation(const QuadraticField& F, const FinitePresentation& p) {
  PresentationReport rep;
  for (std::size_t g = 0; g < p.images.size(); ++g) {
    if (mat_det(F, p.images[g]) != FieldElement(1)) {
      rep.determinants_ok = false;
      rep.pass = false;
      if (rep.message.empty()) rep.message = "generator " + p.generators[g] + " has determinant different from 1";
    }
  }
  for (std::size_t i = 0; i < p.relators.size(); ++i) {
    RelatorCheck c;
    c.index = i;
    c.value = evaluate_word(F, p.images, p.relators[i]);
    c.minus_identity = mat_is_minus_identity(c.value);
    c.pass = mat_is_identity(c.value) || (p.projective && c.minus_identity);
    if (!c.pass) {
      rep.pass = false;
      if (rep.message.empty()) {
        rep.message = "relator " + std::to_string(i) + " (" + word_to_string(p, p.relators[i]) +
                      ") evaluates to " + mat_to_string(F, c.value);
      }
    }
    rep.relators.push_back(c);
  }
  return rep;
}

std::string Abelianization::to_string() const {
  std::ostringstream os;
  bool first = true;
  if (free_rank > 0) {
    os << "Z";
    if (free_rank > 1) os << "^" << free_rank;
    first = false;
  }
  for (const auto& t : torsion) {
    if (!first) os << " + ";
    os << "Z/" << t.get_str();
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

Abelianization abelianization(const FinitePresentation& p) {
  long g = long(p.generators.size());
  SparseIntMatrix M(long(p.relators.size()), g);
  for (std::size_t i = 0; i < p.relators.size(); ++i)
    for (int x : p.relators[i]) M.add(long(i), std::abs(x) - 1, int64_t(x > 0 ? 1 : -1));
  M.finalize();
  SnfResult r = smith_normal_form(M);
  Abelianization ab;
  ab.free_rank = g - r.rank;
  ab.torsion = r.nontrivial();
  return ab;
}

namespace {

struct CMat {
  cplx a, b, c, d;
};

CMat cmul(const CMat& x, const CMat& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

// minimal representative among cyclic rotations of w and of its inverse
Word cyclic_canonical(const Word& w) {
  Word best = w;
  for (const Word& base : {w, word_inverse(w)}) {
    for (std::size_t k = 0; k < base.size(); ++k) {
      Word r(base.begin() + long(k), base.end());
      r.insert(r.end(), base.begin(), base.begin() + long(k));
      if (r < best) best = r;
    }
  }
  return best;
}

}  // namespace

std::vector<Word> find_short_relators(const QuadraticField& F, const FinitePresentation& p, int max_len) {
  int g = int(p.generators.size());
  std::vector<CMat> fwd(g), inv(g);
  for (int i = 0; i < g; ++i) {
    const Mat2& m = p.images[i];
    fwd[i] = {F.embed(m.a), F.embed(m.b), F.embed(m.c), F.embed(m.d)};
    inv[i] = {fwd[i].d, -fwd[i].b, -fwd[i].c, fwd[i].a};
  }
  std::vector<Word> found;
  Word w;
  std::vector<CMat> stack{{1, 0, 0, 1}};
  auto near_central = [&](const CMat& m) {
    double e1 = std::abs(m.b) + std::abs(m.c) + std::abs(m.a - m.d);
    return e1 < 1e-9 && (std::abs(m.a - 1.0) < 1e-9 || (p.projective && std::abs(m.a + 1.0) < 1e-9));
  };
  auto rec = [&](auto&& self) -> void {
    if (!w.empty() && near_central(stack.back()) && -w.front() != w.back()) {
      Word c = cyclic_canonical(w);
      if (c == w) {
        Mat2 exact = evaluate_word(F, p.images, w);
        if (mat_is_identity(exact) || (p.projective && mat_is_minus_identity(exact))) found.push_back(w);
      }
      return;
    }
    if (int(w.size()) == max_len) return;
    for (int x = -g; x <= g; ++x) {
      if (x == 0 || (!w.empty() && w.back() == -x)) continue;
      w.push_back(x);
      stack.push_back(cmul(stack.back(), x > 0 ? fwd[x - 1] : inv[-x - 1]));
      self(self);
      stack.pop_back();
      w.pop_back();
    }
  };
  rec(rec);
  std::sort(found.begin(), found.end(), [](const Word& x, const Word& y) {
    return x.size() != y.size() ? x.size() < y.size() : x < y;
  });
  return found;
}

nlohmann::json presentation_to_json(const FinitePresentation& p) {
  using nlohmann::json;
  auto elem = [](const FieldElement& x) { return json::array({x.a.get_str(), x.b.get_str()}); };
  json images = json::array();
  for (const auto& m : p.images) images.push_back(json::array({elem(m.a), elem(m.b), elem(m.c), elem(m.d)}));
  return json{{"d", p.d},
              {"generators", p.generators},
              {"images", images},
              {"relators", p.relators},
              {"borel", p.borel},
              {"projective", p.projective},
              {"central_generator", p.central_generator}};
}

FinitePresentation presentation_from_json(const nlohmann::json& j) {
  FinitePresentation p;
  p.d = j.at("d").get<long>();
  p.generators = j.at("generators").get<std::vector<std::string>>();
  auto elem = [](const nlohmann::json& e) {
    auto part = [](const nlohmann::json& v) { return v.is_string() ? BigInt(v.get<std::string>()) : BigInt(v.get<long>()); };
    return FieldElement(part(e.at(0)), part(e.at(1)));
  };
  for (const auto& m : j.at("images")) p.images.push_back({elem(m.at(0)), elem(m.at(1)), elem(m.at(2)), elem(m.at(3))});
  p.relators = j.at("relators").get<std::vector<Word>>();
  p.borel = j.value("borel", std::vector<Word>{});
  p.projective = j.value("projective", false);
  p.central_generator = j.value("central_generator", -1);
  if (p.images.size() != p.generators.size()) throw std::invalid_argument("presentation json: image count mismatch");
  for (const auto& r : p.relators)
    for (int x : r)
      if (x == 0 || std::size_t(std::abs(x)) > p.generators.size())
        throw std::invalid_argument("presentation json: relator index out of range");
  return p;
}

}  // namespace bianchi
