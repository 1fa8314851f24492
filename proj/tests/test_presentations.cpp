#include <algorithm>
#include <random>

#include "bianchi/congruence.hpp"
#include "bianchi/presentations.hpp"
#include "doctest.h"

using namespace bianchi;

namespace {

const long kFields[] = {-1, -2, -3, -7, -11};

Abelianization ab(long free_rank, std::vector<long> tors) {
  Abelianization a;
  a.free_rank = free_rank;
  for (long t : tors) a.torsion.push_back(BigInt(t));
  return a;
}

}  // namespace

TEST_CASE("embedded relators evaluate to the identity up to sign") {
  for (long d : kFields) {
    QuadraticField F(d);
    for (auto P : {psl_presentation(F), presentation(F)}) {
      auto rep = verify_presentation(F, P);
      CHECK_MESSAGE(rep.pass, "d = " << d << ": " << rep.message);
      CHECK(rep.determinants_ok);
      CHECK(rep.relators.size() == P.relators.size());
    }
  }
}

TEST_CASE("a corrupted relator is reported") {
  QuadraticField F(-1);
  auto P = psl_presentation(F);
  P.relators[0].push_back(3);
  auto rep = verify_presentation(F, P);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.relators[0].pass);
  auto Q = psl_presentation(F);
  Q.images[0].b = FieldElement(5);
  CHECK_FALSE(verify_presentation(F, Q).determinants_ok);
}

TEST_CASE("abelianization of toy presentations") {
  FinitePresentation free2;
  free2.generators = {"x", "y"};
  CHECK(abelianization(free2) == ab(2, {}));
  FinitePresentation cyc;
  cyc.generators = {"a"};
  cyc.relators = {{1, 1, 1}};
  CHECK(abelianization(cyc) == ab(0, {3}));
  FinitePresentation z2z6;
  z2z6.generators = {"a", "b"};
  z2z6.relators = {{1, 1}, word_power({2}, 6), {1, 2, -1, -2}};
  CHECK(abelianization(z2z6) == ab(0, {2, 6}));
}

TEST_CASE("abelianizations of the Bianchi groups") {
  CHECK(abelianization(psl_presentation(QuadraticField(-1))) == ab(0, {2, 2}));
  CHECK(abelianization(psl_presentation(QuadraticField(-2))) == ab(1, {6}));
  CHECK(abelianization(psl_presentation(QuadraticField(-3))) == ab(0, {3}));
  CHECK(abelianization(psl_presentation(QuadraticField(-7))) == ab(1, {2}));
  CHECK(abelianization(psl_presentation(QuadraticField(-11))) == ab(1, {3}));
}

TEST_CASE("abelianization is invariant under relator order and extra true relators") {
  std::mt19937 rng(7);
  for (long d : kFields) {
    QuadraticField F(d);
    auto P = psl_presentation(F);
    auto base = abelianization(P);
    auto Q = P;
    std::shuffle(Q.relators.begin(), Q.relators.end(), rng);
    CHECK(abelianization(Q) == base);
    auto extra = find_short_relators(F, P, 6);
    CHECK_FALSE(extra.empty());
    Q.relators.insert(Q.relators.end(), extra.begin(), extra.end());
    CHECK(abelianization(Q) == base);
  }
}

TEST_CASE("word utilities") {
  Word w{1, 2, -2, 3};
  CHECK(free_reduce(w) == Word{1, 3});
  CHECK(word_inverse(w) == Word{-3, 2, -2, -1});
  CHECK(free_reduce(word_concat(w, word_inverse(w))).empty());
  CHECK(word_power({1, 2}, -2) == Word{-2, -1, -2, -1});
}

TEST_CASE("json round trip") {
  for (long d : kFields) {
    QuadraticField F(d);
    auto P = presentation(F);
    auto Q = presentation_from_json(presentation_to_json(P));
    CHECK(Q.d == P.d);
    CHECK(Q.generators == P.generators);
    CHECK(Q.images == P.images);
    CHECK(Q.relators == P.relators);
    CHECK(Q.borel == P.borel);
    CHECK(Q.projective == P.projective);
    CHECK(Q.central_generator == P.central_generator);
  }
}

TEST_CASE("fields without an embedded presentation are rejected") {
  CHECK_THROWS_WITH_AS(psl_presentation(QuadraticField(-5)), doctest::Contains("no embedded presentation"),
                       std::invalid_argument);
}

TEST_CASE("generator images surject onto SL2(O/I)") {
  for (long d : kFields) {
    QuadraticField F(d);
    auto P = presentation(F);
    for (const auto& I : ideals_up_to_norm(F, 25)) {
      if (I.norm() == 1) continue;
      auto q = sl2_quotient(F, I, P.images);
      CHECK_MESSAGE(q.generated, "d = " << d << " I = " << ideal_to_string(I));
      CHECK(q.order == q.formula_order);
    }
  }
}

TEST_CASE("borel words have upper-triangular images") {
  for (long d : kFields) {
    QuadraticField F(d);
    auto P = presentation(F);
    for (const auto& w : P.borel) CHECK(evaluate_word(F, P.images, w).c.is_zero());
  }
}
