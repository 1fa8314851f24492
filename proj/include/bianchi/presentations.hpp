#pragma once

#include <string>
#include <vector>

#include "bianchi/number_field.hpp"
#include "json.hpp"

namespace bianchi {

// 2×2 matrix over O_F, entries in basis (1, ω).
struct Mat2 {
  FieldElement a{1}, b{0}, c{0}, d{1};
  bool operator==(const Mat2& o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }
  bool operator!=(const Mat2& o) const { return !(*this == o); }
};

Mat2 mat_identity();
Mat2 mat_minus_identity();
Mat2 mat_mul(const QuadraticField& F, const Mat2& x, const Mat2& y);
// inverse of a determinant-one matrix
Mat2 mat_inverse(const QuadraticField& F, const Mat2& x);
Mat2 mat_neg(const QuadraticField& F, const Mat2& x);
FieldElement mat_det(const QuadraticField& F, const Mat2& x);
FieldElement mat_trace(const QuadraticField& F, const Mat2& x);
bool mat_is_identity(const Mat2& x);
bool mat_is_minus_identity(const Mat2& x);
std::string mat_to_string(const QuadraticField& F, const Mat2& x);

// Signed 1-based generator indices: +k is generator k−1, −k its inverse.
using Word = std::vector<int>;

Word word_inverse(const Word& w);
Word word_concat(const Word& x, const Word& y);
Word word_power(const Word& w, int n);
Word free_reduce(const Word& w);

struct FinitePresentation {
  long d = 0;
  std::vector<std::string> generators;
  std::vector<Mat2> images;
  std::vector<Word> relators;
  // words generating the stabilizer of ∞ (upper-triangular images)
  std::vector<Word> borel;
  // relators hold up to sign (a presentation of PSL₂)
  bool projective = false;
  // generator whose image is −I in an SL₂ lift, or −1
  int central_generator = -1;

  std::size_t num_generators() const { return generators.size(); }
};

Mat2 evaluate_word(const QuadraticField& F, const std::vector<Mat2>& images, const Word& w);
std::string word_to_string(const FinitePresentation& p, const Word& w);

// Embedded presentations for d ∈ {−1, −2, −3, −7, −11}.
FinitePresentation psl_presentation(const QuadraticField& F);
// SL₂ lift: a central generator z ↦ −I, each relator r becomes r·z^{−ε} with image(r) = (−I)^ε,
// plus z² and [z, g] for every generator g.
FinitePresentation lift_to_sl(const QuadraticField& F, const FinitePresentation& p);
FinitePresentation presentation(const QuadraticField& F);

struct RelatorCheck {
  std::size_t index = 0;
  Mat2 value;
  bool minus_identity = false;
  bool pass = false;
};

struct PresentationReport {
  bool pass = true;
  bool determinants_ok = true;
  std::vector<RelatorCheck> relators;
  std::string message;
};

PresentationReport verify_presentation(const QuadraticField& F, const FinitePresentation& p);

struct Abelianization {
  long free_rank = 0;
  std::vector<BigInt> torsion;  // nontrivial invariant factors
  std::string to_string() const;
  bool operator==(const Abelianization& o) const { return free_rank == o.free_rank && torsion == o.torsion; }
};

Abelianization abelianization(const FinitePresentation& p);

// Freely and cyclically reduced words of length ≤ max_len whose images are ±I (projective) or I.
std::vector<Word> find_short_relators(const QuadraticField& F, const FinitePresentation& p, int max_len);

nlohmann::json presentation_to_json(const FinitePresentation& p);
FinitePresentation presentation_from_json(const nlohmann::json& j);

}  // namespace bianchi
