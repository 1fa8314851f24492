#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace bianchi {

using BigInt = mpz_class;
using DenseIntMatrix = std::vector<std::vector<BigInt>>;

// Coordinate-list integer matrix. Entries that fit in 64 bits are stored inline,
// the rest in a side table; finalize() merges duplicates and drops zeros.
class SparseIntMatrix {
 public:
  struct Entry {
    int32_t row;
    int32_t col;
    int64_t value;  // kBig marks a value held in the side table
  };
  static constexpr int64_t kBig = INT64_MIN;

  SparseIntMatrix() = default;
  SparseIntMatrix(long nrows, long ncols) : nrows_(nrows), ncols_(ncols) {}

  long rows() const { return nrows_; }
  long cols() const { return ncols_; }
  std::size_t nnz() const { return entries_.size(); }

  void add(long i, long j, int64_t v);
  void add(long i, long j, const BigInt& v);
  // Append entries of one row already sorted by column, merged and nonzero.
  void append_sorted_row(long i, const std::vector<std::pair<int32_t, int64_t>>& cells);
  void finalize();
  bool finalized() const { return finalized_; }

  const std::vector<Entry>& entries() const { return entries_; }
  BigInt value(const Entry& e) const;
  std::vector<std::tuple<long, long, BigInt>> triplets() const;
  DenseIntMatrix to_dense() const;
  static SparseIntMatrix from_dense(const DenseIntMatrix& A);
  SparseIntMatrix transpose() const;
  void release();

  void write(std::ostream& os) const;
  static SparseIntMatrix read(std::istream& is);

 private:
  long nrows_ = 0;
  long ncols_ = 0;
  std::vector<Entry> entries_;
  std::map<std::pair<int32_t, int32_t>, BigInt> big_;
  bool finalized_ = true;
};

struct SnfResult {
  // d₁ | d₂ | ... | d_rank, all positive
  std::vector<BigInt> invariant_factors;
  long rank = 0;
  std::optional<DenseIntMatrix> left;   // L with L·A·R = diag
  std::optional<DenseIntMatrix> right;  // R
  bool promoted_to_bigint = false;
  long dense_core_rows = 0;
  long dense_core_cols = 0;

  std::vector<BigInt> nontrivial() const;
  BigInt torsion_order() const;
};

struct SnfOptions {
  bool want_transforms = false;
  bool rank_prepass = false;
  bool modular_check = false;
  uint64_t seed = 0x5eedULL;
  // largest active dimension handed to the dense fallback once unit pivots run out
  long dense_threshold = 1500;
};

SnfResult smith_normal_form(const SparseIntMatrix& A, const SnfOptions& opt = {});
// Consumes the input to keep peak memory down.
SnfResult smith_normal_form_consume(SparseIntMatrix&& A, const SnfOptions& opt = {});

SnfResult dense_smith_normal_form(const DenseIntMatrix& A, bool want_transforms);

long rank_mod_p(const SparseIntMatrix& A, uint64_t p);

// Rank at three random 61-bit primes and at each small prime dividing an invariant
// factor; throws std::runtime_error with diagnostics on mismatch.
void modular_double_check(const SparseIntMatrix& A, const SnfResult& r, uint64_t seed);

// Saturated kernel of a dense integer matrix (columns of the result span ker A).
DenseIntMatrix integer_kernel(const DenseIntMatrix& A);
DenseIntMatrix dense_mul(const DenseIntMatrix& A, const DenseIntMatrix& B);
DenseIntMatrix dense_identity(long n);

// Trial division up to the bound; the remaining cofactor is reported with a
// primality verdict.
struct Factorization {
  std::vector<std::pair<BigInt, int>> primes;
  BigInt cofactor = 1;
  bool cofactor_probable_prime = false;
  std::string to_string() const;
};
Factorization factor_integer(const BigInt& n, unsigned long trial_bound = 1000000);

}  // namespace bianchi
