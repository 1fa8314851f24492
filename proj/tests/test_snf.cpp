#include <random>
#include <sstream>

#include "bianchi/snf.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bianchi;

namespace {

SparseIntMatrix from_longs(const std::vector<std::vector<long>>& A) {
  long m = long(A.size()), n = m ? long(A[0].size()) : 0;
  SparseIntMatrix M(m, n);
  for (long i = 0; i < m; ++i)
    for (long j = 0; j < n; ++j)
      if (A[i][j]) M.add(i, j, int64_t(A[i][j]));
  M.finalize();
  return M;
}

std::vector<BigInt> strip_ones(const std::vector<BigInt>& v) {
  std::vector<BigInt> out;
  for (auto& x : v)
    if (x != 1) out.push_back(x);
  return out;
}

}  // namespace

TEST_CASE("small fixed examples") {
  auto r = smith_normal_form(from_longs({{2, 4}, {6, 8}}));
  REQUIRE(r.invariant_factors.size() == 2);
  CHECK(r.invariant_factors[0] == 2);
  CHECK(r.invariant_factors[1] == 4);
  auto z = smith_normal_form(SparseIntMatrix(3, 4));
  CHECK(z.rank == 0);
  auto t = smith_normal_form(from_longs({{2, 0, 0}, {0, 3, 0}, {0, 0, 0}}));
  REQUIRE(t.invariant_factors.size() == 2);
  CHECK(t.invariant_factors[0] == 1);
  CHECK(t.invariant_factors[1] == 6);
  CHECK(t.torsion_order() == 6);
}

TEST_CASE("random dense matrices against the determinantal-divisor oracle") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    int m = 1 + int(rng() % 8), n = 1 + int(rng() % 8);
    int range = 1 + int(rng() % 12);
    std::vector<std::vector<long>> A(m, std::vector<long>(n));
    for (auto& row : A)
      for (auto& x : row) x = (rng() % 3 == 0) ? long(rng() % (2 * range + 1)) - range : 0;
    auto expect = oracle::invariant_factors_by_minors(A);
    auto got = smith_normal_form(from_longs(A), {.dense_threshold = 0});
    CHECK(got.invariant_factors == expect);
    auto dense = dense_smith_normal_form(from_longs(A).to_dense(), true);
    CHECK(dense.invariant_factors == expect);
    // L·A·R is diagonal with the same entries
    auto D = dense_mul(dense_mul(*dense.left, from_longs(A).to_dense()), *dense.right);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) {
        BigInt want = (i == j && i < dense.rank) ? dense.invariant_factors[i] : BigInt(0);
        CHECK(D[i][j] == want);
      }
  }
}

TEST_CASE("entries overflowing 64 bits promote to big integers") {
  // Fibonacci-style growth forces large intermediate values in the non-unit phase
  SparseIntMatrix M(3, 3);
  BigInt huge("340282366920938463463374607431768211457");
  M.add(0, 0, huge);
  M.add(0, 1, int64_t(4611686018427387904LL));
  M.add(1, 1, int64_t(6));
  M.add(2, 2, int64_t(10));
  M.add(1, 2, int64_t(4));
  M.finalize();
  auto r = smith_normal_form(M, {.dense_threshold = 0});
  auto d = dense_smith_normal_form(M.to_dense(), false);
  CHECK(r.invariant_factors == d.invariant_factors);
  CHECK(r.promoted_to_bigint);

  SparseIntMatrix N(2, 2);
  N.add(0, 0, int64_t(3037000499LL * 2));
  N.add(0, 1, int64_t(3037000493LL * 2));
  N.add(1, 0, int64_t(3037000493LL * 2));
  N.add(1, 1, int64_t(3037000499LL * 2));
  N.finalize();
  auto rn = smith_normal_form(N, {.dense_threshold = 0});
  auto dn = dense_smith_normal_form(N.to_dense(), false);
  CHECK(rn.invariant_factors == dn.invariant_factors);
}

TEST_CASE("large sparse matrices agree with the dense path and modular ranks") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 4; ++trial) {
    long m = 200 + long(rng() % 40), n = 180 + long(rng() % 40);
    SparseIntMatrix M(m, n);
    for (long i = 0; i < m; ++i) {
      for (int k = 0; k < 3; ++k) {
        long j = long(rng() % n);
        int64_t v = int64_t(rng() % 5) - 2;
        if (trial % 2 == 1 && rng() % 4 == 0) v *= 3;
        M.add(i, j, v);
      }
    }
    M.finalize();
    auto sparse = smith_normal_form(M, {.rank_prepass = true, .modular_check = true});
    auto dense = dense_smith_normal_form(M.to_dense(), false);
    CHECK(sparse.invariant_factors == dense.invariant_factors);
    CHECK(rank_mod_p(M, 2305843009213693951ULL) == sparse.rank);
  }
}

TEST_CASE("consuming entry point matches") {
  std::mt19937_64 rng(5);
  SparseIntMatrix M(60, 50);
  for (int k = 0; k < 200; ++k) M.add(long(rng() % 60), long(rng() % 50), int64_t(rng() % 7) - 3);
  M.finalize();
  auto a = smith_normal_form(M);
  SparseIntMatrix copy = M;
  auto b = smith_normal_form_consume(std::move(copy));
  CHECK(a.invariant_factors == b.invariant_factors);
  CHECK(strip_ones(a.invariant_factors) == a.nontrivial());
}

TEST_CASE("modular double-check detects a wrong result") {
  auto M = from_longs({{2, 0}, {0, 3}});
  auto r = smith_normal_form(M);
  CHECK_NOTHROW(modular_double_check(M, r, 1));
  SnfResult bad = r;
  bad.invariant_factors = {1, 5};
  CHECK_THROWS_AS(modular_double_check(M, bad, 1), std::runtime_error);
  bad.invariant_factors = {6};
  bad.rank = 1;
  CHECK_THROWS_AS(modular_double_check(M, bad, 1), std::runtime_error);
}

TEST_CASE("matrix io round trip and duplicate merging") {
  SparseIntMatrix M(3, 3);
  M.add(0, 0, int64_t(5));
  M.add(0, 0, int64_t(-5));
  M.add(2, 1, BigInt("123456789012345678901234567890"));
  M.add(1, 2, int64_t(-7));
  M.finalize();
  CHECK(M.nnz() == 2);
  std::stringstream ss;
  M.write(ss);
  auto N = SparseIntMatrix::read(ss);
  CHECK(N.to_dense() == M.to_dense());
  CHECK(M.transpose().to_dense()[1][2] == BigInt("123456789012345678901234567890"));
  std::stringstream bad("3 3 2\n0 0 1\n");
  CHECK_THROWS(SparseIntMatrix::read(bad));
}

TEST_CASE("integer kernel") {
  DenseIntMatrix A = {{1, 2, 3}, {2, 4, 6}};
  auto K = integer_kernel(A);
  REQUIRE(K.size() == 3);
  REQUIRE(K[0].size() == 2);
  auto Z = dense_mul(A, K);
  for (auto& row : Z)
    for (auto& x : row) CHECK(x == 0);
}

TEST_CASE("factor_integer") {
  auto f = factor_integer(BigInt(360));
  CHECK(f.to_string() == "2^3*3^2*5");
  BigInt big_prime("1000000000000000003");
  auto g = factor_integer(big_prime * 12);
  CHECK(g.primes.back().first == big_prime);
  CHECK(g.cofactor == 1);
  BigInt semi = BigInt("1000000007") * BigInt("1000000009");
  auto h = factor_integer(semi, 1000);
  CHECK(h.cofactor == semi);
  CHECK_FALSE(h.cofactor_probable_prime);
}
