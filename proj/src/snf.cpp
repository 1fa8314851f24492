#include "bianchi/snf.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>

namespace bianchi {

namespace {

int cmpabs(const BigInt& a, const BigInt& b) { return mpz_cmpabs(a.get_mpz_t(), b.get_mpz_t()); }

}  // namespace

// ---------------------------------------------------------------------------
// SparseIntMatrix

void SparseIntMatrix::add(long i, long j, int64_t v) {
  if (i < 0 || i >= nrows_ || j < 0 || j >= ncols_) throw std::out_of_range("SparseIntMatrix::add");
  if (v == 0) return;
  if (v == kBig) {
    add(i, j, BigInt(std::to_string(v)));
    return;
  }
  entries_.push_back({int32_t(i), int32_t(j), v});
  finalized_ = false;
}

void SparseIntMatrix::add(long i, long j, const BigInt& v) {
  if (i < 0 || i >= nrows_ || j < 0 || j >= ncols_) throw std::out_of_range("SparseIntMatrix::add");
  if (v == 0) return;
  if (v.fits_slong_p() && v.get_si() != kBig) {
    add(i, j, int64_t(v.get_si()));
    return;
  }
  auto key = std::make_pair(int32_t(i), int32_t(j));
  auto it = big_.find(key);
  if (it == big_.end()) {
    big_[key] = v;
    entries_.push_back({int32_t(i), int32_t(j), kBig});
  } else {
    it->second += v;
  }
  finalized_ = false;
}

void SparseIntMatrix::append_sorted_row(long i, const std::vector<std::pair<int32_t, int64_t>>& cells) {
  bool ordered = finalized_ && (entries_.empty() || entries_.back().row < i);
  for (const auto& [c, v] : cells) {
    if (v == 0 || v == kBig) {
      ordered = false;
      add(i, c, v);
      continue;
    }
    entries_.push_back({int32_t(i), c, v});
  }
  finalized_ = ordered;
}

void SparseIntMatrix::finalize() {
  if (finalized_) return;
  std::sort(entries_.begin(), entries_.end(), [](const Entry& x, const Entry& y) {
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });
  std::vector<Entry> out;
  out.reserve(entries_.size());
  std::map<std::pair<int32_t, int32_t>, BigInt> big;
  std::size_t k = 0;
  while (k < entries_.size()) {
    std::size_t l = k;
    BigInt sum = 0;
    bool any_big = false;
    __int128 small = 0;
    while (l < entries_.size() && entries_[l].row == entries_[k].row && entries_[l].col == entries_[k].col) {
      if (entries_[l].value == kBig) {
        any_big = true;
      } else {
        small += entries_[l].value;
      }
      ++l;
    }
    auto key = std::make_pair(entries_[k].row, entries_[k].col);
    if (any_big) sum = big_[key];
    // fold the 128-bit partial sum in
    {
      bool neg = small < 0;
      unsigned __int128 mag = neg ? (unsigned __int128)(-small) : (unsigned __int128)small;
      BigInt m = BigInt(uint64_t(mag >> 64));
      m <<= 64;
      m += BigInt(uint64_t(mag));
      sum += neg ? BigInt(-m) : m;
    }
    if (sum != 0) {
      if (sum.fits_slong_p() && sum.get_si() != kBig) {
        out.push_back({key.first, key.second, sum.get_si()});
      } else {
        out.push_back({key.first, key.second, kBig});
        big[key] = sum;
      }
    }
    k = l;
  }
  entries_.swap(out);
  big_.swap(big);
  finalized_ = true;
}

BigInt SparseIntMatrix::value(const Entry& e) const {
  if (e.value != kBig) return BigInt(long(e.value));
  return big_.at({e.row, e.col});
}

std::vector<std::tuple<long, long, BigInt>> SparseIntMatrix::triplets() const {
  SparseIntMatrix copy = *this;
  copy.finalize();
  std::vector<std::tuple<long, long, BigInt>> out;
  for (const auto& e : copy.entries_) out.emplace_back(e.row, e.col, copy.value(e));
  return out;
}

DenseIntMatrix SparseIntMatrix::to_dense() const {
  DenseIntMatrix D(nrows_, std::vector<BigInt>(ncols_, 0));
  for (const auto& e : entries_) D[e.row][e.col] += value(e);
  return D;
}

SparseIntMatrix SparseIntMatrix::from_dense(const DenseIntMatrix& A) {
  long r = long(A.size()), c = r ? long(A[0].size()) : 0;
  SparseIntMatrix M(r, c);
  for (long i = 0; i < r; ++i)
    for (long j = 0; j < c; ++j)
      if (A[i][j] != 0) M.add(i, j, A[i][j]);
  M.finalize();
  return M;
}

SparseIntMatrix SparseIntMatrix::transpose() const {
  SparseIntMatrix T(ncols_, nrows_);
  for (const auto& e : entries_) {
    if (e.value == kBig) {
      T.add(e.col, e.row, value(e));
    } else {
      T.add(e.col, e.row, e.value);
    }
  }
  T.finalize();
  return T;
}

void SparseIntMatrix::release() {
  std::vector<Entry>().swap(entries_);
  big_.clear();
}

void SparseIntMatrix::write(std::ostream& os) const {
  SparseIntMatrix copy = *this;
  copy.finalize();
  os << nrows_ << " " << ncols_ << " " << copy.nnz() << "\n";
  for (const auto& e : copy.entries_) os << e.row << " " << e.col << " " << copy.value(e).get_str() << "\n";
}

SparseIntMatrix SparseIntMatrix::read(std::istream& is) {
  long r, c;
  std::size_t n;
  if (!(is >> r >> c >> n)) throw std::runtime_error("SparseIntMatrix::read: bad header");
  SparseIntMatrix M(r, c);
  for (std::size_t k = 0; k < n; ++k) {
    long i, j;
    std::string v;
    if (!(is >> i >> j >> v)) throw std::runtime_error("SparseIntMatrix::read: truncated entry list");
    M.add(i, j, BigInt(v));
  }
  M.finalize();
  return M;
}

// ---------------------------------------------------------------------------
// Scalar policies

namespace {

struct Overflow {};

#pragma pack(push, 4)
struct CellI64 {
  int32_t col;
  int64_t val;
};
#pragma pack(pop)

struct CellBig {
  int32_t col;
  BigInt val;
};

struct CellMod {
  int32_t col;
  uint64_t val;
};

struct I64Ops {
  using T = int64_t;
  using Cell = CellI64;
  static constexpr bool kField = false;
  bool is_zero(T x) const { return x == 0; }
  bool is_unit(T x) const { return x == 1 || x == -1; }
  T unit_inverse(T x) const { return x; }
  T mul(T a, T b) const {
    T r;
    if (__builtin_mul_overflow(a, b, &r)) throw Overflow{};
    return r;
  }
  T add(T a, T b) const {
    T r;
    if (__builtin_add_overflow(a, b, &r)) throw Overflow{};
    return r;
  }
  T sub(T a, T b) const {
    T r;
    if (__builtin_sub_overflow(a, b, &r)) throw Overflow{};
    return r;
  }
  T neg(T a) const {
    if (a == INT64_MIN) throw Overflow{};
    return -a;
  }
  // magnitude comparison
  bool abs_less(T a, T b) const { return (a < 0 ? -(__int128)a : a) < (b < 0 ? -(__int128)b : b); }
  bool divides(T a, T b) const { return b % a == 0; }
  T quot(T b, T a) const {
    if (a == -1 && b == INT64_MIN) throw Overflow{};
    return b / a;
  }
  // g = s·a + t·b
  void gcdext(T a, T b, T& g, T& s, T& t) const {
    __int128 r0 = a, r1 = b, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (r1 != 0) {
      __int128 q = r0 / r1;
      __int128 tmp = r0 - q * r1;
      r0 = r1;
      r1 = tmp;
      tmp = s0 - q * s1;
      s0 = s1;
      s1 = tmp;
      tmp = t0 - q * t1;
      t0 = t1;
      t1 = tmp;
    }
    if (r0 < 0) {
      r0 = -r0;
      s0 = -s0;
      t0 = -t0;
    }
    if (r0 > INT64_MAX || s0 > INT64_MAX || s0 < INT64_MIN || t0 > INT64_MAX || t0 < INT64_MIN) throw Overflow{};
    g = T(r0);
    s = T(s0);
    t = T(t0);
  }
  BigInt to_big(T x) const { return BigInt(long(x)); }
  T from_big(const BigInt& x) const {
    if (!x.fits_slong_p()) throw Overflow{};
    return x.get_si();
  }
  T from_i64(int64_t x) const { return x; }
};

struct BigOps {
  using T = BigInt;
  using Cell = CellBig;
  static constexpr bool kField = false;
  bool is_zero(const T& x) const { return x == 0; }
  bool is_unit(const T& x) const { return x == 1 || x == -1; }
  T unit_inverse(const T& x) const { return x; }
  T mul(const T& a, const T& b) const { return a * b; }
  T add(const T& a, const T& b) const { return a + b; }
  T sub(const T& a, const T& b) const { return a - b; }
  T neg(const T& a) const { return -a; }
  bool abs_less(const T& a, const T& b) const { return cmpabs(a, b) < 0; }
  bool divides(const T& a, const T& b) const { return mpz_divisible_p(b.get_mpz_t(), a.get_mpz_t()) != 0; }
  T quot(const T& b, const T& a) const {
    T q;
    mpz_tdiv_q(q.get_mpz_t(), b.get_mpz_t(), a.get_mpz_t());
    return q;
  }
  void gcdext(const T& a, const T& b, T& g, T& s, T& t) const {
    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  }
  BigInt to_big(const T& x) const { return x; }
  T from_big(const BigInt& x) const { return x; }
  T from_i64(int64_t x) const { return BigInt(long(x)); }
};

struct ModOps {
  using T = uint64_t;
  using Cell = CellMod;
  static constexpr bool kField = true;
  uint64_t p;
  bool is_zero(T x) const { return x == 0; }
  bool is_unit(T x) const { return x != 0; }
  T unit_inverse(T x) const {
    // Fermat
    T r = 1, b = x;
    uint64_t e = p - 2;
    while (e) {
      if (e & 1) r = mul(r, b);
      b = mul(b, b);
      e >>= 1;
    }
    return r;
  }
  T mul(T a, T b) const { return T((unsigned __int128)a * b % p); }
  T add(T a, T b) const {
    T r = a + b;
    return r >= p ? r - p : r;
  }
  T sub(T a, T b) const { return a >= b ? a - b : a + p - b; }
  T neg(T a) const { return a == 0 ? 0 : p - a; }
  bool abs_less(T a, T b) const { return a < b; }
  bool divides(T, T) const { return true; }
  T quot(T b, T a) const { return mul(b, unit_inverse(a)); }
  void gcdext(T a, T, T& g, T& s, T& t) const {
    g = 1;
    s = unit_inverse(a);
    t = 0;
  }
  BigInt to_big(T x) const { return BigInt(std::to_string(x)); }
  T from_big(const BigInt& x) const {
    BigInt r = x % BigInt(std::to_string(p));
    if (r < 0) r += BigInt(std::to_string(p));
    return std::stoull(r.get_str());
  }
  T from_i64(int64_t x) const {
    int64_t r = x % int64_t(p);
    return r < 0 ? uint64_t(r + int64_t(p)) : uint64_t(r);
  }
};

// ---------------------------------------------------------------------------
// Markowitz eliminator

constexpr long kDenseCells = 4000000;

template <class Ops>
class Eliminator {
 public:
  using T = typename Ops::T;
  using Cell = typename Ops::Cell;
  using Row = std::vector<Cell>;

  Eliminator(Ops ops, long nrows, long ncols, long dense_threshold)
      : ops_(ops), nrows_(nrows), ncols_(ncols), dense_threshold_(dense_threshold) {
    rows_.resize(nrows);
    row_alive_.assign(nrows, 1);
  }

  void set_row(long i, Row&& r) { rows_[i] = std::move(r); }

  void build_columns() {
    col_rows_.assign(ncols_, {});
    col_count_.assign(ncols_, 0);
    col_alive_.assign(ncols_, 1);
    col_version_.assign(ncols_, 0);
    nnz_ = 0;
    for (long i = 0; i < nrows_; ++i) {
      if (!row_alive_[i]) continue;
      if (rows_[i].empty()) {
        row_alive_[i] = 0;
        continue;
      }
      for (const auto& c : rows_[i]) {
        col_rows_[c.col].push_back(int32_t(i));
        ++col_count_[c.col];
      }
      nnz_ += rows_[i].size();
    }
    heap_ = {};
    for (long j = 0; j < ncols_; ++j) {
      if (col_count_[j] > 0) heap_.push(key(j));
    }
  }

  // Runs to completion. target_rank < 0 means unknown.
  void run(long target_rank) {
    for (;;) {
      while (unit_step()) {
      }
      if (nnz_ == 0) break;
      if (target_rank >= 0 && long(pivots_.size()) >= target_rank) {
        // rank reached while entries remain: the prepass prime was unlucky
        target_rank = -1;
      }
      if constexpr (Ops::kField) {
        throw std::logic_error("field elimination stalled");
      } else {
        long ar = 0, ac = 0;
        active_shape(ar, ac);
        if (std::min(ar, ac) <= dense_threshold_ && ar * ac <= kDenseCells) {
          dense_finish();
          break;
        }
        general_step();
      }
    }
  }

  const std::vector<T>& pivots() const { return pivots_; }
  long dense_rows() const { return dense_rows_; }
  long dense_cols() const { return dense_cols_; }
  std::vector<BigInt> extra_pivots_big;  // from the dense finish

  // Copy the current state into an eliminator over another scalar type.
  template <class Ops2>
  void export_to(Eliminator<Ops2>& dst) const {
    const Ops2& o2 = dst.ops();
    for (long i = 0; i < nrows_; ++i) {
      if (!row_alive_[i]) {
        dst.kill_row(i);
        continue;
      }
      typename Eliminator<Ops2>::Row r;
      r.reserve(rows_[i].size());
      for (const auto& c : rows_[i]) {
        typename Ops2::Cell nc;
        nc.col = c.col;
        nc.val = o2.from_big(ops_.to_big(c.val));
        r.push_back(std::move(nc));
      }
      dst.set_row(i, std::move(r));
    }
    for (long j = 0; j < ncols_; ++j) {
      if (!col_alive_[j]) dst.kill_col(j);
    }
    for (const auto& p : pivots_) dst.push_pivot(o2.from_big(ops_.to_big(p)));
  }

  const Ops& ops() const { return ops_; }
  void kill_row(long i) {
    row_alive_[i] = 0;
    Row().swap(rows_[i]);
  }
  void kill_col(long j) { dead_cols_.push_back(j); }
  void push_pivot(const T& v) { pivots_.push_back(v); }
  void apply_dead_cols() {
    for (long j : dead_cols_) col_alive_[j] = 0;
  }

 private:
  struct HeapKey {
    int32_t count;
    int32_t col;
    uint32_t version;
    bool operator>(const HeapKey& o) const { return count != o.count ? count > o.count : col > o.col; }
  };

  HeapKey key(long j) const { return {col_count_[j], int32_t(j), col_version_[j]}; }

  void touch(long j) {
    ++col_version_[j];
    if (col_count_[j] > 0 && col_alive_[j]) heap_.push(key(j));
  }

  // position of column j in row i, or -1
  long find(long i, long j) const {
    const Row& r = rows_[i];
    auto it = std::lower_bound(r.begin(), r.end(), j, [](const Cell& c, long col) { return c.col < col; });
    if (it == r.end() || it->col != j) return -1;
    return long(it - r.begin());
  }

  void compact_col(long j) {
    auto& lst = col_rows_[j];
    if (long(lst.size()) <= 2 * long(col_count_[j]) + 16) return;
    std::vector<int32_t> out;
    out.reserve(col_count_[j]);
    for (int32_t r : lst) {
      if (row_alive_[r] && find(r, j) >= 0) out.push_back(r);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    lst.swap(out);
  }

  void maybe_rebuild_heap() {
    if (heap_.size() < std::size_t(4 * ncols_ + 1024)) return;
    std::priority_queue<HeapKey, std::vector<HeapKey>, std::greater<HeapKey>> fresh;
    for (long j = 0; j < ncols_; ++j) {
      if (col_alive_[j] && col_count_[j] > 0) fresh.push(key(j));
    }
    heap_.swap(fresh);
  }

  struct Candidate {
    long cost = -1;
    long row = -1;
    long col = -1;
    bool better_than(const Candidate& o) const {
      if (o.row < 0) return true;
      if (cost != o.cost) return cost < o.cost;
      if (row != o.row) return row < o.row;
      return col < o.col;
    }
  };

  bool unit_step() {
    maybe_rebuild_heap();
    Candidate best;
    std::vector<HeapKey> keep;
    int examined = 0;
    while (!heap_.empty() && examined < 4) {
      HeapKey k = heap_.top();
      heap_.pop();
      long j = k.col;
      if (!col_alive_[j] || col_count_[j] == 0 || k.version != col_version_[j]) continue;
      compact_col(j);
      bool found = false;
      for (int32_t r : col_rows_[j]) {
        if (!row_alive_[r]) continue;
        long pos = find(r, j);
        if (pos < 0) continue;
        if (!ops_.is_unit(rows_[r][pos].val)) continue;
        found = true;
        Candidate c{long(rows_[r].size() - 1) * long(col_count_[j] - 1), r, j};
        if (c.better_than(best)) best = c;
      }
      if (found) {
        ++examined;
        keep.push_back(k);
        if (best.cost == 0) break;
      }
    }
    for (const auto& k : keep) heap_.push(k);
    if (best.row < 0) return false;
    eliminate_unit(best.row, best.col);
    return true;
  }

  // rows_[r] ← rows_[r] − f·rows_[i]; overflow leaves state untouched
  void axpy_row(long r, const T& f, long i) {
    const Row& a = rows_[r];
    const Row& b = rows_[i];
    scratch_.clear();
    fills_.clear();
    cancels_.clear();
    unit_cols_.clear();
    std::size_t x = 0, y = 0;
    while (x < a.size() || y < b.size()) {
      if (y == b.size() || (x < a.size() && a[x].col < b[y].col)) {
        scratch_.push_back(a[x]);
        ++x;
      } else if (x == a.size() || b[y].col < a[x].col) {
        Cell c;
        c.col = b[y].col;
        c.val = ops_.neg(ops_.mul(f, b[y].val));
        if (!ops_.is_zero(c.val)) {
          fills_.push_back(c.col);
          if (ops_.is_unit(c.val)) unit_cols_.push_back(c.col);
          scratch_.push_back(std::move(c));
        }
        ++y;
      } else {
        T v = ops_.sub(a[x].val, ops_.mul(f, b[y].val));
        if (ops_.is_zero(v)) {
          cancels_.push_back(a[x].col);
        } else {
          if (ops_.is_unit(v)) unit_cols_.push_back(a[x].col);
          Cell c;
          c.col = a[x].col;
          c.val = std::move(v);
          scratch_.push_back(std::move(c));
        }
        ++x;
        ++y;
      }
    }
    commit_row(r);
  }

  void commit_row(long r) {
    nnz_ += scratch_.size();
    nnz_ -= rows_[r].size();
    rows_[r].swap(scratch_);
    for (int32_t c : fills_) {
      ++col_count_[c];
      col_rows_[c].push_back(int32_t(r));
      touch(c);
    }
    for (int32_t c : cancels_) {
      --col_count_[c];
      touch(c);
    }
    for (int32_t c : unit_cols_) touch(c);
  }

  void remove_row(long i) {
    for (const auto& c : rows_[i]) {
      --col_count_[c.col];
      touch(c.col);
    }
    nnz_ -= rows_[i].size();
    row_alive_[i] = 0;
    Row().swap(rows_[i]);
  }

  void remove_col(long j) {
    col_alive_[j] = 0;
    std::vector<int32_t>().swap(col_rows_[j]);
  }

  void eliminate_unit(long i, long j) {
    long pos = find(i, j);
    T inv = ops_.unit_inverse(rows_[i][pos].val);
    std::vector<int32_t> targets = col_rows_[j];
    for (int32_t r : targets) {
      if (r == i || !row_alive_[r]) continue;
      long pr = find(r, j);
      if (pr < 0) continue;
      T f = ops_.mul(rows_[r][pr].val, inv);
      axpy_row(r, f, i);
    }
    pivots_.push_back(rows_[i][pos].val);
    remove_row(i);
    remove_col(j);
  }

  void active_shape(long& ar, long& ac) const {
    ar = 0;
    ac = 0;
    for (long i = 0; i < nrows_; ++i) ar += (row_alive_[i] && !rows_[i].empty());
    for (long j = 0; j < ncols_; ++j) ac += (col_alive_[j] && col_count_[j] > 0);
  }

  void dense_finish() {
    std::vector<long> rmap, cmap(ncols_, -1);
    long nc = 0;
    for (long j = 0; j < ncols_; ++j) {
      if (col_alive_[j] && col_count_[j] > 0) cmap[j] = nc++;
    }
    DenseIntMatrix D;
    for (long i = 0; i < nrows_; ++i) {
      if (!row_alive_[i] || rows_[i].empty()) continue;
      std::vector<BigInt> row(nc, 0);
      for (const auto& c : rows_[i]) row[cmap[c.col]] = ops_.to_big(c.val);
      D.push_back(std::move(row));
    }
    dense_rows_ = long(D.size());
    dense_cols_ = nc;
    SnfResult r = dense_smith_normal_form(D, false);
    extra_pivots_big = r.invariant_factors;
    for (long i = 0; i < nrows_; ++i) {
      if (row_alive_[i]) remove_row(i);
    }
  }

  // One non-unit pivot: minimal magnitude entry, gcd row and column operations.
  void general_step() {
    long bi = -1, bj = -1;
    long bcost = 0;
    T bval{};
    for (long i = 0; i < nrows_; ++i) {
      if (!row_alive_[i]) continue;
      for (const auto& c : rows_[i]) {
        long cost = long(rows_[i].size() - 1) * long(col_count_[c.col] - 1);
        bool better = bi < 0 || ops_.abs_less(c.val, bval) ||
                      (!ops_.abs_less(bval, c.val) && (cost < bcost || (cost == bcost && (i < bi || (i == bi && c.col < bj)))));
        if (better) {
          bi = i;
          bj = c.col;
          bcost = cost;
          bval = c.val;
        }
      }
    }
    long i = bi, j = bj;
    for (;;) {
      // clear column j with row operations
      bool changed = true;
      while (changed) {
        changed = false;
        compact_col(j);
        std::vector<int32_t> targets = col_rows_[j];
        for (int32_t r : targets) {
          if (r == i || !row_alive_[r]) continue;
          long pr = find(r, j);
          if (pr < 0) continue;
          T a = rows_[i][find(i, j)].val;
          T v = rows_[r][pr].val;
          if (ops_.divides(a, v)) {
            axpy_row(r, ops_.quot(v, a), i);
          } else {
            T g, s, t;
            ops_.gcdext(a, v, g, s, t);
            combine_rows(i, r, s, t, ops_.quot(v, g), ops_.quot(a, g));
            changed = true;
          }
        }
      }
      // clear row i with column operations
      T a = rows_[i][find(i, j)].val;
      bool refilled = false;
      std::vector<std::pair<int32_t, T>> others;
      for (const auto& c : rows_[i]) {
        if (c.col != j) others.emplace_back(c.col, c.val);
      }
      for (auto& [c, b] : others) {
        if (ops_.divides(a, b)) {
          drop_entry(i, c);
        } else {
          T g, s, t;
          ops_.gcdext(a, b, g, s, t);
          column_gcd(i, j, c, a, b, g, s, t);
          refilled = true;
          break;
        }
      }
      if (!refilled) {
        pivots_.push_back(a);
        remove_row(i);
        remove_col(j);
        return;
      }
    }
  }

  // rows i, r ← (s·row_i + t·row_r, p·row_i − q·row_r)
  void combine_rows(long i, long r, const T& s, const T& t, const T& p, const T& q) {
    Row ni = lincomb(rows_[i], s, rows_[r], t);
    Row nr = lincomb(rows_[i], p, rows_[r], ops_.neg(q));
    replace_row(i, std::move(ni));
    replace_row(r, std::move(nr));
  }

  Row lincomb(const Row& a, const T& fa, const Row& b, const T& fb) const {
    Row out;
    std::size_t x = 0, y = 0;
    while (x < a.size() || y < b.size()) {
      Cell c;
      if (y == b.size() || (x < a.size() && a[x].col < b[y].col)) {
        c.col = a[x].col;
        c.val = ops_.mul(fa, a[x].val);
        ++x;
      } else if (x == a.size() || b[y].col < a[x].col) {
        c.col = b[y].col;
        c.val = ops_.mul(fb, b[y].val);
        ++y;
      } else {
        c.col = a[x].col;
        c.val = ops_.add(ops_.mul(fa, a[x].val), ops_.mul(fb, b[y].val));
        ++x;
        ++y;
      }
      if (!ops_.is_zero(c.val)) out.push_back(std::move(c));
    }
    return out;
  }

  void replace_row(long r, Row&& nr) {
    scratch_.clear();
    fills_.clear();
    cancels_.clear();
    unit_cols_.clear();
    const Row& old = rows_[r];
    std::size_t x = 0, y = 0;
    while (x < old.size() || y < nr.size()) {
      if (y == nr.size() || (x < old.size() && old[x].col < nr[y].col)) {
        cancels_.push_back(old[x].col);
        ++x;
      } else if (x == old.size() || nr[y].col < old[x].col) {
        fills_.push_back(nr[y].col);
        if (ops_.is_unit(nr[y].val)) unit_cols_.push_back(nr[y].col);
        ++y;
      } else {
        if (ops_.is_unit(nr[y].val)) unit_cols_.push_back(nr[y].col);
        ++x;
        ++y;
      }
    }
    scratch_ = std::move(nr);
    commit_row(r);
  }

  void drop_entry(long i, long c) {
    long pos = find(i, c);
    rows_[i].erase(rows_[i].begin() + pos);
    --col_count_[c];
    --nnz_;
    touch(c);
  }

  // column ops on (j, c): col_j ← s·col_j + t·col_c, col_c ← −(b/g)·col_j + (a/g)·col_c.
  // Column j is zero outside row i on entry.
  void column_gcd(long i, long j, long c, const T& a, const T& b, const T& g, const T& s, const T& t) {
    (void)s;
    (void)b;
    T ag = ops_.quot(a, g);
    compact_col(c);
    std::vector<int32_t> targets = col_rows_[c];
    // compute all new values first
    std::vector<std::tuple<int32_t, T, T>> updates;
    for (int32_t r : targets) {
      if (r == i || !row_alive_[r]) continue;
      long pr = find(r, c);
      if (pr < 0) continue;
      const T& w = rows_[r][pr].val;
      updates.emplace_back(r, ops_.mul(t, w), ops_.mul(ag, w));
    }
    for (auto& [r, vj, vc] : updates) {
      Row nr = rows_[r];
      long pr = find(r, c);
      if (ops_.is_zero(vc)) {
        nr.erase(nr.begin() + pr);
      } else {
        nr[pr].val = vc;
      }
      if (!ops_.is_zero(vj)) {
        Cell cell;
        cell.col = int32_t(j);
        cell.val = vj;
        auto it = std::lower_bound(nr.begin(), nr.end(), j, [](const Cell& x, long col) { return x.col < col; });
        nr.insert(it, std::move(cell));
      }
      replace_row(r, std::move(nr));
    }
    // row i: (a, b) at (j, c) becomes (g, 0)
    Row ni = rows_[i];
    ni[find(i, j)].val = g;
    ni.erase(ni.begin() + find(i, c));
    replace_row(i, std::move(ni));
  }

  Ops ops_;
  long nrows_, ncols_;
  long dense_threshold_;
  std::vector<Row> rows_;
  std::vector<uint8_t> row_alive_;
  std::vector<std::vector<int32_t>> col_rows_;
  std::vector<int32_t> col_count_;
  std::vector<uint8_t> col_alive_;
  std::vector<uint32_t> col_version_;
  std::vector<long> dead_cols_;
  std::priority_queue<HeapKey, std::vector<HeapKey>, std::greater<HeapKey>> heap_;
  std::size_t nnz_ = 0;
  std::vector<T> pivots_;
  long dense_rows_ = 0, dense_cols_ = 0;
  Row scratch_;
  std::vector<int32_t> fills_, cancels_, unit_cols_;
};

template <class Ops>
void load_rows(Eliminator<Ops>& E, const Ops& ops, const SparseIntMatrix& A) {
  const auto& es = A.entries();
  std::size_t k = 0;
  while (k < es.size()) {
    long r = es[k].row;
    typename Eliminator<Ops>::Row row;
    while (k < es.size() && es[k].row == r) {
      typename Ops::Cell c;
      c.col = es[k].col;
      if (es[k].value == SparseIntMatrix::kBig) {
        c.val = ops.from_big(A.value(es[k]));
      } else {
        c.val = ops.from_i64(es[k].value);
      }
      if (!ops.is_zero(c.val)) row.push_back(std::move(c));
      ++k;
    }
    E.set_row(r, std::move(row));
  }
}

template <>
void load_rows<I64Ops>(Eliminator<I64Ops>& E, const I64Ops& ops, const SparseIntMatrix& A) {
  const auto& es = A.entries();
  std::size_t k = 0;
  while (k < es.size()) {
    long r = es[k].row;
    Eliminator<I64Ops>::Row row;
    while (k < es.size() && es[k].row == r) {
      CellI64 c;
      c.col = es[k].col;
      c.val = es[k].value == SparseIntMatrix::kBig ? ops.from_big(A.value(es[k])) : es[k].value;
      row.push_back(c);
      ++k;
    }
    E.set_row(r, std::move(row));
  }
}

std::vector<BigInt> normalize_divisibility(std::vector<BigInt> diag) {
  std::vector<BigInt> ones, rest;
  for (auto& d : diag) {
    BigInt a = abs(d);
    if (a == 0) continue;
    if (a == 1) {
      ones.push_back(a);
    } else {
      rest.push_back(a);
    }
  }
  // pairwise (gcd, lcm) until the chain divides
  std::sort(rest.begin(), rest.end());
  for (std::size_t i = 0; i < rest.size(); ++i) {
    for (std::size_t j = i + 1; j < rest.size(); ++j) {
      BigInt g = gcd(rest[i], rest[j]);
      if (g != rest[i]) {
        BigInt l = rest[i] / g * rest[j];
        rest[i] = g;
        rest[j] = l;
      }
    }
  }
  std::vector<BigInt> out;
  out.reserve(ones.size() + rest.size());
  for (auto& o : ones) out.push_back(o);
  for (auto& r : rest) {
    if (r == 1) {
      out.insert(out.begin(), r);
    } else {
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace

std::vector<BigInt> SnfResult::nontrivial() const {
  std::vector<BigInt> out;
  for (const auto& d : invariant_factors) {
    if (d != 1) out.push_back(d);
  }
  return out;
}

BigInt SnfResult::torsion_order() const {
  BigInt t = 1;
  for (const auto& d : invariant_factors) t *= d;
  return t;
}

// ---------------------------------------------------------------------------
// Dense SNF with optional transforms

namespace {

// symmetric residue mod N
void reduce_sym(BigInt& x, const BigInt& N, const BigInt& half) {
  mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), N.get_mpz_t());
  if (x > half) x -= N;
}

// With a nonzero modulus the entries are reduced freely, which computes the SNF of [A; N·I].
SnfResult dense_snf_impl(const DenseIntMatrix& Ain, bool want_transforms, const BigInt& modulus) {
  DenseIntMatrix A = Ain;
  long m = long(A.size());
  long n = m ? long(A[0].size()) : 0;
  const bool modular = modulus != 0;
  const BigInt half = modulus / 2;
  if (modular)
    for (auto& row : A)
      for (auto& x : row) reduce_sym(x, modulus, half);
  DenseIntMatrix L, R;
  if (want_transforms) {
    L = dense_identity(m);
    R = dense_identity(n);
  }
  auto swap_rows = [&](long a, long b) {
    if (a == b) return;
    std::swap(A[a], A[b]);
    if (want_transforms) std::swap(L[a], L[b]);
  };
  auto swap_cols = [&](long a, long b) {
    if (a == b) return;
    for (auto& row : A) std::swap(row[a], row[b]);
    if (want_transforms)
      for (auto& row : R) std::swap(row[a], row[b]);
  };
  // row_a += f·row_b
  auto add_row = [&](long a, long b, const BigInt& f) {
    for (long j = 0; j < n; ++j)
      if (A[b][j] != 0) {
        A[a][j] += f * A[b][j];
        if (modular) reduce_sym(A[a][j], modulus, half);
      }
    if (want_transforms)
      for (long j = 0; j < m; ++j)
        if (L[b][j] != 0) L[a][j] += f * L[b][j];
  };
  auto add_col = [&](long a, long b, const BigInt& f) {
    for (long i = 0; i < m; ++i)
      if (A[i][b] != 0) {
        A[i][a] += f * A[i][b];
        if (modular) reduce_sym(A[i][a], modulus, half);
      }
    if (want_transforms)
      for (long i = 0; i < n; ++i)
        if (R[i][b] != 0) R[i][a] += f * R[i][b];
  };
  long t = 0;
  for (; t < std::min(m, n); ++t) {
    // smallest nonzero magnitude in the trailing block
    auto pick = [&]() -> bool {
      long bi = -1, bj = -1;
      for (long i = t; i < m; ++i)
        for (long j = t; j < n; ++j)
          if (A[i][j] != 0 && (bi < 0 || cmpabs(A[i][j], A[bi][bj]) < 0)) {
            bi = i;
            bj = j;
          }
      if (bi < 0) return false;
      swap_rows(t, bi);
      swap_cols(t, bj);
      return true;
    };
    if (!pick()) break;
    for (;;) {
      bool dirty = false;
      for (long i = t + 1; i < m; ++i) {
        if (A[i][t] == 0) continue;
        BigInt q;
        mpz_fdiv_q(q.get_mpz_t(), A[i][t].get_mpz_t(), A[t][t].get_mpz_t());
        add_row(i, t, -q);
        if (A[i][t] != 0) dirty = true;
      }
      for (long j = t + 1; j < n; ++j) {
        if (A[t][j] == 0) continue;
        BigInt q;
        mpz_fdiv_q(q.get_mpz_t(), A[t][j].get_mpz_t(), A[t][t].get_mpz_t());
        add_col(j, t, -q);
        if (A[t][j] != 0) dirty = true;
      }
      if (dirty) {
        // move the smallest remaining entry of row/column t to the pivot
        long bi = t, bj = t;
        for (long i = t; i < m; ++i)
          if (A[i][t] != 0 && cmpabs(A[i][t], A[bi][bj]) < 0) {
            bi = i;
            bj = t;
          }
        for (long j = t; j < n; ++j)
          if (A[t][j] != 0 && cmpabs(A[t][j], A[bi][bj]) < 0) {
            bi = t;
            bj = j;
          }
        swap_rows(t, bi);
        swap_cols(t, bj);
        continue;
      }
      long bad = -1;
      for (long i = t + 1; i < m && bad < 0; ++i)
        for (long j = t + 1; j < n; ++j)
          if (A[i][j] != 0 && !mpz_divisible_p(A[i][j].get_mpz_t(), A[t][t].get_mpz_t())) {
            bad = i;
            break;
          }
      if (bad < 0) break;
      add_row(t, bad, 1);
    }
    if (A[t][t] < 0) {
      for (long j = 0; j < n; ++j) A[t][j] = -A[t][j];
      if (want_transforms)
        for (long j = 0; j < m; ++j) L[t][j] = -L[t][j];
    }
  }
  SnfResult res;
  for (long i = 0; i < t; ++i) res.invariant_factors.push_back(A[i][i]);
  res.rank = t;
  if (want_transforms) {
    res.left = std::move(L);
    res.right = std::move(R);
  }
  return res;
}

// Rank over F_p with the pivot rows and columns of a nonsingular minor.
long pivots_mod_p(const DenseIntMatrix& A, uint64_t p, std::vector<long>& prow, std::vector<long>& pcol) {
  long m = long(A.size());
  long n = m ? long(A[0].size()) : 0;
  ModOps ops{p};
  std::vector<std::vector<uint64_t>> M(m, std::vector<uint64_t>(n));
  for (long i = 0; i < m; ++i)
    for (long j = 0; j < n; ++j) M[i][j] = ops.from_big(A[i][j]);
  std::vector<long> rows(m);
  for (long i = 0; i < m; ++i) rows[i] = i;
  prow.clear();
  pcol.clear();
  long r = 0;
  for (long j = 0; j < n && r < m; ++j) {
    long piv = -1;
    for (long i = r; i < m; ++i)
      if (M[i][j]) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(M[r], M[piv]);
    std::swap(rows[r], rows[piv]);
    uint64_t inv = ops.unit_inverse(M[r][j]);
    for (long i = r + 1; i < m; ++i) {
      if (!M[i][j]) continue;
      uint64_t f = ops.mul(M[i][j], inv);
      for (long k = j; k < n; ++k)
        if (M[r][k]) M[i][k] = ops.sub(M[i][k], ops.mul(f, M[r][k]));
    }
    prow.push_back(rows[r]);
    pcol.push_back(j);
    ++r;
  }
  return r;
}

BigInt det_bareiss(DenseIntMatrix M) {
  long n = long(M.size());
  BigInt prev = 1;
  int sign = 1;
  for (long k = 0; k < n; ++k) {
    if (M[k][k] == 0) {
      long s = k + 1;
      while (s < n && M[s][k] == 0) ++s;
      if (s == n) return 0;
      std::swap(M[k], M[s]);
      sign = -sign;
    }
    for (long i = k + 1; i < n; ++i) {
      for (long j = k + 1; j < n; ++j) {
        BigInt v = M[i][j] * M[k][k] - M[i][k] * M[k][j];
        mpz_divexact(M[i][j].get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
      }
    }
    prev = M[k][k];
  }
  return sign * M[n - 1][n - 1];
}

}  // namespace

SnfResult dense_smith_normal_form(const DenseIntMatrix& A, bool want_transforms) {
  long m = long(A.size());
  long n = m ? long(A[0].size()) : 0;
  if (want_transforms || std::min(m, n) <= 8) return dense_snf_impl(A, want_transforms, 0);
  // product of invariant factors divides any nonzero minor of full rank; work mod 2·|minor|
  std::mt19937_64 rng(0x51f15eedULL ^ uint64_t(m * 1315423911L + n));
  auto random_prime = [&]() {
    BigInt p;
    do {
      p = BigInt(std::to_string((rng() >> 3) | (1ULL << 60)));
    } while (mpz_probab_prime_p(p.get_mpz_t(), 30) == 0);
    return std::stoull(p.get_str());
  };
  // several nonsingular maximal minors from shuffled row orders; their gcd keeps N small
  long r = -1;
  BigInt det_gcd = 0;
  for (int k = 0; k < 3; ++k) {
    std::vector<long> order(m);
    for (long i = 0; i < m; ++i) order[i] = i;
    if (k > 0) std::shuffle(order.begin(), order.end(), rng);
    DenseIntMatrix B(m);
    for (long i = 0; i < m; ++i) B[i] = A[order[i]];
    std::vector<long> pr, pc;
    long rk = pivots_mod_p(B, random_prime(), pr, pc);
    if (rk > r) {
      r = rk;
      det_gcd = 0;
    }
    if (rk < r || rk == 0) continue;
    DenseIntMatrix minor(rk, std::vector<BigInt>(rk));
    for (long i = 0; i < rk; ++i)
      for (long j = 0; j < rk; ++j) minor[i][j] = B[pr[i]][pc[j]];
    det_gcd = gcd(det_gcd, det_bareiss(std::move(minor)));
  }
  SnfResult res;
  if (r == 0) return res;
  BigInt N = 2 * abs(det_gcd);
  SnfResult mod = dense_snf_impl(A, false, N);
  std::vector<BigInt> diag;
  for (auto& d : mod.invariant_factors) {
    BigInt g = gcd(d, N);
    if (g != N) diag.push_back(g);
  }
  if (long(diag.size()) != r) throw std::logic_error("dense SNF: modular rank mismatch");
  res.invariant_factors = normalize_divisibility(std::move(diag));
  res.rank = r;
  return res;
}

DenseIntMatrix dense_identity(long n) {
  DenseIntMatrix I(n, std::vector<BigInt>(n, 0));
  for (long i = 0; i < n; ++i) I[i][i] = 1;
  return I;
}

DenseIntMatrix dense_mul(const DenseIntMatrix& A, const DenseIntMatrix& B) {
  long m = long(A.size()), k = long(B.size());
  long n = k ? long(B[0].size()) : 0;
  DenseIntMatrix C(m, std::vector<BigInt>(n, 0));
  for (long i = 0; i < m; ++i)
    for (long l = 0; l < k; ++l) {
      if (A[i][l] == 0) continue;
      for (long j = 0; j < n; ++j) C[i][j] += A[i][l] * B[l][j];
    }
  return C;
}

DenseIntMatrix integer_kernel(const DenseIntMatrix& A) {
  long m = long(A.size());
  if (m == 0) return {};
  long n = long(A[0].size());
  SnfResult r = dense_smith_normal_form(A, true);
  // A·R = L⁻¹·D, so columns of R beyond the rank span the kernel, saturated
  DenseIntMatrix K(n, std::vector<BigInt>(n - r.rank, 0));
  for (long i = 0; i < n; ++i)
    for (long j = r.rank; j < n; ++j) K[i][j - r.rank] = (*r.right)[i][j];
  return K;
}

// ---------------------------------------------------------------------------
// Entry points

namespace {

SnfResult finish_result(std::vector<BigInt> diag, bool promoted, long dr, long dc) {
  SnfResult res;
  res.invariant_factors = normalize_divisibility(std::move(diag));
  res.rank = long(res.invariant_factors.size());
  res.promoted_to_bigint = promoted;
  res.dense_core_rows = dr;
  res.dense_core_cols = dc;
  return res;
}

SnfResult sparse_snf(const SparseIntMatrix& A, const SnfOptions& opt, SparseIntMatrix* consumed) {
  long target = -1;
  if (opt.rank_prepass) {
    std::mt19937_64 rng(opt.seed);
    BigInt p;
    do {
      p = BigInt(std::to_string((rng() >> 3) | (1ULL << 60)));
    } while (mpz_probab_prime_p(p.get_mpz_t(), 30) == 0);
    target = rank_mod_p(A, std::stoull(p.get_str()));
  }
  I64Ops iops;
  Eliminator<I64Ops> E(iops, A.rows(), A.cols(), opt.dense_threshold);
  bool ok = true;
  try {
    load_rows(E, iops, A);
  } catch (const Overflow&) {
    ok = false;
  }
  BigOps bops;
  if (!ok) {
    Eliminator<BigOps> B(bops, A.rows(), A.cols(), opt.dense_threshold);
    load_rows(B, bops, A);
    if (consumed) consumed->release();
    B.build_columns();
    B.run(target);
    std::vector<BigInt> diag = B.pivots();
    for (auto& v : B.extra_pivots_big) diag.push_back(v);
    return finish_result(std::move(diag), true, B.dense_rows(), B.dense_cols());
  }
  if (consumed) consumed->release();
  E.build_columns();
  try {
    E.run(target);
    std::vector<BigInt> diag;
    for (auto v : E.pivots()) diag.emplace_back(long(v));
    for (auto& v : E.extra_pivots_big) diag.push_back(v);
    return finish_result(std::move(diag), false, E.dense_rows(), E.dense_cols());
  } catch (const Overflow&) {
  }
  Eliminator<BigOps> B(bops, A.rows(), A.cols(), opt.dense_threshold);
  E.export_to(B);
  B.build_columns();
  B.apply_dead_cols();
  B.run(target);
  std::vector<BigInt> diag = B.pivots();
  for (auto& v : B.extra_pivots_big) diag.push_back(v);
  return finish_result(std::move(diag), true, B.dense_rows(), B.dense_cols());
}

}  // namespace

SnfResult smith_normal_form(const SparseIntMatrix& Ain, const SnfOptions& opt) {
  const SparseIntMatrix* Ap = &Ain;
  SparseIntMatrix tmp;
  if (!Ain.finalized()) {
    tmp = Ain;
    tmp.finalize();
    Ap = &tmp;
  }
  const SparseIntMatrix& A = *Ap;
  if (opt.want_transforms) {
    SnfResult r = dense_smith_normal_form(A.to_dense(), true);
    return r;
  }
  SnfResult r = sparse_snf(A, opt, nullptr);
  if (opt.modular_check) modular_double_check(A, r, opt.seed);
  return r;
}

SnfResult smith_normal_form_consume(SparseIntMatrix&& A, const SnfOptions& opt) {
  A.finalize();
  if (opt.want_transforms || opt.modular_check) {
    SparseIntMatrix keep = std::move(A);
    return smith_normal_form(keep, opt);
  }
  return sparse_snf(A, opt, &A);
}

long rank_mod_p(const SparseIntMatrix& Ain, uint64_t p) {
  SparseIntMatrix tmp;
  const SparseIntMatrix* Ap = &Ain;
  if (!Ain.finalized()) {
    tmp = Ain;
    tmp.finalize();
    Ap = &tmp;
  }
  ModOps ops{p};
  Eliminator<ModOps> E(ops, Ap->rows(), Ap->cols(), 0);
  load_rows(E, ops, *Ap);
  E.build_columns();
  E.run(-1);
  return long(E.pivots().size());
}

void modular_double_check(const SparseIntMatrix& A, const SnfResult& r, uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (int k = 0; k < 3; ++k) {
    BigInt p;
    do {
      p = BigInt(std::to_string((rng() >> 3) | (1ULL << 60)));
    } while (mpz_probab_prime_p(p.get_mpz_t(), 30) == 0);
    uint64_t pp = std::stoull(p.get_str());
    long rk = rank_mod_p(A, pp);
    // a random 61-bit prime divides the product of the factors with negligible probability
    bool divides_some = false;
    for (const auto& d : r.invariant_factors) divides_some |= mpz_divisible_ui_p(d.get_mpz_t(), pp) != 0;
    long expected = r.rank;
    if (divides_some) {
      for (const auto& d : r.invariant_factors) expected -= mpz_divisible_ui_p(d.get_mpz_t(), pp) != 0;
    }
    if (rk != expected) {
      std::ostringstream os;
      os << "modular double-check failed: rank mod " << pp << " = " << rk << ", expected " << expected;
      throw std::runtime_error(os.str());
    }
  }
  // small primes dividing the torsion
  std::vector<unsigned long> small;
  for (const auto& d : r.invariant_factors) {
    if (d == 1) continue;
    Factorization f = factor_integer(d, 100000);
    for (const auto& [q, e] : f.primes) {
      if (q.fits_ulong_p()) small.push_back(q.get_ui());
    }
  }
  std::sort(small.begin(), small.end());
  small.erase(std::unique(small.begin(), small.end()), small.end());
  for (unsigned long q : small) {
    long expected = r.rank;
    for (const auto& d : r.invariant_factors) expected -= mpz_divisible_ui_p(d.get_mpz_t(), q) != 0;
    long rk = rank_mod_p(A, q);
    if (rk != expected) {
      std::ostringstream os;
      os << "modular double-check failed: rank mod " << q << " = " << rk << ", expected " << expected;
      throw std::runtime_error(os.str());
    }
  }
}

Factorization factor_integer(const BigInt& n0, unsigned long trial_bound) {
  Factorization f;
  BigInt n = abs(n0);
  if (n <= 1) {
    f.cofactor = n;
    return f;
  }
  for (unsigned long p = 2; p <= trial_bound; p += (p == 2 ? 1 : 2)) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      int e = 0;
      while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
        mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
        ++e;
      }
      f.primes.emplace_back(BigInt(p), e);
    }
    if (BigInt(p) * p > n) break;
  }
  if (n > 1) {
    if (mpz_probab_prime_p(n.get_mpz_t(), 30) != 0) {
      f.primes.emplace_back(n, 1);
      n = 1;
    }
  }
  f.cofactor = n;
  f.cofactor_probable_prime = false;
  return f;
}

std::string Factorization::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [p, e] : primes) {
    if (!first) os << "*";
    first = false;
    os << p.get_str();
    if (e > 1) os << "^" << e;
  }
  if (cofactor != 1) {
    if (!first) os << "*";
    os << "C(" << cofactor.get_str() << ")";
    first = false;
  }
  if (first) os << "1";
  return os.str();
}

}  // namespace bianchi
