#include "bianchi/modules.hpp"

#include <numeric>
#include <stdexcept>

namespace bianchi {

namespace {

int64_t to_i64(const BigInt& x) {
  if (!x.fits_slong_p()) throw std::overflow_error("module action entry exceeds 64 bits");
  return x.get_si();
}

BigInt binomial(int n, int k) {
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), unsigned(n), unsigned(k));
  return r;
}

// Matrix of γ on Sym^n with basis x^a y^{n−a}, a = 0..n; column a is the image of x^a y^{n−a}.
std::vector<std::vector<FieldElement>> sym_power(const QuadraticField& F, const Mat2& g, int n) {
  std::vector<std::vector<FieldElement>> S(n + 1, std::vector<FieldElement>(n + 1, FieldElement(0)));
  // x ↦ a·x + c·y, y ↦ b·x + d·y; polynomials indexed by the x-degree
  auto poly_mul = [&](const std::vector<FieldElement>& p, const std::vector<FieldElement>& q) {
    std::vector<FieldElement> r(p.size() + q.size() - 1, FieldElement(0));
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < q.size(); ++j) r[i + j] = F.add(r[i + j], F.mul(p[i], q[j]));
    return r;
  };
  std::vector<FieldElement> px{g.c, g.a}, py{g.d, g.b};
  for (int a = 0; a <= n; ++a) {
    std::vector<FieldElement> p{FieldElement(1)};
    for (int i = 0; i < a; ++i) p = poly_mul(p, px);
    for (int i = a; i < n; ++i) p = poly_mul(p, py);
    for (int r = 0; r <= n; ++r) S[r][a] = p[r];
  }
  return S;
}

Mat2 conj_mat(const QuadraticField& F, const Mat2& g) { return {F.conj(g.a), F.conj(g.b), F.conj(g.c), F.conj(g.d)}; }

}  // namespace

IntMat multiplication_matrix(const QuadraticField& F, const FieldElement& x) {
  IntMat m(2, 2);
  m(0, 0) = to_i64(x.a);
  m(1, 0) = to_i64(x.b);
  m(0, 1) = to_i64(x.b * F.q());
  m(1, 1) = to_i64(x.a + F.p() * x.b);
  return m;
}

IntegralModule::IntegralModule(const QuadraticField& F, WeightPair w, int degree_bound) : F_(F), w_(w) {
  if (w.n1 < 0 || w.n2 < 0) throw std::invalid_argument("weights must be nonnegative");
  if (w.n1 + w.n2 > degree_bound)
    throw std::invalid_argument("weight " + w.to_string() + " exceeds the degree bound " + std::to_string(degree_bound));
  rank_ = 2 * monomial_count();
}

IntegralModule IntegralModule::trivial_z(const QuadraticField& F) {
  IntegralModule M(F);
  M.trivial_z_ = true;
  M.rank_ = 1;
  return M;
}

std::string IntegralModule::label(int i) const {
  if (trivial_z_) return "1";
  int k = i % 2, mono = i / 2;
  int a = mono / (w_.n2 + 1), b = mono % (w_.n2 + 1);
  std::string s = "e1^" + std::to_string(a) + " e2^" + std::to_string(w_.n1 - a);
  if (w_.n2 > 0) s += " (x) f1^" + std::to_string(b) + " f2^" + std::to_string(w_.n2 - b);
  return s + (k ? " w" : "");
}

std::string IntegralModule::lattice_tag() const {
  if (trivial_z_) return "trivial-Z";
  return "monomial-OF" + w_.to_string();
}

std::vector<std::vector<FieldElement>> IntegralModule::field_action(const Mat2& g) const {
  if (trivial_z_) return {{FieldElement(1)}};
  auto S1 = sym_power(F_, g, w_.n1);
  auto S2 = sym_power(F_, conj_mat(F_, g), w_.n2);
  int n = monomial_count();
  std::vector<std::vector<FieldElement>> M(n, std::vector<FieldElement>(n));
  for (int a1 = 0; a1 <= w_.n1; ++a1)
    for (int b1 = 0; b1 <= w_.n2; ++b1)
      for (int a = 0; a <= w_.n1; ++a)
        for (int b = 0; b <= w_.n2; ++b)
          M[a1 * (w_.n2 + 1) + b1][a * (w_.n2 + 1) + b] = F_.mul(S1[a1][a], S2[b1][b]);
  return M;
}

IntMat IntegralModule::action(const Mat2& g) const {
  if (trivial_z_) return IntMat::Identity(1, 1);
  auto M = field_action(g);
  int n = monomial_count();
  IntMat A(rank_, rank_);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A.block<2, 2>(2 * i, 2 * j) = multiplication_matrix(F_, M[i][j]);
  return A;
}

IntMat to_intmat(const DenseIntMatrix& A) {
  long m = long(A.size()), n = m ? long(A[0].size()) : 0;
  IntMat R(m, n);
  for (long i = 0; i < m; ++i)
    for (long j = 0; j < n; ++j) R(i, j) = to_i64(A[i][j]);
  return R;
}

DenseIntMatrix to_dense(const IntMat& A) {
  DenseIntMatrix R(A.rows(), std::vector<BigInt>(A.cols()));
  for (long i = 0; i < A.rows(); ++i)
    for (long j = 0; j < A.cols(); ++j) R[i][j] = BigInt(long(A(i, j)));
  return R;
}

BigInt binomial_constant(WeightPair w) {
  BigInt N = 1;
  for (int k = 0; k <= w.n1; ++k) N *= binomial(w.n1, k);
  for (int k = 0; k <= w.n2; ++k) N *= binomial(w.n2, k);
  return N;
}

DenseIntMatrix column_hnf(const DenseIntMatrix& A) {
  long m = long(A.size()), n = m ? long(A[0].size()) : 0;
  // work on the transpose: rows are generators
  std::vector<std::vector<BigInt>> R(n, std::vector<BigInt>(m));
  for (long i = 0; i < m; ++i)
    for (long j = 0; j < n; ++j) R[j][i] = A[i][j];
  long row = 0;
  for (long col = 0; col < m && row < n; ++col) {
    for (;;) {
      long piv = -1;
      for (long r = row; r < n; ++r)
        if (R[r][col] != 0 && (piv < 0 || abs(R[r][col]) < abs(R[piv][col]))) piv = r;
      if (piv < 0) break;
      std::swap(R[row], R[piv]);
      bool done = true;
      for (long r = row + 1; r < n; ++r) {
        if (R[r][col] == 0) continue;
        BigInt q;
        mpz_fdiv_q(q.get_mpz_t(), R[r][col].get_mpz_t(), R[row][col].get_mpz_t());
        for (long c = col; c < m; ++c) R[r][c] -= q * R[row][c];
        if (R[r][col] != 0) done = false;
      }
      if (done) break;
    }
    if (R[row][col] == 0) continue;
    if (R[row][col] < 0)
      for (long c = col; c < m; ++c) R[row][c] = -R[row][c];
    for (long r = 0; r < row; ++r) {
      BigInt q;
      mpz_fdiv_q(q.get_mpz_t(), R[r][col].get_mpz_t(), R[row][col].get_mpz_t());
      if (q != 0)
        for (long c = col; c < m; ++c) R[r][c] -= q * R[row][c];
    }
    ++row;
  }
  DenseIntMatrix out(m, std::vector<BigInt>(row));
  for (long i = 0; i < m; ++i)
    for (long j = 0; j < row; ++j) out[i][j] = R[j][i];
  return out;
}

void dual_lattice(const IntMat& gram_num, int64_t gram_den, const DenseIntMatrix& B, const BigInt& den,
                  DenseIntMatrix& out_basis, BigInt& out_den) {
  long n = gram_num.rows();
  // x ∈ dual ⟺ Kx ∈ gram_den·den·Zⁿ with K = (gram_num·B)ᵀ
  DenseIntMatrix GB = dense_mul(to_dense(gram_num), B);
  DenseIntMatrix K(n, std::vector<BigInt>(n));
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) K[i][j] = GB[j][i];
  auto s = dense_smith_normal_form(K, true);
  if (s.rank != n) throw std::invalid_argument("dual_lattice: degenerate pairing");
  BigInt scale = BigInt(long(gram_den)) * den;
  BigInt L = 1;
  for (const auto& d : s.invariant_factors) L = lcm(L, d);
  DenseIntMatrix C(n, std::vector<BigInt>(n));
  for (long j = 0; j < n; ++j) {
    BigInt f = scale * (L / s.invariant_factors[j]);
    for (long i = 0; i < n; ++i) C[i][j] = (*s.right)[i][j] * f;
  }
  BigInt g = L;
  for (auto& row : C)
    for (auto& x : row) g = gcd(g, x);
  for (auto& row : C)
    for (auto& x : row) x /= g;
  out_den = L / g;
  out_basis = column_hnf(C);
}

PairingData pairing(const IntegralModule& M) {
  const QuadraticField& F = M.field();
  PairingData P;
  if (M.is_trivial_z()) {
    P.gram_num = IntMat::Identity(1, 1);
    P.o_gram_num = {{FieldElement(1)}};
    P.dual_basis = {{BigInt(1)}};
    return P;
  }
  WeightPair w = M.weight();
  auto fact = [](int n) {
    int64_t r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
  };
  P.m = fact(w.n1) * fact(w.n2);
  BigInt L1 = 1, L2 = 1;
  for (int k = 0; k <= w.n1; ++k) L1 = lcm(L1, binomial(w.n1, k));
  for (int k = 0; k <= w.n2; ++k) L2 = lcm(L2, binomial(w.n2, k));
  P.o_den = to_i64(L1 * L2);
  int nm = M.monomial_count();
  P.o_gram_num.assign(nm, std::vector<FieldElement>(nm, FieldElement(0)));
  // ⟨x^a y^{n−a}, x^{n−a} y^a⟩ = (−1)^{n−a} / C(n, a), tensored over both factors
  for (int a = 0; a <= w.n1; ++a)
    for (int b = 0; b <= w.n2; ++b) {
      int i = a * (w.n2 + 1) + b, j = (w.n1 - a) * (w.n2 + 1) + (w.n2 - b);
      BigInt v = (L1 / binomial(w.n1, a)) * (L2 / binomial(w.n2, b));
      if ((w.n1 - a + w.n2 - b) % 2) v = -v;
      P.o_gram_num[i][j] = FieldElement(v, 0);
    }
  // Z-form Tr(B(x, y)/√D); Tr(z/√D) = Tr(z·√D)/D
  long D = F.disc();
  FieldElement sqrtD = F.half_integral_omega() ? FieldElement(-1, 2) : FieldElement(0, 2);
  int64_t tr[3];
  FieldElement pw(1);
  for (int e = 0; e < 3; ++e) {
    BigInt t = F.trace(F.mul(pw, sqrtD));
    if (t % D != 0) throw std::logic_error("pairing: trace form is not integral");
    tr[e] = to_i64(t / D);
    pw = F.mul(pw, F.omega());
  }
  P.gram_den = P.o_den;
  P.gram_num = IntMat::Zero(M.rank(), M.rank());
  for (int i = 0; i < nm; ++i)
    for (int j = 0; j < nm; ++j) {
      int64_t v = to_i64(P.o_gram_num[i][j].a);
      if (!v) continue;
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) P.gram_num(2 * i + k, 2 * j + l) = v * tr[k + l];
    }
  dual_lattice(P.gram_num, P.gram_den, dense_identity(M.rank()), BigInt(1), P.dual_basis, P.dual_den);
  return P;
}

DenseIntMatrix unipotent_invariants(const IntegralModule& M, const Mat2& u) {
  const QuadraticField& F = M.field();
  if (mat_det(F, u) != FieldElement(1) || mat_trace(F, u) != FieldElement(2))
    throw std::invalid_argument("unipotent_invariants: matrix is not unipotent");
  IntMat A = M.action(u) - IntMat::Identity(M.rank(), M.rank());
  if (A.isZero()) return dense_identity(M.rank());
  return column_hnf(integer_kernel(to_dense(A)));
}

}  // namespace bianchi
