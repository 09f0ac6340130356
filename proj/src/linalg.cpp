#include "andersonlab/linalg.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace andersonlab {

Matrix Matrix::adjoint() const {
  Matrix r(cols_, rows_);
  for (int j = 0; j < cols_; ++j)
    for (int i = 0; i < rows_; ++i) r(j, i) = std::conj((*this)(i, j));
  return r;
}

double Matrix::frobenius() const {
  double s = 0.0;
  for (const auto& v : a_) s += std::norm(v);
  return std::sqrt(s);
}

double hermitian_defect(const Matrix& A) {
  if (A.rows() != A.cols()) throw ConfigError("hermitian_defect needs a square matrix");
  double d = 0.0, n = 0.0;
  for (int j = 0; j < A.cols(); ++j)
    for (int i = 0; i < A.rows(); ++i) {
      d += std::norm(A(i, j) - std::conj(A(j, i)));
      n += std::norm(A(i, j));
    }
  return n > 0 ? std::sqrt(d / n) : 0.0;
}

Matrix hermitian_part(const Matrix& A) {
  Matrix r(A.rows(), A.cols());
  for (int j = 0; j < A.cols(); ++j)
    for (int i = 0; i < A.rows(); ++i) r(i, j) = 0.5 * (A(i, j) + std::conj(A(j, i)));
  return r;
}

std::vector<cplx> matvec(const Matrix& A, const std::vector<cplx>& x, bool adjoint) {
  const int m = A.rows(), n = A.cols();
  if (static_cast<int>(x.size()) != (adjoint ? m : n)) throw ConfigError("matvec size mismatch");
  std::vector<cplx> y(adjoint ? n : m);
  const cplx one = 1.0, zero = 0.0;
  cblas_zgemv(CblasColMajor, adjoint ? CblasConjTrans : CblasNoTrans, m, n, &one, A.data(), m,
              x.data(), 1, &zero, y.data(), 1);
  return y;
}

Matrix matmul(const Matrix& A, const Matrix& B, bool adjoint_a, bool adjoint_b) {
  const int m = adjoint_a ? A.cols() : A.rows();
  const int k = adjoint_a ? A.rows() : A.cols();
  const int kb = adjoint_b ? B.cols() : B.rows();
  const int n = adjoint_b ? B.rows() : B.cols();
  if (k != kb) throw ConfigError("matmul size mismatch");
  Matrix C(m, n);
  const cplx one = 1.0, zero = 0.0;
  cblas_zgemm(CblasColMajor, adjoint_a ? CblasConjTrans : CblasNoTrans,
              adjoint_b ? CblasConjTrans : CblasNoTrans, m, n, k, &one, A.data(), A.rows(), B.data(),
              B.rows(), &zero, C.data(), m);
  return C;
}

namespace {

// All eigenpairs of a Hermitian matrix through MRRR; zheevd returns wrong
// pairs on some strongly graded matrices with the system LAPACK.
EigenSystem eigh_mrrr(Matrix& A) {
  const int n = A.rows();
  EigenSystem es;
  es.values.resize(n);
  if (n == 0) return es;
  Matrix Z(n, n);
  std::vector<lapack_int> support(2 * std::size_t(n));
  lapack_int found = 0;
  int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'A', 'L', n, reinterpret_cast<lapack_complex_double*>(A.data()),
                            n, 0.0, 0.0, 0, 0, 0.0, &found, es.values.data(),
                            reinterpret_cast<lapack_complex_double*>(Z.data()), n, support.data());
  if (info != 0 || found != n) throw ConvergenceError("zheevr failed with info " + std::to_string(info));
  es.vectors = std::move(Z);
  return es;
}

}  // namespace

EigenSystem eigh(Matrix A) {
  if (A.rows() != A.cols()) throw ConfigError("eigh needs a square matrix");
  return eigh_mrrr(A);
}

EigenSystem eigh_generalized(Matrix A, Matrix B) {
  const int n = A.rows();
  if (n != A.cols() || B.rows() != n || B.cols() != n) throw ConfigError("eigh_generalized size mismatch");
  if (n == 0) return EigenSystem{};
  auto* a = reinterpret_cast<lapack_complex_double*>(A.data());
  auto* b = reinterpret_cast<lapack_complex_double*>(B.data());
  int info = LAPACKE_zpotrf(LAPACK_COL_MAJOR, 'L', n, b, n);
  if (info != 0) throw ConvergenceError("Gram matrix is not positive definite (zpotrf info " + std::to_string(info) + ")");
  // A <- L^{-1} A L^{-H}
  info = LAPACKE_zhegst(LAPACK_COL_MAJOR, 1, 'L', n, a, n, b, n);
  if (info != 0) throw ConvergenceError("zhegst failed with info " + std::to_string(info));
  EigenSystem es = eigh_mrrr(A);
  // x = L^{-H} y, so that X^H B X = I
  const cplx one = 1.0;
  cblas_ztrsm(CblasColMajor, CblasLeft, CblasLower, CblasConjTrans, CblasNonUnit, n, n, &one, B.data(), n,
              es.vectors.data(), n);
  return es;
}

namespace {

cplx dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double norm(const std::vector<cplx>& a) { return std::sqrt(std::real(dot(a, a))); }

// Eigenpairs of a real symmetric tridiagonal matrix.
void tridiag_eig(std::vector<double> d, std::vector<double> e, std::vector<double>& w,
                 std::vector<double>& z) {
  const int m = static_cast<int>(d.size());
  z.assign(std::size_t(m) * m, 0.0);
  e.resize(std::max(m - 1, 1));
  int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', m, d.data(), e.data(), z.data(), m);
  if (info != 0) throw ConvergenceError("dstev failed with info " + std::to_string(info));
  w = std::move(d);
}

double tridiag_max(std::vector<double> d, std::vector<double> e) {
  e.resize(std::max<std::size_t>(d.size(), 2) - 1);
  int info = LAPACKE_dsterf(static_cast<int>(d.size()), d.data(), e.data());
  if (info != 0) throw ConvergenceError("dsterf failed with info " + std::to_string(info));
  return *std::max_element(d.begin(), d.end());
}

// Incremental Lanczos with full reorthogonalization (two classical
// Gram-Schmidt passes through BLAS). Basis vectors are columns of V.
class LanczosBuilder {
 public:
  LanczosBuilder(const LinearMap& apply, const std::vector<cplx>& v0, int max_dim)
      : apply_(apply), n_(v0.size()), V_(static_cast<int>(v0.size()), max_dim), w_(v0.size()), c_(max_dim) {
    double nv = norm(v0);
    for (std::size_t i = 0; i < n_; ++i) V_(static_cast<int>(i), 0) = v0[i] / nv;
  }

  // Extends the basis by one vector; returns false on breakdown or when full.
  bool step(double breakdown) {
    const int j = static_cast<int>(alpha.size());
    const int n = static_cast<int>(n_);
    cplx* vj = V_.data() + std::size_t(j) * n_;
    apply_(vj, w_.data());
    const cplx one = 1.0, zero = 0.0, mone = -1.0;
    double a = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
      cblas_zgemv(CblasColMajor, CblasConjTrans, n, j + 1, &one, V_.data(), n, w_.data(), 1, &zero, c_.data(), 1);
      if (pass == 0) a = std::real(c_[j]);
      cblas_zgemv(CblasColMajor, CblasNoTrans, n, j + 1, &mone, V_.data(), n, c_.data(), 1, &one, w_.data(), 1);
    }
    alpha.push_back(a);
    double b = norm(w_);
    if (j + 1 >= V_.cols() || b <= breakdown) return false;
    beta.push_back(b);
    cplx* vn = V_.data() + std::size_t(j + 1) * n_;
    for (std::size_t i = 0; i < n_; ++i) vn[i] = w_[i] / b;
    return true;
  }

  int size() const { return static_cast<int>(alpha.size()); }
  const cplx* column(int k) const { return V_.data() + std::size_t(k) * n_; }

  std::vector<double> alpha, beta;

 private:
  const LinearMap& apply_;
  std::size_t n_;
  Matrix V_;
  std::vector<cplx> w_, c_;
};

}  // namespace

double lanczos_max(const LinearMap& apply, std::size_t n, int max_iter, double tol, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::vector<cplx> v(n);
  for (auto& x : v) x = cplx(nd(gen), nd(gen));
  const int m = static_cast<int>(std::min<std::size_t>(std::max(max_iter, 1), n));
  LanczosBuilder lb(apply, v, m);
  double prev = -std::numeric_limits<double>::infinity();
  for (;;) {
    bool more = lb.step(1e-12);
    int k = lb.size();
    if (!more || k % 10 == 0) {
      double top = tridiag_max(lb.alpha, std::vector<double>(lb.beta.begin(), lb.beta.begin() + (k - 1)));
      if (!more || std::abs(top - prev) <= tol * std::max(1.0, std::abs(top))) return top;
      prev = top;
    }
  }
}

std::vector<cplx> krylov_expm(const LinearMap& apply, const std::vector<cplx>& v, double t,
                              int krylov_dim, int substeps) {
  if (substeps < 1 || krylov_dim < 1) throw ConfigError("krylov_expm needs positive sizes");
  std::vector<cplx> u = v;
  const std::size_t n = v.size();
  const double dt = t / substeps;
  const int m = static_cast<int>(std::min<std::size_t>(krylov_dim, n));
  std::vector<double> w, z;
  for (int s = 0; s < substeps; ++s) {
    double nu = norm(u);
    if (nu == 0.0) return u;
    LanczosBuilder lb(apply, u, m);
    while (lb.step(1e-13)) {
    }
    const int got = lb.size();
    tridiag_eig(lb.alpha, std::vector<double>(lb.beta.begin(), lb.beta.begin() + (got - 1)), w, z);
    // y = Z exp(-i dt W) Z^T e1
    std::vector<cplx> y(got);
    for (int k = 0; k < got; ++k) {
      cplx c = std::exp(cplx(0.0, -dt * w[k])) * z[std::size_t(k) * got];
      for (int i = 0; i < got; ++i) y[i] += c * z[std::size_t(k) * got + i];
    }
    std::fill(u.begin(), u.end(), cplx(0.0));
    for (int k = 0; k < got; ++k) {
      const cplx* q = lb.column(k);
      for (std::size_t i = 0; i < n; ++i) u[i] += nu * y[k] * q[i];
    }
  }
  return u;
}

}  // namespace andersonlab
