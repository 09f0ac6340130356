#include <cmath>
#include <random>

#include "andersonlab/linalg.hpp"
#include "doctest.h"

using namespace andersonlab;

namespace {

Matrix random_hermitian(int n, std::uint64_t seed, double grade = 0.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  Matrix A(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) {
      cplx z = i == j ? cplx(nd(gen), 0.0) : cplx(nd(gen), nd(gen));
      A(i, j) = z;
      A(j, i) = std::conj(z);
    }
  // graded diagonal spreads the spectrum over many orders of magnitude
  for (int i = 0; i < n; ++i) A(i, i) += std::pow(10.0, grade * i / n);
  return A;
}

double residual(const Matrix& A, const EigenSystem& es, const Matrix* B = nullptr) {
  int n = A.rows();
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    std::vector<cplx> v(n);
    for (int i = 0; i < n; ++i) v[i] = es.vectors(i, j);
    auto Av = matvec(A, v);
    auto Bv = B ? matvec(*B, v) : v;
    double r = 0.0;
    for (int i = 0; i < n; ++i) r += std::norm(Av[i] - es.values[j] * Bv[i]);
    worst = std::max(worst, std::sqrt(r));
  }
  return worst / A.frobenius();
}

}  // namespace

TEST_SUITE("linalg") {
  TEST_CASE("eigh residual on a graded matrix") {
    Matrix A = random_hermitian(80, 3, 8.0);
    auto es = eigh(A);
    CHECK(residual(A, es) < 1e-13);
    CHECK(std::is_sorted(es.values.begin(), es.values.end()));
    Matrix V = es.vectors;
    Matrix I = matmul(V, V, true, false);
    for (int i = 0; i < 80; ++i)
      for (int j = 0; j < 80; ++j) CHECK(std::abs(I(i, j) - (i == j ? 1.0 : 0.0)) < 1e-12);
  }

  TEST_CASE("generalized eigenproblem with B-orthonormal vectors") {
    Matrix A = random_hermitian(40, 5);
    Matrix B = random_hermitian(40, 6);
    for (int i = 0; i < 40; ++i) B(i, i) += 40.0;
    auto es = eigh_generalized(A, B);
    CHECK(residual(A, es, &B) < 1e-12);
    Matrix G = matmul(es.vectors, matmul(B, es.vectors), true, false);
    for (int i = 0; i < 40; ++i) CHECK(std::abs(G(i, i) - 1.0) < 1e-12);
  }

  TEST_CASE("hermitian defect and part") {
    Matrix A = random_hermitian(10, 7);
    CHECK(hermitian_defect(A) == 0.0);
    A(0, 1) += 1.0;
    CHECK(hermitian_defect(A) > 0.0);
    CHECK(hermitian_defect(hermitian_part(A)) < 1e-15);
    CHECK_THROWS_AS(eigh(Matrix(3, 4)), ConfigError);
  }

  TEST_CASE("lanczos finds the top eigenvalue") {
    Matrix A = random_hermitian(60, 9, 3.0);
    auto es = eigh(A);
    LinearMap op = [&](const cplx* in, cplx* out) {
      std::vector<cplx> x(in, in + 60);
      auto y = matvec(A, x);
      std::copy(y.begin(), y.end(), out);
    };
    CHECK(lanczos_max(op, 60) == doctest::Approx(es.values.back()).epsilon(1e-10));
  }

  TEST_CASE("krylov exponential matches the eigendecomposition") {
    Matrix A = random_hermitian(60, 11);
    auto es = eigh(A);
    std::vector<cplx> v(60);
    for (int i = 0; i < 60; ++i) v[i] = cplx(std::cos(i), std::sin(0.3 * i));
    double t = 0.4;
    auto c = matvec(es.vectors, v, true);
    for (int j = 0; j < 60; ++j) c[j] *= std::exp(cplx(0.0, -t * es.values[j]));
    auto want = matvec(es.vectors, c);
    LinearMap op = [&](const cplx* in, cplx* out) {
      std::vector<cplx> x(in, in + 60);
      auto y = matvec(A, x);
      std::copy(y.begin(), y.end(), out);
    };
    auto got = krylov_expm(op, v, t, 30, 4);
    double err = 0.0, nrm = 0.0;
    for (int i = 0; i < 60; ++i) {
      err += std::norm(got[i] - want[i]);
      nrm += std::norm(want[i]);
    }
    CHECK(std::sqrt(err / nrm) < 1e-10);
  }
}
