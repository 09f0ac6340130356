#pragma once

#include <functional>
#include <vector>

#include "andersonlab/fourier.hpp"

namespace andersonlab {

// Dense complex matrix, column-major.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(std::size_t(rows) * cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  cplx& operator()(int i, int j) { return a_[std::size_t(j) * rows_ + i]; }
  cplx operator()(int i, int j) const { return a_[std::size_t(j) * rows_ + i]; }
  cplx* data() { return a_.data(); }
  const cplx* data() const { return a_.data(); }

  Matrix adjoint() const;
  double frobenius() const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<cplx> a_;
};

// ||A - A^H||_F / ||A||_F
double hermitian_defect(const Matrix& A);
// (A + A^H) / 2
Matrix hermitian_part(const Matrix& A);

// y = op(A) x, op = identity or adjoint
std::vector<cplx> matvec(const Matrix& A, const std::vector<cplx>& x, bool adjoint = false);
// C = op(A) op(B)
Matrix matmul(const Matrix& A, const Matrix& B, bool adjoint_a = false, bool adjoint_b = false);

struct EigenSystem {
  std::vector<double> values;  // ascending
  Matrix vectors;              // columns
};

// Hermitian A (lower triangle used).
EigenSystem eigh(Matrix A);
// A v = lambda B v with B Hermitian positive definite; vectors are B-orthonormal.
EigenSystem eigh_generalized(Matrix A, Matrix B);

using LinearMap = std::function<void(const cplx* in, cplx* out)>;

// Largest eigenvalue of a Hermitian map by Lanczos with full reorthogonalization.
double lanczos_max(const LinearMap& apply, std::size_t n, int max_iter = 200, double tol = 1e-10,
                   std::uint64_t seed = 1);

// exp(-i t A) v for Hermitian A by Lanczos on `substeps` equal substeps.
std::vector<cplx> krylov_expm(const LinearMap& apply, const std::vector<cplx>& v, double t,
                              int krylov_dim = 30, int substeps = 1);

}  // namespace andersonlab
