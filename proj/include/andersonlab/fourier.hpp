#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace andersonlab {

using cplx = std::complex<double>;
using Freq = std::array<int, 3>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kFourPi2 = 4.0 * kPi * kPi;

// Bad parameters, bad grids, malformed inputs.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Iterations that fail to contract or converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool is_power_of_two(int n);

// Frequency bookkeeping for a (dim, M) grid. Storage is FFT order:
// index i on an axis carries frequency i for i <= M/2 and i - M otherwise,
// so every axis covers -M/2+1 .. M/2.
struct Lattice {
  int dim = 0;
  int M = 0;
  std::size_t size = 0;
  std::vector<Freq> freq;
  std::vector<int> norm2;       // |k|^2
  std::vector<int> block;       // sharp dyadic block, -1 for k = 0
  std::vector<std::size_t> neg;  // index of -k modulo M
  int max_block = -1;

  static std::shared_ptr<const Lattice> get(int dim, int M);

  std::size_t index_of(const Freq& k) const;  // k must be representable
  bool representable(const Freq& k) const;
  bool has_nyquist(std::size_t i) const;
};

// Sharp dyadic block of an integer |k|^2.
int sharp_block(int norm2);

class TorusField {
 public:
  TorusField() = default;
  TorusField(int dim, int M);

  static TorusField zeros(int dim, int M) { return TorusField(dim, M); }
  static TorusField from_coeffs(int dim, int M, std::vector<cplx> coeffs, bool real = false);
  static TorusField from_values(int dim, int M, std::span<const cplx> values);
  static TorusField from_real_values(int dim, int M, std::span<const double> values);
  static TorusField mode(int dim, int M, const Freq& k, cplx amplitude = 1.0);
  static TorusField constant(int dim, int M, cplx c);

  int dim() const { return lat_->dim; }
  int grid() const { return lat_->M; }
  std::size_t size() const { return c_.size(); }
  bool is_real() const { return real_; }
  bool empty() const { return !lat_; }
  const Lattice& lattice() const { return *lat_; }
  const std::shared_ptr<const Lattice>& lattice_ptr() const { return lat_; }

  std::span<const cplx> coeffs() const { return c_; }
  cplx coeff(const Freq& k) const;
  cplx operator[](std::size_t i) const { return c_[i]; }

  // Point values f(x_j), x_j = j / M, in row-major order.
  std::vector<cplx> values() const;
  std::vector<double> real_values() const;

  // Enforce coeff(-k) = conj(coeff(k)) and set the real flag.
  TorusField as_real() const;
  TorusField conj() const;

  TorusField operator-() const;
  TorusField& operator+=(const TorusField& o);
  TorusField& operator-=(const TorusField& o);
  TorusField& operator*=(cplx a);
  TorusField& operator*=(double a);

  // Mutable access for builders; clears the real flag.
  std::vector<cplx>& mutable_coeffs() {
    real_ = false;
    return c_;
  }

  void require_same_grid(const TorusField& o, const char* where) const;

 private:
  std::shared_ptr<const Lattice> lat_;
  std::vector<cplx> c_;
  bool real_ = false;
};

TorusField operator+(TorusField a, const TorusField& b);
TorusField operator-(TorusField a, const TorusField& b);
TorusField operator*(TorusField a, cplx s);
TorusField operator*(cplx s, TorusField a);
TorusField operator*(TorusField a, double s);
TorusField operator*(double s, TorusField a);

// Apply a Fourier multiplier symbol(k, |k|^2). Real symbols even in k keep the real flag.
TorusField apply_symbol(const TorusField& f, const std::function<cplx(const Freq&, int)>& symbol,
                        bool preserves_real);

TorusField laplacian(const TorusField& f);
TorusField partial(const TorusField& f, int axis);
std::vector<TorusField> gradient(const TorusField& f);
TorusField divergence(const std::vector<TorusField>& v);
TorusField bessel_l(const TorusField& f);      // (1 - Delta) f
TorusField bessel_l_inv(const TorusField& f);  // (1 - Delta)^{-1} f
TorusField neg_laplacian_inv(const TorusField& f);  // (-Delta)^{-1}, zero mode dropped
TorusField bessel_power(const TorusField& f, double s);  // (1 - Delta)^{s/2}

TorusField low_pass(const TorusField& f, double N);
TorusField high_pass(const TorusField& f, double N);

// Raw transforms on row-major grids of side n: physical values <-> Fourier
// series coefficients, c_k = n^{-d} sum_x f(x) e^{-2 pi i k.x}.
enum class Direction { ToFourier, ToPhysical };
void fft_inplace(int dim, int n, cplx* data, Direction dir);
TorusField transform(const std::vector<cplx>& values, int dim, int M);
std::vector<cplx> transform(const TorusField& f);

enum class BlockFlavor { Sharp, Smooth };

// Littlewood-Paley partition on a lattice. Blocks -1..J.
class DyadicDecomposition {
 public:
  DyadicDecomposition(int dim, int M, BlockFlavor flavor = BlockFlavor::Sharp);
  int block_count() const { return J_ + 2; }
  int max_block() const { return J_; }
  BlockFlavor flavor() const { return flavor_; }
  double weight(int j, std::size_t mode) const;
  TorusField block(const TorusField& f, int j) const;
  std::vector<TorusField> blocks(const TorusField& f) const;

 private:
  int dim_, M_, J_;
  BlockFlavor flavor_;
  std::shared_ptr<const Lattice> lat_;
  std::vector<double> radius_;
};

TorusField lp_block(const TorusField& f, int j, BlockFlavor flavor = BlockFlavor::Sharp);

// Grid L^p with cell weight M^{-d}; p = infinity gives the grid maximum.
double lp_norm(const TorusField& f, double p);
double lp_norm_values(std::span<const cplx> values, double p);
double besov_norm(const TorusField& f, double alpha, double p, double q,
                  BlockFlavor flavor = BlockFlavor::Sharp);
double holder_norm(const TorusField& f, double alpha);
double sobolev_norm(const TorusField& f, double s);
double l2_norm(const TorusField& f);
// sum_k f_k conj(g_k)
cplx inner(const TorusField& f, const TorusField& g);
// max |k| present with |coeff| > tol
double spectral_radius(const TorusField& f, double tol = 0.0);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Binary container: magic, {dim, M, real_flag, layout}, then (re, im) float64
// little-endian pairs in row-major frequency order from -M/2+1 to M/2.
void write_field(std::ostream& os, const TorusField& f);
TorusField read_field(std::istream& is);
void save_field(const std::string& path, const TorusField& f);
TorusField load_field(const std::string& path);

}  // namespace andersonlab
