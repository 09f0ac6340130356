#include "andersonlab/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <tuple>

namespace andersonlab {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int sharp_block(int norm2) {
  if (norm2 == 0) return -1;
  // smallest j >= 0 with norm2 <= 4^j, i.e. |k| in (2^{j-1}, 2^j]
  int j = 0;
  long long bound = 1;
  while (norm2 > bound) {
    bound *= 4;
    ++j;
  }
  return j;
}

namespace {

int axis_freq(int i, int M) { return i <= M / 2 ? i : i - M; }
int axis_index(int k, int M) { return ((k % M) + M) % M; }

void check_grid(int dim, int M) {
  if (dim < 1 || dim > 3) throw ConfigError("dimension must be 1, 2 or 3, got " + std::to_string(dim));
  if (!is_power_of_two(M) || M < 2)
    throw ConfigError("grid size must be a power of two >= 2, got " + std::to_string(M));
}

}  // namespace

std::shared_ptr<const Lattice> Lattice::get(int dim, int M) {
  check_grid(dim, M);
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const Lattice>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(dim, M);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  auto lat = std::make_shared<Lattice>();
  lat->dim = dim;
  lat->M = M;
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(M);
  lat->size = n;
  lat->freq.resize(n);
  lat->norm2.resize(n);
  lat->block.resize(n);
  lat->neg.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Freq k{0, 0, 0};
    std::size_t rest = i;
    for (int a = dim - 1; a >= 0; --a) {
      k[a] = axis_freq(static_cast<int>(rest % M), M);
      rest /= M;
    }
    int n2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    lat->freq[i] = k;
    lat->norm2[i] = n2;
    lat->block[i] = sharp_block(n2);
    lat->max_block = std::max(lat->max_block, lat->block[i]);
    std::size_t j = 0;
    for (int a = 0; a < dim; ++a) j = j * M + axis_index(-k[a], M);
    lat->neg[i] = j;
  }
  cache[key] = lat;
  return lat;
}

std::size_t Lattice::index_of(const Freq& k) const {
  std::size_t j = 0;
  for (int a = 0; a < dim; ++a) j = j * M + axis_index(k[a], M);
  return j;
}

bool Lattice::representable(const Freq& k) const {
  for (int a = 0; a < dim; ++a)
    if (k[a] <= -M / 2 || k[a] > M / 2) return false;
  for (int a = dim; a < 3; ++a)
    if (k[a] != 0) return false;
  return true;
}

bool Lattice::has_nyquist(std::size_t i) const {
  for (int a = 0; a < dim; ++a)
    if (freq[i][a] == M / 2) return true;
  return false;
}

// ---------------------------------------------------------------------------
// FFT plan cache

namespace {

struct PlanCache {
  std::mutex mu;
  std::map<std::tuple<int, int, int>, fftw_plan> plans;

  fftw_plan get(int dim, int n, int sign) {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(dim, n, sign);
    if (auto it = plans.find(key); it != plans.end()) return it->second;
    int dims[3] = {n, n, n};
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(n);
    fftw_complex* buf = fftw_alloc_complex(total);
    fftw_plan p = fftw_plan_dft(dim, dims, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!p) throw std::runtime_error("fftw planner failed");
    plans[key] = p;
    return p;
  }
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

void fft_inplace(int dim, int n, cplx* data, Direction dir) {
  int sign = dir == Direction::ToFourier ? FFTW_FORWARD : FFTW_BACKWARD;
  fftw_plan p = plan_cache().get(dim, n, sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, ptr, ptr);
  if (dir == Direction::ToFourier) {
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(n);
    double scale = 1.0 / static_cast<double>(total);
    for (std::size_t i = 0; i < total; ++i) data[i] *= scale;
  }
}

// ---------------------------------------------------------------------------
// TorusField

TorusField::TorusField(int dim, int M) : lat_(Lattice::get(dim, M)), c_(lat_->size), real_(true) {}

TorusField TorusField::from_coeffs(int dim, int M, std::vector<cplx> coeffs, bool real) {
  TorusField f(dim, M);
  if (coeffs.size() != f.size()) throw ConfigError("coefficient array has wrong size");
  f.c_ = std::move(coeffs);
  f.real_ = false;
  return real ? f.as_real() : f;
}

TorusField TorusField::from_values(int dim, int M, std::span<const cplx> values) {
  TorusField f(dim, M);
  if (values.size() != f.size()) throw ConfigError("value array has wrong size");
  std::copy(values.begin(), values.end(), f.c_.begin());
  fft_inplace(dim, M, f.c_.data(), Direction::ToFourier);
  f.real_ = false;
  return f;
}

TorusField TorusField::from_real_values(int dim, int M, std::span<const double> values) {
  std::vector<cplx> v(values.begin(), values.end());
  return from_values(dim, M, v).as_real();
}

TorusField TorusField::mode(int dim, int M, const Freq& k, cplx amplitude) {
  TorusField f(dim, M);
  if (!f.lat_->representable(k)) throw ConfigError("frequency not representable on this grid");
  f.c_[f.lat_->index_of(k)] = amplitude;
  f.real_ = false;
  return f;
}

TorusField TorusField::constant(int dim, int M, cplx c) {
  TorusField f(dim, M);
  f.c_[0] = c;
  f.real_ = c.imag() == 0.0;
  return f;
}

cplx TorusField::coeff(const Freq& k) const {
  if (!lat_->representable(k)) return 0.0;
  return c_[lat_->index_of(k)];
}

std::vector<cplx> TorusField::values() const {
  std::vector<cplx> v(c_);
  fft_inplace(dim(), grid(), v.data(), Direction::ToPhysical);
  return v;
}

std::vector<double> TorusField::real_values() const {
  auto v = values();
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i].real();
  return r;
}

TorusField TorusField::as_real() const {
  TorusField f(*this);
  const auto& neg = lat_->neg;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    std::size_t j = neg[i];
    if (j < i) continue;
    if (j == i) {
      f.c_[i] = c_[i].real();
    } else {
      cplx a = 0.5 * (c_[i] + std::conj(c_[j]));
      f.c_[i] = a;
      f.c_[j] = std::conj(a);
    }
  }
  f.real_ = true;
  return f;
}

TorusField TorusField::conj() const {
  TorusField f(*this);
  const auto& neg = lat_->neg;
  for (std::size_t i = 0; i < c_.size(); ++i) f.c_[i] = std::conj(c_[neg[i]]);
  return f;
}

TorusField TorusField::operator-() const {
  TorusField f(*this);
  for (auto& c : f.c_) c = -c;
  return f;
}

void TorusField::require_same_grid(const TorusField& o, const char* where) const {
  if (empty() || o.empty() || dim() != o.dim() || grid() != o.grid())
    throw ConfigError(std::string(where) + ": grid mismatch");
}

TorusField& TorusField::operator+=(const TorusField& o) {
  require_same_grid(o, "add");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  real_ = real_ && o.real_;
  return *this;
}

TorusField& TorusField::operator-=(const TorusField& o) {
  require_same_grid(o, "subtract");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  real_ = real_ && o.real_;
  return *this;
}

TorusField& TorusField::operator*=(cplx a) {
  for (auto& c : c_) c *= a;
  real_ = real_ && a.imag() == 0.0;
  return *this;
}

TorusField& TorusField::operator*=(double a) {
  for (auto& c : c_) c *= a;
  return *this;
}

TorusField operator+(TorusField a, const TorusField& b) { return a += b; }
TorusField operator-(TorusField a, const TorusField& b) { return a -= b; }
TorusField operator*(TorusField a, cplx s) { return a *= s; }
TorusField operator*(cplx s, TorusField a) { return a *= s; }
TorusField operator*(TorusField a, double s) { return a *= s; }
TorusField operator*(double s, TorusField a) { return a *= s; }

// ---------------------------------------------------------------------------
// multipliers

TorusField apply_symbol(const TorusField& f, const std::function<cplx(const Freq&, int)>& symbol,
                        bool preserves_real) {
  const Lattice& lat = f.lattice();
  std::vector<cplx> c(f.coeffs().begin(), f.coeffs().end());
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i] != 0.0) c[i] *= symbol(lat.freq[i], lat.norm2[i]);
  auto out = TorusField::from_coeffs(f.dim(), f.grid(), std::move(c));
  return preserves_real && f.is_real() ? out.as_real() : out;
}

namespace {

TorusField radial(const TorusField& f, const std::function<double(int)>& s) {
  const Lattice& lat = f.lattice();
  std::vector<cplx> c(f.coeffs().begin(), f.coeffs().end());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= s(lat.norm2[i]);
  auto out = TorusField::from_coeffs(f.dim(), f.grid(), std::move(c));
  if (!f.is_real()) return out;
  // radial real symbols keep the Hermitian pairing exactly
  return TorusField::from_coeffs(f.dim(), f.grid(), {out.coeffs().begin(), out.coeffs().end()}, false)
      .as_real();
}

}  // namespace

TorusField laplacian(const TorusField& f) {
  return radial(f, [](int n2) { return -kFourPi2 * n2; });
}

TorusField partial(const TorusField& f, int axis) {
  if (axis < 0 || axis >= f.dim()) throw ConfigError("derivative axis out of range");
  const Lattice& lat = f.lattice();
  std::vector<cplx> c(f.coeffs().begin(), f.coeffs().end());
  const int M = f.grid();
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] *= cplx(0.0, kTwoPi * lat.freq[i][axis]);
  }
  auto out = TorusField::from_coeffs(f.dim(), M, std::move(c));
  return f.is_real() ? out.as_real() : out;
}

std::vector<TorusField> gradient(const TorusField& f) {
  std::vector<TorusField> g;
  for (int a = 0; a < f.dim(); ++a) g.push_back(partial(f, a));
  return g;
}

TorusField divergence(const std::vector<TorusField>& v) {
  TorusField out = partial(v.at(0), 0);
  for (std::size_t a = 1; a < v.size(); ++a) out += partial(v[a], static_cast<int>(a));
  return out;
}

TorusField bessel_l(const TorusField& f) {
  return radial(f, [](int n2) { return 1.0 + kFourPi2 * n2; });
}

TorusField bessel_l_inv(const TorusField& f) {
  return radial(f, [](int n2) { return 1.0 / (1.0 + kFourPi2 * n2); });
}

TorusField neg_laplacian_inv(const TorusField& f) {
  return radial(f, [](int n2) { return n2 == 0 ? 0.0 : 1.0 / (kFourPi2 * n2); });
}

TorusField bessel_power(const TorusField& f, double s) {
  return radial(f, [s](int n2) { return std::pow(1.0 + kFourPi2 * n2, 0.5 * s); });
}

TorusField low_pass(const TorusField& f, double N) {
  if (N < 0) throw ConfigError("low_pass cutoff must be nonnegative");
  double n2max = N * N;
  return radial(f, [n2max](int n2) { return n2 <= n2max ? 1.0 : 0.0; });
}

TorusField high_pass(const TorusField& f, double N) {
  if (N < 0) throw ConfigError("high_pass cutoff must be nonnegative");
  double n2max = N * N;
  return radial(f, [n2max](int n2) { return n2 <= n2max ? 0.0 : 1.0; });
}

TorusField transform(const std::vector<cplx>& values, int dim, int M) {
  return TorusField::from_values(dim, M, values);
}

std::vector<cplx> transform(const TorusField& f) { return f.values(); }

// ---------------------------------------------------------------------------
// Littlewood-Paley blocks

namespace {

// low-pass profile for the smooth flavor: 1 below 2/3, 0 above 4/3
double chi(double s) {
  if (s <= 2.0 / 3.0) return 1.0;
  if (s >= 4.0 / 3.0) return 0.0;
  double c = std::cos(0.5 * kPi * (s - 2.0 / 3.0) / (2.0 / 3.0));
  return c * c;
}

}  // namespace

DyadicDecomposition::DyadicDecomposition(int dim, int M, BlockFlavor flavor)
    : dim_(dim), M_(M), flavor_(flavor), lat_(Lattice::get(dim, M)) {
  J_ = lat_->max_block;
  if (flavor_ == BlockFlavor::Smooth) {
    J_ += 1;
    radius_.resize(lat_->size);
    for (std::size_t i = 0; i < lat_->size; ++i) radius_[i] = std::sqrt(double(lat_->norm2[i]));
  }
}

double DyadicDecomposition::weight(int j, std::size_t i) const {
  if (flavor_ == BlockFlavor::Sharp) return lat_->block[i] == j ? 1.0 : 0.0;
  double r = radius_[i];
  if (j == -1) return chi(2.0 * r);
  double lo = chi(std::ldexp(r, -(j - 1)));
  if (j == J_) return 1.0 - lo;
  return chi(std::ldexp(r, -j)) - lo;
}

TorusField DyadicDecomposition::block(const TorusField& f, int j) const {
  if (j < -1 || j > J_) throw ConfigError("block index out of range: " + std::to_string(j));
  if (f.dim() != dim_ || f.grid() != M_) throw ConfigError("lp_block: grid mismatch");
  std::vector<cplx> c(f.coeffs().begin(), f.coeffs().end());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= weight(j, i);
  auto out = TorusField::from_coeffs(dim_, M_, std::move(c));
  return f.is_real() ? out.as_real() : out;
}

std::vector<TorusField> DyadicDecomposition::blocks(const TorusField& f) const {
  std::vector<TorusField> out;
  for (int j = -1; j <= J_; ++j) out.push_back(block(f, j));
  return out;
}

TorusField lp_block(const TorusField& f, int j, BlockFlavor flavor) {
  return DyadicDecomposition(f.dim(), f.grid(), flavor).block(f, j);
}

// ---------------------------------------------------------------------------
// norms

double lp_norm_values(std::span<const cplx> values, double p) {
  if (values.empty()) return 0.0;
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, std::abs(v));
    return m;
  }
  if (p < 1.0) throw ConfigError("L^p exponent must be >= 1");
  double s = 0.0;
  if (p == 2.0) {
    for (const auto& v : values) s += std::norm(v);
    return std::sqrt(s / double(values.size()));
  }
  for (const auto& v : values) s += std::pow(std::abs(v), p);
  return std::pow(s / double(values.size()), 1.0 / p);
}

double lp_norm(const TorusField& f, double p) { return lp_norm_values(f.values(), p); }

double besov_norm(const TorusField& f, double alpha, double p, double q, BlockFlavor flavor) {
  DyadicDecomposition dec(f.dim(), f.grid(), flavor);
  double acc = 0.0;
  for (int j = -1; j <= dec.max_block(); ++j) {
    double w = j < 0 ? 1.0 : std::pow(2.0, j * alpha);
    double bj = w * lp_norm(dec.block(f, j), p);
    if (std::isinf(q))
      acc = std::max(acc, bj);
    else
      acc += std::pow(bj, q);
  }
  return std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
}

double holder_norm(const TorusField& f, double alpha) { return besov_norm(f, alpha, kInf, kInf); }

double sobolev_norm(const TorusField& f, double s) {
  const Lattice& lat = f.lattice();
  double acc = 0.0;
  auto c = f.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) {
    double a = std::norm(c[i]);
    if (a == 0.0) continue;
    acc += (s == 0.0 ? 1.0 : std::pow(1.0 + kFourPi2 * lat.norm2[i], s)) * a;
  }
  return std::sqrt(acc);
}

double l2_norm(const TorusField& f) { return sobolev_norm(f, 0.0); }

cplx inner(const TorusField& f, const TorusField& g) {
  f.require_same_grid(g, "inner");
  cplx s = 0.0;
  auto a = f.coeffs();
  auto b = g.coeffs();
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
  return s;
}

double spectral_radius(const TorusField& f, double tol) {
  const Lattice& lat = f.lattice();
  int best = 0;
  auto c = f.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i)
    if (std::abs(c[i]) > tol) best = std::max(best, lat.norm2[i]);
  return std::sqrt(double(best));
}

// ---------------------------------------------------------------------------
// serialization

namespace {

constexpr char kMagic[8] = {'A', 'L', 'F', 'I', 'E', 'L', 'D', '1'};
constexpr const char* kLayout = "row-major-frequency";

template <typename T>
void put_le(std::ostream& os, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  unsigned char b[sizeof(T)];
  is.read(reinterpret_cast<char*>(b), sizeof(T));
  if (!is) throw ConfigError("truncated field container");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

// Visit lattice indices in row-major order of frequency, -M/2+1 .. M/2 per axis.
template <typename F>
void for_each_ordered(const Lattice& lat, F&& fn) {
  const int M = lat.M;
  int k[3] = {0, 0, 0};
  std::size_t total = lat.size;
  for (std::size_t r = 0; r < total; ++r) {
    std::size_t rest = r;
    for (int a = lat.dim - 1; a >= 0; --a) {
      k[a] = static_cast<int>(rest % M) - M / 2 + 1;
      rest /= M;
    }
    fn(lat.index_of({k[0], k[1], k[2]}));
  }
}

}  // namespace

void write_field(std::ostream& os, const TorusField& f) {
  os.write(kMagic, 8);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(f.dim()));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid()));
  put_le<std::uint32_t>(os, f.is_real() ? 1u : 0u);
  std::string layout(kLayout);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(layout.size()));
  os.write(layout.data(), static_cast<std::streamsize>(layout.size()));
  auto c = f.coeffs();
  for_each_ordered(f.lattice(), [&](std::size_t i) {
    put_le<double>(os, c[i].real());
    put_le<double>(os, c[i].imag());
  });
}

TorusField read_field(std::istream& is) {
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0) throw ConfigError("not a field container");
  int dim = static_cast<int>(get_le<std::uint32_t>(is));
  int M = static_cast<int>(get_le<std::uint32_t>(is));
  bool real = get_le<std::uint32_t>(is) != 0;
  auto len = get_le<std::uint32_t>(is);
  if (len > 256) throw ConfigError("bad layout tag");
  std::string layout(len, '\0');
  is.read(layout.data(), len);
  if (layout != kLayout) throw ConfigError("unsupported layout: " + layout);
  TorusField f(dim, M);
  std::vector<cplx> c(f.size());
  for_each_ordered(f.lattice(), [&](std::size_t i) {
    double re = get_le<double>(is);
    double im = get_le<double>(is);
    c[i] = {re, im};
  });
  auto out = TorusField::from_coeffs(dim, M, std::move(c));
  return real ? out.as_real() : out;
}

void save_field(const std::string& path, const TorusField& f) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + tmp);
    write_field(os, f);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw ConfigError("cannot write " + path);
}

TorusField load_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + path);
  return read_field(is);
}

}  // namespace andersonlab
