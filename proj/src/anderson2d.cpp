#include "andersonlab/anderson2d.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace andersonlab {

double FixedPointLog::max_ratio() const {
  double r = 0.0;
  for (std::size_t i = 1; i < differences.size(); ++i)
    if (differences[i - 1] > 0) r = std::max(r, differences[i] / differences[i - 1]);
  return r;
}

BandIndex::BandIndex(int dim, int M, const Band& band) : dim_(dim), M_(M), band_(band) {
  auto lat = Lattice::get(dim, M);
  for (std::size_t i = 0; i < lat->size; ++i)
    if (band.contains(lat->freq[i], lat->norm2[i], M)) modes_.push_back(i);
}

std::vector<cplx> BandIndex::to_vector(const TorusField& f) const {
  if (f.dim() != dim_ || f.grid() != M_) throw ConfigError("field grid does not match the band");
  if (!inside_band(f, band_)) throw ConfigError("field has content outside the band " + band_.describe());
  std::vector<cplx> v(modes_.size());
  for (std::size_t n = 0; n < modes_.size(); ++n) v[n] = f[modes_[n]];
  return v;
}

TorusField BandIndex::from_vector(const std::vector<cplx>& v) const {
  if (v.size() != modes_.size()) throw ConfigError("vector length does not match the band");
  std::vector<cplx> c(Lattice::get(dim_, M_)->size);
  for (std::size_t n = 0; n < modes_.size(); ++n) c[modes_[n]] = v[n];
  return TorusField::from_coeffs(dim_, M_, std::move(c));
}

namespace {

constexpr std::size_t kDenseLimit = 4000;

struct Decomp {
  BlockStack u, lap;
  std::vector<BlockStack> grad;
};

Decomp decompose_all(const std::shared_ptr<const ProductGrid>& grid, const TorusField& u) {
  Decomp d;
  d.u = decompose(grid, u);
  d.lap = decompose(grid, laplacian(u));
  for (const auto& g : gradient(u)) d.grad.push_back(decompose(grid, g));
  return d;
}

}  // namespace

namespace {

Band checked_band(const EnhancedNoise2d& noise, const Band& band) {
  if (noise.xi.empty() || noise.xi.dim() != 2) throw ConfigError("2d operator needs 2d noise");
  if (band.kind == Band::Kind::Ball && (!(band.radius >= 1) || band.radius >= noise.M / 2))
    throw ConfigError("band radius K must satisfy 1 <= K < M/2");
  if (band.kind == Band::Kind::SymmetricBox) throw ConfigError("operator band must be a ball or the full box");
  return band;
}

}  // namespace

AndersonOperator2d::AndersonOperator2d(EnhancedNoise2d noise, double K, int cutoff, GammaSettings gs)
    : AndersonOperator2d(std::move(noise), Band::ball(K), cutoff, gs) {}

AndersonOperator2d::AndersonOperator2d(EnhancedNoise2d noise, const Band& band, int cutoff, GammaSettings gs)
    : noise_(std::move(noise)), band_(checked_band(noise_, band)), gs_(gs) {
  const int M = noise_.M;
  const bool ball = band_.kind == Band::Kind::Ball;
  K_ = ball ? band_.radius : M / 2;
  index_ = std::make_shared<BandIndex>(2, M, band_);
  Band nb = ball ? Band::ball(2 * K_) : Band::box();
  grid_ = ProductGrid::get(2, M, padded_size(AxisSpan::of(band_, M), AxisSpan::of(nb, M), AxisSpan::of(band_, M)));
  xi_ = restrict_to(noise_.xi, nb);
  X_ = restrict_to(noise_.X, nb);
  xi2_ = restrict_to(noise_.xi2, nb);
  xX_ = restrict_to(noise_.xi2 + TorusField::constant(2, M, noise_.kappa), nb);
  gX_ = gradient(X_);
  xi_s_ = decompose(grid_, xi_);
  X_s_ = decompose(grid_, X_);
  xi2_s_ = decompose(grid_, xi2_);
  for (const auto& g : gX_) gX_s_.push_back(decompose(grid_, g));
  xi_v_ = grid_->to_physical(xi_);
  xi2_v_ = grid_->to_physical(xi2_);
  xX_v_ = grid_->to_physical(xX_);

  shift_ = 0.0;
  const std::size_t n = index_->size();
  if (n <= kDenseLimit) {
    build_matrix();  // unshifted
    LinearMap A = [this, n](const cplx* in, cplx* out) {
      std::vector<cplx> x(in, in + n);
      auto y = matvec(matrix_, x);
      std::copy(y.begin(), y.end(), out);
    };
    lambda_max0_ = lanczos_max(A, n, static_cast<int>(std::min<std::size_t>(n, 600)), 1e-13);
  } else {
    LinearMap A = [this](const cplx* in, cplx* out) {
      auto y = index_->to_vector(galerkin_apply(index_->from_vector(std::vector<cplx>(in, in + index_->size()))));
      std::copy(y.begin(), y.end(), out);
    };
    lambda_max0_ = lanczos_max(A, n, 600, 1e-13);
  }
  shift_ = std::max(0.0, lambda_max0_) + 1.0;
  if (n <= kDenseLimit)
    for (std::size_t i = 0; i < n; ++i) matrix_(int(i), int(i)) -= shift_;

  N_ = 2;
  if (cutoff > 0)
    set_cutoff(cutoff);
  else
    N_ = select_cutoff(*this);
}

void AndersonOperator2d::set_cutoff(int N) {
  if (N < 1) throw ConfigError("cutoff N must be positive");
  N_ = N;
}

void AndersonOperator2d::check_band(const TorusField& u, const char* where) const {
  if (u.dim() != 2 || u.grid() != M()) throw ConfigError(std::string(where) + ": grid mismatch with operator");
  if (!inside_band(u, band_))
    throw ConfigError(std::string(where) + ": field has content outside the band " + band_.describe());
}

TorusField AndersonOperator2d::b_xi(const TorusField& u) const {
  check_band(u, "b_xi");
  Decomp d = decompose_all(grid_, u);
  Accumulator acc(grid_);
  acc.add_lt(d.lap, X_s_);
  for (int a = 0; a < 2; ++a) acc.add_lt(d.grad[a], gX_s_[a], 2.0);
  acc.add_lt(xi_s_, d.u);
  acc.add_lt(d.u, xi2_s_, -1.0);
  return bessel_l_inv(acc.result(band_));
}

TorusField AndersonOperator2d::remainder_map(const TorusField& u) const {
  check_band(u, "remainder_map");
  Accumulator acc(grid_);
  acc.add_lt(decompose(grid_, u), X_s_);
  return acc.result(band_) + b_xi(u);
}

TorusField AndersonOperator2d::remainder_high(const TorusField& u, int N) const {
  return high_pass(remainder_map(u), N);
}

TorusField AndersonOperator2d::gamma(const TorusField& usharp, FixedPointLog* log) const {
  check_band(usharp, "gamma");
  FixedPointLog local;
  FixedPointLog& lg = log ? *log : local;
  lg = FixedPointLog{};
  double scale = sobolev_norm(usharp, gs_.norm_s);
  if (scale == 0.0) {
    lg.converged = true;
    return usharp;
  }
  TorusField u = usharp;
  for (int it = 0; it < gs_.max_iter; ++it) {
    TorusField next = remainder_high(u, N_) + usharp;
    double diff = sobolev_norm(next - u, gs_.norm_s);
    lg.differences.push_back(diff);
    lg.iterations = it + 1;
    u = std::move(next);
    if (diff <= gs_.tol * scale) {
      lg.converged = true;
      break;
    }
    std::size_t m = lg.differences.size();
    if (m >= 3 && diff > 1e3 * gs_.tol * scale && lg.differences[m - 1] >= lg.differences[m - 2] &&
        lg.differences[m - 2] >= lg.differences[m - 3])
      throw ConvergenceError("Gamma iteration does not contract at cutoff N = " + std::to_string(N_) +
                             "; increase the cutoff");
  }
  return u;
}

TorusField AndersonOperator2d::gamma_inverse(const TorusField& u) const {
  check_band(u, "gamma_inverse");
  return u - remainder_high(u, N_);
}

double AndersonOperator2d::contraction_factor(int N, std::uint64_t probe_seed, int probes, int steps) const {
  double worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    TorusField d = random_band_field(probe_seed + p, gs_.norm_s);
    double prev = sobolev_norm(d, gs_.norm_s);
    for (int s = 0; s < steps; ++s) {
      d = remainder_high(d, N);
      double cur = sobolev_norm(d, gs_.norm_s);
      if (prev == 0.0) break;
      worst = std::max(worst, cur / prev);
      if (cur == 0.0) break;
      d *= 1.0 / cur;
      prev = 1.0;
    }
  }
  return worst;
}

TorusField AndersonOperator2d::h_apply(const TorusField& usharp, const TorusField* gamma_hint) const {
  check_band(usharp, "h_apply");
  TorusField u = gamma_hint ? *gamma_hint : gamma(usharp);
  check_band(u, "h_apply");
  const Band& b = band_;
  BlockStack us_s = decompose(grid_, usharp);
  Decomp d = decompose_all(grid_, u);

  Accumulator acc(grid_);
  acc.add_lt(d.u, X_s_);
  TorusField uX = acc.result(b);
  acc.add_lt(d.lap, X_s_);
  for (int a = 0; a < 2; ++a) acc.add_lt(d.grad[a], gX_s_[a], 2.0);
  acc.add_lt(xi_s_, d.u);
  acc.add_lt(d.u, xi2_s_, -1.0);
  TorusField B = bessel_l_inv(acc.result(b));
  TorusField R = uX + B;

  // u# o xi
  acc.add_resonant(us_s, xi_s_);
  TorusField t1 = acc.result(b);
  // P_{<=N}(u < xi + u > xi)
  acc.add_lt(d.u, xi_s_);
  acc.add_lt(xi_s_, d.u);
  TorusField t2 = p_low(acc.result(b));
  // P_{>N}(R + u < Xi2)
  acc.add_lt(d.u, xi2_s_);
  TorusField t3 = p_high(R + acc.result(b));
  // C(u, X, xi) = (u < X) o xi - u (X o xi)
  acc.add_resonant(decompose(grid_, uX), xi_s_);
  TorusField c1 = acc.result(b);
  std::vector<cplx> uv = full_values(d.u);
  acc.add_product(uv, xX_v_);
  TorusField comm = c1 - acc.result(b);
  // u Xi2
  acc.add_product(uv, xi2_v_);
  TorusField t5 = acc.result(b);
  // B o xi - (P_{<=N} R) o xi
  acc.add_resonant(decompose(grid_, B), xi_s_);
  acc.add_resonant(decompose(grid_, p_low(R)), xi_s_, -1.0);
  TorusField t6 = acc.result(b);

  return laplacian(usharp) + t1 + t2 + t3 + comm + t5 + t6 - u * shift_;
}

TorusField AndersonOperator2d::h_sharp_apply(const TorusField& usharp, const TorusField* gamma_hint) const {
  return gamma_inverse(h_apply(usharp, gamma_hint));
}

TorusField AndersonOperator2d::h_sharp_apply_galerkin(const TorusField& usharp) const {
  return gamma_inverse(galerkin_apply(gamma(usharp)));
}

TorusField AndersonOperator2d::galerkin_apply(const TorusField& u) const {
  check_band(u, "galerkin_apply");
  Accumulator acc(grid_);
  acc.add_product(grid_->to_physical(u), xi_v_);
  return laplacian(u) + acc.result(band_) - u * (noise_.kappa + shift_);
}

double AndersonOperator2d::energy_form(const TorusField& u, const TorusField& v) const {
  return -std::real(inner(galerkin_apply(u), v));
}

void AndersonOperator2d::build_matrix() const {
  const BandIndex& idx = *index_;
  const Lattice& lat = xi_.lattice();
  const int n = static_cast<int>(idx.size());
  const int M = lat.M;
  matrix_ = Matrix(n, n);
  for (int k = 0; k < n; ++k) {
    const Freq& fk = lat.freq[idx.lattice_index(k)];
    for (int l = 0; l < n; ++l) {
      const Freq& fl = lat.freq[idx.lattice_index(l)];
      Freq d{fl[0] - fk[0], fl[1] - fk[1], 0};
      bool ok = d[0] > -M / 2 && d[0] <= M / 2 && d[1] > -M / 2 && d[1] <= M / 2;
      if (ok) matrix_(l, k) = xi_[lat.index_of(d)];
    }
    matrix_(k, k) += -kFourPi2 * lat.norm2[idx.lattice_index(k)] - noise_.kappa;
  }
}

const Matrix& AndersonOperator2d::matrix() const {
  if (index_->size() > kDenseLimit)
    throw ConfigError("band has " + std::to_string(index_->size()) + " modes; dense matrix limit is " +
                      std::to_string(kDenseLimit));
  return matrix_;
}

const EigenSystem& AndersonOperator2d::eigensystem() const {
  std::call_once(eig_once_, [this] { eig_ = eigh(matrix()); });
  return eig_;
}

TorusField AndersonOperator2d::random_band_field(std::uint64_t seed, double s_norm) const {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::vector<cplx> v(index_->size());
  for (auto& x : v) x = cplx(nd(gen), nd(gen));
  TorusField f = index_->from_vector(v);
  return f * (1.0 / sobolev_norm(f, s_norm));
}

int select_cutoff(const AndersonOperator2d& op, std::uint64_t probe_seed, double target) {
  for (int N = 2; N <= op.M() / 4; N *= 2)
    if (op.contraction_factor(N, probe_seed) <= target) return N;
  throw ConfigError("grid too small for this noise realization: no cutoff up to M/4 contracts");
}

}  // namespace andersonlab
