#include "andersonlab/anderson3d.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace andersonlab {

StackCache::StackCache(std::shared_ptr<const ProductGrid> grid, std::size_t budget_bytes)
    : grid_(std::move(grid)), budget_(budget_bytes) {}

int StackCache::add(const TorusField& f) {
  const Lattice& lat = f.lattice();
  int jmax = -1;
  for (std::size_t i = 0; i < lat.size; ++i)
    if (f[i] != 0.0) jmax = std::max(jmax, lat.block[i]);
  std::size_t bytes = std::size_t(jmax + 2) * grid_->size() * sizeof(cplx);
  fields_.push_back(f);
  if (used_ + bytes <= budget_) {
    stacks_.push_back(std::make_shared<const BlockStack>(decompose(grid_, f)));
    used_ += bytes;
  } else {
    stacks_.push_back(nullptr);
  }
  return static_cast<int>(fields_.size()) - 1;
}

std::shared_ptr<const BlockStack> StackCache::get(int id) const {
  if (stacks_[id]) return stacks_[id];
  return std::make_shared<const BlockStack>(decompose(grid_, fields_[id]));
}

std::size_t StackCache::cached_count() const {
  std::size_t n = 0;
  for (const auto& s : stacks_)
    if (s) ++n;
  return n;
}

namespace {

int sym_index(int a, int b) {
  if (a > b) std::swap(a, b);
  static const int idx[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
  return idx[a][b];
}

}  // namespace

struct AndersonOperator3d::UDecomp {
  BlockStack u, lap;
  std::array<BlockStack, 3> d, dlap;
  std::array<BlockStack, 6> dd;
  std::vector<cplx> uv;
  std::array<std::vector<cplx>, 3> dv;
};

AndersonOperator3d::UDecomp AndersonOperator3d::decompose_u(const TorusField& u) const {
  UDecomp r;
  r.u = decompose(grid_, u);
  TorusField lap = laplacian(u);
  r.lap = decompose(grid_, lap);
  auto g = gradient(u);
  auto gl = gradient(lap);
  for (int a = 0; a < 3; ++a) {
    r.d[a] = decompose(grid_, g[a]);
    r.dlap[a] = decompose(grid_, gl[a]);
    r.dv[a] = full_values(r.d[a]);
  }
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) r.dd[sym_index(a, b)] = decompose(grid_, partial(g[b], a));
  r.uv = full_values(r.u);
  return r;
}

AndersonOperator3d::AndersonOperator3d(EnhancedNoise3d noise, double K, Anderson3dOptions opt)
    : noise_(std::move(noise)), K_(K), band_(Band::ball(K)), opt_(opt) {
  const int M = noise_.M;
  if (noise_.Z.empty() || noise_.Z.dim() != 3) throw ConfigError("3d operator needs 3d noise");
  if (!(K >= 1) || K >= M / 2) throw ConfigError("band radius K must satisfy 1 <= K < M/2");
  if (opt_.assemble_pencil && 4 * K >= M)
    throw ConfigError("the L^2(e^{2W}) pencil needs K < M/4; disable it for larger bands");
  index_ = std::make_shared<BandIndex>(3, M, band_);
  const Band nb = Band::ball(2 * K);
  const Band sb = Band::symmetric_box();
  grid_ = ProductGrid::get(3, M, padded_size(AxisSpan::of(band_, M), AxisSpan::of(nb, M), AxisSpan::of(band_, M)));
  cache_ = std::make_unique<StackCache>(grid_, opt_.cache_bytes);

  const TorusField& Z = noise_.Z;
  TorusField LZ = noise_.LZ();
  std::vector<TorusField> LWt = noise_.LWt();
  std::array<TorusField, 3> dZ;
  std::array<std::array<TorusField, 3>, 3> dWt;
  for (int a = 0; a < 3; ++a) {
    dZ[a] = partial(Z, a).as_real();
    for (int b = 0; b < 3; ++b) dWt[a][b] = partial(noise_.Wt[b], a).as_real();
  }

  // noise-noise resonances on the full noise grid, kept on |m| <= 2K
  auto fg = ProductGrid::for_bands(3, M, sb, sb, nb);
  std::array<TorusField, 3> Q2, Q3, Q5;
  TorusField Q1, Q4;
  {
    Accumulator acc(fg);
    BlockStack sLZ = decompose(fg, LZ), sZ = decompose(fg, Z);
    acc.add_resonant(sLZ, sZ);
    Q1 = acc.result(nb, true);
    for (int a = 0; a < 3; ++a) {
      BlockStack sW = decompose(fg, noise_.Wt[a]);
      acc.add_resonant(sLZ, sW, 2.0);
      Q2[a] = acc.result(nb, true);
      BlockStack sL = decompose(fg, LWt[a]);
      acc.add_resonant(sL, sZ, 2.0);
      Q3[a] = acc.result(nb, true);
    }
  }
  {
    Accumulator acc4(fg);
    std::array<Accumulator, 3> acc5{Accumulator(fg), Accumulator(fg), Accumulator(fg)};
    for (int a = 0; a < 3; ++a) {
      BlockStack sL = decompose(fg, LWt[a]);
      acc4.add_resonant(sL, decompose(fg, dZ[a]), 2.0);
      for (int b = 0; b < 3; ++b) {
        acc5[b].add_resonant(decompose(fg, dWt[a][b]), sL, 4.0);
      }
    }
    Q4 = acc4.result(nb, true);
    for (int b = 0; b < 3; ++b) Q5[b] = acc5[b].result(nb, true);
  }

  auto cut = [&](const TorusField& f) { return restrict_to(f, nb); };
  Z_ = cache_->add(cut(Z));
  TorusField LZc = cut(LZ);
  LZ_ = cache_->add(LZc);
  LZv_ = grid_->to_physical(LZc);
  for (int a = 0; a < 3; ++a) {
    Wt_[a] = cache_->add(cut(noise_.Wt[a]));
    TorusField l = cut(LWt[a]);
    LWt_[a] = cache_->add(l);
    LWtv_[a] = grid_->to_physical(l);
    dZ_[a] = cache_->add(cut(dZ[a]));
    for (int b = 0; b < 3; ++b) dWt_[a][b] = cache_->add(cut(dWt[a][b]));
  }
  Q1_ = cache_->add(Q1);
  Q1v_ = grid_->to_physical(Q1);
  Q4_ = cache_->add(Q4);
  Q4v_ = grid_->to_physical(Q4);
  for (int a = 0; a < 3; ++a) {
    Q2_[a] = cache_->add(Q2[a]);
    Q2v_[a] = grid_->to_physical(Q2[a]);
    Q3_[a] = cache_->add(Q3[a]);
    Q3v_[a] = grid_->to_physical(Q3[a]);
    Q5_[a] = cache_->add(Q5[a]);
    Q5v_[a] = grid_->to_physical(Q5[a]);
  }

  // e^{+-W}, e^{2W}, e^{2W} LZ pointwise on the noise grid
  auto wv = noise_.W.real_values();
  auto lzv = LZ.real_values();
  std::vector<double> ep(wv.size()), em(wv.size());
  g_vals_.resize(wv.size());
  h_vals_.resize(wv.size());
  double lz_max = -kInf;
  for (std::size_t i = 0; i < wv.size(); ++i) {
    ep[i] = std::exp(wv[i]);
    em[i] = std::exp(-wv[i]);
    g_vals_[i] = ep[i] * ep[i];
    h_vals_[i] = g_vals_[i] * lzv[i];
    lz_max = std::max(lz_max, lzv[i]);
  }
  ewp_ = TorusField::from_real_values(3, M, ep);
  ewm_ = TorusField::from_real_values(3, M, em);

  if (opt_.assemble_pencil) {
    assemble_pencil();
  } else {
    // S <= max LZ * G for grid quadrature forms
    shift_ = std::max(0.0, lz_max) + 1.0;
  }

  if (opt_.cutoff > 0)
    set_cutoff(opt_.cutoff);
  else
    N_ = select_cutoff(*this);
}

void AndersonOperator3d::assemble_pencil() {
  const int M = noise_.M;
  TorusField gh = TorusField::from_real_values(3, M, g_vals_);
  TorusField hh = TorusField::from_real_values(3, M, h_vals_);
  const Lattice& lat = gh.lattice();
  const BandIndex& idx = *index_;
  const int n = static_cast<int>(idx.size());
  S_ = Matrix(n, n);
  G_ = Matrix(n, n);
  for (int k = 0; k < n; ++k) {
    const Freq& fk = lat.freq[idx.lattice_index(k)];
    for (int l = 0; l < n; ++l) {
      const Freq& fl = lat.freq[idx.lattice_index(l)];
      std::size_t m = lat.index_of({fl[0] - fk[0], fl[1] - fk[1], fl[2] - fk[2]});
      double kl = double(fk[0]) * fl[0] + double(fk[1]) * fl[1] + double(fk[2]) * fl[2];
      G_(l, k) = gh[m];
      S_(l, k) = -kFourPi2 * kl * gh[m] + hh[m];
    }
  }
  // lambda_max of the pencil through the Cholesky factor of G
  Matrix L = G_;
  int info = LAPACKE_zpotrf(LAPACK_COL_MAJOR, 'L', n, reinterpret_cast<lapack_complex_double*>(L.data()), n);
  if (info != 0) throw ConvergenceError("Gram matrix is not positive definite");
  LinearMap op = [this, &L, n](const cplx* in, cplx* out) {
    std::vector<cplx> x(in, in + n);
    cblas_ztrsv(CblasColMajor, CblasLower, CblasConjTrans, CblasNonUnit, n, L.data(), n, x.data(), 1);
    auto y = matvec(S_, x);
    cblas_ztrsv(CblasColMajor, CblasLower, CblasNoTrans, CblasNonUnit, n, L.data(), n, y.data(), 1);
    std::copy(y.begin(), y.end(), out);
  };
  double lmax = lanczos_max(op, std::size_t(n), std::min(n, 600), 1e-13);
  shift_ = std::max(0.0, lmax) + 1.0;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) S_(l, k) -= shift_ * G_(l, k);
  pencil_ = true;
}

void AndersonOperator3d::set_cutoff(int N) {
  if (N < 1) throw ConfigError("cutoff N must be positive");
  N_ = N;
}

void AndersonOperator3d::check_band(const TorusField& u, const char* where) const {
  if (u.dim() != 3 || u.grid() != M()) throw ConfigError(std::string(where) + ": grid mismatch with operator");
  if (!inside_band(u, band_))
    throw ConfigError(std::string(where) + ": field has content outside the band " + band_.describe());
}

void AndersonOperator3d::add_b_terms(Accumulator& acc, const UDecomp& d, std::vector<NamedTerm>* terms) const {
  auto S = [this](int id) { return cache_->get(id); };
  auto flush = [&](const char* name) {
    if (terms) terms->push_back({name, bessel_l_inv(acc.result(band_))});
  };
  auto sZ = S(Z_), sLZ = S(LZ_), sQ1 = S(Q1_), sQ4 = S(Q4_);
  acc.add_lt(d.lap, *sZ);
  flush("lap u < Z");
  for (int a = 0; a < 3; ++a) acc.add_lt(d.d[a], *S(dZ_[a]), 2.0);
  flush("2 grad u < grad Z");
  acc.add_lt(d.u, *sZ);
  flush("u < Z");
  for (int a = 0; a < 3; ++a) acc.add_lt(d.dlap[a], *S(Wt_[a]), 2.0);
  flush("2 grad lap u < Wt");
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) acc.add_lt(d.dd[sym_index(a, b)], *S(dWt_[a][b]), 4.0);
  flush("4 hess u < grad Wt");
  for (int a = 0; a < 3; ++a) acc.add_lt(d.d[a], *S(Wt_[a]), 2.0);
  flush("2 grad u < Wt");
  for (int a = 0; a < 3; ++a) acc.add_lt(*S(LWt_[a]), d.d[a], 2.0);
  flush("2 LWt < grad u");
  acc.add_lt(*sLZ, d.u);
  flush("LZ < u");
  acc.add_lt(d.u, *sQ1);
  flush("u < (LZ o Z)");
  acc.add_gt(d.u, *sQ1);
  flush("u > (LZ o Z)");
  for (int a = 0; a < 3; ++a) acc.add_lt(d.d[a], *S(Q2_[a]));
  flush("grad u < 2(LZ o Wt)");
  for (int a = 0; a < 3; ++a) acc.add_gt(d.d[a], *S(Q2_[a]));
  flush("grad u > 2(LZ o Wt)");
  for (int a = 0; a < 3; ++a) acc.add_lt(d.d[a], *S(Q3_[a]));
  flush("grad u < 2(LWt o Z)");
  for (int a = 0; a < 3; ++a) acc.add_gt(d.d[a], *S(Q3_[a]));
  flush("grad u > 2(LWt o Z)");
  acc.add_lt(d.u, *sQ4);
  flush("u < 2(LWt o grad Z)");
  acc.add_gt(d.u, *sQ4);
  flush("u > 2(LWt o grad Z)");
  for (int b = 0; b < 3; ++b) acc.add_lt(d.d[b], *S(Q5_[b]));
  flush("grad u < 4(grad Wt o LWt)");
  for (int b = 0; b < 3; ++b) acc.add_gt(d.d[b], *S(Q5_[b]));
  flush("grad u > 4(grad Wt o LWt)");
}

TorusField AndersonOperator3d::b_xi(const TorusField& u) const {
  check_band(u, "b_xi_3d");
  UDecomp d = decompose_u(u);
  Accumulator acc(grid_);
  add_b_terms(acc, d, nullptr);
  return bessel_l_inv(acc.result(band_));
}

std::vector<NamedTerm> AndersonOperator3d::b_xi_terms(const TorusField& u) const {
  check_band(u, "b_xi_3d");
  UDecomp d = decompose_u(u);
  Accumulator acc(grid_);
  std::vector<NamedTerm> terms;
  add_b_terms(acc, d, &terms);
  return terms;
}

TorusField AndersonOperator3d::remainder_from(const UDecomp& d) const {
  Accumulator acc(grid_);
  add_b_terms(acc, d, nullptr);
  TorusField B = bessel_l_inv(acc.result(band_));
  acc.add_lt(d.u, *cache_->get(Z_));
  for (int a = 0; a < 3; ++a) acc.add_lt(d.d[a], *cache_->get(Wt_[a]), 2.0);
  return acc.result(band_) + B;
}

TorusField AndersonOperator3d::remainder_map(const TorusField& u) const {
  check_band(u, "remainder_map_3d");
  return remainder_from(decompose_u(u));
}

TorusField AndersonOperator3d::gamma(const TorusField& usharp, FixedPointLog* log) const {
  check_band(usharp, "gamma3");
  const GammaSettings& gs = opt_.gamma;
  FixedPointLog local;
  FixedPointLog& lg = log ? *log : local;
  lg = FixedPointLog{};
  double scale = sobolev_norm(usharp, gs.norm_s);
  if (scale == 0.0) {
    lg.converged = true;
    return usharp;
  }
  TorusField u = usharp;
  for (int it = 0; it < gs.max_iter; ++it) {
    TorusField next = high_pass(remainder_map(u), N_) + usharp;
    double diff = sobolev_norm(next - u, gs.norm_s);
    lg.differences.push_back(diff);
    lg.iterations = it + 1;
    u = std::move(next);
    if (diff <= gs.tol * scale) {
      lg.converged = true;
      break;
    }
    std::size_t m = lg.differences.size();
    if (m >= 3 && diff > 1e3 * gs.tol * scale && lg.differences[m - 1] >= lg.differences[m - 2] &&
        lg.differences[m - 2] >= lg.differences[m - 3])
      throw ConvergenceError("Gamma iteration does not contract at cutoff N = " + std::to_string(N_) +
                             "; increase the cutoff");
  }
  return u;
}

TorusField AndersonOperator3d::gamma_inverse(const TorusField& u) const {
  check_band(u, "gamma3_inverse");
  return u - high_pass(remainder_map(u), N_);
}

double AndersonOperator3d::contraction_factor(int N, std::uint64_t probe_seed, int probes, int steps) const {
  const double s = opt_.gamma.norm_s;
  double worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    TorusField d = random_band_field(probe_seed + p, s);
    for (int k = 0; k < steps; ++k) {
      d = high_pass(remainder_map(d), N);
      double cur = sobolev_norm(d, s);
      worst = std::max(worst, cur);
      if (cur == 0.0) break;
      d *= 1.0 / cur;
    }
  }
  return worst;
}

TorusField AndersonOperator3d::g_apply(const TorusField& uflat) const {
  check_band(uflat, "g_apply");
  UDecomp d = decompose_u(uflat);
  Accumulator acc(grid_);
  add_b_terms(acc, d, nullptr);
  TorusField LB = acc.result(band_);
  TorusField B = bessel_l_inv(LB);
  acc.add_lt(d.u, *cache_->get(Z_));
  for (int a = 0; a < 3; ++a) acc.add_lt(d.d[a], *cache_->get(Wt_[a]), 2.0);
  TorusField R = acc.result(band_) + B;

  // T1 + 2 LWt < grad u + LZ < u
  acc.add_lt(d.lap, *cache_->get(Z_));
  for (int a = 0; a < 3; ++a) {
    acc.add_lt(d.d[a], *cache_->get(dZ_[a]), 2.0);
    acc.add_lt(d.dlap[a], *cache_->get(Wt_[a]), 2.0);
    for (int b = 0; b < 3; ++b) acc.add_lt(d.dd[sym_index(a, b)], *cache_->get(dWt_[a][b]), 4.0);
    acc.add_lt(*cache_->get(LWt_[a]), d.d[a], 2.0);
  }
  acc.add_lt(*cache_->get(LZ_), d.u);
  // LZ o P_{>N} R + 2 LWt o grad P_{>N} R
  TorusField Rh = high_pass(R, N_);
  acc.add_resonant(*cache_->get(LZ_), decompose(grid_, Rh));
  auto gRh = gradient(Rh);
  for (int a = 0; a < 3; ++a) acc.add_resonant(*cache_->get(LWt_[a]), decompose(grid_, gRh[a]), 2.0);
  TorusField rest = acc.result(band_);
  return R + rest - LB - laplacian(low_pass(R, N_));
}

void AndersonOperator3d::add_lt_res(Accumulator& out, const BlockStack& f, int g, int h, double c) const {
  Accumulator acc(grid_);
  acc.add_lt(f, *cache_->get(g));
  out.add_resonant(decompose(grid_, acc.result(band_)), *cache_->get(h), c);
}

TorusField AndersonOperator3d::g_apply_expanded(const TorusField& uflat) const {
  check_band(uflat, "g_apply_expanded");
  UDecomp d = decompose_u(uflat);
  Accumulator acc(grid_);
  add_b_terms(acc, d, nullptr);
  TorusField B = bessel_l_inv(acc.result(band_));
  acc.add_lt(d.u, *cache_->get(Z_));
  for (int a = 0; a < 3; ++a) acc.add_lt(d.d[a], *cache_->get(Wt_[a]), 2.0);
  TorusField R = acc.result(band_) + B;
  TorusField Rl = low_pass(R, N_);

  Accumulator out(grid_);
  auto S = [this](int id) { return cache_->get(id); };
  // C(u, Z, LZ) + u o Q1
  add_lt_res(out, d.u, Z_, LZ_, 1.0);
  out.add_product(d.uv, Q1v_, -1.0);
  out.add_resonant(d.u, *S(Q1_));
  for (int a = 0; a < 3; ++a) {
    // 2 C(d_a u, Wt_a, LZ) + d_a u o Q2_a
    add_lt_res(out, d.d[a], Wt_[a], LZ_, 2.0);
    out.add_product(d.dv[a], Q2v_[a], -1.0);
    out.add_resonant(d.d[a], *S(Q2_[a]));
    // 2 C(d_a u, Z, LWt_a) + d_a u o Q3_a
    add_lt_res(out, d.d[a], Z_, LWt_[a], 2.0);
    out.add_product(d.dv[a], Q3v_[a], -1.0);
    out.add_resonant(d.d[a], *S(Q3_[a]));
    // 2 (u < d_a Z) o LWt_a
    add_lt_res(out, d.u, dZ_[a], LWt_[a], 2.0);
  }
  out.add_product(d.uv, Q4v_, -1.0);
  out.add_resonant(d.u, *S(Q4_));
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      int ab = sym_index(a, b);
      // 4 C(d_a d_b u, Wt_b, LWt_a) + 4 d_a d_b u (Wt_b o LWt_a)
      add_lt_res(out, d.dd[ab], Wt_[b], LWt_[a], 4.0);
      // 4 (d_b u < d_a Wt_b) o LWt_a
      add_lt_res(out, d.d[b], dWt_[a][b], LWt_[a], 4.0);
    }
  for (int b = 0; b < 3; ++b) {
    out.add_product(d.dv[b], Q5v_[b], -1.0);
    out.add_resonant(d.d[b], *S(Q5_[b]));
  }
  // LZ o (B - P_{<=N} R) + 2 LWt o grad (B - P_{<=N} R)
  TorusField D = B - Rl;
  out.add_resonant(*S(LZ_), decompose(grid_, D));
  auto gD = gradient(D);
  for (int a = 0; a < 3; ++a) out.add_resonant(*S(LWt_[a]), decompose(grid_, gD[a]), 2.0);
  return B - laplacian(Rl) + out.result(band_);
}

TorusField AndersonOperator3d::h3_apply(const TorusField& usharp, const TorusField* gamma_hint) const {
  check_band(usharp, "h3_apply");
  TorusField u = gamma_hint ? *gamma_hint : gamma(usharp);
  check_band(u, "h3_apply");
  Accumulator acc(grid_);
  acc.add_resonant(*cache_->get(LZ_), decompose(grid_, usharp));
  auto g = gradient(usharp);
  for (int a = 0; a < 3; ++a) acc.add_resonant(*cache_->get(LWt_[a]), decompose(grid_, g[a]), 2.0);
  return laplacian(usharp) + acc.result(band_) + g_apply(u) - u * shift_;
}

TorusField AndersonOperator3d::h3_direct(const TorusField& uflat) const {
  check_band(uflat, "h3_direct");
  Accumulator acc(grid_);
  acc.add_product(grid_->to_physical(uflat), LZv_);
  auto g = gradient(uflat);
  for (int a = 0; a < 3; ++a) acc.add_product(grid_->to_physical(g[a]), LWtv_[a], 2.0);
  return laplacian(uflat) + acc.result(band_) - uflat * shift_;
}

TorusField AndersonOperator3d::h3_sharp_apply(const TorusField& usharp, const TorusField* gamma_hint) const {
  return gamma_inverse(h3_apply(usharp, gamma_hint));
}

TorusField AndersonOperator3d::to_full(const TorusField& flat) const {
  check_band(flat, "to_full");
  auto fv = flat.values();
  auto ev = ewp_.real_values();
  for (std::size_t i = 0; i < fv.size(); ++i) fv[i] *= ev[i];
  return TorusField::from_values(3, M(), fv);
}

double AndersonOperator3d::mass(const TorusField& flat) const {
  check_band(flat, "mass");
  auto fv = flat.values();
  double s = 0.0;
  for (std::size_t i = 0; i < fv.size(); ++i) s += g_vals_[i] * std::norm(fv[i]);
  return s / double(fv.size());
}

double AndersonOperator3d::energy_form(const TorusField& u, const TorusField& v) const {
  check_band(u, "energy_form");
  check_band(v, "energy_form");
  auto uv = u.values(), vv = v.values();
  auto gu = gradient(u), gv = gradient(v);
  std::array<std::vector<cplx>, 3> guv, gvv;
  for (int a = 0; a < 3; ++a) {
    guv[a] = gu[a].values();
    gvv[a] = gv[a].values();
  }
  cplx s = 0.0;
  for (std::size_t i = 0; i < uv.size(); ++i) {
    cplx kin = 0.0;
    for (int a = 0; a < 3; ++a) kin += guv[a][i] * std::conj(gvv[a][i]);
    s += g_vals_[i] * kin + (shift_ * g_vals_[i] - h_vals_[i]) * uv[i] * std::conj(vv[i]);
  }
  return std::real(s) / double(uv.size());
}

const Matrix& AndersonOperator3d::stiffness() const {
  if (!pencil_) throw ConfigError("operator was built without the dense pencil");
  return S_;
}

const Matrix& AndersonOperator3d::gram() const {
  if (!pencil_) throw ConfigError("operator was built without the dense pencil");
  return G_;
}

const EigenSystem& AndersonOperator3d::eigensystem() const {
  std::call_once(eig_once_, [this] { eig_ = eigh_generalized(stiffness(), gram()); });
  return eig_;
}

TorusField AndersonOperator3d::random_band_field(std::uint64_t seed, double s_norm) const {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::vector<cplx> v(index_->size());
  for (auto& x : v) x = cplx(nd(gen), nd(gen));
  TorusField f = index_->from_vector(v);
  return f * (1.0 / sobolev_norm(f, s_norm));
}

int select_cutoff(const AndersonOperator3d& op, std::uint64_t probe_seed, double target) {
  for (int N = 2; N <= op.M() / 4; N *= 2)
    if (op.contraction_factor(N, probe_seed) <= target) return N;
  throw ConfigError("grid too small for this noise realization: no cutoff up to M/4 contracts");
}

}  // namespace andersonlab
