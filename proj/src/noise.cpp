#include "andersonlab/noise.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <set>

#include "andersonlab/paraproducts.hpp"

namespace andersonlab {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mode_seed(std::uint64_t seed, const Freq& k) {
  std::uint64_t h = mix64(seed);
  for (int a = 0; a < 3; ++a) h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(k[a]) + (1LL << 32)));
  return h;
}

// Two standard normals from a per-mode stream (Box-Muller on 53-bit uniforms).
std::pair<double, double> normal_pair(std::uint64_t s) {
  std::mt19937_64 gen(s);
  double u1 = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  double u2 = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  double r = std::sqrt(-2.0 * std::log1p(-u1));
  return {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
}

bool positive_half(const Freq& k) {
  for (int a = 0; a < 3; ++a) {
    if (k[a] > 0) return true;
    if (k[a] < 0) return false;
  }
  return false;
}

}  // namespace

WhiteNoiseSample sample_white_noise(int dim, int M, std::uint64_t seed) {
  TorusField f(dim, M);
  const Lattice& lat = f.lattice();
  std::vector<cplx> c(lat.size);
  const double h = std::sqrt(0.5);
  for (std::size_t i = 0; i < lat.size; ++i) {
    const Freq& k = lat.freq[i];
    if (lat.has_nyquist(i) || !positive_half(k)) continue;
    auto [a, b] = normal_pair(mode_seed(seed, k));
    c[i] = cplx(h * a, h * b);
    c[lat.neg[i]] = std::conj(c[i]);
  }
  if (dim != 3) c[0] = normal_pair(mode_seed(seed, {0, 0, 0})).first;
  WhiteNoiseSample s;
  s.field = TorusField::from_coeffs(dim, M, std::move(c), true);
  s.seed = seed;
  s.zero_mode_removed = dim == 3;
  return s;
}

double Mollifier::profile(double r) const {
  if (r < 0) r = -r;
  if (kind == Kind::Sharp) return r <= 1.0 ? 1.0 : 0.0;
  if (r <= 0.5) return 1.0;
  if (r >= 1.0) return 0.0;
  double c = std::cos(kPi * (r - 0.5));
  return c * c;
}

std::string Mollifier::name() const { return kind == Kind::Sharp ? "sharp" : "smooth"; }

Mollifier parse_mollifier(const std::string& kind, double eps) {
  if (!(eps > 0)) throw ConfigError("mollifier scale must be positive");
  if (kind == "sharp") return Mollifier::sharp(eps);
  if (kind == "smooth") return Mollifier::smooth(eps);
  throw ConfigError("unknown mollifier: " + kind);
}

TorusField mollify(const TorusField& xi, const Mollifier& m) {
  if (!(m.eps > 0)) throw ConfigError("mollifier scale must be positive");
  return apply_symbol(
      xi, [&m](const Freq&, int n2) { return cplx(m.weight(std::sqrt(double(n2)))); }, true);
}

namespace {

// Visit k with |k_i| < M/2 and theta(eps|k|) != 0.
template <typename F>
void for_each_support(int dim, const Mollifier& m, int M, F&& fn) {
  int R = std::min(M / 2 - 1, static_cast<int>(std::floor(m.support_radius() + 1e-12)));
  int r1 = R, r2 = dim >= 2 ? R : 0, r3 = dim >= 3 ? R : 0;
  for (int x = -r1; x <= r1; ++x)
    for (int y = -r2; y <= r2; ++y)
      for (int z = -r3; z <= r3; ++z) {
        int n2 = x * x + y * y + z * z;
        double w = m.weight(std::sqrt(double(n2)));
        if (w != 0.0) fn(x, y, z, n2, w);
      }
}

}  // namespace

double renorm_constant_2d(double eps, const Mollifier& m, int M) {
  Mollifier mm = m;
  mm.eps = eps;
  double s = 0.0;
  for_each_support(2, mm, M, [&](int, int, int, int n2, double w) { s += w * w / (1.0 + n2); });
  return s;
}

double wick_constant_2d(const Mollifier& m, int M) {
  double s = 0.0;
  for_each_support(2, m, M, [&](int, int, int, int n2, double w) { s += w * w / (1.0 + kFourPi2 * n2); });
  return s;
}

double renorm_constant_3d_first(const Mollifier& m, int M) {
  double s = 0.0;
  for_each_support(3, m, M, [&](int, int, int, int n2, double w) {
    if (n2 > 0) s += w * w / n2;
  });
  return s;
}

RenormConstants3d renorm_constants_3d(double eps, const Mollifier& m, int M, int cap) {
  Mollifier mm = m;
  mm.eps = eps;
  RenormConstants3d out;
  out.c1 = renorm_constant_3d_first(mm, M);
  int R = std::min(M / 2 - 1, static_cast<int>(std::floor(mm.support_radius() + 1e-12)));
  if (R > cap)
    throw ConfigError("double-sum constant refuses mode radius " + std::to_string(R) + " above cap " +
                      std::to_string(cap) + "; lower M or raise eps");
  struct Pt {
    int x, y, z, n2;
    double w2;
  };
  std::vector<Pt> pts;
  for_each_support(3, mm, M, [&](int x, int y, int z, int n2, double w) {
    if (n2 > 0) pts.push_back({x, y, z, n2, w * w});
  });
  // The summand is invariant under the 48 signed permutations applied to both
  // arguments, so k1 runs over one representative per orbit.
  double total = 0.0;
  for (const auto& a : pts) {
    if (!(a.x >= a.y && a.y >= a.z && a.z >= 0)) continue;
    std::set<std::array<int, 3>> orbit;
    int v[3] = {a.x, a.y, a.z};
    int perm[3] = {0, 1, 2};
    do {
      for (int s = 0; s < 8; ++s) {
        std::array<int, 3> img{};
        for (int c = 0; c < 3; ++c) img[c] = ((s >> c) & 1 ? -1 : 1) * v[perm[c]];
        orbit.insert(img);
      }
    } while (std::next_permutation(perm, perm + 3));
    double inner = 0.0;
    for (const auto& b : pts) {
      int dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
      int d2 = dx * dx + dy * dy + dz * dz;
      if (d2 == 0) continue;
      double dot = std::abs(double(a.x * b.x + a.y * b.y + a.z * b.z));
      inner += b.w2 * dot / (double(d2) * double(b.n2));
    }
    total += double(orbit.size()) * a.w2 / (double(a.n2) * double(a.n2)) * inner;
  }
  out.c2 = total;
  return out;
}

double wick_constant_3d_first(const Mollifier& m, int M) {
  return renorm_constant_3d_first(m, M) / kFourPi2;
}

double wick_constant_3d_second(const Mollifier& m, int M) {
  int R = std::min(M / 2 - 1, static_cast<int>(std::floor(m.support_radius() + 1e-12)));
  if (R < 1) return 0.0;
  int G = 4 * R + 2;
  auto smooth = [](int n) {
    for (int p : {2, 3, 5})
      while (n % p == 0) n /= p;
    return n == 1;
  };
  while (!smooth(G)) ++G;
  const std::size_t n = std::size_t(G) * G * G;
  auto idx = [G](int x, int y, int z) {
    auto w = [G](int v) { return std::size_t(((v % G) + G) % G); };
    return (w(x) * G + w(y)) * G + w(z);
  };
  // sum_{a,b} (g_ab * g_ab)(q), g_ab(k) = k_a k_b theta^2 / |k|^4
  std::vector<double> conv(n, 0.0);
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) {
      std::vector<cplx> g(n);
      for_each_support(3, m, M, [&](int x, int y, int z, int n2, double w) {
        if (n2 == 0) return;
        int k[3] = {x, y, z};
        g[idx(x, y, z)] = double(k[a]) * k[b] * w * w / (double(n2) * n2);
      });
      fft_inplace(3, G, g.data(), Direction::ToPhysical);
      for (auto& v : g) v *= v;
      fft_inplace(3, G, g.data(), Direction::ToFourier);
      double mult = a == b ? 1.0 : 2.0;
      for (std::size_t i = 0; i < n; ++i) conv[i] += mult * g[i].real();
    }
  const double pref = 2.0 / (kFourPi2 * kFourPi2);
  int Q = std::min(2 * R, M / 2 - 1);
  double s = 0.0;
  for (int x = -Q; x <= Q; ++x)
    for (int y = -Q; y <= Q; ++y)
      for (int z = -Q; z <= Q; ++z) {
        int q2 = x * x + y * y + z * z;
        if (q2 == 0) continue;
        double l = 1.0 + kFourPi2 * q2;
        s += kFourPi2 * q2 / (l * l) * pref * conv[idx(x, y, z)];
      }
  return s;
}

// ---------------------------------------------------------------------------
// 2d enhancement

EnhancedNoise2d EnhancedNoise2d::zero(int M) {
  EnhancedNoise2d e;
  e.M = M;
  e.mollifier = Mollifier::sharp(4.0 / M);
  e.amplitude = 0.0;
  e.xi = TorusField(2, M);
  e.X = TorusField(2, M);
  e.xi2 = TorusField(2, M);
  e.compute_norms();
  return e;
}

void EnhancedNoise2d::compute_norms() {
  norms.clear();
  norms["xi_holder_alpha"] = holder_norm(xi, alpha);
  norms["xi2_holder_2alpha_plus_2"] = holder_norm(xi2, 2 * alpha + 2);
  norms["X_holder_alpha_plus_2"] = holder_norm(X, alpha + 2);
}

EnhancedNoise2d enhance_2d(const TorusField& xi, const Mollifier& m, double amplitude,
                           std::uint64_t seed) {
  if (xi.dim() != 2) throw ConfigError("enhance_2d needs a 2d field");
  const int M = xi.grid();
  EnhancedNoise2d e;
  e.M = M;
  e.mollifier = m;
  e.amplitude = amplitude;
  e.seed = seed;
  e.xi = (mollify(xi, m) * amplitude).as_real();
  e.X = bessel_l_inv(e.xi);
  e.c_eps = renorm_constant_2d(m.eps, m, M);
  e.kappa = amplitude * amplitude * wick_constant_2d(m, M);
  TorusField res = resonant(e.xi, e.X, Band::symmetric_box());
  auto c = std::vector<cplx>(res.coeffs().begin(), res.coeffs().end());
  c[0] -= e.kappa;
  e.xi2 = TorusField::from_coeffs(2, M, std::move(c), true);
  e.compute_norms();
  return e;
}

// ---------------------------------------------------------------------------
// 3d enhancement

EnhancedNoise3d EnhancedNoise3d::zero(int M) {
  EnhancedNoise3d e;
  e.M = M;
  e.mollifier = Mollifier::sharp(4.0 / M);
  e.amplitude = 0.0;
  TorusField z(3, M);
  e.xi = e.X = e.X1 = e.X2 = e.X3 = e.X4 = e.X5 = e.W = e.Z = z;
  e.Wt = {z, z, z};
  e.compute_norms();
  return e;
}

void EnhancedNoise3d::compute_norms() {
  const double d = 0.1;
  norms.clear();
  norms["X_holder"] = holder_norm(X, 0.5 - d);
  norms["X1_holder"] = holder_norm(X1, 1.0 - d);
  norms["X2_holder"] = holder_norm(X2, 1.5 - d);
  norms["X3_holder"] = holder_norm(X3, 1.5 - d);
  norms["X4_holder"] = holder_norm(X4, 2.0 - d);
  norms["X5_holder"] = holder_norm(X5, -2 * d);
}

TorusField EnhancedNoise3d::LZ() const { return bessel_l(Z); }

std::vector<TorusField> EnhancedNoise3d::LWt() const { return gradient(W); }

namespace {

// sum_a f_a g_a on a padded grid, truncated to the symmetric box
TorusField dot_product(const std::vector<TorusField>& f, const std::vector<TorusField>& g) {
  const int dim = f[0].dim(), M = f[0].grid();
  auto grid = ProductGrid::for_bands(dim, M, Band::symmetric_box(), Band::symmetric_box(),
                                     Band::symmetric_box());
  Accumulator acc(grid);
  for (std::size_t a = 0; a < f.size(); ++a) acc.add_product(grid->to_physical(f[a]), grid->to_physical(g[a]));
  return acc.result(Band::symmetric_box(), true);
}

TorusField minus_constant(TorusField f, double c) {
  auto v = std::vector<cplx>(f.coeffs().begin(), f.coeffs().end());
  v[0] -= c;
  return TorusField::from_coeffs(f.dim(), f.grid(), std::move(v), true);
}

}  // namespace

EnhancedNoise3d enhance_3d(const TorusField& xi, const Mollifier& m, double amplitude,
                           std::uint64_t seed, bool paper_c2) {
  if (xi.dim() != 3) throw ConfigError("enhance_3d needs a 3d field");
  const int M = xi.grid();
  EnhancedNoise3d e;
  e.M = M;
  e.mollifier = m;
  e.amplitude = amplitude;
  e.seed = seed;
  {
    auto c = std::vector<cplx>(xi.coeffs().begin(), xi.coeffs().end());
    c[0] = 0.0;
    e.xi = (mollify(TorusField::from_coeffs(3, M, std::move(c), true), m) * amplitude).as_real();
  }
  const double a2 = amplitude * amplitude;
  e.c1_eps = renorm_constant_3d_first(m, M);
  if (paper_c2) {
    int R = std::min(M / 2 - 1, static_cast<int>(std::floor(m.support_radius() + 1e-12)));
    e.c2_eps = R <= 16 ? renorm_constants_3d(m.eps, m, M).c2 : std::nan("");
  } else {
    e.c2_eps = std::nan("");
  }
  e.c1w = a2 * wick_constant_3d_first(m, M);
  e.c2w = a2 * a2 * wick_constant_3d_second(m, M);

  e.X = neg_laplacian_inv(e.xi);
  auto gX = gradient(e.X);
  e.X1 = bessel_l_inv(minus_constant(dot_product(gX, gX), e.c1w));
  auto gX1 = gradient(e.X1);
  e.X2 = bessel_l_inv(dot_product(gX, gX1)) * 2.0;
  auto gX2 = gradient(e.X2);
  e.X3 = bessel_l_inv(dot_product(gX, gX2));
  e.X4 = bessel_l_inv(minus_constant(dot_product(gX1, gX1), e.c2w));
  auto gX3 = gradient(e.X3);
  e.X5 = TorusField(3, M);
  for (int a = 0; a < 3; ++a) e.X5 += resonant(gX[a], gX3[a], Band::symmetric_box());
  e.X5 = e.X5.as_real();

  e.W = (e.X + e.X1 + e.X2).as_real();
  e.Wt.clear();
  for (const auto& g : gradient(e.W)) e.Wt.push_back(bessel_l_inv(g));
  TorusField inner = dot_product(gX2, gX2) + dot_product(gX1, gX2) * 2.0 + e.X1 + e.X2;
  e.Z = (bessel_l_inv(inner) + e.X4 + e.X3 * 2.0).as_real();
  e.compute_norms();
  return e;
}

}  // namespace andersonlab
