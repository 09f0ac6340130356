#include "andersonlab/strichartz.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "andersonlab/parallel.hpp"

namespace andersonlab {

namespace {

bool smooth235(int n) {
  for (int p : {2, 3, 5})
    while (n % p == 0) n /= p;
  return n == 1;
}

double spatial_lq(const TorusField& f, double q, int eval_grid) {
  if (eval_grid <= 0 || eval_grid == f.grid()) return lp_norm(f, q);
  auto grid = ProductGrid::get(f.dim(), f.grid(), eval_grid);
  return lp_norm_values(grid->to_physical(f), q);
}

}  // namespace

int evaluation_grid(double R) {
  int P = static_cast<int>(std::floor(4 * R)) + 1;
  while (!smooth235(P)) ++P;
  return P;
}

double spacetime_norm(const Flow& flow, double p, double q, double t0, double t1, int n_t, double sigma,
                      int eval_grid) {
  if (n_t < 32) throw ConfigError("spacetime_norm needs n_t >= 32");
  if (!(p >= 1) || !(q >= 1)) throw ConfigError("spacetime_norm needs p, q >= 1");
  if (!(t1 >= t0)) throw ConfigError("spacetime_norm needs t1 >= t0");
  const double h = (t1 - t0) / n_t;
  std::vector<double> g(std::size_t(n_t) + 1);
  for (int j = 0; j <= n_t; ++j) {
    TorusField u = flow(t0 + j * h);
    if (sigma != 0.0) u = bessel_power(u, sigma);
    g[j] = std::pow(spatial_lq(u, q, eval_grid), p);
  }
  double s = 0.5 * (g.front() + g.back());
  for (int j = 1; j < n_t; ++j) s += g[j];
  return std::pow(s * h, 1.0 / p);
}

TorusField shell_data(int dim, int M, int N, std::uint64_t seed, double s) {
  if (N < 1 || 2 * N > M) throw ConfigError("shell N must satisfy 1 <= N <= M/2");
  auto lat = Lattice::get(dim, M);
  std::mt19937_64 gen(seed * 1000003ULL + std::uint64_t(N));
  std::normal_distribution<double> nd;
  std::vector<cplx> c(lat->size);
  const double lo = 0.25 * N * N, hi = double(N) * N;
  for (std::size_t i = 0; i < lat->size; ++i) {
    double re = nd(gen), im = nd(gen);
    double n2 = lat->norm2[i];
    if (n2 > lo && n2 <= hi && !lat->has_nyquist(i)) c[i] = cplx(re, im);
  }
  TorusField f = TorusField::from_coeffs(dim, M, std::move(c));
  return f * (1.0 / sobolev_norm(f, s));
}

void ScalingReport::finalize() {
  const std::size_t nN = N_list.size(), nS = seeds.size();
  mean_norm.assign(nN, 0.0);
  std_norm.assign(nN, 0.0);
  std::vector<double> xs, ys, ya;
  for (std::size_t i = 0; i < nN; ++i) {
    std::vector<double> v, va;
    for (std::size_t j = 0; j < nS; ++j) {
      const ScalingCell& c = cells[i * nS + j];
      v.push_back(c.norm / c.data_norm);
      if (c.alt_norm > 0) va.push_back(c.norm / c.alt_norm);
    }
    mean_norm[i] = mean(v);
    std_norm[i] = nS > 1 ? stddev(v) : 0.0;
    xs.push_back(N_list[i]);
    ys.push_back(mean_norm[i]);
    if (has_alt) ya.push_back(mean(va));
  }
  if (nN >= 2) {
    fit = loglog_fit(xs, ys);
    if (has_alt) alt_fit = loglog_fit(xs, ya);
  }
  pass = nN >= 4 && nS >= 20 &&
         (two_sided ? std::abs(fit.slope - theory_slope) <= tolerance : fit.slope <= theory_slope + tolerance);
}

namespace {

void run_cells(ScalingReport& rep, const std::function<ScalingCell(int N, std::uint64_t seed)>& cell) {
  const std::size_t nS = rep.seeds.size();
  rep.cells.assign(rep.N_list.size() * nS, {});
  parallel_for(rep.cells.size(), [&](std::size_t k) {
    rep.cells[k] = cell(rep.N_list[k / nS], rep.seeds[k % nS]);
  });
  rep.finalize();
}

void check_pd(int d, double p) {
  if (d == 2 && p >= 4 - 1e-12) return;
  if (d == 3 && p >= 10.0 / 3.0 - 1e-12) return;
  throw ConfigError("Strichartz exponents need d = 2 with p >= 4 or d = 3 with p >= 10/3");
}

ScalingReport free_scaling(const char* tag, int d, double p, const std::vector<int>& N_list,
                           const std::vector<std::uint64_t>& seeds, const ScalingOptions& opt, bool short_time) {
  check_pd(d, p);
  ScalingReport rep;
  rep.generator = tag;
  rep.d = d;
  rep.p = rep.q = p;
  rep.M = opt.M;
  rep.n_t = opt.n_t;
  rep.N_list = N_list;
  rep.seeds = seeds;
  rep.tolerance = opt.tolerance;
  rep.two_sided = opt.two_sided;
  rep.theory_slope = 0.5 * d - (d + 2) / p - (short_time ? 1.0 / p : 0.0);
  run_cells(rep, [&](int N, std::uint64_t seed) {
    TorusField u = shell_data(d, opt.M, N, seed, 0.0);
    const int P = std::max(opt.M, evaluation_grid(N));
    const double t1 = short_time ? 1.0 / N : 1.0;
    Flow flow = [&](double t) { return free_propagate(u, t); };
    ScalingCell c{N, seed, spacetime_norm(flow, p, p, 0.0, t1, opt.n_t, 0.0, P), 1.0, 1.0};
    return c;
  });
  if (short_time) rep.interval = "[0,1/N]";
  return rep;
}

ScalingReport anderson_scaling(const char* tag, double p, double data_s, const std::vector<int>& N_list,
                               const std::vector<std::uint64_t>& seeds, const AndersonGroup& group,
                               const ScalingOptions& opt, double sigma, bool alt) {
  const int d = group.dim();
  ScalingReport rep;
  rep.generator = tag;
  rep.d = d;
  rep.p = rep.q = p;
  rep.sigma = sigma;
  rep.data_s = data_s;
  rep.M = group.M();
  rep.n_t = opt.n_t;
  rep.N_list = N_list;
  rep.seeds = seeds;
  rep.tolerance = opt.tolerance;
  rep.two_sided = opt.two_sided;
  rep.theory_slope = 0.0;
  rep.has_alt = alt;
  const double K = group.plan().K;
  for (int N : N_list)
    if (N > K) throw ConfigError("shell N = " + std::to_string(N) + " exceeds the band radius K");
  const int P = evaluation_grid(K);
  run_cells(rep, [&](int N, std::uint64_t seed) {
    TorusField u = shell_data(d, group.M(), N, seed, data_s);
    auto c = group.spectral_coeffs(group.gamma(u));
    Flow flow = [&](double t) { return group.sharp_from_spectral(c, t); };
    ScalingCell cell{N, seed, spacetime_norm(flow, p, p, 0.0, 1.0, opt.n_t, sigma, P), 1.0, l2_norm(u)};
    return cell;
  });
  return rep;
}

}  // namespace

ScalingReport laplacian_scaling(int d, double p, const std::vector<int>& N_list,
                                const std::vector<std::uint64_t>& seeds, const ScalingOptions& opt) {
  return free_scaling("laplacian", d, p, N_list, seeds, opt, false);
}

ScalingReport short_time_scaling(int d, double p, const std::vector<int>& N_list,
                                 const std::vector<std::uint64_t>& seeds, const ScalingOptions& opt) {
  return free_scaling("laplacian-short-time", d, p, N_list, seeds, opt, true);
}

ScalingReport anderson_scaling_2d(double r, const std::vector<int>& N_list, const std::vector<std::uint64_t>& seeds,
                                  const AndersonGroup& group, const ScalingOptions& opt, double sigma) {
  if (group.dim() != 2) throw ConfigError("anderson_scaling_2d needs a 2d group");
  if (!(r >= 4 - 1e-12)) throw ConfigError("anderson_scaling_2d needs r >= 4");
  return anderson_scaling("anderson2d", r, sigma + 1.0 - 4.0 / r, N_list, seeds, group, opt, sigma, false);
}

ScalingReport anderson_scaling_3d(double p, const std::vector<int>& N_list, const std::vector<std::uint64_t>& seeds,
                                  const AndersonGroup& group, const ScalingOptions& opt, double sigma) {
  if (group.dim() != 3) throw ConfigError("anderson_scaling_3d needs a 3d group");
  if (!(p >= 10.0 / 3.0 - 1e-12)) throw ConfigError("anderson_scaling_3d needs p >= 10/3");
  return anderson_scaling("anderson3d", p, sigma + 2.0 - 5.0 / p, N_list, seeds, group, opt, sigma, true);
}

}  // namespace andersonlab
