#include "andersonlab/nls.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "andersonlab/parallel.hpp"

namespace andersonlab {

namespace {

TorusField gaussian_field(int dim, int M, std::uint64_t seed, const std::function<double(std::size_t)>& weight) {
  auto lat = Lattice::get(dim, M);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::vector<cplx> c(lat->size);
  for (std::size_t i = 0; i < lat->size; ++i) {
    double re = nd(gen), im = nd(gen);
    c[i] = cplx(re, im) * weight(i);
  }
  return TorusField::from_coeffs(dim, M, std::move(c));
}

}  // namespace

TorusField smooth_random_field(int dim, int M, std::uint64_t seed, double width) {
  auto lat = Lattice::get(dim, M);
  TorusField f = gaussian_field(dim, M, seed, [&](std::size_t i) {
    if (lat->has_nyquist(i)) return 0.0;
    return std::exp(-0.5 * lat->norm2[i] / (width * width));
  });
  return f * (1.0 / l2_norm(f));
}

TorusField hs_random_field(int dim, int M, std::uint64_t seed, double s, const Band& band) {
  auto lat = Lattice::get(dim, M);
  TorusField f = gaussian_field(dim, M, seed, [&](std::size_t i) {
    if (!band.contains(lat->freq[i], lat->norm2[i], M)) return 0.0;
    return std::pow(1.0 + kFourPi2 * lat->norm2[i], -0.5 * (s + 0.5 * dim + 0.05));
  });
  return f * (1.0 / sobolev_norm(f, s));
}

double LwpReport::max_quotient() const {
  return quotients.empty() ? 0.0 : *std::max_element(quotients.begin(), quotients.end());
}

NlsSolver::NlsSolver(std::shared_ptr<const AndersonOperator2d> op) : op_(op), group_(op) {
  if (op_->band().kind != Band::Kind::Box)
    throw ConfigError("the NLS solver needs an operator on the full grid band (Band::box())");
}

TorusField NlsSolver::linear_flow(const TorusField& u, double t) const {
  return group_.propagate(u, t) * std::exp(cplx(0.0, -t * shift()));
}

TorusField NlsSolver::nonlinear_flow(const TorusField& u, double t) const {
  auto v = u.values();
  for (auto& x : v) x *= std::exp(cplx(0.0, std::norm(x) * t));
  return TorusField::from_values(u.dim(), u.grid(), v);
}

TorusField NlsSolver::strang_step(const TorusField& u, double dt, bool nonlinear) const {
  if (!nonlinear) return linear_flow(u, dt);
  return nonlinear_flow(linear_flow(nonlinear_flow(u, 0.5 * dt), dt), 0.5 * dt);
}

ConservedReport NlsSolver::conserved(const TorusField& u) const {
  ConservedReport r;
  double n2 = l2_norm(u);
  r.mass = n2 * n2;
  r.quadratic = 0.5 * op_->energy_form(u, u);
  double l4 = lp_norm(u, 4.0);
  r.quartic = 0.25 * l4 * l4 * l4 * l4;
  r.energy = r.quadratic + r.quartic;
  return r;
}

double NlsSolver::energy_norm(const TorusField& u) const { return std::sqrt(std::max(0.0, op_->energy_form(u, u))); }

LedgerRow NlsSolver::ledger_row(double t, const TorusField& u, const TorusField& usharp, double s, double l4) const {
  ConservedReport c = conserved(u);
  return {t, c.mass, c.energy, sobolev_norm(usharp, s), l4};
}

namespace {

double w_sigma_4(const TorusField& f, double sigma) {
  double n = lp_norm(bessel_power(f, sigma), 4.0);
  return n * n * n * n;
}

}  // namespace

EvolutionState NlsSolver::run_split(const TorusField& u0, double T, double dt, const RunOptions& opt) const {
  if (!(dt > 0)) throw ConfigError("dt must be positive");
  const int steps = static_cast<int>(std::llround(T / dt));
  if (steps < 1 || std::abs(steps * dt - T) > 1e-9 * std::max(1.0, T))
    throw ConfigError("T must be a positive multiple of dt");
  EvolutionState st;
  st.u = u0;
  double accum = 0.0, prev_w = 0.0, prev_t = 0.0;
  auto record = [&](double t) {
    st.u_sharp = op_->gamma_inverse(st.u);
    double w = w_sigma_4(st.u_sharp, opt.sigma);
    if (!st.ledger.empty()) accum += 0.5 * (t - prev_t) * (w + prev_w);
    prev_w = w;
    prev_t = t;
    st.ledger.push_back(ledger_row(t, st.u, st.u_sharp, opt.s, std::pow(accum, 0.25)));
  };
  if (opt.ledger_stride > 0) record(0.0);
  for (int n = 1; n <= steps; ++n) {
    st.u = strang_step(st.u, dt, opt.nonlinear);
    st.t = n * dt;
    if (opt.ledger_stride > 0 && (n % opt.ledger_stride == 0 || n == steps)) record(st.t);
  }
  st.t = T;
  if (opt.ledger_stride == 0) st.u_sharp = op_->gamma_inverse(st.u);
  return st;
}

PicardResult NlsSolver::picard(const TorusField& u0_sharp, double T, int n_iter, int panels, double tol) const {
  if (!(T > 0) || panels < 1 || n_iter < 1) throw ConfigError("picard needs T > 0, panels >= 1, n_iter >= 1");
  static const double gl_x[4] = {0.5 * (1 - 0.8611363115940526), 0.5 * (1 - 0.3399810435848563),
                                 0.5 * (1 + 0.3399810435848563), 0.5 * (1 + 0.8611363115940526)};
  static const double gl_w[4] = {0.5 * 0.3478548451374538, 0.5 * 0.6521451548625461, 0.5 * 0.6521451548625461,
                                 0.5 * 0.3478548451374538};
  // S[j][m] = int_0^{x_j} l_m(x) dx for the Lagrange basis on the nodes
  double S[4][4];
  auto lagrange = [&](int m, double x) {
    double v = 1.0;
    for (int q = 0; q < 4; ++q)
      if (q != m) v *= (x - gl_x[q]) / (gl_x[m] - gl_x[q]);
    return v;
  };
  for (int j = 0; j < 4; ++j)
    for (int m = 0; m < 4; ++m) {
      double s = 0.0;
      for (int q = 0; q < 4; ++q) s += gl_w[q] * lagrange(m, gl_x[j] * gl_x[q]);
      S[j][m] = gl_x[j] * s;
    }

  const EigenSystem& es = group_.eigensystem();
  const BandIndex& idx = op_->index();
  const std::size_t n = idx.size();
  std::vector<double> mu(es.values);
  for (auto& m : mu) m += shift();
  const double h = T / panels;
  const std::size_t nodes = std::size_t(panels) * 4;
  std::vector<double> tau(nodes);
  for (std::size_t q = 0; q < nodes; ++q) tau[q] = h * (double(q / 4) + gl_x[q % 4]);

  // interaction picture b(t) = e^{it mu} V^H u(t)
  TorusField u0 = op_->gamma(u0_sharp);
  std::vector<cplx> a0 = matvec(es.vectors, idx.to_vector(u0), true);
  std::vector<std::vector<cplx>> b(nodes, a0), f(nodes);

  PicardResult res;
  for (int it = 0; it < n_iter; ++it) {
    parallel_for(nodes, [&](std::size_t q) {
      std::vector<cplx> a(n);
      for (std::size_t j = 0; j < n; ++j) a[j] = b[q][j] * std::exp(cplx(0.0, -tau[q] * mu[j]));
      TorusField u = idx.from_vector(matvec(es.vectors, a));
      auto v = u.values();
      for (auto& x : v) x *= std::norm(x);
      auto g = matvec(es.vectors, idx.to_vector(TorusField::from_values(u.dim(), u.grid(), v)), true);
      for (std::size_t j = 0; j < n; ++j) g[j] *= cplx(0.0, 1.0) * std::exp(cplx(0.0, tau[q] * mu[j]));
      f[q] = std::move(g);
    });
    std::vector<cplx> start = a0;
    double diff = 0.0;
    for (int p = 0; p < panels; ++p) {
      for (int j = 0; j < 4; ++j) {
        std::vector<cplx> nb = start;
        for (int m = 0; m < 4; ++m) {
          const auto& fm = f[std::size_t(p) * 4 + m];
          for (std::size_t k = 0; k < n; ++k) nb[k] += h * S[j][m] * fm[k];
        }
        auto& old = b[std::size_t(p) * 4 + j];
        double d = 0.0;
        for (std::size_t k = 0; k < n; ++k) d += std::norm(nb[k] - old[k]);
        diff = std::max(diff, std::sqrt(d));
        old = std::move(nb);
      }
      for (int m = 0; m < 4; ++m) {
        const auto& fm = f[std::size_t(p) * 4 + m];
        for (std::size_t k = 0; k < n; ++k) start[k] += h * gl_w[m] * fm[k];
      }
    }
    res.differences.push_back(diff);
    if (it == n_iter - 1 || diff <= tol) {
      // b at T from the last panel sum
      std::vector<cplx> aT(n);
      for (std::size_t j = 0; j < n; ++j) aT[j] = start[j] * std::exp(cplx(0.0, -T * mu[j]));
      res.state.u = idx.from_vector(matvec(es.vectors, aT));
      res.converged = diff <= tol;
      break;
    }
    std::size_t m = res.differences.size();
    if (m >= 3 && res.differences[m - 1] > res.differences[m - 2] && res.differences[m - 2] > res.differences[m - 3])
      throw ConvergenceError("Picard iterates diverge (difference ratio " +
                             std::to_string(res.differences[m - 1] / res.differences[m - 2]) + "); reduce T");
  }
  for (std::size_t i = 2; i < res.differences.size(); ++i)
    if (res.differences[i - 1] > 0)
      res.contraction = std::max(res.contraction, res.differences[i] / res.differences[i - 1]);
  res.state.t = T;
  res.state.u_sharp = op_->gamma_inverse(res.state.u);
  return res;
}

LwpReport NlsSolver::lwp_experiment(double s, const std::vector<std::uint64_t>& seeds, double delta, double T,
                                    double dt, double amplitude, double sigma) const {
  if (!(s > 0.5 && s < 1.0)) throw ConfigError("lwp_experiment needs s in (1/2, 1)");
  LwpReport rep;
  rep.s = s;
  rep.sigma = sigma;
  rep.T = T;
  rep.dt = dt;
  rep.delta = delta;
  rep.amplitude = amplitude;
  rep.seeds = seeds;
  rep.quotients.assign(seeds.size(), 0.0);
  rep.l4w.assign(seeds.size(), 0.0);
  const int steps = static_cast<int>(std::llround(T / dt));
  if (steps < 1) throw ConfigError("T must be at least dt");
  const int M = op_->M();
  parallel_for(seeds.size(), [&](std::size_t i) {
    TorusField us = hs_random_field(2, M, seeds[i], s, Band::box()) * amplitude;
    TorusField ps = hs_random_field(2, M, seeds[i] ^ 0x9e3779b97f4a7c15ULL, s, Band::box()) * delta;
    TorusField u = op_->gamma(us), v = op_->gamma(us + ps);
    double q = 0.0, accum = 0.0;
    double prev = w_sigma_4(us, sigma);
    for (int k = 1; k <= steps; ++k) {
      u = strang_step(u, dt);
      v = strang_step(v, dt);
      if (delta > 0) q = std::max(q, sobolev_norm(op_->gamma_inverse(v - u), s) / delta);
      double w = w_sigma_4(op_->gamma_inverse(u), sigma);
      accum += 0.5 * dt * (w + prev);
      prev = w;
    }
    rep.quotients[i] = q;
    rep.l4w[i] = std::pow(accum, 0.25);
  });
  return rep;
}

GwpReport NlsSolver::gwp_experiment(std::uint64_t seed, double T, double dt, double amplitude, int ledger_stride) const {
  GwpReport rep;
  rep.T = T;
  rep.dt = dt;
  const int M = op_->M();
  TorusField us = smooth_random_field(2, M, seed, 3.0);
  us *= amplitude / sobolev_norm(us, 1.0);
  TorusField u = op_->gamma(us);
  rep.initial_norm = energy_norm(u);
  ConservedReport c0 = conserved(u);
  const int steps = static_cast<int>(std::llround(T / dt));
  rep.sup_ratio = 1.0;
  auto check = [&](int k) {
    ConservedReport c = conserved(u);
    rep.sup_ratio = std::max(rep.sup_ratio, energy_norm(u) / rep.initial_norm);
    rep.mass_drift = std::max(rep.mass_drift, std::abs(c.mass - c0.mass) / c0.mass);
    rep.energy_drift = std::max(rep.energy_drift, std::abs(c.energy - c0.energy) / c0.energy);
    rep.ledger.push_back({k * dt, c.mass, c.energy, 0.0, 0.0});
  };
  check(0);
  for (int k = 1; k <= steps; ++k) {
    u = strang_step(u, dt);
    if (k % std::max(1, ledger_stride) == 0 || k == steps) check(k);
  }
  return rep;
}

}  // namespace andersonlab
