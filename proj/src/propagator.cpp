#include "andersonlab/propagator.hpp"

#include <algorithm>
#include <cmath>

#include "andersonlab/parallel.hpp"

namespace andersonlab {

std::string to_string(Generator g) {
  switch (g) {
    case Generator::Free:
      return "free";
    case Generator::Anderson2d:
      return "anderson2d";
    case Generator::Anderson3d:
      return "anderson3d";
  }
  return "unknown";
}

std::string to_string(PropagationMethod m) {
  switch (m) {
    case PropagationMethod::Spectral:
      return "spectral-multiplier";
    case PropagationMethod::Dense:
      return "dense-eigendecomposition";
    case PropagationMethod::Krylov:
      return "krylov";
  }
  return "unknown";
}

TorusField free_propagate(const TorusField& u, double t) {
  return apply_symbol(
      u, [t](const Freq&, int n2) { return std::exp(cplx(0.0, kFourPi2 * n2 * t)); }, false);
}

AndersonGroup::AndersonGroup(std::shared_ptr<const AndersonOperator2d> op, PropagationMethod method, int krylov_dim)
    : op2_(std::move(op)) {
  if (!op2_) throw ConfigError("null operator");
  if (method == PropagationMethod::Spectral) throw ConfigError("the spectral multiplier method is for the free group");
  plan_ = {Generator::Anderson2d, method, op2_->K(), krylov_dim, 0.0};
  int max_n2 = 0;
  const auto& lat = *Lattice::get(2, op2_->M());
  for (std::size_t n = 0; n < op2_->index().size(); ++n)
    max_n2 = std::max(max_n2, lat.norm2[op2_->index().lattice_index(n)]);
  double xi_sum = 0.0;
  for (auto c : op2_->noise().xi.coeffs()) xi_sum += std::abs(c);
  spread_ = kFourPi2 * max_n2 + op2_->shift() + std::abs(op2_->kappa()) + xi_sum;
}

AndersonGroup::AndersonGroup(std::shared_ptr<const AndersonOperator3d> op) : op3_(std::move(op)) {
  if (!op3_) throw ConfigError("null operator");
  if (!op3_->has_pencil()) throw ConfigError("3d propagation needs the dense pencil (K < M/4)");
  plan_ = {Generator::Anderson3d, PropagationMethod::Dense, op3_->K(), 0, 0.0};
}

int AndersonGroup::M() const { return op2_ ? op2_->M() : op3_->M(); }
double AndersonGroup::shift() const { return op2_ ? op2_->shift() : op3_->shift(); }
int AndersonGroup::cutoff() const { return op2_ ? op2_->cutoff() : op3_->cutoff(); }
const BandIndex& AndersonGroup::index() const { return op2_ ? op2_->index() : op3_->index(); }

const EigenSystem& AndersonGroup::eigensystem() const {
  return op2_ ? op2_->eigensystem() : op3_->eigensystem();
}

std::vector<cplx> AndersonGroup::spectral_coeffs(const TorusField& u) const {
  auto x = index().to_vector(u);
  if (op3_) x = matvec(op3_->gram(), x);
  return matvec(eigensystem().vectors, x, true);
}

namespace {

std::vector<cplx> phased(const std::vector<cplx>& c, const std::vector<double>& lambda, double t) {
  std::vector<cplx> r(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) r[j] = c[j] * std::exp(cplx(0.0, -t * lambda[j]));
  return r;
}

}  // namespace

TorusField AndersonGroup::from_spectral(const std::vector<cplx>& c, double t) const {
  const EigenSystem& es = eigensystem();
  return index().from_vector(matvec(es.vectors, phased(c, es.values, t)));
}

TorusField AndersonGroup::sharp_from_spectral(const std::vector<cplx>& c, double t) const {
  if (!has_sharp_basis()) return gamma_inverse(from_spectral(c, t));
  return index().from_vector(matvec(sharp_basis_, phased(c, eigensystem().values, t)));
}

void AndersonGroup::prepare_sharp_basis() {
  if (has_sharp_basis()) return;
  const EigenSystem& es = eigensystem();
  const int n = es.vectors.cols();
  Matrix B(n, n);
  parallel_for(std::size_t(n), [&](std::size_t j) {
    std::vector<cplx> v(es.vectors.data() + j * n, es.vectors.data() + (j + 1) * n);
    auto w = index().to_vector(gamma_inverse(index().from_vector(v)));
    std::copy(w.begin(), w.end(), B.data() + j * n);
  });
  sharp_basis_ = std::move(B);
}

TorusField AndersonGroup::propagate_dense(const TorusField& u, double t) const {
  return from_spectral(spectral_coeffs(u), t);
}

int AndersonGroup::krylov_substeps(double t) const {
  if (plan_.substep_dt > 0) return std::max(1, static_cast<int>(std::ceil(std::abs(t) / plan_.substep_dt)));
  return std::max(1, static_cast<int>(std::ceil(std::abs(t) * spread_ / 10.0)));
}

TorusField AndersonGroup::propagate_krylov(const TorusField& u, double t) const {
  if (!op2_) throw ConfigError("krylov propagation is implemented for the 2d generator");
  const BandIndex& idx = index();
  const std::size_t n = idx.size();
  LinearMap A = [this, &idx, n](const cplx* in, cplx* out) {
    auto y = idx.to_vector(op2_->galerkin_apply(idx.from_vector(std::vector<cplx>(in, in + n))));
    std::copy(y.begin(), y.end(), out);
  };
  return idx.from_vector(krylov_expm(A, idx.to_vector(u), t, plan_.krylov_dim, krylov_substeps(t)));
}

TorusField AndersonGroup::propagate(const TorusField& u, double t) const {
  if (plan_.method == PropagationMethod::Krylov) return propagate_krylov(u, t);
  return propagate_dense(u, t);
}

TorusField AndersonGroup::gamma(const TorusField& usharp) const {
  return op2_ ? op2_->gamma(usharp) : op3_->gamma(usharp);
}

TorusField AndersonGroup::gamma_inverse(const TorusField& u) const {
  return op2_ ? op2_->gamma_inverse(u) : op3_->gamma_inverse(u);
}

TorusField AndersonGroup::h_sharp(const TorusField& usharp, const TorusField* gamma_hint) const {
  return op2_ ? op2_->h_sharp_apply(usharp, gamma_hint) : op3_->h3_sharp_apply(usharp, gamma_hint);
}

TorusField AndersonGroup::sharp_propagate(const TorusField& usharp, double t) const {
  if (plan_.method == PropagationMethod::Krylov) return gamma_inverse(propagate_krylov(gamma(usharp), t));
  return sharp_from_spectral(spectral_coeffs(gamma(usharp)), t);
}

double AndersonGroup::mass(const TorusField& u) const {
  if (op3_) return op3_->mass(u);
  double n = l2_norm(u);
  return n * n;
}

double AndersonGroup::energy(const TorusField& u) const {
  return op2_ ? op2_->energy_form(u, u) : op3_->energy_form(u, u);
}

DuhamelResult duhamel_difference(const AndersonGroup& group, const TorusField& usharp, double t, double t0,
                                 int quad_steps) {
  if (quad_steps < 8) throw ConfigError("duhamel_difference needs quad_steps >= 8");
  static const double node[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                 0.8611363115940526};
  static const double weight[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                   0.3478548451374538};
  const double s = group.shift();
  auto c = group.spectral_coeffs(group.gamma(usharp));
  // e^{-i tau Hs} u# in sharp coordinates
  auto sharp_at = [&](double tau) { return group.sharp_from_spectral(c, tau) * std::exp(cplx(0.0, -tau * s)); };

  DuhamelResult r;
  r.lhs = sharp_at(t) - free_propagate(sharp_at(t0), t - t0);

  const double h = (t - t0) / quad_steps;
  std::vector<TorusField> parts(std::size_t(quad_steps) * 4);
  parallel_for(parts.size(), [&](std::size_t q) {
    const double tau = t0 + h * (double(q / 4) + 0.5 * (1.0 + node[q % 4]));
    const cplx ph = std::exp(cplx(0.0, -tau * s));
    TorusField flat = group.from_spectral(c, tau) * ph;
    TorusField w = group.has_sharp_basis() ? group.sharp_from_spectral(c, tau) * ph : group.gamma_inverse(flat);
    TorusField g = group.h_sharp(w, &flat) + w * s - laplacian(w);
    parts[q] = free_propagate(g, t - tau) * (0.5 * h * weight[q % 4]);
  });
  r.rhs = TorusField::zeros(usharp.dim(), usharp.grid());
  for (const auto& p : parts) r.rhs += p;
  r.rhs *= cplx(0.0, -1.0);

  double scale = std::max(l2_norm(r.lhs), l2_norm(r.rhs));
  r.residual = scale > 0 ? l2_norm(r.lhs - r.rhs) / scale : 0.0;
  return r;
}

}  // namespace andersonlab
