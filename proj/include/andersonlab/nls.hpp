#pragma once

#include <memory>
#include <vector>

#include "andersonlab/propagator.hpp"

namespace andersonlab {

// Gaussian coefficients with weight exp(-|k|^2 / (2 width^2)), unit L^2 norm.
TorusField smooth_random_field(int dim, int M, std::uint64_t seed, double width);
// Gaussian coefficients with weight <k>^{-(s + dim/2 + 0.05)} inside `band`, unit H^s norm.
TorusField hs_random_field(int dim, int M, std::uint64_t seed, double s, const Band& band);

struct LedgerRow {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double hs = 0.0;         // ||u#||_{H^s}
  double l4w_accum = 0.0;  // (int_0^t ||u#||_{W^{sigma,4}}^4)^{1/4}
};

struct EvolutionState {
  double t = 0.0;
  TorusField u;        // original coordinates
  TorusField u_sharp;  // filled when the ledger records sharp norms
  std::vector<LedgerRow> ledger;
};

struct ConservedReport {
  double mass = 0.0;
  double quadratic = 0.0;  // 1/2 energy_form(u, u)
  double quartic = 0.0;    // 1/4 ||u||_{L^4}^4
  double energy = 0.0;     // quadratic + quartic
};

struct PicardResult {
  EvolutionState state;
  std::vector<double> differences;  // sup over nodes of successive iterate differences in L^2
  bool converged = false;
  double contraction = 0.0;  // worst ratio of consecutive differences after the first
};

struct LwpReport {
  double s = 0.6, sigma = 0.55, T = 0.05, dt = 1e-3, delta = 1e-6, amplitude = 1.0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> quotients;  // sup_t ||u1# - u2#||_{H^s} / delta per seed
  std::vector<double> l4w;        // L^4_t W^{sigma,4} norm of the base solution per seed
  double max_quotient() const;
};

struct GwpReport {
  double T = 5.0, dt = 1e-3;
  double initial_norm = 0.0;  // ||u0||_{D(sqrt(-H))}
  double sup_ratio = 0.0;     // sup_t ||u(t)|| / ||u0|| in D(sqrt(-H))
  double mass_drift = 0.0;    // relative
  double energy_drift = 0.0;  // relative
  std::vector<LedgerRow> ledger;
};

// Cubic defocusing NLS i u_t = H u - |u|^2 u on the full collocation space of
// a 2d operator built with Band::box(). The linear part is the Galerkin
// operator (unshifted), the nonlinearity is pointwise on the grid, so both
// Strang sub-flows are exact and unitary.
class NlsSolver {
 public:
  explicit NlsSolver(std::shared_ptr<const AndersonOperator2d> op);

  const AndersonOperator2d& op() const { return *op_; }
  const AndersonGroup& group() const { return group_; }
  double shift() const { return op_->shift(); }

  // exact sub-flows
  TorusField linear_flow(const TorusField& u, double t) const;     // e^{-itH}
  TorusField nonlinear_flow(const TorusField& u, double t) const;  // u e^{+i|u|^2 t}
  // one Strang step N(dt/2) L(dt) N(dt/2); `nonlinear` = false drops N
  TorusField strang_step(const TorusField& u, double dt, bool nonlinear = true) const;

  struct RunOptions {
    double s = 0.6;
    double sigma = 0.55;
    int ledger_stride = 0;  // 0 keeps no ledger
    bool nonlinear = true;
  };
  EvolutionState run_split(const TorusField& u0, double T, double dt, const RunOptions& opt) const;
  PicardResult picard(const TorusField& u0_sharp, double T, int n_iter, int panels = 64, double tol = 1e-13) const;

  ConservedReport conserved(const TorusField& u) const;
  // ||u||_{D(sqrt(-H))} = energy_form(u, u)^{1/2}
  double energy_norm(const TorusField& u) const;

  LwpReport lwp_experiment(double s, const std::vector<std::uint64_t>& seeds, double delta, double T, double dt,
                           double amplitude, double sigma = 0.55) const;
  GwpReport gwp_experiment(std::uint64_t seed, double T, double dt, double amplitude, int ledger_stride = 50) const;

 private:
  LedgerRow ledger_row(double t, const TorusField& u, const TorusField& usharp, double s, double l4) const;

  std::shared_ptr<const AndersonOperator2d> op_;
  AndersonGroup group_;
};

}  // namespace andersonlab
