#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "andersonlab/linalg.hpp"
#include "andersonlab/noise.hpp"
#include "andersonlab/paraproducts.hpp"

namespace andersonlab {

// Iteration record of a fixed-point solve.
struct FixedPointLog {
  std::vector<double> differences;  // successive differences in the iteration norm
  int iterations = 0;
  bool converged = false;
  double max_ratio() const;  // worst ratio of consecutive differences
};

// Fixed-point tolerance and norm settings shared by the 2d and 3d maps.
struct GammaSettings {
  double norm_s = 0.9;
  double tol = 1e-10;
  int max_iter = 200;
};

// Ordering of the Galerkin modes of a band.
class BandIndex {
 public:
  BandIndex(int dim, int M, const Band& band);
  int dim() const { return dim_; }
  int M() const { return M_; }
  const Band& band() const { return band_; }
  std::size_t size() const { return modes_.size(); }
  std::size_t lattice_index(std::size_t n) const { return modes_[n]; }
  std::vector<cplx> to_vector(const TorusField& f) const;  // throws if f leaves the band
  TorusField from_vector(const std::vector<cplx>& v) const;

 private:
  int dim_, M_;
  Band band_;
  std::vector<std::size_t> modes_;
};

// The 2d operator truncated to a band |k| <= K. Products of band fields with
// noise fields keep only band modes; since band modes only interact with noise
// modes |m| <= 2K, noise fields are cut there and products run on a padded
// grid of side > 4K, which makes every identity below exact on the band.
class AndersonOperator2d {
 public:
  AndersonOperator2d(EnhancedNoise2d noise, double K, int cutoff = 0, GammaSettings gs = {});
  // Band::box() keeps every mode of the noise grid (full collocation space).
  AndersonOperator2d(EnhancedNoise2d noise, const Band& band, int cutoff = 0, GammaSettings gs = {});

  const EnhancedNoise2d& noise() const { return noise_; }
  int M() const { return noise_.M; }
  double K() const { return K_; }
  const Band& band() const { return band_; }
  const BandIndex& index() const { return *index_; }
  int cutoff() const { return N_; }
  void set_cutoff(int N);
  double shift() const { return shift_; }
  double kappa() const { return noise_.kappa; }
  const GammaSettings& gamma_settings() const { return gs_; }

  // (1 - Delta)^{-1}(Delta u < X + 2 grad u < grad X + xi < u - u < Xi2)
  TorusField b_xi(const TorusField& u) const;
  // u < X + B(u)
  TorusField remainder_map(const TorusField& u) const;
  // Gamma: solves u = P_{>N}(u < X + B(u)) + u#
  TorusField gamma(const TorusField& usharp, FixedPointLog* log = nullptr) const;
  TorusField gamma_inverse(const TorusField& u) const;
  // One-step growth of the linear part of the Gamma map at cutoff N.
  double contraction_factor(int N, std::uint64_t probe_seed = 1000, int probes = 5, int steps = 6) const;

  // H Gamma u# - shift Gamma u#, assembled from paraproducts. `gamma_hint`
  // may carry a precomputed Gamma u#.
  TorusField h_apply(const TorusField& usharp, const TorusField* gamma_hint = nullptr) const;
  // Gamma^{-1} H Gamma u# - shift u#, composed path
  TorusField h_sharp_apply(const TorusField& usharp, const TorusField* gamma_hint = nullptr) const;
  // same, with H Gamma u# from the direct Galerkin action
  TorusField h_sharp_apply_galerkin(const TorusField& usharp) const;
  // P_K (Delta + xi - kappa) u - shift u with plain dealiased products
  TorusField galerkin_apply(const TorusField& u) const;
  // -Re <(H - shift) u, v>
  double energy_form(const TorusField& u, const TorusField& v) const;

  // Dense Galerkin matrix including the shift, built on first use.
  const Matrix& matrix() const;
  const EigenSystem& eigensystem() const;
  // lambda_max of the unshifted Galerkin matrix
  double lambda_max_unshifted() const { return lambda_max0_; }

  TorusField random_band_field(std::uint64_t seed, double s_norm = 0.0) const;

 private:
  TorusField p_low(const TorusField& f) const { return low_pass(f, N_); }
  TorusField p_high(const TorusField& f) const { return high_pass(f, N_); }
  TorusField remainder_high(const TorusField& u, int N) const;
  void check_band(const TorusField& u, const char* where) const;
  void build_matrix() const;

  EnhancedNoise2d noise_;
  double K_;
  Band band_;
  int N_ = 2;
  GammaSettings gs_;
  std::shared_ptr<const BandIndex> index_;
  std::shared_ptr<const ProductGrid> grid_;
  TorusField xi_, X_, xi2_, xX_;  // truncated noise; xX_ = xi o X = Xi2 + kappa
  std::vector<TorusField> gX_;
  BlockStack xi_s_, X_s_, xi2_s_;
  std::vector<BlockStack> gX_s_;
  std::vector<cplx> xi_v_, xi2_v_, xX_v_;
  double shift_ = 1.0;
  double lambda_max0_ = 0.0;

  mutable std::once_flag eig_once_;
  mutable Matrix matrix_;
  mutable EigenSystem eig_;
};

// Smallest N in {2, 4, ..., M/4} whose measured contraction factor is <= 1/2.
int select_cutoff(const AndersonOperator2d& op, std::uint64_t probe_seed = 1000, double target = 0.5);

}  // namespace andersonlab
