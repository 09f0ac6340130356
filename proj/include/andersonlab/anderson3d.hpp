#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "andersonlab/anderson2d.hpp"

namespace andersonlab {

// Noise block stacks kept in memory up to a byte budget; the rest are
// decomposed again on every use.
class StackCache {
 public:
  StackCache(std::shared_ptr<const ProductGrid> grid, std::size_t budget_bytes);
  int add(const TorusField& f);
  std::shared_ptr<const BlockStack> get(int id) const;
  std::size_t cached_bytes() const { return used_; }
  std::size_t cached_count() const;

 private:
  std::shared_ptr<const ProductGrid> grid_;
  std::size_t budget_, used_ = 0;
  std::vector<TorusField> fields_;
  std::vector<std::shared_ptr<const BlockStack>> stacks_;
};

struct NamedTerm {
  std::string name;
  TorusField field;
};

struct Anderson3dOptions {
  GammaSettings gamma{1.4, 1e-9, 200};
  int cutoff = 0;                  // 0 selects the smallest contracting N
  bool assemble_pencil = true;     // dense S, G matrices (needs K < M/4)
  std::size_t cache_bytes = std::size_t(1536) << 20;
};

// The 3d operator in the flat frame u = e^W u_flat, truncated to |k| <= K:
//   Ht u = Delta u + 2 LWt . grad u + LZ u.
// The ansatz is u_flat = u# + P_{>N} R, R = u_flat < Z + 2 grad u_flat < Wt + B(u_flat).
// The Hermitian form lives in L^2(e^{2W}): S_lk = -4 pi^2 (k.l) g(l-k) + h(l-k),
// G_lk = g(l-k) with g = e^{2W}, h = e^{2W} LZ, both sampled on the noise grid.
class AndersonOperator3d {
 public:
  AndersonOperator3d(EnhancedNoise3d noise, double K, Anderson3dOptions opt = {});

  const EnhancedNoise3d& noise() const { return noise_; }
  int M() const { return noise_.M; }
  double K() const { return K_; }
  const Band& band() const { return band_; }
  const BandIndex& index() const { return *index_; }
  int cutoff() const { return N_; }
  void set_cutoff(int N);
  double shift() const { return shift_; }
  bool has_pencil() const { return pencil_; }
  const GammaSettings& gamma_settings() const { return opt_.gamma; }
  const TorusField& exp_w_plus() const { return ewp_; }
  const TorusField& exp_w_minus() const { return ewm_; }

  TorusField b_xi(const TorusField& u) const;
  // the 18 terms of B, each already mapped through L^{-1}
  std::vector<NamedTerm> b_xi_terms(const TorusField& u) const;
  // u < Z + 2 grad u < Wt + B(u)
  TorusField remainder_map(const TorusField& u) const;
  TorusField gamma(const TorusField& usharp, FixedPointLog* log = nullptr) const;
  TorusField gamma_inverse(const TorusField& u) const;
  double contraction_factor(int N, std::uint64_t probe_seed = 1000, int probes = 5, int steps = 6) const;

  // G(u_flat), short exact form and the expanded commutator form
  TorusField g_apply(const TorusField& uflat) const;
  TorusField g_apply_expanded(const TorusField& uflat) const;

  // (Ht - shift) Gamma u# via Delta u# + LZ o u# + 2 LWt o grad u# + G(u_flat)
  TorusField h3_apply(const TorusField& usharp, const TorusField* gamma_hint = nullptr) const;
  // (Ht - shift) u_flat with plain dealiased products
  TorusField h3_direct(const TorusField& uflat) const;
  // e^W f sampled on the noise grid
  TorusField to_full(const TorusField& flat) const;
  // Gamma^{-1} (Ht - shift) Gamma u#
  TorusField h3_sharp_apply(const TorusField& usharp, const TorusField* gamma_hint = nullptr) const;

  // ||e^W f||_{L^2}^2 and -<(H - shift) e^W u, e^W v>, by quadrature on the noise grid
  double mass(const TorusField& flat) const;
  double energy_form(const TorusField& u, const TorusField& v) const;

  const Matrix& stiffness() const;  // S - shift G
  const Matrix& gram() const;       // G
  // generalized eigenpairs of (S - shift G, G), built on first use
  const EigenSystem& eigensystem() const;

  TorusField random_band_field(std::uint64_t seed, double s_norm = 0.0) const;

 private:
  struct UDecomp;
  UDecomp decompose_u(const TorusField& u) const;
  void add_b_terms(Accumulator& acc, const UDecomp& d, std::vector<NamedTerm>* terms) const;
  TorusField remainder_from(const UDecomp& d) const;
  // out += c (P_K(f < g)) o h
  void add_lt_res(Accumulator& out, const BlockStack& f, int g, int h, double c) const;
  void check_band(const TorusField& u, const char* where) const;
  void assemble_pencil();

  EnhancedNoise3d noise_;
  double K_;
  Band band_;
  Anderson3dOptions opt_;
  int N_ = 2;
  std::shared_ptr<const BandIndex> index_;
  std::shared_ptr<const ProductGrid> grid_;
  std::unique_ptr<StackCache> cache_;

  // stack ids
  int Z_, LZ_;
  std::array<int, 3> Wt_, LWt_, dZ_;
  std::array<std::array<int, 3>, 3> dWt_;  // dWt_[a][b] = d_a Wt_b
  int Q1_, Q4_;
  std::array<int, 3> Q2_, Q3_, Q5_;
  // point values on the product grid
  std::vector<cplx> LZv_, Q1v_, Q4v_;
  std::array<std::vector<cplx>, 3> LWtv_, Q2v_, Q3v_, Q5v_;

  TorusField ewp_, ewm_;
  std::vector<double> g_vals_, h_vals_;  // e^{2W}, e^{2W} LZ on the noise grid
  double shift_ = 1.0;
  bool pencil_ = false;
  Matrix S_, G_;
  mutable std::once_flag eig_once_;
  mutable EigenSystem eig_;
};

int select_cutoff(const AndersonOperator3d& op, std::uint64_t probe_seed = 1000, double target = 0.5);

}  // namespace andersonlab
