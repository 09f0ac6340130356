#pragma once

#include <memory>
#include <string>
#include <vector>

#include "andersonlab/anderson2d.hpp"
#include "andersonlab/anderson3d.hpp"

namespace andersonlab {

enum class Generator { Free, Anderson2d, Anderson3d };
enum class PropagationMethod { Spectral, Dense, Krylov };

std::string to_string(Generator g);
std::string to_string(PropagationMethod m);

struct PropagatorPlan {
  Generator generator = Generator::Free;
  PropagationMethod method = PropagationMethod::Spectral;
  double K = 0.0;
  int krylov_dim = 30;
  double substep_dt = 0.0;  // krylov substep length, 0 picks dt * spread <= 10
};

// e^{-it Delta}: coeff(k) *= e^{+i (2 pi |k|)^2 t}
TorusField free_propagate(const TorusField& u, double t);

// The group generated by the shifted Galerkin operator H - shift on the band
// of a 2d or 3d operator. In 3d fields are flat coordinates u = e^W u_flat and
// the generator is the L^2(e^{2W}) pencil. Sharp coordinates go through Gamma.
class AndersonGroup {
 public:
  explicit AndersonGroup(std::shared_ptr<const AndersonOperator2d> op,
                         PropagationMethod method = PropagationMethod::Dense, int krylov_dim = 30);
  explicit AndersonGroup(std::shared_ptr<const AndersonOperator3d> op);

  int dim() const { return op2_ ? 2 : 3; }
  int M() const;
  double shift() const;
  int cutoff() const;
  const BandIndex& index() const;
  const PropagatorPlan& plan() const { return plan_; }
  const AndersonOperator2d* op2() const { return op2_.get(); }
  const AndersonOperator3d* op3() const { return op3_.get(); }

  // e^{-it(H - shift)} u for a band field
  TorusField propagate(const TorusField& u, double t) const;
  TorusField propagate_dense(const TorusField& u, double t) const;
  TorusField propagate_krylov(const TorusField& u, double t) const;  // 2d only

  // Gamma^{-1} e^{-it(H - shift)} Gamma u#
  TorusField sharp_propagate(const TorusField& usharp, double t) const;

  TorusField gamma(const TorusField& usharp) const;
  TorusField gamma_inverse(const TorusField& u) const;
  // Gamma^{-1}(H - shift)Gamma u#, `gamma_hint` = Gamma u# when known
  TorusField h_sharp(const TorusField& usharp, const TorusField* gamma_hint = nullptr) const;

  // Eigen-coordinates c = V^H B u (B = identity in 2d, Gram matrix in 3d)
  std::vector<cplx> spectral_coeffs(const TorusField& u) const;
  // V e^{-it Lambda} c
  TorusField from_spectral(const std::vector<cplx>& c, double t) const;
  // Gamma^{-1} V e^{-it Lambda} c, through the cached Gamma^{-1} V basis when prepared
  TorusField sharp_from_spectral(const std::vector<cplx>& c, double t) const;
  // Precomputes the columns Gamma^{-1} v_j (parallel over columns).
  void prepare_sharp_basis();
  bool has_sharp_basis() const { return sharp_basis_.rows() > 0; }
  const EigenSystem& eigensystem() const;

  // ||u||^2 (2d) or ||e^W u_flat||^2 (3d)
  double mass(const TorusField& u) const;
  // -<(H - shift)u, u>
  double energy(const TorusField& u) const;

 private:
  int krylov_substeps(double t) const;

  std::shared_ptr<const AndersonOperator2d> op2_;
  std::shared_ptr<const AndersonOperator3d> op3_;
  PropagatorPlan plan_;
  double spread_ = 0.0;
  Matrix sharp_basis_;
};

struct DuhamelResult {
  TorusField lhs, rhs;
  double residual = 0.0;
};

// (e^{-itHs} - e^{-i(t-t0)Delta} e^{-it0 Hs}) u# against
// -i int_{t0}^{t} e^{-i(t-s)Delta} (Hs - Delta) e^{-isHs} u# ds, with Hs = H# + shift
// (the unshifted sharp operator) and composite 4-node Gauss-Legendre panels.
DuhamelResult duhamel_difference(const AndersonGroup& group, const TorusField& usharp, double t, double t0,
                                 int quad_steps);

}  // namespace andersonlab
