#include <cmath>
#include <memory>

#include "andersonlab/anderson2d.hpp"
#include "doctest.h"

using namespace andersonlab;

namespace {

double rel(const TorusField& a, const TorusField& b) {
  double nb = l2_norm(b);
  return l2_norm(a - b) / (nb > 0.0 ? nb : 1.0);
}

const AndersonOperator2d& noisy() {
  static const AndersonOperator2d op(
      enhance_2d(sample_white_noise(2, 32, 3).field, Mollifier::sharp(0.125), 1.0, 3), 6.0);
  return op;
}

}  // namespace

TEST_SUITE("anderson2d") {
  TEST_CASE("zero noise: identity Gamma, bare Laplacian, smallest cutoff") {
    AndersonOperator2d op(EnhancedNoise2d::zero(32), 6.0);
    CHECK(op.cutoff() == 2);
    CHECK(select_cutoff(op) == 2);
    TorusField u = op.random_band_field(1);
    CHECK(rel(op.gamma(u), u) == 0.0);
    CHECK(l2_norm(op.b_xi(u)) == 0.0);
    CHECK(rel(op.h_sharp_apply(u), laplacian(u) - op.shift() * u) < 1e-14);
  }

  TEST_CASE("B is linear and vanishes at zero") {
    const auto& op = noisy();
    TorusField u = op.random_band_field(4), v = op.random_band_field(5);
    CHECK(l2_norm(op.b_xi(TorusField(2, 32))) == 0.0);
    CHECK(rel(op.b_xi(u + 2.0 * v), op.b_xi(u) + 2.0 * op.b_xi(v)) < 1e-12);
  }

  TEST_CASE("Gamma converges geometrically and inverts") {
    const auto& op = noisy();
    TorusField u = op.random_band_field(6, 1.0);
    FixedPointLog log;
    TorusField g = op.gamma(u, &log);
    CHECK(log.converged);
    CHECK(log.max_ratio() <= 0.5);
    CHECK(rel(op.gamma_inverse(g), u) < 1e-8);
  }

  TEST_CASE("paraproduct assembly agrees with the Galerkin action") {
    const auto& op = noisy();
    TorusField u = op.random_band_field(7, 1.0);
    TorusField g = op.gamma(u);
    CHECK(rel(op.h_apply(u, &g), op.galerkin_apply(g)) < 1e-8);
    CHECK(rel(op.h_sharp_apply(u), op.h_sharp_apply_galerkin(u)) < 1e-8);
  }

  TEST_CASE("self-adjoint and negative after the shift") {
    const auto& op = noisy();
    TorusField u = op.gamma(op.random_band_field(8)), v = op.gamma(op.random_band_field(9));
    cplx a = inner(op.galerkin_apply(u), v), b = inner(u, op.galerkin_apply(v));
    CHECK(std::abs(a - b) < 1e-10 * std::abs(a));
    CHECK(op.energy_form(u, u) > 0.0);
    CHECK(op.energy_form(u, v) == doctest::Approx(op.energy_form(v, u)).epsilon(1e-10));
    CHECK(hermitian_defect(op.matrix()) < 1e-14);
    CHECK(op.eigensystem().values.back() <= -1.0 + 1e-9);
  }

  TEST_CASE("band fields only") {
    const auto& op = noisy();
    TorusField far = TorusField::mode(2, 32, {10, 0, 0});
    CHECK_THROWS_AS(op.index().to_vector(far), ConfigError);
    TorusField u = op.random_band_field(10);
    CHECK(rel(op.index().from_vector(op.index().to_vector(u)), u) == 0.0);
  }
}
