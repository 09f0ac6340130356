#include <cmath>

#include "andersonlab/anderson3d.hpp"
#include "doctest.h"

using namespace andersonlab;

namespace {

double rel(const TorusField& a, const TorusField& b) {
  double nb = l2_norm(b);
  return l2_norm(a - b) / (nb > 0.0 ? nb : 1.0);
}

const AndersonOperator3d& noisy() {
  static const AndersonOperator3d op(
      enhance_3d(sample_white_noise(3, 16, 4).field, Mollifier::sharp(0.25), 1.0, 4, false), 3.0);
  return op;
}

}  // namespace

TEST_SUITE("anderson3d") {
  TEST_CASE("zero noise: identity Gamma, no G, bare Laplacian") {
    AndersonOperator3d op(EnhancedNoise3d::zero(16), 3.0);
    TorusField u = op.random_band_field(1);
    CHECK(rel(op.gamma(u), u) == 0.0);
    CHECK(l2_norm(op.g_apply(u)) == 0.0);
    CHECK(l2_norm(op.b_xi(u)) == 0.0);
    CHECK(rel(op.h3_sharp_apply(u), laplacian(u) - op.shift() * u) < 1e-14);
  }

  TEST_CASE("B terms add up to B") {
    const auto& op = noisy();
    TorusField u = op.random_band_field(2, 1.0);
    auto terms = op.b_xi_terms(u);
    CHECK(terms.size() == 18);
    TorusField s(3, 16);
    for (const auto& t : terms) s += t.field;
    CHECK(rel(s, op.b_xi(u)) < 1e-12);
    CHECK(l2_norm(op.b_xi(TorusField(3, 16))) == 0.0);
  }

  TEST_CASE("G short and expanded forms agree") {
    const auto& op = noisy();
    TorusField u = op.random_band_field(3, 1.0);
    CHECK(rel(op.g_apply(u), op.g_apply_expanded(u)) < 1e-10);
    CHECK(l2_norm(op.g_apply(TorusField(3, 16))) == 0.0);
  }

  TEST_CASE("Gamma inverts and the ansatz form matches the direct form") {
    const auto& op = noisy();
    TorusField u = op.random_band_field(5, 1.0);
    FixedPointLog log;
    TorusField g = op.gamma(u, &log);
    CHECK(log.converged);
    CHECK(rel(op.gamma_inverse(g), u) < 1e-8);
    CHECK(rel(op.h3_apply(u, &g), op.h3_direct(g)) < 1e-8);
  }

  TEST_CASE("pencil is Hermitian with a positive Gram matrix") {
    const auto& op = noisy();
    REQUIRE(op.has_pencil());
    CHECK(hermitian_defect(op.stiffness()) < 1e-12);
    CHECK(hermitian_defect(op.gram()) < 1e-12);
    const auto& es = op.eigensystem();
    CHECK(es.values.back() <= -1.0 + 1e-8);
    TorusField u = op.random_band_field(6);
    CHECK(op.energy_form(u, u) > 0.0);
    CHECK(op.mass(u) > 0.0);
  }

  TEST_CASE("band limits") {
    auto e = enhance_3d(sample_white_noise(3, 16, 4).field, Mollifier::sharp(0.25), 1.0, 4, false);
    CHECK_THROWS_AS(AndersonOperator3d(e, 4.0), ConfigError);
    CHECK_THROWS_AS(AndersonOperator3d(e, 8.0, Anderson3dOptions{.assemble_pencil = false}), ConfigError);
    CHECK_THROWS_AS(noisy().gamma(TorusField::mode(3, 16, {5, 0, 0})), ConfigError);
  }
}
