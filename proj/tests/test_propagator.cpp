#include <cmath>
#include <memory>

#include "andersonlab/propagator.hpp"
#include "doctest.h"

using namespace andersonlab;

namespace {

double rel(const TorusField& a, const TorusField& b) {
  double nb = l2_norm(b);
  return l2_norm(a - b) / (nb > 0.0 ? nb : 1.0);
}

std::shared_ptr<const AndersonOperator2d> noisy_op() {
  static auto op = std::make_shared<const AndersonOperator2d>(
      enhance_2d(sample_white_noise(2, 32, 3).field, Mollifier::sharp(0.125), 1.0, 3), 6.0);
  return op;
}

}  // namespace

TEST_SUITE("propagator") {
  TEST_CASE("free phases") {
    TorusField e = TorusField::mode(2, 16, {1, 0, 0});
    double t = 0.3;
    CHECK(std::abs(free_propagate(e, t).coeff({1, 0, 0}) - std::exp(cplx(0.0, kFourPi2 * t))) < 1e-12);
    TorusField f = TorusField::mode(2, 16, {2, 3, 0}, 2.0);
    CHECK(std::abs(free_propagate(f, 1.0).coeff({2, 3, 0}) - 2.0 * std::exp(cplx(0.0, kFourPi2 * 13.0))) < 1e-11);
    CHECK(rel(free_propagate(f, 0.0), f) == 0.0);
  }

  TEST_CASE("zero noise group is the free group times the shift phase") {
    auto op = std::make_shared<const AndersonOperator2d>(EnhancedNoise2d::zero(32), 6.0);
    AndersonGroup g(op);
    TorusField u = op->random_band_field(2);
    double t = 0.21;
    CHECK(rel(g.propagate(u, t), free_propagate(u, t) * std::exp(cplx(0.0, t * op->shift()))) < 1e-10);
    CHECK(rel(g.sharp_propagate(u, t), g.propagate(u, t)) < 1e-10);
  }

  TEST_CASE("dense and Krylov agree, mass and energy are conserved") {
    auto op = noisy_op();
    AndersonGroup dense(op), krylov(op, PropagationMethod::Krylov, 30);
    TorusField u = op->random_band_field(3);
    TorusField a = dense.propagate(u, 0.1), b = krylov.propagate(u, 0.1);
    CHECK(rel(b, a) < 1e-8);
    double m0 = dense.mass(u), e0 = dense.energy(u);
    for (double t : {0.25, 0.5, 1.0}) {
      TorusField v = dense.propagate(u, t);
      CHECK(std::abs(dense.mass(v) - m0) < 1e-10 * m0);
      CHECK(std::abs(dense.energy(v) - e0) < 1e-9 * e0);
    }
  }

  TEST_CASE("group law and sharp coordinates") {
    auto op = noisy_op();
    AndersonGroup g(op);
    TorusField u = op->random_band_field(4, 1.0);
    CHECK(rel(g.propagate(g.propagate(u, 0.2), 0.3), g.propagate(u, 0.5)) < 1e-12);
    CHECK(rel(g.sharp_propagate(u, 0.0), u) < 1e-8);
    g.prepare_sharp_basis();
    REQUIRE(g.has_sharp_basis());
    auto c = g.spectral_coeffs(g.gamma(u));
    CHECK(rel(g.sharp_from_spectral(c, 0.3), g.sharp_propagate(u, 0.3)) < 1e-8);
  }

  TEST_CASE("Duhamel identity") {
    auto op = noisy_op();
    AndersonGroup g(op);
    TorusField u = op->random_band_field(5, 1.0);
    auto same = duhamel_difference(g, u, 0.002, 0.002, 8);
    CHECK(l2_norm(same.lhs) + l2_norm(same.rhs) < 1e-12);
    auto coarse = duhamel_difference(g, u, 0.002, 0.0, 8);
    auto fine = duhamel_difference(g, u, 0.002, 0.0, 32);
    CHECK(fine.residual < coarse.residual);
    CHECK(fine.residual < 1e-6);
  }
}
