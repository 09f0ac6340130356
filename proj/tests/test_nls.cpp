#include <cmath>
#include <memory>

#include "andersonlab/nls.hpp"
#include "doctest.h"

using namespace andersonlab;

namespace {

double rel(const TorusField& a, const TorusField& b) {
  double nb = l2_norm(b);
  return l2_norm(a - b) / (nb > 0.0 ? nb : 1.0);
}

const NlsSolver& solver() {
  static const NlsSolver ns(std::make_shared<const AndersonOperator2d>(
      enhance_2d(sample_white_noise(2, 16, 21).field, Mollifier::sharp(0.25), 1.0, 21), Band::box()));
  return ns;
}

}  // namespace

TEST_SUITE("nls") {
  TEST_CASE("sub-flows") {
    const auto& ns = solver();
    TorusField u = smooth_random_field(2, 16, 3, 2.0);
    CHECK(rel(ns.strang_step(u, 1e-3, false), ns.linear_flow(u, 1e-3)) < 1e-12);
    TorusField v = ns.nonlinear_flow(u, 0.5);
    auto a = u.values(), b = v.values();
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(std::abs(a[i]) - std::abs(b[i])) < 1e-12);
  }

  TEST_CASE("zero data stays zero") {
    const auto& ns = solver();
    NlsSolver::RunOptions opt;
    auto st = ns.run_split(TorusField(2, 16), 0.01, 1e-3, opt);
    CHECK(l2_norm(st.u) == 0.0);
    auto pr = ns.picard(TorusField(2, 16), 0.01, 5);
    CHECK(l2_norm(pr.state.u) == 0.0);
  }

  TEST_CASE("Strang conserves mass and nearly conserves energy") {
    const auto& ns = solver();
    TorusField u = smooth_random_field(2, 16, 5, 2.0);
    NlsSolver::RunOptions opt;
    auto c0 = ns.conserved(u);
    auto st = ns.run_split(u, 0.1, 1e-4, opt);
    auto c1 = ns.conserved(st.u);
    CHECK(std::abs(c1.mass - c0.mass) < 1e-10 * c0.mass);
    CHECK(std::abs(c1.energy - c0.energy) < 1e-4 * std::abs(c0.energy));
  }

  TEST_CASE("quartic term is homogeneous of degree four") {
    const auto& ns = solver();
    TorusField u = smooth_random_field(2, 16, 7, 2.0);
    CHECK(ns.conserved(4.0 * u).quartic == doctest::Approx(256.0 * ns.conserved(u).quartic).epsilon(1e-12));
    CHECK(ns.conserved(u).quadratic > 0.0);
  }

  TEST_CASE("Picard agrees with Strang on a short interval") {
    const auto& ns = solver();
    TorusField u0s = hs_random_field(2, 16, 9, 0.6, Band::box());
    auto pr = ns.picard(u0s, 0.01, 30);
    CHECK(pr.converged);
    NlsSolver::RunOptions opt;
    auto st = ns.run_split(ns.group().gamma(u0s), 0.01, 1e-4, opt);
    CHECK(rel(pr.state.u, st.u) < 1e-4);
  }

  TEST_CASE("LWP quotient vanishes for equal data") {
    const auto& ns = solver();
    auto rep = ns.lwp_experiment(0.6, {1}, 0.0, 0.01, 1e-3, 1.0);
    CHECK(rep.max_quotient() == 0.0);
  }
}
