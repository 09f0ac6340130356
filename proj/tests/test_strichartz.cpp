#include <cmath>

#include "andersonlab/stats.hpp"
#include "andersonlab/strichartz.hpp"
#include "doctest.h"

using namespace andersonlab;

TEST_SUITE("strichartz") {
  TEST_CASE("constant-in-time field") {
    TorusField u = TorusField::mode(2, 16, {1, 2, 0}) + TorusField::mode(2, 16, {-3, 0, 0}, 0.5);
    Flow flow = [&](double) { return u; };
    double got = spacetime_norm(flow, 4.0, 4.0, 0.0, 0.5, 32);
    CHECK(got == doctest::Approx(std::pow(0.5, 0.25) * lp_norm(u, 4.0)).epsilon(1e-12));
  }

  TEST_CASE("free flow of a single mode has constant modulus") {
    TorusField e = TorusField::mode(2, 32, {3, 1, 0});
    Flow flow = [&](double t) { return free_propagate(e, t); };
    for (double p : {4.0, 6.0}) {
      CHECK(spacetime_norm(flow, p, p, 0.0, 1.0, 64) == doctest::Approx(1.0).epsilon(1e-12));
      double N = 16.0;
      CHECK(spacetime_norm(flow, p, p, 0.0, 1.0 / N, 64) == doctest::Approx(std::pow(1.0 / N, 1.0 / p)).epsilon(1e-12));
    }
  }

  TEST_CASE("time refinement on a smooth flow") {
    TorusField u = shell_data(2, 64, 4, 3, 0.0);
    Flow flow = [&](double t) { return free_propagate(u, t); };
    double a = spacetime_norm(flow, 4.0, 4.0, 0.0, 1.0, 256), b = spacetime_norm(flow, 4.0, 4.0, 0.0, 1.0, 512);
    CHECK(std::abs(a - b) < 0.005 * b);
  }

  TEST_CASE("shell data") {
    TorusField u = shell_data(2, 64, 8, 5, 0.5);
    CHECK(sobolev_norm(u, 0.5) == doctest::Approx(1.0));
    const auto& lat = u.lattice();
    for (std::size_t i = 0; i < lat.size; ++i)
      if (u[i] != 0.0) {
        CHECK(lat.norm2[i] > 16);
        CHECK(lat.norm2[i] <= 64);
      }
    CHECK(evaluation_grid(8.0) > 32);
  }

  TEST_CASE("least squares fits") {
    auto f = linear_fit({0, 1, 2, 3}, {1, 3, 5, 7});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r2 == doctest::Approx(1.0));
    auto g = loglog_fit({2, 4, 8}, {3, 12, 48});
    CHECK(g.slope == doctest::Approx(2.0));
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(mean({1.0, 3.0}) == 2.0);
  }

  TEST_CASE("free d = 2, p = 4 slope on a small grid") {
    ScalingOptions opt;
    opt.M = 64;
    opt.n_t = 64;
    auto rep = laplacian_scaling(2, 4.0, {4, 8, 16}, {1, 2, 3, 4}, opt);
    CHECK(rep.cells.size() == 12);
    CHECK(rep.theory_slope == 0.0);
    CHECK(std::abs(rep.fit.slope) < 0.2);
    CHECK_FALSE(rep.pass);  // fewer than 4 shells and 20 seeds never passes
  }

  TEST_CASE("short-time scaling follows the interval length") {
    ScalingOptions opt;
    opt.M = 64;
    opt.n_t = 64;
    opt.two_sided = true;
    auto rep = short_time_scaling(2, 4.0, {4, 8, 16}, {1, 2, 3, 4}, opt);
    CHECK(rep.theory_slope == doctest::Approx(-0.25));
    CHECK(std::abs(rep.fit.slope + 0.25) < 0.2);
  }
}
