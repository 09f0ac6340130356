#include <cmath>
#include <random>
#include <sstream>

#include "andersonlab/fourier.hpp"
#include "doctest.h"

using namespace andersonlab;

namespace {

TorusField random_field(int dim, int M, std::uint64_t seed) {
  auto lat = Lattice::get(dim, M);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::vector<cplx> c(lat->size);
  for (auto& x : c) x = cplx(nd(gen), nd(gen));
  return TorusField::from_coeffs(dim, M, std::move(c));
}

double max_diff(const TorusField& a, const TorusField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_SUITE("fourier") {
  TEST_CASE("delta at the origin has a flat coefficient array") {
    const int M = 16;
    std::vector<cplx> v(M * M, 0.0);
    v[0] = double(M * M);
    TorusField f = transform(v, 2, M);
    for (auto c : f.coeffs()) CHECK(std::abs(c - 1.0) < 1e-12);
  }

  TEST_CASE("single mode transforms to a one-hot array") {
    const int M = 16;
    Freq k{3, -2, 0};
    std::vector<cplx> v(M * M);
    for (int a = 0; a < M; ++a)
      for (int b = 0; b < M; ++b) v[a * M + b] = std::exp(cplx(0.0, kTwoPi * (k[0] * a + k[1] * b) / M));
    TorusField f = transform(v, 2, M);
    CHECK(max_diff(f, TorusField::mode(2, M, k)) < 1e-12);
  }

  TEST_CASE("round trip through point values") {
    for (int dim : {2, 3}) {
      TorusField f = random_field(dim, 16, 3);
      CHECK(max_diff(transform(transform(f), dim, 16), f) < 1e-12);
    }
  }

  TEST_CASE("laplacian symbol is -4 pi^2 |k|^2") {
    TorusField e = TorusField::mode(2, 32, {3, 4, 0});
    CHECK(std::abs(laplacian(e).coeff({3, 4, 0}) + kFourPi2 * 25.0) < 1e-9);
    TorusField g = partial(e, 0);
    CHECK(std::abs(g.coeff({3, 4, 0}) - cplx(0.0, kTwoPi * 3)) < 1e-12);
  }

  TEST_CASE("bessel inverse undoes bessel") {
    TorusField f = random_field(2, 16, 5);
    CHECK(max_diff(bessel_l_inv(bessel_l(f)), f) < 1e-12);
  }

  TEST_CASE("sharp blocks of a single mode") {
    TorusField e = TorusField::mode(2, 32, {3, 0, 0});
    DyadicDecomposition dd(2, 32);
    for (int j = -1; j <= dd.max_block(); ++j) {
      double n = l2_norm(dd.block(e, j));
      CHECK(n == doctest::Approx(j == 2 ? 1.0 : 0.0));
    }
    TorusField c = TorusField::constant(2, 32, 2.5);
    CHECK(max_diff(lp_block(c, -1), c) == 0.0);
  }

  TEST_CASE("blocks sum to the field") {
    for (auto flavor : {BlockFlavor::Sharp, BlockFlavor::Smooth}) {
      TorusField f = random_field(2, 32, 7);
      DyadicDecomposition dd(2, 32, flavor);
      TorusField s(2, 32);
      for (const auto& b : dd.blocks(f)) s += b;
      CHECK(max_diff(s, f) < 1e-12);
    }
  }

  TEST_CASE("low and high pass are complementary") {
    TorusField e = TorusField::mode(2, 32, {3, 4, 0});
    CHECK(l2_norm(low_pass(e, 5)) == doctest::Approx(1.0));
    CHECK(l2_norm(low_pass(e, 4)) == 0.0);
    TorusField f = random_field(3, 16, 9);
    CHECK(max_diff(low_pass(f, 5) + high_pass(f, 5), f) < 1e-14);
    CHECK_THROWS_AS(low_pass(f, -1), ConfigError);
  }

  TEST_CASE("norms of characters") {
    TorusField e = TorusField::mode(2, 32, {5, 0, 0});  // block 3
    for (double p : {1.0, 2.0, 4.0, kInf}) CHECK(lp_norm(e, p) == doctest::Approx(1.0));
    CHECK(besov_norm(e, 0.7, 4.0, 2.0) == doctest::Approx(std::pow(8.0, 0.7)));
    TorusField c = TorusField::constant(2, 32, 3.0);
    CHECK(besov_norm(c, -0.3, kInf, kInf) == doctest::Approx(3.0));
    CHECK(sobolev_norm(TorusField::mode(2, 32, {0, 0, 0}), 1.7) == doctest::Approx(1.0));
    CHECK(sobolev_norm(e, 1.0) == doctest::Approx(std::sqrt(1.0 + kFourPi2 * 25.0)));
  }

  TEST_CASE("Parseval for B^0_{2,2}") {
    TorusField f = random_field(2, 256, 11);
    CHECK(std::abs(besov_norm(f, 0.0, 2.0, 2.0) - l2_norm(f)) < 1e-10 * l2_norm(f));
    CHECK(std::abs(lp_norm(f, 2.0) - l2_norm(f)) < 1e-10 * l2_norm(f));
  }

  TEST_CASE("field container round trip and bad input") {
    TorusField f = random_field(3, 8, 13).as_real();
    std::stringstream ss;
    write_field(ss, f);
    TorusField g = read_field(ss);
    CHECK(g.dim() == 3);
    CHECK(g.grid() == 8);
    CHECK(g.is_real());
    CHECK(max_diff(f, g) == 0.0);
    std::stringstream bad("not a field");
    CHECK_THROWS_AS(read_field(bad), ConfigError);
  }

  TEST_CASE("grid validation") {
    CHECK(is_power_of_two(64));
    CHECK_FALSE(is_power_of_two(48));
    CHECK_THROWS_AS(TorusField(2, 12), ConfigError);
    CHECK_THROWS_AS(TorusField(4, 8), ConfigError);
    CHECK_THROWS_AS(TorusField(2, 16) + TorusField(2, 32), ConfigError);
    CHECK_THROWS_AS(TorusField::mode(2, 8, {5, 0, 0}), ConfigError);
  }
}
