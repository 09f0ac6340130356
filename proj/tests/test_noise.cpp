#include <cmath>

#include "andersonlab/noise.hpp"
#include "andersonlab/paraproducts.hpp"
#include "doctest.h"

using namespace andersonlab;

namespace {

double max_diff(const TorusField& a, const TorusField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_SUITE("noise") {
  TEST_CASE("same seed, same sample") {
    auto a = sample_white_noise(2, 32, 4), b = sample_white_noise(2, 32, 4);
    CHECK(max_diff(a.field, b.field) == 0.0);
    CHECK(max_diff(a.field, sample_white_noise(2, 32, 5).field) > 0.0);
  }

  TEST_CASE("hermitian, real, and nested across grids") {
    auto s = sample_white_noise(2, 32, 4);
    const auto& lat = s.field.lattice();
    for (std::size_t i = 0; i < lat.size; ++i) CHECK(s.field[i] == std::conj(s.field[lat.neg[i]]));
    auto fine = sample_white_noise(2, 64, 4);
    for (std::size_t i = 0; i < lat.size; ++i)
      if (!lat.has_nyquist(i)) CHECK(fine.field.coeff(lat.freq[i]) == s.field[i]);
  }

  TEST_CASE("3d samples have no zero mode") {
    auto s = sample_white_noise(3, 16, 2);
    CHECK(s.zero_mode_removed);
    CHECK(s.field.coeff({0, 0, 0}) == 0.0);
  }

  TEST_CASE("ensemble second moments") {
    const int n = 200;
    for (Freq k : {Freq{1, 0, 0}, Freq{2, 3, 0}, Freq{-4, 1, 0}, Freq{0, 7, 0}, Freq{5, 5, 0}}) {
      double m = 0.0;
      for (int s = 1; s <= n; ++s) m += std::norm(sample_white_noise(2, 16, s).field.coeff(k));
      m /= n;
      CHECK(m > 0.8);
      CHECK(m < 1.2);
    }
  }

  TEST_CASE("mollifier limits") {
    auto xi = sample_white_noise(2, 32, 3).field;
    auto id = mollify(xi, Mollifier::sharp(2.0 / 32));
    CHECK(max_diff(id, restrict_to(xi, Band::ball(16.0))) == 0.0);
    auto far = mollify(xi, Mollifier::sharp(100.0));
    CHECK(l2_norm(far) == doctest::Approx(std::abs(xi.coeff({0, 0, 0}))));
    double prev = l2_norm(xi);
    for (double eps : {0.05, 0.1, 0.2, 0.4}) {
      double n = l2_norm(mollify(xi, Mollifier::sharp(eps)));
      CHECK(n <= prev);
      prev = n;
    }
    CHECK_THROWS_AS(parse_mollifier("boxcar", 0.1), ConfigError);
  }

  TEST_CASE("lattice constants by enumeration") {
    CHECK(renorm_constant_2d(1.0, Mollifier::sharp(1.0), 16) == doctest::Approx(3.0));
    CHECK(renorm_constants_3d(1.0, Mollifier::sharp(1.0), 16).c1 == doctest::Approx(6.0));
    double sharp_in = renorm_constant_2d(0.2, Mollifier::sharp(0.2), 64);
    double sharp_out = renorm_constant_2d(0.1, Mollifier::sharp(0.1), 64);
    double smooth = renorm_constant_2d(0.1, Mollifier::smooth(0.1), 64);
    CHECK(smooth >= sharp_in);
    CHECK(smooth <= sharp_out);
  }

  TEST_CASE("2d constant grows like 2 pi log 2 per halving") {
    double a = renorm_constant_2d(1.0 / 256, Mollifier::sharp(1.0 / 256), 1024);
    double b = renorm_constant_2d(1.0 / 512, Mollifier::sharp(1.0 / 512), 1024);
    CHECK(b - a == doctest::Approx(kTwoPi * std::log(2.0)).epsilon(0.01));
  }

  TEST_CASE("two-mode enhancement against the closed form") {
    const int M = 32;
    Freq k{3, 1, 0}, mk{-3, -1, 0};
    TorusField xi = TorusField::mode(2, M, k) + TorusField::mode(2, M, mk);
    auto e = enhance_2d(xi, Mollifier::sharp(2.0 / M));
    double w = 1.0 / (1.0 + kFourPi2 * 10.0);
    // xi o X = (e_k + e_-k)(e_k + e_-k) w on the resonant pairs: 2w + w e_2k + w e_-2k
    TorusField want = TorusField::constant(2, M, 2.0 * w - e.kappa) + TorusField::mode(2, M, {6, 2, 0}, w) +
                      TorusField::mode(2, M, {-6, -2, 0}, w);
    CHECK(max_diff(e.xi2, want) < 1e-12);
    CHECK(max_diff(e.X, xi * w) < 1e-15);
  }

  TEST_CASE("zero noise gives constant enhancements") {
    auto e = enhance_2d(TorusField(2, 32), Mollifier::sharp(0.125));
    CHECK(max_diff(e.xi2, TorusField::constant(2, 32, -e.kappa)) < 1e-12);
    auto e3 = enhance_3d(TorusField(3, 16), Mollifier::sharp(0.25), 1.0, 0, false);
    CHECK(l2_norm(e3.X) == 0.0);
    CHECK(max_diff(e3.X1, TorusField::constant(3, 16, -e3.c1w)) < 1e-12);
  }

  TEST_CASE("3d tree identities") {
    auto xi = sample_white_noise(3, 16, 3).field;
    auto e = enhance_3d(xi, Mollifier::sharp(0.25), 1.0, 3, false);
    CHECK(max_diff(e.W, e.X + e.X1 + e.X2) < 1e-12);
    // X solves -Delta X = xi_eps
    TorusField lx = -laplacian(e.X);
    CHECK(max_diff(lx, mollify(xi, Mollifier::sharp(0.25))) < 1e-10);
  }
}
