#include <cmath>
#include <random>

#include "andersonlab/paraproducts.hpp"
#include "doctest.h"

using namespace andersonlab;

namespace {

TorusField random_field(int dim, int M, std::uint64_t seed, double decay) {
  auto lat = Lattice::get(dim, M);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::vector<cplx> c(lat->size);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = cplx(nd(gen), nd(gen)) * std::pow(1.0 + lat->norm2[i], -decay / 2);
  return TorusField::from_coeffs(dim, M, std::move(c));
}

double rel(const TorusField& a, const TorusField& b) {
  double nb = l2_norm(b);
  return l2_norm(a - b) / (nb > 0.0 ? nb : 1.0);
}

// Dealiased product by direct convolution, truncated to the grid box.
TorusField convolve(const TorusField& f, const TorusField& g) {
  const auto& lat = f.lattice();
  std::vector<cplx> out(lat.size);
  for (std::size_t i = 0; i < lat.size; ++i) {
    if (f[i] == 0.0) continue;
    for (std::size_t j = 0; j < lat.size; ++j) {
      Freq k{lat.freq[i][0] + lat.freq[j][0], lat.freq[i][1] + lat.freq[j][1], lat.freq[i][2] + lat.freq[j][2]};
      if (lat.representable(k)) out[lat.index_of(k)] += f[i] * g[j];
    }
  }
  return TorusField::from_coeffs(f.dim(), f.grid(), std::move(out));
}

}  // namespace

TEST_SUITE("paraproducts") {
  TEST_CASE("separated modes: only the low-high paraproduct survives") {
    const int M = 64;
    TorusField f = TorusField::mode(2, M, {1, 0, 0});   // block 0
    TorusField g = TorusField::mode(2, M, {12, 0, 0});  // block 4
    CHECK(rel(para_lt(f, g), TorusField::mode(2, M, {13, 0, 0})) < 1e-12);
    CHECK(l2_norm(para_gt(f, g)) < 1e-12);
    CHECK(l2_norm(resonant(f, g)) < 1e-12);
  }

  TEST_CASE("resonant product of equal modes") {
    TorusField e = TorusField::mode(2, 64, {5, 2, 0});
    CHECK(rel(resonant(e, e), TorusField::mode(2, 64, {10, 4, 0})) < 1e-12);
    CHECK(l2_norm(para_lt(e, e)) < 1e-12);
  }

  TEST_CASE("constant on the left of a mean-zero field gives nothing") {
    TorusField f = random_field(2, 32, 3, 1.0);
    f.mutable_coeffs()[0] = 0.0;
    TorusField hi = high_pass(f, 2.0);
    TorusField c = TorusField::constant(2, 32, 1.0);
    CHECK(l2_norm(para_lt(hi, c)) < 1e-12);
  }

  TEST_CASE("reconstruction against direct convolution") {
    const int M = 16;
    TorusField f = random_field(2, M, 5, 0.5), g = random_field(2, M, 6, 0.5);
    auto t = product_triple(f, g);
    TorusField direct = convolve(f, g);
    CHECK(rel(t.lt + t.resonant + t.gt, direct) < 1e-12);
    CHECK(rel(product(f, g), direct) < 1e-12);
  }

  TEST_CASE("reconstruction in 3d and band truncation") {
    TorusField f = random_field(3, 16, 7, 1.0), g = random_field(3, 16, 8, 1.0);
    Band b = Band::ball(5.0);
    auto t = product_triple(f, g, b);
    TorusField p = product(f, g, b);
    CHECK(rel(t.lt + t.resonant + t.gt, p) < 1e-12);
    CHECK(inside_band(p, b));
  }

  TEST_CASE("resonant product is symmetric") {
    TorusField f = random_field(2, 32, 9, 1.0), g = random_field(2, 32, 10, 1.0);
    CHECK(rel(resonant(f, g), resonant(g, f)) < 1e-12);
    CHECK(rel(para_gt(f, g), para_lt(g, f)) < 1e-12);
  }

  TEST_CASE("commutator with a unit constant") {
    TorusField g = random_field(2, 32, 11, 1.0), h = random_field(2, 32, 12, 1.0);
    TorusField one = TorusField::constant(2, 32, 1.0);
    TorusField want = resonant(para_lt(one, g), h) - resonant(g, h);
    CHECK(rel(commutator(one, g, h), want) < 1e-12);
    CHECK(l2_norm(commutator(one, TorusField(2, 32), h)) == 0.0);
  }

  TEST_CASE("padded sizes are alias free and 2-3-5 smooth") {
    int P = padded_size(AxisSpan::symmetric(8), AxisSpan::symmetric(8), AxisSpan::symmetric(8));
    CHECK(P > 24);
    int n = P;
    for (int q : {2, 3, 5})
      while (n % q == 0) n /= q;
    CHECK(n == 1);
  }

  TEST_CASE("bands") {
    CHECK(Band::ball(1.0).count(2, 16) == 5);
    CHECK(Band::ball(1.0).count(3, 16) == 7);
    CHECK(Band::symmetric_box().symmetric(16));
    TorusField e = TorusField::mode(2, 16, {3, 3, 0});
    CHECK_FALSE(inside_band(e, Band::ball(4.0)));
    CHECK(l2_norm(restrict_to(e, Band::ball(4.0))) == 0.0);
  }
}
