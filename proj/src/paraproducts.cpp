#include "andersonlab/paraproducts.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

namespace andersonlab {

bool Band::contains(const Freq& k, int norm2, int M) const {
  switch (kind) {
    case Kind::Box:
      return true;
    case Kind::SymmetricBox:
      return k[0] != M / 2 && k[1] != M / 2 && k[2] != M / 2;
    case Kind::Ball:
      return norm2 <= radius * radius + 1e-9;
  }
  return false;
}

int Band::axis_lo(int M) const {
  switch (kind) {
    case Kind::Box:
    case Kind::SymmetricBox:
      return M / 2 - 1;
    case Kind::Ball:
      return std::min(M / 2 - 1, static_cast<int>(std::floor(radius + 1e-9)));
  }
  return 0;
}

int Band::axis_hi(int M) const {
  switch (kind) {
    case Kind::Box:
      return M / 2;
    case Kind::SymmetricBox:
      return M / 2 - 1;
    case Kind::Ball:
      return std::min(M / 2, static_cast<int>(std::floor(radius + 1e-9)));
  }
  return 0;
}

bool Band::symmetric(int M) const {
  if (kind == Kind::SymmetricBox) return true;
  if (kind == Kind::Ball) return radius < M / 2;
  return false;
}

std::size_t Band::count(int dim, int M) const {
  auto lat = Lattice::get(dim, M);
  std::size_t n = 0;
  for (std::size_t i = 0; i < lat->size; ++i)
    if (contains(lat->freq[i], lat->norm2[i], M)) ++n;
  return n;
}

std::string Band::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Box:
      os << "box";
      break;
    case Kind::SymmetricBox:
      os << "symmetric-box";
      break;
    case Kind::Ball:
      os << "ball(" << radius << ")";
      break;
  }
  return os.str();
}

TorusField restrict_to(const TorusField& f, const Band& band) {
  const Lattice& lat = f.lattice();
  std::vector<cplx> c(f.coeffs().begin(), f.coeffs().end());
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!band.contains(lat.freq[i], lat.norm2[i], lat.M)) c[i] = 0.0;
  auto out = TorusField::from_coeffs(f.dim(), f.grid(), std::move(c));
  return f.is_real() && band.symmetric(f.grid()) ? out.as_real() : out;
}

bool inside_band(const TorusField& f, const Band& band, double tol) {
  const Lattice& lat = f.lattice();
  auto c = f.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i)
    if (std::abs(c[i]) > tol && !band.contains(lat.freq[i], lat.norm2[i], lat.M)) return false;
  return true;
}

namespace {

bool smooth235(int n) {
  for (int p : {2, 3, 5})
    while (n % p == 0) n /= p;
  return n == 1;
}

}  // namespace

int padded_size(AxisSpan a, AxisSpan b, AxisSpan out) {
  // An alias s -/+ P of a product frequency s must miss [-out.lo, out.hi].
  int need = std::max(a.hi + b.hi + out.lo, a.lo + b.lo + out.hi) + 1;
  // every factor must also embed without wrap-around
  need = std::max({need, 2 * a.lo + 1, 2 * a.hi + 1, 2 * b.lo + 1, 2 * b.hi + 1, 2});
  int P = need;
  while (!smooth235(P)) ++P;
  return P;
}

ProductGrid::ProductGrid(int dim, int M, int P) : dim_(dim), M_(M), P_(P), lat_(Lattice::get(dim, M)) {
  size_ = 1;
  for (int a = 0; a < dim; ++a) size_ *= static_cast<std::size_t>(P);
  pad_.resize(lat_->size);
  for (std::size_t i = 0; i < lat_->size; ++i) {
    std::size_t j = 0;
    for (int a = 0; a < dim; ++a) j = j * P + static_cast<std::size_t>(((lat_->freq[i][a] % P) + P) % P);
    pad_[i] = j;
  }
}

std::shared_ptr<const ProductGrid> ProductGrid::get(int dim, int M, int P) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, std::shared_ptr<const ProductGrid>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(dim, M, P);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  auto g = std::shared_ptr<const ProductGrid>(new ProductGrid(dim, M, P));
  cache[key] = g;
  return g;
}

std::shared_ptr<const ProductGrid> ProductGrid::for_bands(int dim, int M, const Band& a, const Band& b,
                                                          const Band& out) {
  return get(dim, M, padded_size(AxisSpan::of(a, M), AxisSpan::of(b, M), AxisSpan::of(out, M)));
}

std::vector<cplx> ProductGrid::to_physical(const TorusField& f) const {
  if (f.dim() != dim_ || f.grid() != M_) throw ConfigError("product grid mismatch");
  std::vector<cplx> v(size_);
  auto c = f.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i] != 0.0) v[pad_[i]] += c[i];
  fft_inplace(dim_, P_, v.data(), Direction::ToPhysical);
  return v;
}

TorusField ProductGrid::to_field(std::vector<cplx>&& phys, const Band& band, bool real) const {
  fft_inplace(dim_, P_, phys.data(), Direction::ToFourier);
  std::vector<cplx> c(lat_->size);
  for (std::size_t i = 0; i < c.size(); ++i)
    if (band.contains(lat_->freq[i], lat_->norm2[i], M_)) c[i] = phys[pad_[i]];
  auto out = TorusField::from_coeffs(dim_, M_, std::move(c));
  return real && band.symmetric(M_) ? out.as_real() : out;
}

const std::vector<cplx>* BlockStack::block(int j) const {
  int idx = j + 1;
  if (idx < 0 || idx >= static_cast<int>(blocks.size())) return nullptr;
  return blocks[idx].empty() ? nullptr : &blocks[idx];
}

std::size_t BlockStack::bytes() const {
  std::size_t b = 0;
  for (const auto& v : blocks) b += v.size() * sizeof(cplx);
  return b;
}

BlockStack decompose(const std::shared_ptr<const ProductGrid>& grid, const TorusField& f) {
  BlockStack s;
  s.grid = grid;
  s.real = f.is_real();
  const Lattice& lat = f.lattice();
  auto c = f.coeffs();
  int jmax = -1;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i] != 0.0) jmax = std::max(jmax, lat.block[i]);
  s.blocks.resize(jmax + 2);
  std::vector<std::vector<std::size_t>> members(jmax + 2);
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i] != 0.0) members[lat.block[i] + 1].push_back(i);
  for (int j = -1; j <= jmax; ++j) {
    const auto& idx = members[j + 1];
    if (idx.empty()) continue;
    std::vector<cplx> v(grid->size());
    for (std::size_t i : idx) v[grid->pad_index(i)] += c[i];
    fft_inplace(grid->dim(), grid->P(), v.data(), Direction::ToPhysical);
    s.blocks[j + 1] = std::move(v);
  }
  return s;
}

std::vector<cplx> full_values(const BlockStack& s) {
  std::vector<cplx> v(s.grid->size());
  for (const auto& b : s.blocks)
    if (!b.empty())
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += b[i];
  return v;
}

Accumulator::Accumulator(std::shared_ptr<const ProductGrid> grid)
    : grid_(std::move(grid)), acc_(grid_->size()) {}

void Accumulator::add_lt(const BlockStack& f, const BlockStack& g, cplx c) {
  if (f.grid != grid_ || g.grid != grid_) throw ConfigError("accumulator grid mismatch");
  const std::size_t n = acc_.size();
  std::vector<cplx> S;  // S_{j-1} f = sum_{i <= j-2} Delta_i f
  bool any = false;
  for (int j = 1; j <= g.max_block(); ++j) {
    if (const auto* fb = f.block(j - 2)) {
      if (!any) {
        S = *fb;
        any = true;
      } else {
        for (std::size_t i = 0; i < n; ++i) S[i] += (*fb)[i];
      }
    }
    const auto* gb = g.block(j);
    if (!any || !gb) continue;
    const cplx* s = S.data();
    const cplx* gv = gb->data();
    cplx* a = acc_.data();
    if (c == 1.0) {
      for (std::size_t i = 0; i < n; ++i) a[i] += s[i] * gv[i];
    } else {
      for (std::size_t i = 0; i < n; ++i) a[i] += c * (s[i] * gv[i]);
    }
    touched_ = true;
  }
}

void Accumulator::add_resonant(const BlockStack& f, const BlockStack& g, cplx c) {
  if (f.grid != grid_ || g.grid != grid_) throw ConfigError("accumulator grid mismatch");
  const std::size_t n = acc_.size();
  cplx* a = acc_.data();
  for (int j = -1; j <= g.max_block(); ++j) {
    const auto* gb = g.block(j);
    if (!gb) continue;
    for (int i = j - 1; i <= j + 1; ++i) {
      const auto* fb = f.block(i);
      if (!fb) continue;
      const cplx* fv = fb->data();
      const cplx* gv = gb->data();
      if (c == 1.0) {
        for (std::size_t p = 0; p < n; ++p) a[p] += fv[p] * gv[p];
      } else {
        for (std::size_t p = 0; p < n; ++p) a[p] += c * (fv[p] * gv[p]);
      }
      touched_ = true;
    }
  }
}

void Accumulator::add_product(const std::vector<cplx>& f, const std::vector<cplx>& g, cplx c) {
  const std::size_t n = acc_.size();
  for (std::size_t i = 0; i < n; ++i) acc_[i] += c * (f[i] * g[i]);
  touched_ = true;
}

void Accumulator::add_values(const std::vector<cplx>& f, cplx c) {
  for (std::size_t i = 0; i < acc_.size(); ++i) acc_[i] += c * f[i];
  touched_ = true;
}

TorusField Accumulator::result(const Band& band, bool real) {
  if (!touched_) {
    TorusField z(grid_->dim(), grid_->M());
    return z;
  }
  auto out = grid_->to_field(std::move(acc_), band, real);
  acc_.assign(grid_->size(), 0.0);
  touched_ = false;
  return out;
}

namespace {

std::shared_ptr<const ProductGrid> default_grid(const TorusField& f, const TorusField& g,
                                                const Band& band) {
  f.require_same_grid(g, "paraproduct");
  return ProductGrid::for_bands(f.dim(), f.grid(), Band::box(), Band::box(), band);
}

}  // namespace

TorusField para_lt(const TorusField& f, const TorusField& g, const Band& band) {
  auto grid = default_grid(f, g, band);
  Accumulator acc(grid);
  acc.add_lt(decompose(grid, f), decompose(grid, g));
  return acc.result(band, f.is_real() && g.is_real());
}

TorusField para_gt(const TorusField& f, const TorusField& g, const Band& band) {
  return para_lt(g, f, band);
}

TorusField resonant(const TorusField& f, const TorusField& g, const Band& band) {
  auto grid = default_grid(f, g, band);
  Accumulator acc(grid);
  acc.add_resonant(decompose(grid, f), decompose(grid, g));
  return acc.result(band, f.is_real() && g.is_real());
}

TorusField product(const TorusField& f, const TorusField& g, const Band& band) {
  auto grid = default_grid(f, g, band);
  Accumulator acc(grid);
  acc.add_product(grid->to_physical(f), grid->to_physical(g));
  return acc.result(band, f.is_real() && g.is_real());
}

ProductTriple product_triple(const TorusField& f, const TorusField& g, const Band& band) {
  auto grid = default_grid(f, g, band);
  auto fs = decompose(grid, f);
  auto gs = decompose(grid, g);
  bool real = f.is_real() && g.is_real();
  ProductTriple t;
  Accumulator acc(grid);
  acc.add_lt(fs, gs);
  t.lt = acc.result(band, real);
  acc.add_resonant(fs, gs);
  t.resonant = acc.result(band, real);
  acc.add_lt(gs, fs);
  t.gt = acc.result(band, real);
  return t;
}

TorusField commutator(const TorusField& f, const TorusField& g, const TorusField& h,
                      const Band& band) {
  f.require_same_grid(g, "commutator");
  f.require_same_grid(h, "commutator");
  TorusField lhs = resonant(para_lt(f, g, band), h, band);
  TorusField rhs = product(f, resonant(g, h, band), band);
  return lhs - rhs;
}

}  // namespace andersonlab
