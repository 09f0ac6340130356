#pragma once

#include <memory>
#include <vector>

#include "andersonlab/fourier.hpp"

namespace andersonlab {

// Set of retained frequencies for a product result.
struct Band {
  enum class Kind { Box, SymmetricBox, Ball };
  Kind kind = Kind::Box;
  double radius = 0.0;

  static Band box() { return {Kind::Box, 0.0}; }
  // Box without the Nyquist planes, closed under k -> -k.
  static Band symmetric_box() { return {Kind::SymmetricBox, 0.0}; }
  static Band ball(double K) { return {Kind::Ball, K}; }

  bool contains(const Freq& k, int norm2, int M) const;
  // Largest negative / positive frequency per axis inside the band.
  int axis_lo(int M) const;
  int axis_hi(int M) const;
  bool symmetric(int M) const;
  std::size_t count(int dim, int M) const;
  std::string describe() const;
};

TorusField restrict_to(const TorusField& f, const Band& band);
bool inside_band(const TorusField& f, const Band& band, double tol = 0.0);

// Per-axis frequency support [-lo, hi] of a factor or a result.
struct AxisSpan {
  int lo = 0;
  int hi = 0;
  static AxisSpan of(const Band& b, int M) { return {b.axis_lo(M), b.axis_hi(M)}; }
  static AxisSpan symmetric(int r) { return {r, r}; }
};

// Smallest 2-3-5 smooth padded size that keeps the retained band alias-free
// for products of factors supported in a and b.
int padded_size(AxisSpan a, AxisSpan b, AxisSpan out);

// Padded physical grid (side P) attached to a (dim, M) lattice.
class ProductGrid {
 public:
  static std::shared_ptr<const ProductGrid> get(int dim, int M, int P);
  static std::shared_ptr<const ProductGrid> for_bands(int dim, int M, const Band& a, const Band& b,
                                                      const Band& out);

  int dim() const { return dim_; }
  int M() const { return M_; }
  int P() const { return P_; }
  std::size_t size() const { return size_; }

  // Embed the coefficients of f (support must fit the padded grid) and
  // return point values on the padded grid.
  std::vector<cplx> to_physical(const TorusField& f) const;
  // Transform padded point values and keep the modes of `band`.
  TorusField to_field(std::vector<cplx>&& phys, const Band& band, bool real) const;

  std::size_t pad_index(std::size_t lattice_index) const { return pad_[lattice_index]; }

 private:
  ProductGrid(int dim, int M, int P);
  int dim_, M_, P_;
  std::size_t size_;
  std::vector<std::size_t> pad_;
  std::shared_ptr<const Lattice> lat_;
};

// Sharp Littlewood-Paley blocks of one field as padded point values.
struct BlockStack {
  std::shared_ptr<const ProductGrid> grid;
  std::vector<std::vector<cplx>> blocks;  // blocks[j + 1]; empty vector = zero block
  bool real = false;

  int max_block() const { return static_cast<int>(blocks.size()) - 2; }
  const std::vector<cplx>* block(int j) const;
  std::size_t bytes() const;
};

BlockStack decompose(const std::shared_ptr<const ProductGrid>& grid, const TorusField& f);
std::vector<cplx> full_values(const BlockStack& s);

// Sums bilinear terms in physical space; one forward transform at the end.
class Accumulator {
 public:
  explicit Accumulator(std::shared_ptr<const ProductGrid> grid);

  void add_lt(const BlockStack& f, const BlockStack& g, cplx c = 1.0);  // c (f < g)
  void add_gt(const BlockStack& f, const BlockStack& g, cplx c = 1.0) { add_lt(g, f, c); }
  void add_resonant(const BlockStack& f, const BlockStack& g, cplx c = 1.0);
  void add_product(const std::vector<cplx>& f, const std::vector<cplx>& g, cplx c = 1.0);
  void add_values(const std::vector<cplx>& f, cplx c = 1.0);

  bool empty() const { return !touched_; }
  TorusField result(const Band& band, bool real = false);

 private:
  std::shared_ptr<const ProductGrid> grid_;
  std::vector<cplx> acc_;
  bool touched_ = false;
};

struct ProductTriple {
  TorusField lt;
  TorusField resonant;
  TorusField gt;
};

// Field-level entry points. Products are dealiased on a padded grid and
// truncated to `band` (all representable modes by default).
TorusField para_lt(const TorusField& f, const TorusField& g, const Band& band = Band::box());
TorusField para_gt(const TorusField& f, const TorusField& g, const Band& band = Band::box());
TorusField resonant(const TorusField& f, const TorusField& g, const Band& band = Band::box());
TorusField product(const TorusField& f, const TorusField& g, const Band& band = Band::box());
ProductTriple product_triple(const TorusField& f, const TorusField& g,
                             const Band& band = Band::box());
// (f < g) o h - f (g o h), every intermediate truncated to `band`.
TorusField commutator(const TorusField& f, const TorusField& g, const TorusField& h,
                      const Band& band = Band::box());

}  // namespace andersonlab
