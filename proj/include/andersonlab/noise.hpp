#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "andersonlab/fourier.hpp"

namespace andersonlab {

struct WhiteNoiseSample {
  TorusField field;
  std::uint64_t seed = 0;
  bool zero_mode_removed = false;
};

// Independent complex Gaussians on a half lattice, Hermitian completion.
// Each mode draws from its own stream keyed by (seed, k), so a sample on a
// finer grid agrees with the coarser sample on the common modes.
// Nyquist modes are left at zero; in 3d the zero mode is removed.
WhiteNoiseSample sample_white_noise(int dim, int M, std::uint64_t seed);

struct Mollifier {
  enum class Kind { Sharp, Smooth };
  Kind kind = Kind::Sharp;
  double eps = 1.0;

  static Mollifier sharp(double eps) { return {Kind::Sharp, eps}; }
  // raised cosine: 1 on [0, 1/2], cos^2 taper to 0 at 1
  static Mollifier smooth(double eps) { return {Kind::Smooth, eps}; }

  double profile(double r) const;
  double weight(double norm_k) const { return profile(eps * norm_k); }
  double support_radius() const { return 1.0 / eps; }
  std::string name() const;
};

Mollifier parse_mollifier(const std::string& kind, double eps);

TorusField mollify(const TorusField& xi, const Mollifier& m);

// sum_k theta(eps|k|)^2 / (1 + |k|^2) over representable k.
double renorm_constant_2d(double eps, const Mollifier& m, int M);
// sum_k theta^2 / (1 + 4 pi^2 |k|^2): the mean of xi_eps o (1 - Delta)^{-1} xi_eps.
double wick_constant_2d(const Mollifier& m, int M);

struct RenormConstants3d {
  double c1 = 0.0;
  double c2 = 0.0;
};

// c1 = sum_{k != 0} m^2 / |k|^2 and the double sum
// c2 = sum_{k1, k2 != 0, k1 != k2} m1^2 m2^2 |k1.k2| / (|k1 - k2|^2 |k1|^4 |k2|^2).
// The double sum refuses mode radii above `cap`.
RenormConstants3d renorm_constants_3d(double eps, const Mollifier& m, int M, int cap = 16);
double renorm_constant_3d_first(const Mollifier& m, int M);

// Means actually subtracted in 3d: E|grad X|^2 and E|grad X1|^2 for
// X = (-Delta)^{-1} xi_eps, X1 = (1 - Delta)^{-1}(|grad X|^2 - E|grad X|^2).
double wick_constant_3d_first(const Mollifier& m, int M);
double wick_constant_3d_second(const Mollifier& m, int M);

struct EnhancedNoise2d {
  int M = 0;
  Mollifier mollifier;
  double amplitude = 1.0;
  std::uint64_t seed = 0;
  TorusField xi;   // amplitude * xi_eps
  TorusField X;    // (1 - Delta)^{-1} xi
  TorusField xi2;  // xi o X - kappa
  double c_eps = 0.0;  // logarithmic constant in the (1 + |k|^2) normalization
  double kappa = 0.0;  // constant actually subtracted
  double alpha = -1.1;
  std::map<std::string, double> norms;

  static EnhancedNoise2d zero(int M);
  void compute_norms();
};

EnhancedNoise2d enhance_2d(const TorusField& xi, const Mollifier& m, double amplitude = 1.0,
                           std::uint64_t seed = 0);

struct EnhancedNoise3d {
  int M = 0;
  Mollifier mollifier;
  double amplitude = 1.0;
  std::uint64_t seed = 0;
  TorusField xi;
  TorusField X, X1, X2, X3, X4, X5;
  double c1_eps = 0.0, c2_eps = 0.0;  // lattice constants in the stated normalization
  double c1w = 0.0, c2w = 0.0;        // means actually subtracted
  TorusField W;
  std::vector<TorusField> Wt;  // (1 - Delta)^{-1} grad W
  TorusField Z;
  std::map<std::string, double> norms;

  static EnhancedNoise3d zero(int M);
  void compute_norms();
  // (1 - Delta) Z and (1 - Delta) W~ = grad W.
  TorusField LZ() const;
  std::vector<TorusField> LWt() const;
};

EnhancedNoise3d enhance_3d(const TorusField& xi, const Mollifier& m, double amplitude = 1.0,
                           std::uint64_t seed = 0, bool paper_c2 = true);

}  // namespace andersonlab
