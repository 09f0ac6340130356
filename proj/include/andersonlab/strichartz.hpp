#pragma once

#include <functional>
#include <string>
#include <vector>

#include "andersonlab/propagator.hpp"
#include "andersonlab/stats.hpp"

namespace andersonlab {

using Flow = std::function<TorusField(double t)>;

// (int_{t0}^{t1} ||J^sigma u(t)||_{L^q}^p dt)^{1/p}, trapezoid on n_t intervals.
// Spatial L^q uses the point values on a grid of side eval_grid (0 = the field grid).
double spacetime_norm(const Flow& flow, double p, double q, double t0, double t1, int n_t, double sigma = 0.0,
                      int eval_grid = 0);

// Gaussian coefficients on the shell N/2 < |k| <= N (no Nyquist modes), unit H^s norm.
TorusField shell_data(int dim, int M, int N, std::uint64_t seed, double s);

// Smallest 2-3-5 smooth grid side > 4R, so |u|^4 of a field with |k| <= R integrates exactly.
int evaluation_grid(double R);

struct ScalingCell {
  int N = 0;
  std::uint64_t seed = 0;
  double norm = 0.0;       // space-time norm of the flow of unit data
  double data_norm = 0.0;  // norm the data was normalized in (1 by construction)
  double alt_norm = 0.0;   // L^2 norm of the same data
};

struct ScalingReport {
  std::string generator;
  int d = 2;
  double p = 4.0, q = 4.0, sigma = 0.0;
  double data_s = 0.0;  // Sobolev index of the data normalization
  std::string interval = "[0,1]";
  int n_t = 128;
  int M = 0;
  std::vector<int> N_list;
  std::vector<std::uint64_t> seeds;
  std::vector<ScalingCell> cells;  // ordered by (N index, seed index)
  std::vector<double> mean_norm, std_norm;  // per N
  LinearFit fit;                  // log mean norm against log N
  double theory_slope = 0.0;
  double tolerance = 0.2;
  bool two_sided = false;  // |slope - theory| <= tol, else slope <= theory + tol
  bool pass = false;
  LinearFit alt_fit;       // same flows with the data normalized in L^2
  bool has_alt = false;

  void finalize();
};

struct ScalingOptions {
  int M = 256;
  int n_t = 128;
  double tolerance = 0.2;
  bool two_sided = false;
};

ScalingReport laplacian_scaling(int d, double p, const std::vector<int>& N_list,
                                const std::vector<std::uint64_t>& seeds, const ScalingOptions& opt);
ScalingReport short_time_scaling(int d, double p, const std::vector<int>& N_list,
                                 const std::vector<std::uint64_t>& seeds, const ScalingOptions& opt);
// Data on shell N normalized in H^{1 - 4/r}; flow e^{-itH#} through the group.
ScalingReport anderson_scaling_2d(double r, const std::vector<int>& N_list, const std::vector<std::uint64_t>& seeds,
                                  const AndersonGroup& group, const ScalingOptions& opt, double sigma = 0.0);
// Data normalized in H^{2 - 5/p}; the L^2 normalized contrast is reported in alt_fit.
ScalingReport anderson_scaling_3d(double p, const std::vector<int>& N_list, const std::vector<std::uint64_t>& seeds,
                                  const AndersonGroup& group, const ScalingOptions& opt, double sigma = 0.0);

}  // namespace andersonlab
