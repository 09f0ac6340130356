#pragma once

#include <vector>

namespace andersonlab {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r2 = 0.0;
};

// Ordinary least squares y = intercept + slope x.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);
// Fit of log y against log x.
LinearFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

double mean(const std::vector<double>& v);
double stddev(const std::vector<double>& v);  // sample standard deviation
double median(std::vector<double> v);

}  // namespace andersonlab
