#pragma once

#include <vector>

#include "core/raster.hpp"

namespace ptcov {

// Poisson composite-likelihood fit of log lambda(u) = beta_0 + sum_j beta_j C_j(u)
// on the raster quadrature grid.
struct LogLinFit {
  std::vector<double> beta;                     // original covariate units
  std::vector<std::vector<double>> covariance;  // (m+1) x (m+1)
  ScalarField lambda;                           // fitted intensity on the grid
  int iterations = 0;
  double gradient_norm = 0.0;
};

LogLinFit fit_loglinear(const PointPattern& pattern,
                        const std::vector<const ScalarField*>& covariates,
                        const GridSpec& grid);

// Two-sided normal p-value for beta_index = 0; index 0 is the intercept.
double wald_p_value(const LogLinFit& fit, int index);

}  // namespace ptcov
