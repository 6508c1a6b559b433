#pragma once

#include <vector>

#include "core/raster.hpp"

namespace ptcov {

#ifndef PTCOV_RHOHAT_MAX_COVARIATES
#define PTCOV_RHOHAT_MAX_COVARIATES 3
#endif

inline constexpr int kRhohatMaxCovariates = PTCOV_RHOHAT_MAX_COVARIATES;

struct RhoConfig {
  // Per-axis covariate-space bandwidths; empty selects the normal-scale rule
  // sd_j * n^(-1/(4+m)) with sd taken over grid-cell values.
  std::vector<double> bandwidths;
};

struct RhoEstimate {
  ScalarField lambda;              // fitted intensity rho(C_1(u), ..., C_m(u))
  std::vector<double> bandwidths;  // per-axis values actually used
  bool denominator_floored = false;
  double mass_ratio = 0.0;         // integrate(lambda) / n, 0 for empty patterns
};

// Ratio estimator of the intensity as a function of covariate values,
// evaluated back onto the spatial grid. m = 0 yields the constant estimate
// n / |W| on the reference grid.
RhoEstimate fit_rho(const PointPattern& pattern, const std::vector<const ScalarField*>& covariates,
                    const GridSpec& grid, const RhoConfig& config = {});

// Convenience overload; the grid is taken from the first covariate (m >= 1).
RhoEstimate fit_rho(const PointPattern& pattern, const std::vector<const ScalarField*>& covariates,
                    const RhoConfig& config = {});

}  // namespace ptcov
