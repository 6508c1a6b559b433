#pragma once

#include "core/raster.hpp"
#include "core/rng.hpp"

namespace ptcov {

// Stationary Gaussian random field with exponential covariance
// c(r) = variance * exp(-r / scale), sampled at cell centers.
struct GaussFieldSpec {
  double mean = 0.0;
  double variance = 1.0;
  double scale = 0.1;  // correlation length
};

struct GrfDiagnostics {
  double clipped_mass_fraction = 0.0;  // negative eigenvalue mass removed
};

ScalarField simulate_grf(const GaussFieldSpec& spec, const GridSpec& grid, const Window& window,
                         Rng& rng, GrfDiagnostics* diagnostics = nullptr);

}  // namespace ptcov
