#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "core/raster.hpp"

namespace ptcov {

// Isotropic Gaussian kernel; bandwidth is the standard deviation.
struct KernelSpec {
  double bandwidth = 0.0;
};

// Rule-of-thumb spatial bandwidth: 0.15 * min window side.
double default_bandwidth(const Window& window);

// Grid convolution engine for one (grid, window, bandwidth) combination.
// Kernel transform and edge-correction field are computed once; instances
// are shared through a process-wide cache. The padded circular convolution
// is exact for all in-window lags (kernel truncated at the padding radius).
class Smoother {
 public:
  Smoother(const GridSpec& grid, const Window& window, double bandwidth);

  // Cached, shared instance.
  static std::shared_ptr<const Smoother> get(const GridSpec& grid, const Window& window,
                                             double bandwidth);

  double bandwidth() const { return bandwidth_; }
  const ScalarField& edge() const { return edge_; }

  // u -> ∫ k(u - v) f(v) dv over the window (no edge division). Cells of f
  // outside the window mask are treated as zero.
  ScalarField convolve(const ScalarField& f) const;

  // Same, starting from a precomputed padded spectrum of the data.
  ScalarField convolve_spectrum(const std::vector<std::complex<double>>& spectrum,
                                const Window& window) const;

  // Zero-padded forward transform of a field (shared across bandwidths).
  std::vector<std::complex<double>> padded_spectrum(const ScalarField& f) const;

  int padded_rows() const { return prows_; }
  int padded_cols() const { return pcols_; }

 private:
  GridSpec grid_;
  ScalarField edge_;
  double bandwidth_;
  int prows_, pcols_;
  std::vector<std::complex<double>> kernel_fft_;  // includes the cell-area factor
};

// e(u) = ∫_W k(u - v) dv on the grid, by discrete convolution of the window
// indicator (consistent with the other smoothing operations).
ScalarField edge_factor(const KernelSpec& kernel, const GridSpec& grid, const Window& window);

// Exact Gaussian mass of the kernel centered at u inside a rectangle.
double edge_factor_at(const KernelSpec& kernel, const Window& window, Vec2 u);

// u -> (1/e(u)) Σ_i k(u - x_i); points are binned to grid cells.
ScalarField kernel_intensity(const PointPattern& pattern, const KernelSpec& kernel,
                             const GridSpec& grid);

// u -> ∫_W k(u - v) f(v) dv / e(u).
ScalarField smooth_field_against_kernel(const ScalarField& field, const KernelSpec& kernel);

}  // namespace ptcov
