#include "core/rhohat.hpp"

#include <cmath>
#include <numbers>

#include "core/common.hpp"

namespace ptcov {
namespace {

// Bin-grid resolution per axis, chosen so several bins fit inside one
// bandwidth at the default rules.
int bins_for(int m) {
  switch (m) {
    case 1:
      return 512;
    case 2:
      return 128;
    default:
      return 48;
  }
}

// Separable truncated-Gaussian blur along one axis of a flattened m-D grid
// (unnormalized kernel; the normalization cancels in the ratio).
void blur_axis(std::vector<double>& data, const std::vector<int>& dims, int axis,
               double sigma_bins) {
  int n = dims[static_cast<std::size_t>(axis)];
  int reach = std::max(1, static_cast<int>(std::ceil(5.0 * sigma_bins)));
  reach = std::min(reach, n - 1);
  std::vector<double> kernel(static_cast<std::size_t>(2 * reach + 1));
  for (int k = -reach; k <= reach; ++k)
    kernel[static_cast<std::size_t>(k + reach)] =
        std::exp(-0.5 * (k / sigma_bins) * (k / sigma_bins));

  int stride = 1;
  for (int a = axis + 1; a < static_cast<int>(dims.size()); ++a)
    stride *= dims[static_cast<std::size_t>(a)];
  int outer = static_cast<int>(data.size()) / (n * stride);

  std::vector<double> line(static_cast<std::size_t>(n));
  for (int o = 0; o < outer; ++o) {
    for (int s = 0; s < stride; ++s) {
      std::size_t base = static_cast<std::size_t>(o) * static_cast<std::size_t>(n) * stride +
                         static_cast<std::size_t>(s);
      for (int i = 0; i < n; ++i)
        line[static_cast<std::size_t>(i)] = data[base + static_cast<std::size_t>(i) * stride];
      for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        int k0 = std::max(-reach, -i), k1 = std::min(reach, n - 1 - i);
        for (int k = k0; k <= k1; ++k)
          acc += kernel[static_cast<std::size_t>(k + reach)] *
                 line[static_cast<std::size_t>(i + k)];
        data[base + static_cast<std::size_t>(i) * stride] = acc;
      }
    }
  }
}

}  // namespace

RhoEstimate fit_rho(const PointPattern& pattern, const std::vector<const ScalarField*>& covariates,
                    const RhoConfig& config) {
  if (covariates.empty())
    fail(ErrorKind::invalid_argument, "fit_rho without covariates needs a reference grid");
  return fit_rho(pattern, covariates, covariates[0]->grid(), config);
}

RhoEstimate fit_rho(const PointPattern& pattern, const std::vector<const ScalarField*>& covariates,
                    const GridSpec& grid, const RhoConfig& config) {
  int m = static_cast<int>(covariates.size());
  if (m > kRhohatMaxCovariates)
    fail(ErrorKind::invalid_argument,
         "at most " + std::to_string(kRhohatMaxCovariates) +
             " covariates are supported by the covariate-space intensity estimator");

  const Window& window = pattern.window;
  double n = static_cast<double>(pattern.size());
  if (m == 0) {
    RhoEstimate constant{ScalarField(grid, window, n / window.area()), {}, false, 0.0};
    constant.mass_ratio = n > 0.0 ? integrate(constant.lambda) / n : 0.0;
    return constant;
  }
  for (const ScalarField* c : covariates)
    if (!c->grid().same_geometry(grid))
      fail(ErrorKind::data, "covariate grids have mismatched geometry");

  int bins = bins_for(m);
  struct AxisInfo {
    double lo = 0.0, width = 1.0;
  };
  std::vector<AxisInfo> axes(static_cast<std::size_t>(m));
  std::vector<double> sds(static_cast<std::size_t>(m));

  // Covariate tuples at in-window grid cells.
  std::vector<std::vector<double>> cell_values(static_cast<std::size_t>(m));
  std::vector<std::size_t> cell_flat;
  for (int r = 0; r < covariates[0]->nrows(); ++r)
    for (int c = 0; c < covariates[0]->ncols(); ++c) {
      if (!covariates[0]->center_in_window(r, c)) continue;
      cell_flat.push_back(static_cast<std::size_t>(r) * grid.ncols + c);
      for (int j = 0; j < m; ++j) {
        double v = covariates[static_cast<std::size_t>(j)]->at(r, c);
        if (std::isnan(v)) fail(ErrorKind::data, "covariate has NaN inside the window");
        cell_values[static_cast<std::size_t>(j)].push_back(v);
      }
    }
  if (cell_flat.empty()) fail(ErrorKind::data, "window contains no grid cells");

  for (int j = 0; j < m; ++j) {
    const auto& vals = cell_values[static_cast<std::size_t>(j)];
    double lo = vals[0], hi = vals[0], mean = 0.0;
    for (double v : vals) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      mean += v;
    }
    mean /= static_cast<double>(vals.size());
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= static_cast<double>(vals.size());
    if (!(hi > lo) || !(var > 0.0))
      fail(ErrorKind::data, "degenerate covariate: constant over the window");
    axes[static_cast<std::size_t>(j)] = AxisInfo{lo, (hi - lo) / (bins - 1)};
    sds[static_cast<std::size_t>(j)] = std::sqrt(var);
  }

  std::vector<double> bandwidths = config.bandwidths;
  if (bandwidths.empty()) {
    // Normal-scale rule on the grid-cell sample (its sd and its size); the
    // data points stay out of the bandwidth to avoid preferential sampling.
    double factor =
        std::pow(static_cast<double>(cell_flat.size()), -1.0 / (4.0 + m));
    for (int j = 0; j < m; ++j) bandwidths.push_back(sds[static_cast<std::size_t>(j)] * factor);
  }
  if (static_cast<int>(bandwidths.size()) != m)
    fail(ErrorKind::invalid_argument, "need one covariate-space bandwidth per covariate");
  for (double b : bandwidths)
    if (!(b > 0.0)) fail(ErrorKind::invalid_argument, "covariate-space bandwidths must be positive");

  std::vector<int> dims(static_cast<std::size_t>(m), bins);
  std::size_t total = 1;
  for (int d : dims) total *= static_cast<std::size_t>(d);

  auto bin_of = [&](int axis, double value) {
    const AxisInfo& ax = axes[static_cast<std::size_t>(axis)];
    int b = static_cast<int>(std::lround((value - ax.lo) / ax.width));
    return std::min(std::max(b, 0), bins - 1);
  };
  std::vector<int> coords(static_cast<std::size_t>(m));
  auto flat_at = [&]() {
    std::size_t f = 0;
    for (int j = 0; j < m; ++j)
      f = f * static_cast<std::size_t>(bins) + static_cast<std::size_t>(coords[static_cast<std::size_t>(j)]);
    return f;
  };

  std::vector<double> numerator(total, 0.0);
  for (const Vec2& p : pattern.points) {
    for (int j = 0; j < m; ++j)
      coords[static_cast<std::size_t>(j)] = bin_of(j, covariates[static_cast<std::size_t>(j)]->lookup(p));
    numerator[flat_at()] += 1.0;
  }

  double cell_area = covariates[0]->cell_area();
  std::vector<double> denominator(total, 0.0);
  for (std::size_t i = 0; i < cell_flat.size(); ++i) {
    for (int j = 0; j < m; ++j)
      coords[static_cast<std::size_t>(j)] = bin_of(j, cell_values[static_cast<std::size_t>(j)][i]);
    denominator[flat_at()] += cell_area;
  }

  for (int j = 0; j < m; ++j) {
    double sigma_bins = bandwidths[static_cast<std::size_t>(j)] / axes[static_cast<std::size_t>(j)].width;
    blur_axis(numerator, dims, j, sigma_bins);
    blur_axis(denominator, dims, j, sigma_bins);
  }

  // Back to the continuous kernel scale so the denominator floor has
  // area units.
  double inv_mass = 1.0;
  for (int j = 0; j < m; ++j)
    inv_mass /= std::sqrt(2.0 * std::numbers::pi) * bandwidths[static_cast<std::size_t>(j)];
  double floor = 1e-8 * window.area();

  RhoEstimate out{ScalarField(grid, window, 0.0), bandwidths, false, 0.0};
  for (std::size_t i = 0; i < cell_flat.size(); ++i) {
    for (int j = 0; j < m; ++j)
      coords[static_cast<std::size_t>(j)] = bin_of(j, cell_values[static_cast<std::size_t>(j)][i]);
    std::size_t f = flat_at();
    double den = denominator[f] * inv_mass;
    double num = numerator[f] * inv_mass;
    if (den < floor) {
      den = floor;
      out.denominator_floored = true;
    }
    out.lambda.values()[cell_flat[i]] = num / den;
  }
  out.mass_ratio = n > 0.0 ? integrate(out.lambda) / n : 0.0;
  return out;
}

}  // namespace ptcov
