#include "core/smooth.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "core/common.hpp"
#include "core/fft2.hpp"

namespace ptcov {
namespace {

double gauss1(double x, double sd) {
  double z = x / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

double normal_cdf(double z) { return 0.5 * (1.0 + std::erf(z / std::numbers::sqrt2)); }

std::vector<double> window_key(const Window& w) {
  if (w.is_rectangle()) {
    const Rect& r = w.rect();
    return {0.0, r.x0, r.y0, r.x1, r.y1};
  }
  std::vector<double> key{1.0};
  for (const Vec2& v : w.vertices()) {
    key.push_back(v.x);
    key.push_back(v.y);
  }
  return key;
}

}  // namespace

double default_bandwidth(const Window& window) {
  Rect bb = window.bounding_box();
  return 0.15 * std::min(bb.width(), bb.height());
}

Smoother::Smoother(const GridSpec& grid, const Window& window, double bandwidth)
    : grid_(grid),
      edge_(grid, window),
      bandwidth_(bandwidth),
      prows_(2 * grid.nrows),
      pcols_(2 * grid.ncols) {
  if (!(bandwidth > 0.0)) fail(ErrorKind::invalid_argument, "kernel bandwidth must be positive");
  // Kernel sampled at cell-center lags, truncated at the padding radius so
  // the circular convolution is exact for every pair of in-window cells.
  kernel_fft_.assign(static_cast<std::size_t>(prows_) * pcols_, 0.0);
  double area = grid.cell * grid.cell;
  for (int r = 0; r < prows_; ++r) {
    int lag_r = r <= prows_ / 2 ? r : r - prows_;
    if (std::abs(lag_r) > grid.nrows - 1) continue;
    double ky = gauss1(lag_r * grid.cell, bandwidth);
    for (int c = 0; c < pcols_; ++c) {
      int lag_c = c <= pcols_ / 2 ? c : c - pcols_;
      if (std::abs(lag_c) > grid.ncols - 1) continue;
      kernel_fft_[static_cast<std::size_t>(r) * pcols_ + c] =
          ky * gauss1(lag_c * grid.cell, bandwidth) * area;
    }
  }
  fft2::forward(prows_, pcols_, kernel_fft_.data());

  // Edge factor: convolution of the window indicator.
  ScalarField indicator(grid, window);
  for (int r = 0; r < grid.nrows; ++r)
    for (int c = 0; c < grid.ncols; ++c)
      indicator.at(r, c) = indicator.center_in_window(r, c) ? 1.0 : 0.0;
  auto spec = padded_spectrum(indicator);
  edge_ = convolve_spectrum(spec, window);
}

std::shared_ptr<const Smoother> Smoother::get(const GridSpec& grid, const Window& window,
                                              double bandwidth) {
  static std::mutex mutex;
  static std::map<std::vector<double>, std::shared_ptr<const Smoother>> cache;
  std::vector<double> key{grid.origin.x,
                          grid.origin.y,
                          grid.cell,
                          static_cast<double>(grid.ncols),
                          static_cast<double>(grid.nrows),
                          bandwidth};
  for (double v : window_key(window)) key.push_back(v);
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto made = std::make_shared<const Smoother>(grid, window, bandwidth);
  cache.emplace(std::move(key), made);
  return made;
}

std::vector<std::complex<double>> Smoother::padded_spectrum(const ScalarField& f) const {
  if (!f.grid().same_geometry(grid_))
    fail(ErrorKind::invalid_argument, "field geometry does not match the smoother grid");
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(prows_) * pcols_, 0.0);
  for (int r = 0; r < f.nrows(); ++r)
    for (int c = 0; c < f.ncols(); ++c) {
      double v = f.at(r, c);
      buf[static_cast<std::size_t>(r) * pcols_ + c] = std::isnan(v) ? 0.0 : v;
    }
  fft2::forward(prows_, pcols_, buf.data());
  return buf;
}

ScalarField Smoother::convolve_spectrum(const std::vector<std::complex<double>>& spectrum,
                                        const Window& window) const {
  std::vector<std::complex<double>> buf(spectrum.size());
  for (std::size_t i = 0; i < spectrum.size(); ++i) buf[i] = spectrum[i] * kernel_fft_[i];
  fft2::inverse(prows_, pcols_, buf.data());
  ScalarField out(grid_, window);
  for (int r = 0; r < grid_.nrows; ++r)
    for (int c = 0; c < grid_.ncols; ++c)
      out.at(r, c) = buf[static_cast<std::size_t>(r) * pcols_ + c].real();
  return out;
}

ScalarField Smoother::convolve(const ScalarField& f) const {
  // Mask to the window so the convolution integrates over W only.
  ScalarField masked = f;
  for (int r = 0; r < f.nrows(); ++r)
    for (int c = 0; c < f.ncols(); ++c)
      if (!f.center_in_window(r, c)) masked.at(r, c) = 0.0;
  return convolve_spectrum(padded_spectrum(masked), f.window());
}

ScalarField edge_factor(const KernelSpec& kernel, const GridSpec& grid, const Window& window) {
  return Smoother::get(grid, window, kernel.bandwidth)->edge();
}

double edge_factor_at(const KernelSpec& kernel, const Window& window, Vec2 u) {
  if (!window.is_rectangle())
    fail(ErrorKind::invalid_argument, "closed-form edge factor requires a rectangular window");
  const Rect& r = window.rect();
  double sd = kernel.bandwidth;
  double mx = normal_cdf((r.x1 - u.x) / sd) - normal_cdf((r.x0 - u.x) / sd);
  double my = normal_cdf((r.y1 - u.y) / sd) - normal_cdf((r.y0 - u.y) / sd);
  return mx * my;
}

ScalarField kernel_intensity(const PointPattern& pattern, const KernelSpec& kernel,
                             const GridSpec& grid) {
  auto sm = Smoother::get(grid, pattern.window, kernel.bandwidth);
  ScalarField counts(grid, pattern.window);
  for (const Vec2& p : pattern.points)
    counts.at(counts.row_of(p.y), counts.col_of(p.x)) += 1.0;
  // The point sum carries no window restriction, so the counts enter unmasked.
  ScalarField conv = sm->convolve_spectrum(sm->padded_spectrum(counts), pattern.window);
  const ScalarField& e = sm->edge();
  double inv_area = 1.0 / counts.cell_area();
  ScalarField out(grid, pattern.window);
  for (int r = 0; r < grid.nrows; ++r)
    for (int c = 0; c < grid.ncols; ++c) {
      double denom = e.at(r, c);
      out.at(r, c) = denom > 0.0 ? conv.at(r, c) * inv_area / denom : 0.0;
    }
  return out;
}

ScalarField smooth_field_against_kernel(const ScalarField& field, const KernelSpec& kernel) {
  auto sm = Smoother::get(field.grid(), field.window(), kernel.bandwidth);
  ScalarField conv = sm->convolve(field);
  const ScalarField& e = sm->edge();
  ScalarField out(field.grid(), field.window());
  for (int r = 0; r < field.nrows(); ++r)
    for (int c = 0; c < field.ncols(); ++c) {
      double denom = e.at(r, c);
      out.at(r, c) = denom > 0.0 ? conv.at(r, c) / denom : 0.0;
    }
  return out;
}

}  // namespace ptcov
