#include "core/randfield.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>

#include "core/common.hpp"
#include "core/fft2.hpp"

namespace ptcov {
namespace {

// Circulant embedding of the exponential covariance on the doubly extended
// torus. The spectral square roots depend only on (grid, variance, scale),
// so they are shared across realizations.
struct Embedding {
  int prows = 0, pcols = 0;
  std::vector<double> sqrt_eigen;  // sqrt(max(eigenvalue, 0) / (prows*pcols))
  double clipped_mass_fraction = 0.0;
};

std::shared_ptr<const Embedding> get_embedding(const GridSpec& grid, double variance,
                                               double scale) {
  static std::mutex mutex;
  static std::map<std::vector<double>, std::shared_ptr<const Embedding>> cache;
  std::vector<double> key{grid.cell, static_cast<double>(grid.ncols),
                          static_cast<double>(grid.nrows), variance, scale};
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  auto emb = std::make_shared<Embedding>();
  emb->prows = 2 * grid.nrows;
  emb->pcols = 2 * grid.ncols;
  std::size_t total = static_cast<std::size_t>(emb->prows) * emb->pcols;
  std::vector<std::complex<double>> cov(total);
  for (int r = 0; r < emb->prows; ++r) {
    int lag_r = r <= emb->prows / 2 ? r : r - emb->prows;
    for (int c = 0; c < emb->pcols; ++c) {
      int lag_c = c <= emb->pcols / 2 ? c : c - emb->pcols;
      double dist = grid.cell * std::hypot(static_cast<double>(lag_r), static_cast<double>(lag_c));
      cov[static_cast<std::size_t>(r) * emb->pcols + c] = variance * std::exp(-dist / scale);
    }
  }
  fft2::forward(emb->prows, emb->pcols, cov.data());

  double clipped = 0.0, mass = 0.0;
  emb->sqrt_eigen.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    double lambda = cov[i].real();
    mass += std::abs(lambda);
    if (lambda < 0.0) {
      clipped += -lambda;
      lambda = 0.0;
    }
    emb->sqrt_eigen[i] = std::sqrt(lambda / static_cast<double>(total));
  }
  emb->clipped_mass_fraction = mass > 0.0 ? clipped / mass : 0.0;
  if (emb->clipped_mass_fraction > 0.01)
    fail(ErrorKind::numeric,
         "circulant embedding is far from positive semidefinite (clipped mass " +
             std::to_string(emb->clipped_mass_fraction) + ")");

  cache.emplace(std::move(key), emb);
  return emb;
}

}  // namespace

ScalarField simulate_grf(const GaussFieldSpec& spec, const GridSpec& grid, const Window& window,
                         Rng& rng, GrfDiagnostics* diagnostics) {
  if (!(spec.variance >= 0.0)) fail(ErrorKind::invalid_argument, "variance must be nonnegative");
  if (!(spec.scale > 0.0)) fail(ErrorKind::invalid_argument, "covariance scale must be positive");

  ScalarField out(grid, window, spec.mean);
  if (spec.variance == 0.0) {
    if (diagnostics) diagnostics->clipped_mass_fraction = 0.0;
    return out;
  }

  auto emb = get_embedding(grid, spec.variance, spec.scale);
  if (diagnostics) diagnostics->clipped_mass_fraction = emb->clipped_mass_fraction;

  std::size_t total = static_cast<std::size_t>(emb->prows) * emb->pcols;
  std::vector<std::complex<double>> buf(total);
  for (std::size_t i = 0; i < total; ++i)
    buf[i] = emb->sqrt_eigen[i] * std::complex<double>(rng.normal(), rng.normal());
  fft2::forward(emb->prows, emb->pcols, buf.data());

  for (int r = 0; r < grid.nrows; ++r)
    for (int c = 0; c < grid.ncols; ++c)
      out.at(r, c) = spec.mean + buf[static_cast<std::size_t>(r) * emb->pcols + c].real();
  return out;
}

}  // namespace ptcov
