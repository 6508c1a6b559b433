#include <doctest.h>

#include <cmath>

#include "core/harness.hpp"
#include "core/loglin.hpp"
#include "core/pointsim.hpp"
#include "core/randfield.hpp"

using namespace ptcov;

namespace {

struct Geometry {
  GridSpec grid;
  Window window;
};

Geometry unit_geometry(int n) {
  Window w = Window::rectangle(0, 0, 1, 1);
  return Geometry{GridSpec{Vec2{0, 0}, 1.0 / n, n, n}, w};
}

// Quadrature log-likelihood oracle, independent of the fitter internals.
double quadrature_loglik(const PointPattern& pattern,
                         const std::vector<const ScalarField*>& covariates,
                         const std::vector<double>& beta, const GridSpec& grid) {
  double ll = 0.0;
  for (const Vec2& p : pattern.points) {
    double eta = beta[0];
    for (std::size_t j = 0; j < covariates.size(); ++j) eta += beta[j + 1] * covariates[j]->lookup(p);
    ll += eta;
  }
  ScalarField probe(grid, pattern.window);
  for (int r = 0; r < grid.nrows; ++r)
    for (int c = 0; c < grid.ncols; ++c) {
      if (!probe.center_in_window(r, c)) continue;
      double eta = beta[0];
      Vec2 u = probe.cell_center(r, c);
      for (std::size_t j = 0; j < covariates.size(); ++j)
        eta += beta[j + 1] * covariates[j]->lookup(u);
      ll -= std::exp(eta) * grid.cell * grid.cell;
    }
  return ll;
}

}  // namespace

TEST_CASE("intercept-only fit is the closed-form Poisson MLE") {
  auto [grid, window] = unit_geometry(64);
  Rng rng(1);
  ScalarField intensity(grid, window, 120.0);
  PointPattern pattern = simulate_poisson(intensity, rng);
  LogLinFit fit = fit_loglinear(pattern, {}, grid);
  double expected = std::log(static_cast<double>(pattern.size()) / window.area());
  CHECK(fit.beta[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("slope recovery on log-linear data") {
  auto [grid, window] = unit_geometry(128);
  const int reps = 500;
  std::vector<double> slopes(reps);
  parallel_for(reps, 0, [&](long r) {
    Rng frng = Rng::substream(61, {stream::fields, static_cast<std::uint64_t>(r)});
    Rng prng = Rng::substream(61, {stream::pattern, static_cast<std::uint64_t>(r)});
    ScalarField z = simulate_grf(GaussFieldSpec{0, 1, 0.1}, grid, window, frng);
    ScalarField intensity(grid, window);
    for (std::size_t i = 0; i < intensity.values().size(); ++i)
      intensity.values()[i] = std::exp(4.5 + z.values()[i]);
    PointPattern pattern = simulate_poisson(intensity, prng);
    LogLinFit fit = fit_loglinear(pattern, {&z}, grid);
    slopes[static_cast<std::size_t>(r)] = fit.beta[1];
  });
  double mean = 0.0;
  for (double s : slopes) mean += s;
  mean /= reps;
  CHECK(std::abs(mean - 1.0) < 0.05);
}

TEST_CASE("fit is a local maximum of the quadrature likelihood") {
  auto [grid, window] = unit_geometry(64);
  Rng frng(71), prng(72);
  ScalarField z = simulate_grf(GaussFieldSpec{0, 1, 0.1}, grid, window, frng);
  ScalarField intensity(grid, window);
  for (std::size_t i = 0; i < intensity.values().size(); ++i)
    intensity.values()[i] = std::exp(4.5 + z.values()[i]);
  PointPattern pattern = simulate_poisson(intensity, prng);
  LogLinFit fit = fit_loglinear(pattern, {&z}, grid);
  double at_fit = quadrature_loglik(pattern, {&z}, fit.beta, grid);
  Rng probe_rng(5);
  for (int probe = 0; probe < 30; ++probe) {
    std::vector<double> beta = fit.beta;
    for (double& b : beta) b += 0.05 * probe_rng.normal();
    CHECK(quadrature_loglik(pattern, {&z}, beta, grid) <= at_fit + 1e-9);
  }
  CHECK(fit.gradient_norm < 1e-8);
}

TEST_CASE("grid refinement moves the estimate very little") {
  auto [grid, window] = unit_geometry(128);
  Rng frng(81), prng(82);
  ScalarField z = simulate_grf(GaussFieldSpec{0, 1, 0.1}, grid, window, frng);
  ScalarField intensity(grid, window);
  for (std::size_t i = 0; i < intensity.values().size(); ++i)
    intensity.values()[i] = std::exp(4.5 + z.values()[i]);
  PointPattern pattern = simulate_poisson(intensity, prng);
  LogLinFit coarse = fit_loglinear(pattern, {&z}, grid);

  GridSpec fine{Vec2{0, 0}, 1.0 / 256, 256, 256};
  ScalarField z_fine(fine, window);
  for (int r = 0; r < 256; ++r)
    for (int c = 0; c < 256; ++c) z_fine.at(r, c) = z.lookup(z_fine.cell_center(r, c));
  LogLinFit refined = fit_loglinear(pattern, {&z_fine}, fine);
  CHECK(std::abs(coarse.beta[0] - refined.beta[0]) < 1e-2);
  CHECK(std::abs(coarse.beta[1] - refined.beta[1]) < 1e-2);
}

TEST_CASE("duplicate covariates are a singular design") {
  auto [grid, window] = unit_geometry(64);
  Rng frng(91), prng(92);
  ScalarField z = simulate_grf(GaussFieldSpec{0, 1, 0.1}, grid, window, frng);
  ScalarField intensity(grid, window, 150.0);
  PointPattern pattern = simulate_poisson(intensity, prng);
  CHECK_THROWS(fit_loglinear(pattern, {&z, &z}, grid));
}

TEST_CASE("wald p-value is one at a zero coefficient") {
  Window w = Window::rectangle(0, 0, 1, 1);
  LogLinFit fit{{0.0, 0.0},
                {{1.0, 0.0}, {0.0, 0.25}},
                ScalarField(GridSpec{Vec2{0, 0}, 0.5, 2, 2}, w, 1.0),
                0,
                0.0};
  CHECK(wald_p_value(fit, 1) == doctest::Approx(1.0));
  fit.beta[1] = 2.0 * 1.959963984540054 * 0.5;
  CHECK(wald_p_value(fit, 1) < 0.05);
}

TEST_CASE("covariance is symmetric positive and in original units") {
  auto [grid, window] = unit_geometry(64);
  Rng frng(101), prng(102);
  ScalarField z = simulate_grf(GaussFieldSpec{5.0, 4.0, 0.1}, grid, window, frng);
  ScalarField intensity(grid, window);
  for (std::size_t i = 0; i < intensity.values().size(); ++i)
    intensity.values()[i] = std::exp(4.0 + 0.3 * (z.values()[i] - 5.0));
  PointPattern pattern = simulate_poisson(intensity, prng);
  LogLinFit fit = fit_loglinear(pattern, {&z}, grid);
  CHECK(fit.covariance[0][1] == doctest::Approx(fit.covariance[1][0]).epsilon(1e-9));
  CHECK(fit.covariance[0][0] > 0.0);
  CHECK(fit.covariance[1][1] > 0.0);
  // Fitted intensity stays strictly positive.
  for (int r = 0; r < 64; ++r)
    for (int c = 0; c < 64; ++c) CHECK(fit.lambda.at(r, c) > 0.0);
}
