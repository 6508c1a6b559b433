#include <doctest.h>

#include <cmath>

#include "core/harness.hpp"
#include "core/pointsim.hpp"
#include "core/smooth.hpp"

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

}  // namespace

TEST_CASE("edge factor: full mass at the center, closed forms at corner and edge") {
  auto [grid, window] = unit_geometry(128);
  ScalarField e = edge_factor(KernelSpec{0.02}, grid, window);
  CHECK(e.lookup(Vec2{0.5, 0.5}) == doctest::Approx(1.0).epsilon(1e-6));

  // Quarter-plane and half-plane Gaussian mass.
  CHECK(edge_factor_at(KernelSpec{0.02}, window, Vec2{0.0, 0.0}) ==
        doctest::Approx(0.25).epsilon(1e-3));
  CHECK(edge_factor_at(KernelSpec{0.02}, window, Vec2{0.5, 0.0}) ==
        doctest::Approx(0.5).epsilon(1e-3));

  // The grid field agrees with the closed form at cell centers.
  for (auto [r, c] : {std::pair{0, 0}, std::pair{0, 64}, std::pair{64, 64}, std::pair{127, 5}}) {
    double expected = edge_factor_at(KernelSpec{0.02}, window, e.cell_center(r, c));
    CHECK(e.at(r, c) == doctest::Approx(expected).epsilon(5e-3));
  }
  for (double v : e.values()) {
    CHECK(v > 0.0);
    CHECK(v <= 1.0 + 1e-9);
  }
}

TEST_CASE("kernel intensity: empty pattern and mass conservation") {
  auto [grid, window] = unit_geometry(128);
  PointPattern empty{{}, window};
  ScalarField zero = kernel_intensity(empty, KernelSpec{0.1}, grid);
  for (double v : zero.values()) CHECK(v == 0.0);

  // Interior points keep the whole kernel mass inside the window.
  Rng rng(4);
  std::vector<Vec2> pts;
  for (int i = 0; i < 50; ++i) pts.push_back(Vec2{rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8)});
  PointPattern pattern = make_pattern(pts, window);
  KernelSpec kernel{0.03};
  ScalarField est = kernel_intensity(pattern, kernel, grid);
  ScalarField e = edge_factor(kernel, grid, window);
  ScalarField product = est;
  for (std::size_t i = 0; i < product.values().size(); ++i)
    product.values()[i] = est.values()[i] * e.values()[i];
  CHECK(integrate(product) == doctest::Approx(50.0).epsilon(1e-3));
}

TEST_CASE("kernel intensity is unbiased for a homogeneous Poisson process") {
  auto [grid, window] = unit_geometry(128);
  const int reps = 100;
  std::vector<double> means(reps);
  parallel_for(reps, 0, [&](long r) {
    Rng rng = Rng::substream(99, {stream::pattern, static_cast<std::uint64_t>(r)});
    ScalarField intensity(grid, window, 148.4);
    PointPattern p = simulate_poisson(intensity, rng);
    ScalarField est = kernel_intensity(p, KernelSpec{0.1}, grid);
    means[static_cast<std::size_t>(r)] = integrate(est) / window.area();
  });
  double mean = 0.0;
  for (double v : means) mean += v;
  mean /= reps;
  CHECK(std::abs(mean - 148.4) < 5.0);
}

TEST_CASE("smoothing a constant returns the constant") {
  auto [grid, window] = unit_geometry(128);
  ScalarField constant(grid, window, 3.25);
  ScalarField smoothed = smooth_field_against_kernel(constant, KernelSpec{0.15});
  for (double v : smoothed.values()) CHECK(v == doctest::Approx(3.25).epsilon(1e-6));
}

TEST_CASE("smoothing is locally exact for odd symmetry") {
  auto [grid, window] = unit_geometry(128);
  ScalarField fx(grid, window);
  for (int r = 0; r < 128; ++r)
    for (int c = 0; c < 128; ++c) fx.at(r, c) = fx.cell_center(r, c).x;
  ScalarField smoothed = smooth_field_against_kernel(fx, KernelSpec{0.05});
  // Odd moments vanish, so the value at an interior cell center is the
  // linear field itself up to O(bandwidth^2) boundary leakage.
  double center_x = fx.cell_center(64, 64).x;
  CHECK(smoothed.at(64, 64) == doctest::Approx(center_x).epsilon(2e-3));
}

TEST_CASE("half-window indicator smooths to one half on the divide") {
  auto [grid, window] = unit_geometry(256);
  ScalarField indicator(grid, window);
  for (int r = 0; r < 256; ++r)
    for (int c = 0; c < 256; ++c)
      indicator.at(r, c) = indicator.cell_center(r, c).x < 0.5 ? 1.0 : 0.0;
  ScalarField smoothed = smooth_field_against_kernel(indicator, KernelSpec{0.1});
  CHECK(smoothed.lookup(Vec2{0.5, 0.5}) == doctest::Approx(0.5).epsilon(2e-2));
}

TEST_CASE("residual premise: kernel estimate fluctuates around the smoothed truth") {
  auto [grid, window] = unit_geometry(64);
  ScalarField intensity(grid, window);
  for (int r = 0; r < 64; ++r)
    for (int c = 0; c < 64; ++c)
      intensity.at(r, c) = 200.0 * std::exp(-intensity.cell_center(r, c).x);
  const int reps = 200;
  KernelSpec kernel{0.1};
  ScalarField smoothed_truth = smooth_field_against_kernel(intensity, kernel);
  std::vector<double> deviations(reps);
  parallel_for(reps, 0, [&](long r) {
    Rng rng = Rng::substream(55, {stream::pattern, static_cast<std::uint64_t>(r)});
    PointPattern p = simulate_poisson(intensity, rng);
    ScalarField est = kernel_intensity(p, kernel, grid);
    ScalarField diff = est;
    for (std::size_t i = 0; i < diff.values().size(); ++i)
      diff.values()[i] = est.values()[i] - smoothed_truth.values()[i];
    deviations[static_cast<std::size_t>(r)] = integrate(diff) / window.area();
  });
  double mean = 0.0;
  for (double v : deviations) mean += v;
  mean /= reps;
  // Monte Carlo error of the mean deviation is about sqrt(200)/sqrt(reps).
  CHECK(std::abs(mean) < 4.0);
}

TEST_CASE("interior translation equivariance under cell-snapped shifts") {
  auto [grid, window] = unit_geometry(128);
  std::vector<Vec2> pts{{0.40, 0.45}, {0.52, 0.48}, {0.47, 0.55}};
  PointPattern base = make_pattern(pts, window);
  ShiftVector v = snap_to_cells(grid, ShiftVector{0.1, 0.05});
  std::vector<Vec2> moved;
  for (const Vec2& p : pts) moved.push_back(Vec2{p.x + v.x, p.y + v.y});
  PointPattern shifted = make_pattern(moved, window);

  KernelSpec kernel{0.03};
  ScalarField est_base = kernel_intensity(base, kernel, grid);
  ScalarField est_shift = kernel_intensity(shifted, kernel, grid);
  // Compare at cells far from the boundary: the estimate moves with the data.
  for (int r = 40; r < 90; ++r)
    for (int c = 40; c < 90; ++c) {
      Vec2 u = est_base.cell_center(r, c);
      double a = est_base.at(r, c);
      double b = est_shift.lookup(Vec2{u.x + v.x, u.y + v.y});
      CHECK(a == doctest::Approx(b).epsilon(1e-9));
    }
}
