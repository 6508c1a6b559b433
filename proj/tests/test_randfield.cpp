#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/harness.hpp"
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

}  // namespace

TEST_CASE("zero variance gives the constant mean field") {
  auto [grid, window] = unit_geometry(32);
  Rng rng(1);
  ScalarField f = simulate_grf(GaussFieldSpec{2.5, 0.0, 0.1}, grid, window, rng);
  for (double v : f.values()) CHECK(v == 2.5);
}

TEST_CASE("same seed produces the identical field") {
  auto [grid, window] = unit_geometry(64);
  Rng a(9), b(9);
  ScalarField fa = simulate_grf(GaussFieldSpec{0, 1, 0.1}, grid, window, a);
  ScalarField fb = simulate_grf(GaussFieldSpec{0, 1, 0.1}, grid, window, b);
  CHECK(fa.values() == fb.values());
}

TEST_CASE("marginal moments at a fixed cell over many realizations") {
  auto [grid, window] = unit_geometry(32);
  const int reps = 10000;
  std::vector<double> values(reps);
  parallel_for(reps, 0, [&](long r) {
    Rng rng = Rng::substream(1234, {stream::fields, static_cast<std::uint64_t>(r)});
    ScalarField f = simulate_grf(GaussFieldSpec{0, 1, 0.1}, grid, window, rng);
    values[static_cast<std::size_t>(r)] = f.at(13, 21);
  });
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= reps;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : values) {
    double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= reps;
  m3 /= reps;
  m4 /= reps;
  double sd = std::sqrt(m2);
  CHECK(std::abs(mean) < 0.05);
  CHECK(std::abs(m2 - 1.0) < 0.05);
  CHECK(std::abs(m3 / (sd * sd * sd)) < 0.1);
  CHECK(std::abs(m4 / (m2 * m2) - 3.0) < 0.1);
}

TEST_CASE("exponential covariance at lag phi") {
  // Cells ten columns apart on a 0.01 grid sit exactly at lag 0.1 = phi, so
  // the correlation target is exp(-1).
  auto [grid, window] = unit_geometry(100);
  const int reps = 10000;
  std::vector<double> a(reps), b(reps), c(reps);
  parallel_for(reps, 0, [&](long r) {
    Rng rng = Rng::substream(777, {stream::fields, static_cast<std::uint64_t>(r)});
    ScalarField f = simulate_grf(GaussFieldSpec{0, 1, 0.1}, grid, window, rng);
    a[static_cast<std::size_t>(r)] = f.at(50, 40);
    b[static_cast<std::size_t>(r)] = f.at(50, 50);
    c[static_cast<std::size_t>(r)] = f.at(40, 50);
  });
  auto corr = [&](const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (int i = 0; i < reps; ++i) {
      mx += x[static_cast<std::size_t>(i)];
      my += y[static_cast<std::size_t>(i)];
    }
    mx /= reps;
    my /= reps;
    double sxy = 0, sxx = 0, syy = 0;
    for (int i = 0; i < reps; ++i) {
      double dx = x[static_cast<std::size_t>(i)] - mx;
      double dy = y[static_cast<std::size_t>(i)] - my;
      sxy += dx * dy;
      sxx += dx * dx;
      syy += dy * dy;
    }
    return sxy / std::sqrt(sxx * syy);
  };
  CHECK(std::abs(corr(a, b) - std::exp(-1.0)) < 0.03);
  CHECK(std::abs(corr(c, b) - std::exp(-1.0)) < 0.03);
}

TEST_CASE("independent streams are uncorrelated") {
  auto [grid, window] = unit_geometry(32);
  const int reps = 5000;
  std::vector<double> a(reps), b(reps);
  parallel_for(reps, 0, [&](long r) {
    Rng r1 = Rng::substream(42, {stream::fields, static_cast<std::uint64_t>(r), 0});
    Rng r2 = Rng::substream(42, {stream::fields, static_cast<std::uint64_t>(r), 1});
    ScalarField f1 = simulate_grf(GaussFieldSpec{0, 1, 0.1}, grid, window, r1);
    ScalarField f2 = simulate_grf(GaussFieldSpec{0, 1, 0.1}, grid, window, r2);
    a[static_cast<std::size_t>(r)] = f1.at(16, 16);
    b[static_cast<std::size_t>(r)] = f2.at(16, 16);
  });
  double mx = 0, my = 0, sxy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < reps; ++i) {
    mx += a[static_cast<std::size_t>(i)];
    my += b[static_cast<std::size_t>(i)];
  }
  mx /= reps;
  my /= reps;
  for (int i = 0; i < reps; ++i) {
    double dx = a[static_cast<std::size_t>(i)] - mx;
    double dy = b[static_cast<std::size_t>(i)] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  CHECK(std::abs(sxy / std::sqrt(sxx * syy)) < 0.03);
}

TEST_CASE("embedding diagnostics stay under the clipping threshold") {
  auto [grid, window] = unit_geometry(128);
  Rng rng(3);
  GrfDiagnostics diag;
  simulate_grf(GaussFieldSpec{0, 1, 0.1}, grid, window, rng, &diag);
  CHECK(diag.clipped_mass_fraction >= 0.0);
  CHECK(diag.clipped_mass_fraction < 0.01);
}
