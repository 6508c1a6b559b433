#include <doctest.h>

#include <cmath>

#include "core/depmeasure.hpp"
#include "core/harness.hpp"
#include "core/loglin.hpp"
#include "core/pointsim.hpp"
#include "core/residual.hpp"
#include "core/rhohat.hpp"

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

ScalarField parabolic_intensity(const GridSpec& grid, const Window& window) {
  ScalarField f(grid, window);
  for (int r = 0; r < grid.nrows; ++r)
    for (int c = 0; c < grid.ncols; ++c) {
      double x = f.cell_center(r, c).x;
      f.at(r, c) = 400.0 * (1.0 - 4.0 * (x - 0.5) * (x - 0.5));
    }
  return f;
}

}  // namespace

TEST_CASE("residual measure is centered under the true intensity") {
  auto [grid, window] = unit_geometry(64);
  ScalarField intensity(grid, window, 148.4);
  const int reps = 5000;
  std::vector<double> residuals(reps);
  parallel_for(reps, 0, [&](long r) {
    Rng rng = Rng::substream(7, {stream::pattern, static_cast<std::uint64_t>(r)});
    PointPattern p = simulate_poisson(intensity, rng);
    ResidualMeasure rm = residual_measure(p, intensity, Provenance::constant);
    residuals[static_cast<std::size_t>(r)] = rm.evaluate(window);
  });
  double mean = 0.0;
  for (double v : residuals) mean += v;
  mean /= reps;
  CHECK(std::abs(mean) < 0.5);
}

TEST_CASE("residual measure closed forms") {
  auto [grid, window] = unit_geometry(32);
  PointPattern empty{{}, window};
  ScalarField c(grid, window, 3.0);
  CHECK(residual_measure(empty, c, Provenance::constant).evaluate(window) ==
        doctest::Approx(-3.0).epsilon(1e-12));

  std::vector<Vec2> pts;
  Rng rng(3);
  for (int i = 0; i < 10; ++i) pts.push_back(Vec2{rng.uniform01(), rng.uniform01()});
  PointPattern ten = make_pattern(pts, window);
  ScalarField ten_over_area(grid, window, 10.0 / window.area());
  CHECK(std::abs(residual_measure(ten, ten_over_area, Provenance::constant).evaluate(window)) <
        1e-6);

  // Sub-region evaluation counts points and integrates over the region only.
  Window left = Window::rectangle(0, 0, 0.5, 1);
  ResidualMeasure rm = residual_measure(ten, ten_over_area, Provenance::constant);
  long in_left = 0;
  for (const Vec2& p : pts)
    if (left.contains(p)) ++in_left;
  CHECK(rm.evaluate(left) == doctest::Approx(static_cast<double>(in_left) - 5.0).epsilon(1e-9));
}

TEST_CASE("feeding the empirical cell density back gives an exactly zero field") {
  auto [grid, window] = unit_geometry(64);
  Rng rng(5);
  ScalarField intensity(grid, window, 150.0);
  PointPattern p = simulate_poisson(intensity, rng);
  ScalarField empirical(grid, window, 0.0);
  for (const Vec2& pt : p.points)
    empirical.at(empirical.row_of(pt.y), empirical.col_of(pt.x)) += 1.0 / empirical.cell_area();
  ResidualField s =
      smoothed_residual_field(p, empirical, Provenance::nonparametric, KernelSpec{0.1});
  for (double v : s.field.values()) CHECK(v == 0.0);
}

TEST_CASE("constant provenance matches the closed form cell-exactly") {
  auto [grid, window] = unit_geometry(64);
  Rng rng(6);
  ScalarField intensity(grid, window, 150.0);
  PointPattern p = simulate_poisson(intensity, rng);
  double constant = static_cast<double>(p.size()) / window.area();
  ScalarField lambda(grid, window, constant);
  ResidualField s = smoothed_residual_field(p, lambda, Provenance::constant, KernelSpec{0.1});
  ScalarField ki = kernel_intensity(p, KernelSpec{0.1}, grid);
  for (int r = 0; r < 64; ++r)
    for (int c = 0; c < 64; ++c) CHECK(s.field.at(r, c) == ki.at(r, c) - constant);

  // Field mean vanishes up to the kernel mass identity.
  double mean_s = integrate(s.field) / window.area();
  double identity = integrate(ki) / window.area() - constant;
  CHECK(mean_s == doctest::Approx(identity).epsilon(1e-6));
  CHECK(std::abs(mean_s) < 0.05 * constant + 3.0);
}

TEST_CASE("nonparametric residuals beat a misspecified log-linear fit") {
  auto [grid, window] = unit_geometry(128);
  ScalarField intensity = parabolic_intensity(grid, window);
  ScalarField covariate(grid, window);
  for (int r = 0; r < 128; ++r)
    for (int c = 0; c < 128; ++c) covariate.at(r, c) = covariate.cell_center(r, c).x;
  const int reps = 200;
  std::vector<char> nonpar_wins(reps, 0);
  parallel_for(reps, 0, [&](long r) {
    Rng rng = Rng::substream(41, {stream::pattern, static_cast<std::uint64_t>(r)});
    PointPattern p = simulate_poisson(intensity, rng);
    KernelSpec kernel{0.1};
    ScalarField lam_np = fit_rho(p, {&covariate}, grid).lambda;
    ScalarField lam_par = fit_loglinear(p, {&covariate}, grid).lambda;
    ScalarField s_np =
        smoothed_residual_field(p, lam_np, Provenance::nonparametric, kernel).field;
    ScalarField s_par =
        smoothed_residual_field(p, lam_par, Provenance::parametric, kernel).field;
    double a_np = 0.0, a_par = 0.0;
    for (std::size_t i = 0; i < s_np.values().size(); ++i) {
      a_np += std::abs(s_np.values()[i]);
      a_par += std::abs(s_par.values()[i]);
    }
    nonpar_wins[static_cast<std::size_t>(r)] = a_np < a_par ? 1 : 0;
  });
  int wins = 0;
  for (char w : nonpar_wins) wins += w;
  CHECK(wins >= static_cast<int>(0.8 * reps));
}

TEST_CASE("parametric and nonparametric residual fields agree in a log-linear world") {
  auto [grid, window] = unit_geometry(128);
  const int reps = 50;
  std::vector<double> taus(reps);
  parallel_for(reps, 0, [&](long r) {
    Rng frng = Rng::substream(43, {stream::fields, static_cast<std::uint64_t>(r)});
    Rng prng = Rng::substream(43, {stream::pattern, static_cast<std::uint64_t>(r)});
    ScalarField z = simulate_grf(GaussFieldSpec{0, 1, 0.1}, grid, window, frng);
    ScalarField intensity(grid, window);
    for (std::size_t i = 0; i < intensity.values().size(); ++i)
      intensity.values()[i] = std::exp(4.5 + z.values()[i]);
    PointPattern p = simulate_poisson(intensity, prng);
    KernelSpec kernel{0.1};
    ScalarField s_np =
        smoothed_residual_field(p, fit_rho(p, {&z}, grid).lambda, Provenance::nonparametric, kernel)
            .field;
    ScalarField s_par = smoothed_residual_field(p, fit_loglinear(p, {&z}, grid).lambda,
                                                Provenance::parametric, kernel)
                            .field;
    std::vector<double> a, b;
    for (int rr = 0; rr < 128; rr += 4)
      for (int cc = 0; cc < 128; cc += 4) {
        a.push_back(s_np.at(rr, cc));
        b.push_back(s_par.at(rr, cc));
      }
    taus[static_cast<std::size_t>(r)] = kendall_tau(a, b);
  });
  double mean = 0.0;
  for (double t : taus) mean += t;
  mean /= reps;
  CHECK(mean > 0.5);
}

TEST_CASE("builder shares one intensity across bandwidths") {
  auto [grid, window] = unit_geometry(64);
  Rng rng(9);
  ScalarField intensity(grid, window, 120.0);
  PointPattern p = simulate_poisson(intensity, rng);
  ScalarField lambda(grid, window, static_cast<double>(p.size()) / window.area());
  ResidualFieldBuilder builder(p, lambda, Provenance::constant);
  ScalarField a = builder.field(0.08);
  ScalarField b = builder.field(0.2);
  ResidualField direct =
      smoothed_residual_field(p, lambda, Provenance::constant, KernelSpec{0.2});
  for (int r = 0; r < 64; r += 5)
    for (int c = 0; c < 64; c += 5) CHECK(b.at(r, c) == doctest::Approx(direct.field.at(r, c)));
  // Different bandwidths genuinely differ.
  double diff = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i)
    diff += std::abs(a.values()[i] - b.values()[i]);
  CHECK(diff > 0.0);
}
