#include <doctest.h>

#include <cmath>

#include "core/harness.hpp"
#include "core/pointsim.hpp"

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

double mean_count(const std::string& model, int reps, long gibbs_steps = 100000) {
  auto [grid, window] = unit_geometry(128);
  ModelSpec spec = catalog_model(model);
  std::vector<double> counts(static_cast<std::size_t>(reps));
  parallel_for(reps, 0, [&](long r) {
    Rng f = Rng::substream(2024, {stream::fields, static_cast<std::uint64_t>(r)});
    Rng p = Rng::substream(2024, {stream::pattern, static_cast<std::uint64_t>(r)});
    GibbsConfig gibbs;
    gibbs.proposals = gibbs_steps;
    SimulationOutput out = simulate_model(spec, grid, window, f, p, gibbs);
    counts[static_cast<std::size_t>(r)] = static_cast<double>(out.pattern.size());
  });
  double m = 0.0;
  for (double c : counts) m += c;
  return m / reps;
}

}  // namespace

TEST_CASE("zero intensity produces the empty pattern") {
  auto [grid, window] = unit_geometry(32);
  ScalarField zero(grid, window, 0.0);
  Rng rng(1);
  CHECK(simulate_poisson(zero, rng).size() == 0);
}

TEST_CASE("constant-intensity Poisson mean count") {
  auto [grid, window] = unit_geometry(64);
  ScalarField intensity(grid, window, std::exp(5.0));
  const int reps = 5000;
  std::vector<double> counts(reps);
  parallel_for(reps, 0, [&](long r) {
    Rng rng = Rng::substream(31, {stream::pattern, static_cast<std::uint64_t>(r)});
    counts[static_cast<std::size_t>(r)] = static_cast<double>(simulate_poisson(intensity, rng).size());
  });
  double mean = 0.0, var = 0.0;
  for (double c : counts) mean += c;
  mean /= reps;
  for (double c : counts) var += (c - mean) * (c - mean);
  var /= reps - 1;
  CHECK(std::abs(mean - 148.4) < 2.0);
  // Poisson counts are equidispersed.
  CHECK(std::abs(var / mean - 1.0) < 0.1);
}

TEST_CASE("parabolic intensity is left-right symmetric") {
  auto [grid, window] = unit_geometry(128);
  ScalarField intensity(grid, window);
  for (int r = 0; r < 128; ++r)
    for (int c = 0; c < 128; ++c) {
      double x = intensity.cell_center(r, c).x;
      intensity.at(r, c) = 400.0 * (1.0 - 4.0 * (x - 0.5) * (x - 0.5));
    }
  const int reps = 2000;
  std::vector<double> diff(reps);
  parallel_for(reps, 0, [&](long r) {
    Rng rng = Rng::substream(32, {stream::pattern, static_cast<std::uint64_t>(r)});
    PointPattern p = simulate_poisson(intensity, rng);
    long left = 0, right = 0;
    for (const Vec2& pt : p.points) (pt.x < 0.5 ? left : right)++;
    diff[static_cast<std::size_t>(r)] = static_cast<double>(left - right);
  });
  double mean_diff = 0.0;
  for (double d : diff) mean_diff += d;
  mean_diff /= reps;
  CHECK(std::abs(mean_diff) < 1.5);
}

TEST_CASE("lgcp mean counts match the lognormal identity") {
  // L1: exp(4 + Z1 + Z2) has mean exp(4 + 1) by the lognormal identity.
  CHECK(std::abs(mean_count("L1", 5000) - 148.4) < 3.0);
}

TEST_CASE("lgcp quadratic variant matches its moment identity") {
  // L2: E[exp(4.5 + Z2) * Z1^2] = exp(5).
  CHECK(std::abs(mean_count("L2", 5000) - 148.4) < 3.0);
}

TEST_CASE("lgcp with variance-zero fields degenerates to the constant Poisson") {
  auto [grid, window] = unit_geometry(64);
  ModelSpec spec = catalog_model("L1");
  spec.field_spec.variance = 0.0;
  Rng f(5), p1(77);
  SimulationOutput out = simulate_model(spec, grid, window, f, p1, {});

  ScalarField constant(grid, window, std::exp(4.0));
  Rng p2(77);
  PointPattern direct = simulate_poisson(constant, p2);
  REQUIRE(out.pattern.size() == direct.size());
  for (std::size_t i = 0; i < direct.size(); ++i) {
    CHECK(out.pattern.points[i].x == direct.points[i].x);
    CHECK(out.pattern.points[i].y == direct.points[i].y);
  }
}

TEST_CASE("lgcp counts are overdispersed") {
  auto [grid, window] = unit_geometry(64);
  ModelSpec spec = catalog_model("L1");
  const int reps = 2000;
  std::vector<double> counts(reps);
  parallel_for(reps, 0, [&](long r) {
    Rng f = Rng::substream(8, {stream::fields, static_cast<std::uint64_t>(r)});
    Rng p = Rng::substream(8, {stream::pattern, static_cast<std::uint64_t>(r)});
    counts[static_cast<std::size_t>(r)] =
        static_cast<double>(simulate_model(spec, grid, window, f, p, {}).pattern.size());
  });
  double mean = 0.0, var = 0.0;
  for (double c : counts) mean += c;
  mean /= reps;
  for (double c : counts) var += (c - mean) * (c - mean);
  var /= reps - 1;
  CHECK(var / mean > 1.5);
}

TEST_CASE("strauss with gamma 1 is a Poisson process") {
  auto [grid, window] = unit_geometry(64);
  ScalarField trend(grid, window, 150.0);
  StraussParams params{1.0, 0.05, 0.0};
  const int reps = 1000;
  std::vector<double> counts(reps);
  parallel_for(reps, 0, [&](long r) {
    Rng rng = Rng::substream(17, {stream::gibbs, static_cast<std::uint64_t>(r)});
    GibbsConfig gibbs;
    gibbs.proposals = 20000;
    counts[static_cast<std::size_t>(r)] =
        static_cast<double>(simulate_gibbs(params, trend, rng, gibbs).size());
  });
  double mean = 0.0, var = 0.0;
  for (double c : counts) mean += c;
  mean /= reps;
  for (double c : counts) var += (c - mean) * (c - mean);
  var /= reps - 1;
  CHECK(std::abs(mean - 150.0) < 2.0);
  CHECK(std::abs(var / mean - 1.0) < 0.15);
}

TEST_CASE("hardcore constraint is never violated") {
  auto [grid, window] = unit_geometry(128);
  ModelSpec spec = catalog_model("H1");
  const int reps = 100;
  std::vector<char> violated(reps, 0);
  parallel_for(reps, 0, [&](long r) {
    Rng f = Rng::substream(91, {stream::fields, static_cast<std::uint64_t>(r)});
    Rng p = Rng::substream(91, {stream::pattern, static_cast<std::uint64_t>(r)});
    GibbsConfig gibbs;
    gibbs.proposals = 30000;
    PointPattern pat = simulate_model(spec, grid, window, f, p, gibbs).pattern;
    for (std::size_t i = 0; i < pat.size(); ++i)
      for (std::size_t j = i + 1; j < pat.size(); ++j) {
        double dx = pat.points[i].x - pat.points[j].x;
        double dy = pat.points[i].y - pat.points[j].y;
        if (dx * dx + dy * dy < 0.01 * 0.01) violated[static_cast<std::size_t>(r)] = 1;
      }
  });
  for (char v : violated) CHECK(v == 0);
}

TEST_CASE("strauss S1 hits the calibrated mean count") {
  double mean = mean_count("S1", 1000, 100000);
  CHECK(std::abs(mean - std::exp(5.0)) < 0.05 * std::exp(5.0));
}

TEST_CASE("non-locally-stable specs are rejected") {
  auto [grid, window] = unit_geometry(32);
  ScalarField trend(grid, window, 100.0);
  Rng rng(1);
  CHECK_THROWS(simulate_gibbs(StraussParams{4.0, 0.02, 0.0}, trend, rng, {}));
  CHECK_THROWS(simulate_gibbs(StraussParams{0.5, 0.05, 0.06}, trend, rng, {}));
}

TEST_CASE("trend expressions cover the model algebra") {
  auto [grid, window] = unit_geometry(16);
  std::vector<ScalarField> fields;
  fields.push_back(ScalarField(grid, window, 2.0));
  using E = TrendExpr;
  ScalarField s = E::max_norm(E::relu(E::add(E::constant(-1.0), E::square(E::field(0)))))
                      .evaluate(fields, grid, window);
  // (-1 + 4) = 3 everywhere, relu keeps it, max-norm scales to 1.
  for (double v : s.values()) CHECK(v == doctest::Approx(1.0));
  ScalarField e = E::exp(E::mul(E::constant(0.5), E::field(0))).evaluate(fields, grid, window);
  for (double v : e.values()) CHECK(v == doctest::Approx(std::exp(1.0)));
}

TEST_CASE("correlated-covariate model builds c2 = c1 + b z3 cell-exactly") {
  auto [grid, window] = unit_geometry(64);
  ModelSpec spec = catalog_model("L1star", std::nullopt, 2.0);
  Rng frng(271828), prng(1);
  std::uint64_t base = Rng(271828).next();  // the model consumes one draw for field seeding
  SimulationOutput out = simulate_model(spec, grid, window, frng, prng, {});
  Rng z3_rng = Rng::substream(base, {2});
  ScalarField z3 = simulate_grf(spec.field_spec, grid, window, z3_rng);
  for (std::size_t i = 0; i < out.c2.values().size(); ++i)
    CHECK(out.c2.values()[i] == out.c1.values()[i] + 2.0 * z3.values()[i]);
}

TEST_CASE("unknown model names are rejected") {
  CHECK_THROWS(catalog_model("Q7"));
  CHECK(catalog_names().size() == 17);
}
