#include "core/shifttest.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "core/common.hpp"

namespace ptcov {
namespace {

struct CellIndex {
  int row = 0;
  int col = 0;
};

struct ShiftSteps {
  long dr = 0;
  long dc = 0;
};

ShiftSteps steps_of(const GridSpec& grid, ShiftVector v) {
  return ShiftSteps{std::lround(v.y / grid.cell), std::lround(v.x / grid.cell)};
}

int wrap_index(long i, int n) {
  long m = i % n;
  if (m < 0) m += n;
  return static_cast<int>(m);
}

double intersection_area(const Window& window, ShiftVector v, const GridSpec& grid) {
  if (window.is_rectangle()) {
    auto wi = euclid_shift_intersection(window, v);
    return wi ? wi->area() : 0.0;
  }
  // Grid count for polygon windows.
  long count = 0;
  for (int r = 0; r < grid.nrows; ++r)
    for (int c = 0; c < grid.ncols; ++c) {
      Vec2 u{grid.origin.x + (c + 0.5) * grid.cell, grid.origin.y + (r + 0.5) * grid.cell};
      if (shift_intersection_contains(window, v, u)) ++count;
    }
  return static_cast<double>(count) * grid.cell * grid.cell;
}

}  // namespace

double two_sided_mc_p(const std::vector<double>& values) {
  if (values.size() < 2)
    fail(ErrorKind::invalid_argument, "Monte Carlo p-value needs at least two values");
  int at_least_as_extreme = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (std::abs(values[i]) >= std::abs(values[0])) ++at_least_as_extreme;
  return (1.0 + at_least_as_extreme) / static_cast<double>(values.size());
}

ShiftTestResult run_shift_test(const PointPattern& pattern,
                               const std::vector<const ScalarField*>& nuisance,
                               const ScalarField& interest, const ShiftTestConfig& config) {
  if (config.n_shifts < 19)
    fail(ErrorKind::invalid_argument, "a random shift test needs at least 19 shifts");
  const Window& window = pattern.window;
  if (config.correction == Correction::torus && !window.is_rectangle())
    fail(ErrorKind::invalid_argument, "torus correction requires a rectangular window");
  const GridSpec& grid = interest.grid();
  for (const ScalarField* c : nuisance)
    if (!c->grid().same_geometry(grid))
      fail(ErrorKind::data, "covariate grids have mismatched geometry");
  if (config.statistic == Statistic::mean_covariate && pattern.points.empty())
    fail(ErrorKind::invalid_argument, "mean covariate statistic is undefined for empty patterns");

  const int n_shifts = config.n_shifts;
  const int nrows = grid.nrows;
  const int ncols = grid.ncols;
  if (config.correction == Correction::torus) {
    const Rect& r = window.rect();
    double eps = 1e-9 * grid.cell;
    if (std::abs(grid.origin.x - r.x0) > eps || std::abs(grid.origin.y - r.y0) > eps ||
        std::abs(grid.origin.x + grid.cell * ncols - r.x1) > eps ||
        std::abs(grid.origin.y + grid.cell * nrows - r.y1) > eps)
      fail(ErrorKind::data, "torus correction requires the grid to tile the window exactly");
  }
  double radius = config.radius > 0.0 ? config.radius : default_shift_radius(window);

  Rng shift_rng = Rng::substream(config.seed, {stream::shifts});
  Rng sampling_rng = Rng::substream(config.seed, {stream::sampling});

  // The residual object is built once from the unshifted data.
  Provenance provenance = nuisance.empty() ? Provenance::constant : config.residuals;
  ScalarField lambda = fit_intensity(pattern, nuisance, provenance, grid);

  SamplingPoints sampling;
  std::vector<double> s_values;  // residual field at the sampling points
  std::vector<CellIndex> sampling_cells;
  double bandwidth_used = 0.0;
  if (config.statistic == Statistic::tau_partial) {
    sampling = draw_sampling_points(window, config.sampling_points, sampling_rng);
    ResidualFieldBuilder builder(pattern, lambda, provenance);
    bandwidth_used = config.fixed_bandwidth;
    if (!(bandwidth_used > 0.0)) {
      if (nuisance.empty()) {
        bandwidth_used = default_bandwidth(window);
      } else {
        std::vector<double> candidates = config.bandwidth_candidates.empty()
                                             ? default_bandwidth_candidates(window)
                                             : config.bandwidth_candidates;
        bandwidth_used = adaptive_bandwidth(builder, nuisance, sampling, candidates);
      }
    }
    ScalarField s = builder.field(bandwidth_used);
    s_values.reserve(sampling.points.size());
    sampling_cells.reserve(sampling.points.size());
    for (const Vec2& p : sampling.points) {
      s_values.push_back(s.lookup(p));
      sampling_cells.push_back(CellIndex{s.row_of(p.y), s.col_of(p.x)});
    }
  }

  std::vector<CellIndex> point_cells;
  point_cells.reserve(pattern.points.size());
  for (const Vec2& p : pattern.points)
    point_cells.push_back(CellIndex{interest.row_of(p.y), interest.col_of(p.x)});

  // Draw the shift vectors, snapped to whole cells. Degenerate shifts (empty
  // intersection, or too little data retained to evaluate the statistic) are
  // rejected and redrawn so the replicate count is preserved.
  Rect bb = window.bounding_box();
  auto draw_one = [&]() -> ShiftVector {
    ShiftVector v{};
    if (config.shift_dist == ShiftDist::uniform_window) {
      if (config.correction != Correction::torus)
        fail(ErrorKind::invalid_argument,
             "uniform-window shift vectors are only defined for the torus correction");
      v = ShiftVector{shift_rng.uniform(0.0, bb.width()), shift_rng.uniform(0.0, bb.height())};
    } else {
      double r = radius * std::sqrt(shift_rng.uniform01());
      double theta = 2.0 * std::numbers::pi * shift_rng.uniform01();
      v = ShiftVector{r * std::cos(theta), r * std::sin(theta)};
    }
    return snap_to_cells(grid, v);
  };

  auto variance_shift_ok = [&](ShiftVector v) {
    if (config.correction != Correction::variance) return true;
    long count = 0;
    if (config.statistic == Statistic::tau_partial) {
      for (const Vec2& p : sampling.points)
        if (shift_intersection_contains(window, v, p)) ++count;
      return count >= 2;
    }
    for (const Vec2& p : pattern.points)
      if (shift_intersection_contains(window, v, p)) ++count;
    // The variance factor for CWR/mean is the retained point count, so a
    // shift emptying the intersection carries no information.
    return count >= 1 || pattern.points.empty();
  };

  std::vector<ShiftVector> shifts;
  shifts.reserve(static_cast<std::size_t>(n_shifts) + 1);
  shifts.push_back(ShiftVector{0.0, 0.0});  // index 0: observed data
  for (int i = 0; i < n_shifts; ++i) {
    ShiftVector v{};
    bool ok = false;
    for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
      v = draw_one();
      ok = variance_shift_ok(v);
    }
    if (!ok)
      fail(ErrorKind::numeric, "could not draw a usable shift vector; radius too large?");
    shifts.push_back(v);
  }

  const std::vector<double>& psi = interest.values();
  auto psi_at = [&](int row, int col) { return psi[static_cast<std::size_t>(row) * ncols + col]; };

  ShiftTestResult result;
  result.radius = radius;
  result.bandwidth = bandwidth_used;
  result.statistics.resize(shifts.size());
  result.areas.resize(shifts.size());
  result.retained.resize(shifts.size());

  const bool rect_window = window.is_rectangle();
  // Cell ranges (half-open) whose centers lie in the rectangular window.
  int win_r0 = 0, win_r1 = nrows, win_c0 = 0, win_c1 = ncols;
  if (rect_window) {
    const Rect& wr = window.rect();
    auto lo_cell = [&](double bound, double origin) {
      return std::max(0, static_cast<int>(std::ceil((bound - origin) / grid.cell - 0.5 - 1e-9)));
    };
    auto hi_cell = [&](double bound, double origin, int n) {
      return std::min(n, static_cast<int>(std::floor((bound - origin) / grid.cell - 0.5 + 1e-9)) + 1);
    };
    win_r0 = lo_cell(wr.y0, grid.origin.y);
    win_r1 = hi_cell(wr.y1, grid.origin.y, nrows);
    win_c0 = lo_cell(wr.x0, grid.origin.x);
    win_c1 = hi_cell(wr.x1, grid.origin.x, ncols);
  }
  std::vector<double> shifted_interest;  // reused per shift (tau, variance)

  for (std::size_t i = 0; i < shifts.size(); ++i) {
    ShiftVector v = shifts[i];
    ShiftSteps st = steps_of(grid, v);

    if (config.correction == Correction::torus) {
      result.areas[i] = window.area();
      if (config.statistic == Statistic::tau_partial) {
        shifted_interest.clear();
        for (const CellIndex& cell : sampling_cells)
          shifted_interest.push_back(psi_at(wrap_index(cell.row - st.dr, nrows),
                                            wrap_index(cell.col - st.dc, ncols)));
        result.retained[i] = static_cast<int>(shifted_interest.size());
        result.statistics[i] = kendall_tau(shifted_interest, s_values);
      } else {
        long double point_sum = 0.0L;
        for (const CellIndex& cell : point_cells)
          point_sum += psi_at(wrap_index(cell.row - st.dr, nrows),
                              wrap_index(cell.col - st.dc, ncols));
        result.retained[i] = static_cast<int>(point_cells.size());
        if (config.statistic == Statistic::mean_covariate) {
          result.statistics[i] = static_cast<double>(point_sum / pattern.points.size());
        } else {
          long double integral = 0.0L;
          for (int r = 0; r < nrows; ++r) {
            int src_r = wrap_index(r - st.dr, nrows);
            for (int c = 0; c < ncols; ++c) {
              double lv = lambda.at(r, c);
              if (std::isnan(lv) || lv == 0.0) continue;
              integral += static_cast<long double>(lv) * psi_at(src_r, wrap_index(c - st.dc, ncols));
            }
          }
          integral *= lambda.cell_area();
          result.statistics[i] = static_cast<double>(point_sum - integral);
        }
      }
      continue;
    }

    // Variance correction: restrict to W_i = W ∩ (W + v).
    result.areas[i] = i == 0 ? window.area() : intersection_area(window, v, grid);
    if (config.statistic == Statistic::tau_partial) {
      shifted_interest.clear();
      std::vector<double> s_retained;
      for (std::size_t j = 0; j < sampling.points.size(); ++j) {
        const Vec2& p = sampling.points[j];
        if (!shift_intersection_contains(window, v, p)) continue;
        shifted_interest.push_back(interest.lookup(Vec2{p.x - v.x, p.y - v.y}));
        s_retained.push_back(s_values[j]);
      }
      result.retained[i] = static_cast<int>(shifted_interest.size());
      result.statistics[i] = kendall_tau(shifted_interest, s_retained);
    } else {
      long double point_sum = 0.0L;
      long retained = 0;
      for (const Vec2& p : pattern.points) {
        if (!shift_intersection_contains(window, v, p)) continue;
        ++retained;
        point_sum += interest.lookup(Vec2{p.x - v.x, p.y - v.y});
      }
      result.retained[i] = static_cast<int>(retained);
      if (config.statistic == Statistic::mean_covariate) {
        result.statistics[i] = static_cast<double>(point_sum / std::max(retained, 1L));
      } else {
        long double integral = 0.0L;
        if (rect_window) {
          // Row/column ranges of cells whose centers lie in W and in W + v.
          int r0 = static_cast<int>(std::max<long>(win_r0, win_r0 + st.dr));
          int r1 = static_cast<int>(std::min<long>(win_r1, win_r1 + st.dr));
          int c0 = static_cast<int>(std::max<long>(win_c0, win_c0 + st.dc));
          int c1 = static_cast<int>(std::min<long>(win_c1, win_c1 + st.dc));
          for (int r = r0; r < r1; ++r)
            for (int c = c0; c < c1; ++c) {
              double lv = lambda.at(r, c);
              if (std::isnan(lv)) continue;
              integral += static_cast<long double>(lv) *
                          psi_at(r - static_cast<int>(st.dr), c - static_cast<int>(st.dc));
            }
        } else {
          for (int r = 0; r < nrows; ++r)
            for (int c = 0; c < ncols; ++c) {
              int sr = r - static_cast<int>(st.dr);
              int sc = c - static_cast<int>(st.dc);
              if (sr < 0 || sr >= nrows || sc < 0 || sc >= ncols) continue;
              Vec2 u = lambda.cell_center(r, c);
              if (!shift_intersection_contains(window, v, u)) continue;
              double lv = lambda.at(r, c);
              if (std::isnan(lv)) continue;
              integral += static_cast<long double>(lv) * psi_at(sr, sc);
            }
        }
        integral *= lambda.cell_area();
        result.statistics[i] = static_cast<double>(point_sum - integral);
      }
    }
  }

  result.t0 = result.statistics[0];

  if (config.correction == Correction::variance) {
    long double mean = 0.0L;
    for (double t : result.statistics) mean += t;
    mean /= static_cast<long double>(result.statistics.size());
    result.standardized.resize(result.statistics.size());
    for (std::size_t i = 0; i < result.statistics.size(); ++i) {
      double f;
      if (config.statistic == Statistic::cwr)
        f = static_cast<double>(std::max(result.retained[i], 1));
      else
        f = 1.0 / static_cast<double>(std::max(result.retained[i], 1));
      result.standardized[i] =
          static_cast<double>((result.statistics[i] - mean)) / std::sqrt(f);
    }
  }

  result.p_value = two_sided_mc_p(config.correction == Correction::variance
                                      ? result.standardized
                                      : result.statistics);
  return result;
}

}  // namespace ptcov
