#include "core/raster.hpp"

#include <cmath>

#include "core/common.hpp"

namespace ptcov {

GridSpec GridSpec::covering(const Window& window, int ncols, int nrows) {
  if (ncols < 1 || nrows < 1)
    fail(ErrorKind::invalid_argument, "grid needs at least one row and column");
  Rect bb = window.bounding_box();
  double cell_x = bb.width() / ncols;
  double cell_y = bb.height() / nrows;
  double cell = std::max(cell_x, cell_y);  // square cells covering the box
  return GridSpec{Vec2{bb.x0, bb.y0}, cell, ncols, nrows};
}

bool GridSpec::same_geometry(const GridSpec& other) const {
  return origin.x == other.origin.x && origin.y == other.origin.y && cell == other.cell &&
         ncols == other.ncols && nrows == other.nrows;
}

ScalarField::ScalarField(GridSpec grid, Window window, double init)
    : grid_(grid), window_(std::move(window)) {
  if (grid_.ncols < 1 || grid_.nrows < 1 || !(grid_.cell > 0.0))
    fail(ErrorKind::invalid_argument, "invalid grid geometry");
  Rect bb = window_.bounding_box();
  double eps = 1e-9 * grid_.cell;
  if (bb.x0 < grid_.origin.x - eps || bb.y0 < grid_.origin.y - eps ||
      bb.x1 > grid_.origin.x + grid_.cell * grid_.ncols + eps ||
      bb.y1 > grid_.origin.y + grid_.cell * grid_.nrows + eps)
    fail(ErrorKind::data, "grid does not cover the window");
  values_.assign(static_cast<std::size_t>(grid_.ncols) * grid_.nrows, init);
}

Vec2 ScalarField::cell_center(int row, int col) const {
  return Vec2{grid_.origin.x + (col + 0.5) * grid_.cell,
              grid_.origin.y + (row + 0.5) * grid_.cell};
}

int ScalarField::col_of(double x) const {
  int c = static_cast<int>(std::floor((x - grid_.origin.x) / grid_.cell));
  if (c < 0) c = 0;
  if (c >= grid_.ncols) c = grid_.ncols - 1;
  return c;
}

int ScalarField::row_of(double y) const {
  int r = static_cast<int>(std::floor((y - grid_.origin.y) / grid_.cell));
  if (r < 0) r = 0;
  if (r >= grid_.nrows) r = grid_.nrows - 1;
  return r;
}

double ScalarField::lookup(Vec2 p) const {
  if (!window_.contains(p)) fail(ErrorKind::data, "lookup outside the field window");
  return at(row_of(p.y), col_of(p.x));
}

bool ScalarField::center_in_window(int row, int col) const {
  return window_.contains(cell_center(row, col));
}

double integrate(const ScalarField& field, const Window& over) {
  long double sum = 0.0L;
  bool same_window = false;
  if (over.is_rectangle() && field.window().is_rectangle()) {
    const Rect& a = over.rect();
    const Rect& b = field.window().rect();
    same_window = a.x0 == b.x0 && a.y0 == b.y0 && a.x1 == b.x1 && a.y1 == b.y1;
  }
  for (int r = 0; r < field.nrows(); ++r) {
    for (int c = 0; c < field.ncols(); ++c) {
      Vec2 center = field.cell_center(r, c);
      if (!over.contains(center)) continue;
      if (!same_window && !field.window().contains(center)) continue;
      double v = field.at(r, c);
      if (std::isnan(v)) continue;  // masked cell
      sum += v;
    }
  }
  return static_cast<double>(sum) * field.cell_area();
}

double integrate(const ScalarField& field) { return integrate(field, field.window()); }

ShiftVector snap_to_cells(const GridSpec& grid, ShiftVector v) {
  return ShiftVector{std::round(v.x / grid.cell) * grid.cell,
                     std::round(v.y / grid.cell) * grid.cell};
}

ScalarField shift_field(const ScalarField& field, ShiftVector v, ShiftMode mode) {
  const GridSpec& g = field.grid();
  if (mode == ShiftMode::torus) {
    if (!field.window().is_rectangle())
      fail(ErrorKind::invalid_argument, "torus field shift requires a rectangular window");
    double dc_real = v.x / g.cell;
    double dr_real = v.y / g.cell;
    long dc = std::lround(dc_real);
    long dr = std::lround(dr_real);
    if (std::abs(dc_real - dc) > 1e-9 || std::abs(dr_real - dr) > 1e-9)
      fail(ErrorKind::invalid_argument, "torus field shift requires a cell-aligned vector");
    dc = ((dc % g.ncols) + g.ncols) % g.ncols;
    dr = ((dr % g.nrows) + g.nrows) % g.nrows;
    ScalarField out(g, field.window());
    for (int r = 0; r < g.nrows; ++r) {
      int src_r = static_cast<int>((r - dr + g.nrows) % g.nrows);
      for (int c = 0; c < g.ncols; ++c) {
        int src_c = static_cast<int>((c - dc + g.ncols) % g.ncols);
        out.at(r, c) = field.at(src_r, src_c);
      }
    }
    return out;
  }
  // Euclid: (Ψ + v)(u) = Ψ(u - v) restricted to W ∩ (W + v).
  auto wi = euclid_shift_intersection(field.window(), v);
  if (!wi) fail(ErrorKind::data, "empty shift intersection");
  ScalarField out(g, *wi, std::nan(""));
  for (int r = 0; r < g.nrows; ++r) {
    for (int c = 0; c < g.ncols; ++c) {
      Vec2 u = out.cell_center(r, c);
      if (!wi->contains(u)) continue;
      out.at(r, c) = field.lookup(Vec2{u.x - v.x, u.y - v.y});
    }
  }
  return out;
}

}  // namespace ptcov
