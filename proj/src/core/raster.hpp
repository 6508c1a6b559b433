#pragma once

#include <vector>

#include "core/geom.hpp"

namespace ptcov {

struct GridSpec {
  Vec2 origin;       // lower-left corner
  double cell = 0.0; // square cells
  int ncols = 0;
  int nrows = 0;

  static GridSpec covering(const Window& window, int ncols, int nrows);
  bool same_geometry(const GridSpec& other) const;
};

// Pixel-grid scalar field over a window. Row 0 is the southernmost row;
// values are row-major. NaN is only permitted outside the window mask.
class ScalarField {
 public:
  ScalarField(GridSpec grid, Window window, double init = 0.0);

  const GridSpec& grid() const { return grid_; }
  const Window& window() const { return window_; }
  int ncols() const { return grid_.ncols; }
  int nrows() const { return grid_.nrows; }
  double cell() const { return grid_.cell; }
  double cell_area() const { return grid_.cell * grid_.cell; }

  double at(int row, int col) const { return values_[idx(row, col)]; }
  double& at(int row, int col) { return values_[idx(row, col)]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  Vec2 cell_center(int row, int col) const;
  int col_of(double x) const;  // clamped into [0, ncols-1] at the upper edge
  int row_of(double y) const;

  // Nearest-cell value at a location inside the window; out-of-domain error
  // otherwise.
  double lookup(Vec2 p) const;

  bool center_in_window(int row, int col) const;

 private:
  std::size_t idx(int row, int col) const {
    return static_cast<std::size_t>(row) * grid_.ncols + col;
  }
  GridSpec grid_;
  Window window_;
  std::vector<double> values_;
};

// Midpoint rule: sum of value * cell area over cells whose centers lie in
// `over` (and in the field's own window).
double integrate(const ScalarField& field, const Window& over);
double integrate(const ScalarField& field);

enum class ShiftMode { torus, euclid };

ShiftVector snap_to_cells(const GridSpec& grid, ShiftVector v);

// Torus mode: cyclic permutation of the grid (v must be cell-aligned;
// rectangular window). Euclid mode: field restricted to W ∩ (W+v), cells
// outside masked to NaN.
ScalarField shift_field(const ScalarField& field, ShiftVector v, ShiftMode mode);

}  // namespace ptcov
