#pragma once

#include <optional>
#include <vector>

#include "core/rng.hpp"

namespace ptcov {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

using ShiftVector = Vec2;

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
};

// Observation window: axis-aligned rectangle or simple polygon. Boundary
// points count as inside. Immutable after construction.
class Window {
 public:
  static Window rectangle(double x0, double y0, double x1, double y1);
  static Window polygon(std::vector<Vec2> vertices);

  bool is_rectangle() const { return is_rect_; }
  const Rect& rect() const;
  const std::vector<Vec2>& vertices() const { return vertices_; }

  double area() const { return area_; }
  Rect bounding_box() const;
  bool contains(Vec2 p) const;

 private:
  Window() = default;
  bool is_rect_ = true;
  Rect rect_{};
  std::vector<Vec2> vertices_;
  double area_ = 0.0;
};

struct PointPattern {
  std::vector<Vec2> points;
  Window window;
  std::size_t size() const { return points.size(); }
};

// Validates containment of every point (boundary-inclusive).
PointPattern make_pattern(std::vector<Vec2> points, Window window);

// Translation by v wrapped to the rectangle, half-open convention: the
// result lies in [x0, x1) x [y0, y1). Rectangular windows only.
Vec2 torus_shift(Vec2 p, ShiftVector v, const Window& window);
PointPattern torus_shift(const PointPattern& pattern, ShiftVector v);

// W ∩ (W + v); nullopt when the intersection is empty. Rectangles produce
// rectangles; polygon windows must be convex (Sutherland-Hodgman clip).
std::optional<Window> euclid_shift_intersection(const Window& window, ShiftVector v);

// Membership in W ∩ (W + v) without materializing the intersection; works
// for any window kind.
bool shift_intersection_contains(const Window& window, ShiftVector v, Vec2 p);

// n i.i.d. vectors uniform on the disc of radius R centered at the origin.
std::vector<ShiftVector> draw_shift_vectors(int n, double radius, Rng& rng);

// Largest R such that every shift of norm <= R keeps
// area(W ∩ (W+v)) / area(W) >= 1/4. Rectangular windows only.
double default_shift_radius(const Window& window);

}  // namespace ptcov
