#include "core/geom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "core/common.hpp"

namespace ptcov {
namespace {

double shoelace_area(const std::vector<Vec2>& v) {
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % v.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
  if (std::abs(cross) > 1e-12 * std::max({1.0, std::abs(b.x - a.x), std::abs(b.y - a.y)}))
    return false;
  return p.x >= std::min(a.x, b.x) - 1e-12 && p.x <= std::max(a.x, b.x) + 1e-12 &&
         p.y >= std::min(a.y, b.y) - 1e-12 && p.y <= std::max(a.y, b.y) + 1e-12;
}

int orient(Vec2 a, Vec2 b, Vec2 c) {
  double d = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  if (d > 0) return 1;
  if (d < 0) return -1;
  return 0;
}

bool segments_properly_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  return orient(a, b, c) * orient(a, b, d) < 0 && orient(c, d, a) * orient(c, d, b) < 0;
}

bool polygon_is_simple(const std::vector<Vec2>& v) {
  std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // Skip adjacent edges (they share an endpoint).
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_properly_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]))
        return false;
    }
  }
  return true;
}

bool polygon_is_convex(const std::vector<Vec2>& v) {
  int sign = 0;
  std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    int o = orient(v[i], v[(i + 1) % n], v[(i + 2) % n]);
    if (o == 0) continue;
    if (sign == 0)
      sign = o;
    else if (o != sign)
      return false;
  }
  return true;
}

double wrap_into(double value, double lo, double hi) {
  double len = hi - lo;
  double w = std::fmod(value - lo, len);
  if (w < 0.0) w += len;
  return lo + w;
}

}  // namespace

Window Window::rectangle(double x0, double y0, double x1, double y1) {
  if (!(x0 < x1) || !(y0 < y1))
    fail(ErrorKind::invalid_argument, "rectangle window requires x0 < x1 and y0 < y1");
  Window w;
  w.is_rect_ = true;
  w.rect_ = Rect{x0, y0, x1, y1};
  w.area_ = w.rect_.area();
  return w;
}

Window Window::polygon(std::vector<Vec2> vertices) {
  if (vertices.size() < 3)
    fail(ErrorKind::invalid_argument, "polygon window needs at least three vertices");
  double area = shoelace_area(vertices);
  if (area < 0.0) {  // force counterclockwise orientation
    std::reverse(vertices.begin(), vertices.end());
    area = -area;
  }
  if (!(area > 0.0)) fail(ErrorKind::invalid_argument, "polygon window must have positive area");
  if (!polygon_is_simple(vertices))
    fail(ErrorKind::invalid_argument, "polygon window must be simple (non-self-intersecting)");
  Window w;
  w.is_rect_ = false;
  w.vertices_ = std::move(vertices);
  w.area_ = area;
  return w;
}

const Rect& Window::rect() const {
  if (!is_rect_) fail(ErrorKind::invalid_argument, "window is not a rectangle");
  return rect_;
}

Rect Window::bounding_box() const {
  if (is_rect_) return rect_;
  Rect b{vertices_[0].x, vertices_[0].y, vertices_[0].x, vertices_[0].y};
  for (const Vec2& v : vertices_) {
    b.x0 = std::min(b.x0, v.x);
    b.y0 = std::min(b.y0, v.y);
    b.x1 = std::max(b.x1, v.x);
    b.y1 = std::max(b.y1, v.y);
  }
  return b;
}

bool Window::contains(Vec2 p) const {
  if (is_rect_)
    return p.x >= rect_.x0 && p.x <= rect_.x1 && p.y >= rect_.y0 && p.y <= rect_.y1;
  // Crossing number with boundary-inclusive handling.
  std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i)
    if (on_segment(vertices_[i], vertices_[(i + 1) % n], p)) return true;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = vertices_[i];
    const Vec2& b = vertices_[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      double xcross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < xcross) inside = !inside;
    }
  }
  return inside;
}

PointPattern make_pattern(std::vector<Vec2> points, Window window) {
  for (const Vec2& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      fail(ErrorKind::data, "point pattern contains non-finite coordinates");
    if (!window.contains(p)) fail(ErrorKind::data, "point pattern contains a point outside the window");
  }
  return PointPattern{std::move(points), std::move(window)};
}

Vec2 torus_shift(Vec2 p, ShiftVector v, const Window& window) {
  if (!window.is_rectangle())
    fail(ErrorKind::invalid_argument, "torus shift requires a rectangular window");
  const Rect& r = window.rect();
  return Vec2{wrap_into(p.x + v.x, r.x0, r.x1), wrap_into(p.y + v.y, r.y0, r.y1)};
}

PointPattern torus_shift(const PointPattern& pattern, ShiftVector v) {
  std::vector<Vec2> shifted;
  shifted.reserve(pattern.points.size());
  for (const Vec2& p : pattern.points) shifted.push_back(torus_shift(p, v, pattern.window));
  return PointPattern{std::move(shifted), pattern.window};
}

std::optional<Window> euclid_shift_intersection(const Window& window, ShiftVector v) {
  if (window.is_rectangle()) {
    const Rect& r = window.rect();
    double x0 = std::max(r.x0, r.x0 + v.x);
    double y0 = std::max(r.y0, r.y0 + v.y);
    double x1 = std::min(r.x1, r.x1 + v.x);
    double y1 = std::min(r.y1, r.y1 + v.y);
    if (!(x0 < x1) || !(y0 < y1)) return std::nullopt;
    return Window::rectangle(x0, y0, x1, y1);
  }
  if (!polygon_is_convex(window.vertices()))
    fail(ErrorKind::invalid_argument,
         "shift intersection is only materialized for convex polygon windows");
  // Sutherland-Hodgman: clip W against each edge of W + v.
  std::vector<Vec2> poly = window.vertices();
  const std::vector<Vec2>& w = window.vertices();
  std::size_t n = w.size();
  for (std::size_t i = 0; i < n && !poly.empty(); ++i) {
    Vec2 a{w[i].x + v.x, w[i].y + v.y};
    Vec2 b{w[(i + 1) % n].x + v.x, w[(i + 1) % n].y + v.y};
    std::vector<Vec2> out;
    for (std::size_t j = 0; j < poly.size(); ++j) {
      Vec2 p = poly[j];
      Vec2 q = poly[(j + 1) % poly.size()];
      double dp = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
      double dq = (b.x - a.x) * (q.y - a.y) - (b.y - a.y) * (q.x - a.x);
      if (dp >= 0) out.push_back(p);
      if ((dp >= 0) != (dq >= 0)) {
        double t = dp / (dp - dq);
        out.push_back(Vec2{p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
      }
    }
    poly = std::move(out);
  }
  if (poly.size() < 3) return std::nullopt;
  double area = std::abs(shoelace_area(poly));
  if (!(area > 0.0)) return std::nullopt;
  return Window::polygon(std::move(poly));
}

bool shift_intersection_contains(const Window& window, ShiftVector v, Vec2 p) {
  return window.contains(p) && window.contains(Vec2{p.x - v.x, p.y - v.y});
}

std::vector<ShiftVector> draw_shift_vectors(int n, double radius, Rng& rng) {
  if (n < 1) fail(ErrorKind::invalid_argument, "need at least one shift vector");
  if (!(radius > 0.0)) fail(ErrorKind::invalid_argument, "shift radius must be positive");
  std::vector<ShiftVector> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double r = radius * std::sqrt(rng.uniform01());
    double theta = 2.0 * std::numbers::pi * rng.uniform01();
    out.push_back(ShiftVector{r * std::cos(theta), r * std::sin(theta)});
  }
  return out;
}

namespace {

// Minimum overlap ratio over all shift directions at a given norm.
double min_overlap_ratio(const Rect& r, double norm) {
  double a = r.width(), b = r.height();
  auto ratio = [&](double theta) {
    double dx = norm * std::cos(theta);
    double dy = norm * std::sin(theta);
    double fx = 1.0 - dx / a;
    double fy = 1.0 - dy / b;
    if (fx <= 0.0 || fy <= 0.0) return 0.0;
    return fx * fy;
  };
  // Coarse scan over the first quadrant (symmetry), then golden-section
  // refinement around the best cell.
  constexpr int kGrid = 512;
  double best = 2.0;
  int best_i = 0;
  for (int i = 0; i <= kGrid; ++i) {
    double theta = (std::numbers::pi / 2.0) * i / kGrid;
    double f = ratio(theta);
    if (f < best) {
      best = f;
      best_i = i;
    }
  }
  double lo = (std::numbers::pi / 2.0) * std::max(0, best_i - 1) / kGrid;
  double hi = (std::numbers::pi / 2.0) * std::min(kGrid, best_i + 1) / kGrid;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo);
  double d = lo + gr * (hi - lo);
  for (int it = 0; it < 80; ++it) {
    if (ratio(c) < ratio(d)) {
      hi = d;
      d = c;
      c = hi - gr * (hi - lo);
    } else {
      lo = c;
      c = d;
      d = lo + gr * (hi - lo);
    }
  }
  return std::min(best, ratio(0.5 * (lo + hi)));
}

}  // namespace

double default_shift_radius(const Window& window) {
  if (!window.is_rectangle())
    fail(ErrorKind::invalid_argument,
         "default shift radius is defined for rectangular windows; supply a radius explicitly");
  const Rect& r = window.rect();
  double lo = 0.0;
  double hi = std::hypot(r.width(), r.height());
  for (int it = 0; it < 200 && (hi - lo) > 1e-14 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (min_overlap_ratio(r, mid) >= 0.25)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace ptcov
