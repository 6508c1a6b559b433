#include "core/pointsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/common.hpp"

namespace ptcov {

TrendExpr TrendExpr::constant(double value) {
  TrendExpr e;
  e.op_ = Op::constant;
  e.value_ = value;
  return e;
}

TrendExpr TrendExpr::field(int index) {
  TrendExpr e;
  e.op_ = Op::field;
  e.index_ = index;
  return e;
}

TrendExpr TrendExpr::add(TrendExpr a, TrendExpr b) {
  TrendExpr e;
  e.op_ = Op::add;
  e.lhs_ = std::make_shared<TrendExpr>(std::move(a));
  e.rhs_ = std::make_shared<TrendExpr>(std::move(b));
  return e;
}

TrendExpr TrendExpr::mul(TrendExpr a, TrendExpr b) {
  TrendExpr e;
  e.op_ = Op::mul;
  e.lhs_ = std::make_shared<TrendExpr>(std::move(a));
  e.rhs_ = std::make_shared<TrendExpr>(std::move(b));
  return e;
}

TrendExpr TrendExpr::exp(TrendExpr a) {
  TrendExpr e;
  e.op_ = Op::exp;
  e.lhs_ = std::make_shared<TrendExpr>(std::move(a));
  return e;
}

TrendExpr TrendExpr::square(TrendExpr a) {
  TrendExpr e;
  e.op_ = Op::square;
  e.lhs_ = std::make_shared<TrendExpr>(std::move(a));
  return e;
}

TrendExpr TrendExpr::relu(TrendExpr a) {
  TrendExpr e;
  e.op_ = Op::relu;
  e.lhs_ = std::make_shared<TrendExpr>(std::move(a));
  return e;
}

TrendExpr TrendExpr::max_norm(TrendExpr a) {
  TrendExpr e;
  e.op_ = Op::max_norm;
  e.lhs_ = std::make_shared<TrendExpr>(std::move(a));
  return e;
}

int TrendExpr::max_field_index() const {
  int m = -1;
  if (op_ == Op::field) m = index_;
  if (lhs_) m = std::max(m, lhs_->max_field_index());
  if (rhs_) m = std::max(m, rhs_->max_field_index());
  return m;
}

void TrendExpr::collect_fields(std::set<int>& out) const {
  if (op_ == Op::field) out.insert(index_);
  if (lhs_) lhs_->collect_fields(out);
  if (rhs_) rhs_->collect_fields(out);
}

ScalarField TrendExpr::evaluate(const std::vector<ScalarField>& fields, const GridSpec& grid,
                                const Window& window) const {
  switch (op_) {
    case Op::constant:
      return ScalarField(grid, window, value_);
    case Op::field:
      if (index_ < 0 || index_ >= static_cast<int>(fields.size()))
        fail(ErrorKind::internal, "trend expression references a missing field");
      return fields[static_cast<std::size_t>(index_)];
    case Op::add:
    case Op::mul: {
      ScalarField a = lhs_->evaluate(fields, grid, window);
      ScalarField b = rhs_->evaluate(fields, grid, window);
      for (std::size_t i = 0; i < a.values().size(); ++i)
        a.values()[i] =
            op_ == Op::add ? a.values()[i] + b.values()[i] : a.values()[i] * b.values()[i];
      return a;
    }
    case Op::exp:
    case Op::square:
    case Op::relu: {
      ScalarField a = lhs_->evaluate(fields, grid, window);
      for (double& v : a.values())
        v = op_ == Op::exp ? std::exp(v) : (op_ == Op::square ? v * v : std::max(v, 0.0));
      return a;
    }
    case Op::max_norm: {
      ScalarField a = lhs_->evaluate(fields, grid, window);
      double best = -std::numeric_limits<double>::infinity();
      for (int r = 0; r < a.nrows(); ++r)
        for (int c = 0; c < a.ncols(); ++c)
          if (a.center_in_window(r, c)) best = std::max(best, a.at(r, c));
      if (!(best > 0.0)) fail(ErrorKind::numeric, "max-normalization of a nonpositive surface");
      for (double& v : a.values()) v /= best;
      return a;
    }
  }
  fail(ErrorKind::internal, "unreachable trend op");
}

namespace {

Vec2 uniform_in_window(const Window& window, Rng& rng) {
  Rect bb = window.bounding_box();
  for (;;) {
    Vec2 p{rng.uniform(bb.x0, bb.x1), rng.uniform(bb.y0, bb.y1)};
    if (window.contains(p)) return p;
  }
}

}  // namespace

PointPattern simulate_poisson(const ScalarField& intensity, Rng& rng) {
  double max_intensity = 0.0;
  for (int r = 0; r < intensity.nrows(); ++r)
    for (int c = 0; c < intensity.ncols(); ++c)
      if (intensity.center_in_window(r, c)) {
        double v = intensity.at(r, c);
        if (v < 0.0) fail(ErrorKind::invalid_argument, "intensity must be nonnegative");
        max_intensity = std::max(max_intensity, v);
      }
  const Window& window = intensity.window();
  std::vector<Vec2> points;
  if (max_intensity > 0.0) {
    // Dominated thinning of a homogeneous Poisson process at the grid maximum.
    long n_dominating = rng.poisson(max_intensity * window.area());
    points.reserve(static_cast<std::size_t>(n_dominating) / 2);
    for (long i = 0; i < n_dominating; ++i) {
      Vec2 p = uniform_in_window(window, rng);
      if (rng.uniform01() * max_intensity < intensity.lookup(p)) points.push_back(p);
    }
  }
  return PointPattern{std::move(points), window};
}

namespace {

// Uniform cell list over the window bounding box for range queries.
class NeighborGrid {
 public:
  NeighborGrid(const Window& window, double interaction_range)
      : bb_(window.bounding_box()), range_(interaction_range) {
    double size = std::max(range_, 1e-9);
    nx_ = std::max(1, static_cast<int>(std::floor(bb_.width() / size)));
    ny_ = std::max(1, static_cast<int>(std::floor(bb_.height() / size)));
    nx_ = std::min(nx_, 256);
    ny_ = std::min(ny_, 256);
    cells_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  }

  void insert(int id, Vec2 p) { cells_[cell_of(p)].push_back(id); }

  void remove(int id, Vec2 p) {
    auto& cell = cells_[cell_of(p)];
    auto it = std::find(cell.begin(), cell.end(), id);
    if (it != cell.end()) {
      *it = cell.back();
      cell.pop_back();
    }
  }

  template <typename Fn>
  void visit_within(Vec2 p, double radius, Fn&& fn) const {
    int cx = clampi(static_cast<int>((p.x - bb_.x0) / bb_.width() * nx_), nx_);
    int cy = clampi(static_cast<int>((p.y - bb_.y0) / bb_.height() * ny_), ny_);
    int reach_x = static_cast<int>(std::ceil(radius / (bb_.width() / nx_)));
    int reach_y = static_cast<int>(std::ceil(radius / (bb_.height() / ny_)));
    for (int dy = -reach_y; dy <= reach_y; ++dy) {
      int y = cy + dy;
      if (y < 0 || y >= ny_) continue;
      for (int dx = -reach_x; dx <= reach_x; ++dx) {
        int x = cx + dx;
        if (x < 0 || x >= nx_) continue;
        for (int id : cells_[static_cast<std::size_t>(y) * nx_ + x]) fn(id);
      }
    }
  }

 private:
  static int clampi(int v, int n) { return std::min(std::max(v, 0), n - 1); }
  std::size_t cell_of(Vec2 p) const {
    int cx = clampi(static_cast<int>((p.x - bb_.x0) / bb_.width() * nx_), nx_);
    int cy = clampi(static_cast<int>((p.y - bb_.y0) / bb_.height() * ny_), ny_);
    return static_cast<std::size_t>(cy) * nx_ + cx;
  }
  Rect bb_;
  double range_;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> cells_;
};

double dist2(Vec2 a, Vec2 b) {
  double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

}  // namespace

PointPattern simulate_gibbs(const StraussParams& params, const ScalarField& trend, Rng& rng,
                            const GibbsConfig& config) {
  if (!(params.range > 0.0)) fail(ErrorKind::invalid_argument, "interaction range must be positive");
  if (params.hardcore < 0.0 || (params.hardcore > 0.0 && params.hardcore >= params.range))
    fail(ErrorKind::invalid_argument, "hardcore distance must satisfy 0 <= hc < R");
  if (!(params.gamma > 0.0)) fail(ErrorKind::invalid_argument, "interaction parameter must be positive");
  if (params.gamma > 1.0 && params.hardcore == 0.0)
    fail(ErrorKind::invalid_argument,
         "gamma > 1 requires a hardcore distance (model is not locally stable)");

  const Window& window = trend.window();
  double area = window.area();
  double log_gamma = std::log(params.gamma);
  double hc2 = params.hardcore * params.hardcore;
  double r2 = params.range * params.range;

  // Papangelou conditional intensity beta(u) * gamma^t(u, x), zero inside the
  // hardcore distance of an existing point.
  std::vector<Vec2> pts;
  NeighborGrid neighbors(window, params.range);

  auto conditional = [&](Vec2 u, int exclude) -> double {
    int close = 0;
    bool blocked = false;
    neighbors.visit_within(u, params.range, [&](int id) {
      if (id == exclude || blocked) return;
      double d2 = dist2(u, pts[static_cast<std::size_t>(id)]);
      if (params.hardcore > 0.0 && d2 < hc2) {
        blocked = true;
        return;
      }
      if (d2 <= r2) ++close;
    });
    if (blocked) return 0.0;
    return trend.lookup(u) * std::exp(log_gamma * close);
  };

  // Initial state: Poisson(trend), thinned to respect the hardcore distance
  // so the chain starts inside the feasible set.
  {
    PointPattern init = simulate_poisson(trend, rng);
    for (const Vec2& p : init.points) {
      bool ok = true;
      if (params.hardcore > 0.0) {
        neighbors.visit_within(p, params.hardcore, [&](int id) {
          if (ok && dist2(p, pts[static_cast<std::size_t>(id)]) < hc2) ok = false;
        });
      }
      if (ok) {
        pts.push_back(p);
        neighbors.insert(static_cast<int>(pts.size()) - 1, p);
      }
    }
  }

  auto remove_point = [&](std::size_t idx) {
    int last = static_cast<int>(pts.size()) - 1;
    neighbors.remove(static_cast<int>(idx), pts[idx]);
    if (static_cast<int>(idx) != last) {
      neighbors.remove(last, pts[static_cast<std::size_t>(last)]);
      pts[idx] = pts[static_cast<std::size_t>(last)];
      neighbors.insert(static_cast<int>(idx), pts[idx]);
    }
    pts.pop_back();
  };

  double p_move_start = config.p_birth + config.p_death;
  for (long step = 0; step < config.proposals; ++step) {
    double u = rng.uniform01();
    if (u < config.p_birth) {
      Vec2 proposal = uniform_in_window(window, rng);
      double lambda = conditional(proposal, -1);
      double accept = (config.p_death / config.p_birth) * lambda * area /
                      (static_cast<double>(pts.size()) + 1.0);
      if (accept >= 1.0 || rng.uniform01() < accept) {
        pts.push_back(proposal);
        neighbors.insert(static_cast<int>(pts.size()) - 1, proposal);
      }
    } else if (u < p_move_start) {
      if (pts.empty()) continue;
      std::size_t idx = rng.uniform_index(pts.size());
      double lambda = conditional(pts[idx], static_cast<int>(idx));
      bool accept;
      if (lambda <= 0.0) {
        accept = true;  // removing an infeasible point is always an improvement
      } else {
        double ratio = (config.p_birth / config.p_death) * static_cast<double>(pts.size()) /
                       (lambda * area);
        accept = ratio >= 1.0 || rng.uniform01() < ratio;
      }
      if (accept) remove_point(idx);
    } else {
      if (pts.empty()) continue;
      std::size_t idx = rng.uniform_index(pts.size());
      Vec2 proposal = uniform_in_window(window, rng);
      double lambda_new = conditional(proposal, static_cast<int>(idx));
      double lambda_old = conditional(pts[idx], static_cast<int>(idx));
      bool accept = lambda_old <= 0.0 || rng.uniform01() * lambda_old < lambda_new;
      if (accept) {
        neighbors.remove(static_cast<int>(idx), pts[idx]);
        pts[idx] = proposal;
        neighbors.insert(static_cast<int>(idx), proposal);
      }
    }
  }

  return PointPattern{std::move(pts), window};
}

SimulationOutput simulate_model(const ModelSpec& spec, const GridSpec& grid, const Window& window,
                                Rng& field_rng, Rng& pattern_rng, const GibbsConfig& gibbs) {
  std::set<int> used;
  spec.intensity.collect_fields(used);
  spec.covariate_c1.collect_fields(used);
  spec.covariate_c2.collect_fields(used);
  // One substream per field index, so skipping an unused field does not
  // change the draws of the others.
  std::uint64_t base = field_rng.next();
  std::vector<ScalarField> fields;
  fields.reserve(static_cast<std::size_t>(spec.n_fields));
  for (int k = 0; k < spec.n_fields; ++k) {
    if (used.count(k) != 0) {
      Rng stream = Rng::substream(base, {static_cast<std::uint64_t>(k)});
      fields.push_back(simulate_grf(spec.field_spec, grid, window, stream));
    } else {
      fields.push_back(ScalarField(grid, window, 0.0));
    }
  }

  ScalarField surface = spec.intensity.evaluate(fields, grid, window);
  PointPattern pattern{{}, window};
  switch (spec.interaction) {
    case Interaction::poisson:
    case Interaction::lgcp:
      pattern = simulate_poisson(surface, pattern_rng);
      break;
    case Interaction::strauss:
    case Interaction::hardcore_strauss:
      pattern = simulate_gibbs(spec.strauss, surface, pattern_rng, gibbs);
      break;
  }

  return SimulationOutput{std::move(pattern), spec.covariate_c1.evaluate(fields, grid, window),
                          spec.covariate_c2.evaluate(fields, grid, window)};
}

namespace {

ModelSpec base_spec(const std::string& name) {
  ModelSpec spec;
  spec.name = name;
  spec.field_spec = GaussFieldSpec{0.0, 1.0, 0.1};
  return spec;
}

}  // namespace

ModelSpec catalog_model(const std::string& name, std::optional<double> a_in,
                        std::optional<double> b_in) {
  using E = TrendExpr;
  // Field indices: Z1 = 0, Z2 = 1, Z3 = 2.
  const E z1 = E::field(0), z2 = E::field(1), z3 = E::field(2);

  ModelSpec spec = base_spec(name);
  spec.covariate_c1 = z1;

  auto lin = [&](double c0, std::vector<E> terms) {
    E acc = E::constant(c0);
    for (E& t : terms) acc = E::add(std::move(acc), std::move(t));
    return E::exp(std::move(acc));
  };
  auto scaled = [&](double s, E e) { return E::mul(E::constant(s), std::move(e)); };

  if (name == "P1" || name == "P2" || name == "L1" || name == "L2" || name == "S1" ||
      name == "S2" || name == "H1" || name == "H2" || name == "L1star") {
    // Size experiments: covariate of interest independent of the process
    // (except L1star, where it is correlated with the nuisance covariate).
    double b = b_in.value_or(1.0);
    spec.covariate_c2 = name == "L1star" ? E::add(z1, scaled(b, z3)) : z3;
    spec.n_fields = 3;
    if (name == "P1") {
      spec.interaction = Interaction::poisson;
      spec.intensity = lin(4.5, {z1});
    } else if (name == "P2") {
      spec.interaction = Interaction::poisson;
      spec.intensity = E::mul(E::constant(std::exp(5.0)), E::square(z1));
    } else if (name == "L1" || name == "L1star") {
      spec.interaction = Interaction::lgcp;
      spec.intensity = lin(4.0, {z1, z2});
    } else if (name == "L2") {
      spec.interaction = Interaction::lgcp;
      spec.intensity = E::mul(lin(4.5, {z2}), E::square(z1));
    } else if (name == "S1") {
      spec.interaction = Interaction::strauss;
      spec.strauss = StraussParams{0.5, 0.05, 0.0};
      spec.intensity = scaled(220.0, E::exp(z1));
    } else if (name == "S2") {
      spec.interaction = Interaction::strauss;
      spec.strauss = StraussParams{0.5, 0.05, 0.0};
      spec.intensity = scaled(350.0, E::square(z1));
    } else if (name == "H1") {
      spec.interaction = Interaction::hardcore_strauss;
      spec.strauss = StraussParams{4.0, 0.02, 0.01};
      spec.intensity = scaled(180.0, E::max_norm(E::exp(scaled(0.2, z1))));
    } else {  // H2
      spec.interaction = Interaction::hardcore_strauss;
      spec.strauss = StraussParams{4.0, 0.02, 0.01};
      spec.intensity = scaled(
          120.0, E::max_norm(E::relu(E::add(E::constant(1.0), scaled(-0.2, E::square(z1))))));
    }
    return spec;
  }

  // Power experiments: interest covariate correlated with the nuisance,
  // C2 = Z1 + 2 Z3, and the process depends on Z3 with strength a.
  spec.covariate_c2 = E::add(z1, scaled(2.0, z3));
  spec.n_fields = 3;
  if (name == "P1p" || name == "P2p" || name == "S1p" || name == "S2p" || name == "H1p" ||
      name == "H2p" || name == "L1p" || name == "L2p") {
    double a_default = (name == "L1p" || name == "L2p") ? 0.5 : 0.25;
    double a = a_in.value_or(a_default);
    double drift = -0.5 * a * a;
    if (name == "P1p") {
      spec.interaction = Interaction::poisson;
      spec.intensity = lin(4.5 + drift, {z1, scaled(a, z3)});
    } else if (name == "P2p") {
      spec.interaction = Interaction::poisson;
      spec.intensity = E::mul(lin(5.0 + drift, {scaled(a, z3)}), E::square(z1));
    } else if (name == "L1p") {
      spec.interaction = Interaction::lgcp;
      spec.intensity = lin(4.0 + drift, {z1, z2, scaled(a, z3)});
    } else if (name == "L2p") {
      spec.interaction = Interaction::lgcp;
      spec.intensity = E::mul(lin(4.5 + drift, {z2, scaled(a, z3)}), E::square(z1));
    } else if (name == "S1p") {
      spec.interaction = Interaction::strauss;
      spec.strauss = StraussParams{0.5, 0.05, 0.0};
      spec.intensity = scaled(210.0, E::exp(E::add(z1, scaled(a, z3))));
    } else if (name == "S2p") {
      spec.interaction = Interaction::strauss;
      spec.strauss = StraussParams{0.5, 0.05, 0.0};
      spec.intensity = E::mul(scaled(350.0, E::exp(scaled(a, z3))), E::square(z1));
    } else if (name == "H1p") {
      spec.interaction = Interaction::hardcore_strauss;
      spec.strauss = StraussParams{4.0, 0.02, 0.01};
      spec.intensity = scaled(
          190.0, E::max_norm(E::exp(E::add(scaled(0.2, z1),
                                           E::add(scaled(a, z3), E::constant(drift))))));
    } else {  // H2p
      spec.interaction = Interaction::hardcore_strauss;
      spec.strauss = StraussParams{4.0, 0.02, 0.01};
      spec.intensity = scaled(
          170.0,
          E::max_norm(E::mul(E::exp(E::add(scaled(a, z3), E::constant(drift))),
                             E::relu(E::add(E::constant(1.0), scaled(-0.2, E::square(z1)))))));
    }
    return spec;
  }

  fail(ErrorKind::invalid_argument, "unknown model name: " + name);
}

std::vector<std::string> catalog_names() {
  return {"P1",  "P2",  "L1",  "L2",  "S1",  "S2",  "H1",  "H2",  "L1star",
          "P1p", "P2p", "L1p", "L2p", "S1p", "S2p", "H1p", "H2p"};
}

}  // namespace ptcov
