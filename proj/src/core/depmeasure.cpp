#include "core/depmeasure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/common.hpp"

namespace ptcov {
namespace {

// Merge sort counting strictly decreasing pairs (Knight's algorithm).
std::int64_t count_inversions(std::vector<double>& v, std::vector<double>& tmp, std::size_t lo,
                              std::size_t hi) {
  if (hi - lo < 2) return 0;
  std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t inv = count_inversions(v, tmp, lo, mid) + count_inversions(v, tmp, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      inv += static_cast<std::int64_t>(mid - i);
      tmp[k++] = v[j++];
    } else {
      tmp[k++] = v[i++];
    }
  }
  while (i < mid) tmp[k++] = v[i++];
  while (j < hi) tmp[k++] = v[j++];
  std::copy(tmp.begin() + static_cast<std::ptrdiff_t>(lo), tmp.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}

template <typename Fn>
std::int64_t tied_pairs(const std::vector<std::size_t>& order, Fn&& equal) {
  std::int64_t ties = 0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= order.size(); ++i) {
    if (i < order.size() && equal(order[i - 1], order[i])) {
      ++run;
    } else {
      ties += static_cast<std::int64_t>(run) * static_cast<std::int64_t>(run - 1) / 2;
      run = 1;
    }
  }
  return ties;
}

}  // namespace

double kendall_tau(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorKind::invalid_argument, "kendall_tau: length mismatch");
  std::size_t n = a.size();
  if (n < 2) fail(ErrorKind::invalid_argument, "kendall_tau needs at least two observations");
  for (std::size_t i = 0; i < n; ++i)
    if (std::isnan(a[i]) || std::isnan(b[i]))
      fail(ErrorKind::invalid_argument, "kendall_tau: NaN in input");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (a[i] != a[j]) return a[i] < a[j];
    return b[i] < b[j];
  });

  std::int64_t n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  std::int64_t ties_a = tied_pairs(order, [&](std::size_t i, std::size_t j) { return a[i] == a[j]; });
  std::int64_t ties_both = tied_pairs(
      order, [&](std::size_t i, std::size_t j) { return a[i] == a[j] && b[i] == b[j]; });

  std::vector<std::size_t> order_b = order;
  std::stable_sort(order_b.begin(), order_b.end(),
                   [&](std::size_t i, std::size_t j) { return b[i] < b[j]; });
  std::int64_t ties_b =
      tied_pairs(order_b, [&](std::size_t i, std::size_t j) { return b[i] == b[j]; });

  std::vector<double> seq(n), tmp(n);
  for (std::size_t i = 0; i < n; ++i) seq[i] = b[order[i]];
  std::int64_t discordant = count_inversions(seq, tmp, 0, n);

  // Pairs strictly ordered in a: n0 - ties_a. Of those, ties in b only:
  // ties_b - ties_both. The rest split into concordant and discordant.
  std::int64_t concordant = n0 - ties_a - (ties_b - ties_both) - discordant;
  double num = 2.0 * static_cast<double>(concordant - discordant);
  return num / (static_cast<double>(n) * static_cast<double>(n - 1));
}

SamplingPoints draw_sampling_points(const Window& window, int count, Rng& rng) {
  if (count < 2) fail(ErrorKind::invalid_argument, "need at least two sampling points");
  Rect bb = window.bounding_box();
  SamplingPoints out;
  out.points.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(out.points.size()) < count) {
    Vec2 p{rng.uniform(bb.x0, bb.x1), rng.uniform(bb.y0, bb.y1)};
    if (window.contains(p)) out.points.push_back(p);
  }
  return out;
}

namespace {

std::vector<double> values_at(const ScalarField& field, const std::vector<Vec2>& pts) {
  std::vector<double> out;
  out.reserve(pts.size());
  for (const Vec2& p : pts) out.push_back(field.lookup(p));
  return out;
}

}  // namespace

DependenceResult tau_hat(const PointPattern& pattern, const ScalarField& covariate,
                         const KernelSpec& kernel, const SamplingPoints& sampling) {
  ScalarField lambda(covariate.grid(), pattern.window,
                     static_cast<double>(pattern.size()) / pattern.window.area());
  ResidualFieldBuilder builder(pattern, std::move(lambda), Provenance::constant);
  ScalarField s = builder.field(kernel.bandwidth);
  double tau = kendall_tau(values_at(covariate, sampling.points), values_at(s, sampling.points));
  return DependenceResult{StatKind::tau, tau, kernel.bandwidth,
                          static_cast<int>(sampling.points.size())};
}

std::vector<double> default_bandwidth_candidates(const Window& window) {
  Rect bb = window.bounding_box();
  double side = std::min(bb.width(), bb.height());
  std::vector<double> out;
  constexpr int kCount = 8;
  for (int i = 0; i < kCount; ++i)
    out.push_back(0.05 * side * std::pow(0.8 / 0.05, static_cast<double>(i) / (kCount - 1)));
  return out;
}

double adaptive_bandwidth(const ResidualFieldBuilder& builder,
                          const std::vector<const ScalarField*>& nuisance,
                          const SamplingPoints& sampling, const std::vector<double>& candidates) {
  if (candidates.empty()) fail(ErrorKind::invalid_argument, "empty bandwidth candidate list");
  std::vector<std::vector<double>> nuisance_values;
  nuisance_values.reserve(nuisance.size());
  for (const ScalarField* c : nuisance) nuisance_values.push_back(values_at(*c, sampling.points));

  std::vector<double> sorted = candidates;
  std::sort(sorted.begin(), sorted.end());
  double best_bw = sorted.front();
  double best_score = std::numeric_limits<double>::infinity();
  for (double bw : sorted) {
    ScalarField s = builder.field(bw);
    std::vector<double> s_values = values_at(s, sampling.points);
    double score = 0.0;
    for (const auto& cv : nuisance_values) {
      double t = kendall_tau(cv, s_values);
      score += t * t;
    }
    if (score < best_score) {
      best_score = score;
      best_bw = bw;
    }
  }
  return best_bw;
}

DependenceResult tau_partial(const PointPattern& pattern,
                             const std::vector<const ScalarField*>& nuisance,
                             const ScalarField& interest, Provenance provenance, double bandwidth,
                             const std::vector<double>& candidates,
                             const SamplingPoints& sampling) {
  ScalarField lambda = fit_intensity(pattern, nuisance, provenance, interest.grid());
  ResidualFieldBuilder builder(pattern, std::move(lambda),
                               nuisance.empty() ? Provenance::constant : provenance);
  double bw = bandwidth;
  if (!(bw > 0.0)) {
    std::vector<double> cands =
        candidates.empty() ? default_bandwidth_candidates(pattern.window) : candidates;
    bw = nuisance.empty() ? default_bandwidth(pattern.window)
                          : adaptive_bandwidth(builder, nuisance, sampling, cands);
  }
  ScalarField s = builder.field(bw);
  double tau = kendall_tau(values_at(interest, sampling.points), values_at(s, sampling.points));
  return DependenceResult{StatKind::tau_partial, tau, bw,
                          static_cast<int>(sampling.points.size())};
}

DependenceResult cwr(const PointPattern& pattern, const ScalarField& lambda,
                     const ScalarField& interest) {
  long double point_sum = 0.0L;
  for (const Vec2& p : pattern.points) point_sum += interest.lookup(p);
  long double integral = 0.0L;
  for (int r = 0; r < lambda.nrows(); ++r)
    for (int c = 0; c < lambda.ncols(); ++c) {
      if (!lambda.center_in_window(r, c)) continue;
      double lv = lambda.at(r, c);
      double cv = interest.at(r, c);
      if (std::isnan(lv) || std::isnan(cv)) continue;
      integral += static_cast<long double>(lv) * cv;
    }
  integral *= lambda.cell_area();
  return DependenceResult{StatKind::cwr, static_cast<double>(point_sum - integral), 0.0, 0};
}

DependenceResult mean_covariate(const PointPattern& pattern, const ScalarField& covariate) {
  if (pattern.points.empty())
    fail(ErrorKind::invalid_argument, "mean covariate statistic is undefined for empty patterns");
  long double sum = 0.0L;
  for (const Vec2& p : pattern.points) sum += covariate.lookup(p);
  return DependenceResult{StatKind::mean_covariate,
                          static_cast<double>(sum / pattern.points.size()), 0.0, 0};
}

}  // namespace ptcov
