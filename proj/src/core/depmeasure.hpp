#pragma once

#include <span>
#include <vector>

#include "core/residual.hpp"
#include "core/rng.hpp"

namespace ptcov {

// Kendall correlation with the pairwise-sign normalization
// sum_{i != j} sgn(a_i - a_j) sgn(b_i - b_j) / (n (n-1)); ties contribute
// zero. O(n log n) merge-sort implementation, sign-exact.
double kendall_tau(std::span<const double> a, std::span<const double> b);

struct SamplingPoints {
  std::vector<Vec2> points;
};

// n i.i.d. uniform points in the window, from a dedicated stream so they are
// independent of the pattern and covariates.
SamplingPoints draw_sampling_points(const Window& window, int count, Rng& rng);

enum class StatKind { tau, tau_partial, cwr, mean_covariate };

struct DependenceResult {
  StatKind kind = StatKind::tau;
  double value = 0.0;
  double bandwidth = 0.0;  // spatial kernel bandwidth, when one was used
  int sampling_points = 0;
};

// Correlation between the covariate and the constant-intensity smoothed
// residual field, read at the sampling points.
DependenceResult tau_hat(const PointPattern& pattern, const ScalarField& covariate,
                         const KernelSpec& kernel, const SamplingPoints& sampling);

// Candidate spatial bandwidth minimizing sum_i tau(s, C_i)^2 over the
// nuisance covariates; ties break toward the smaller value.
double adaptive_bandwidth(const ResidualFieldBuilder& builder,
                          const std::vector<const ScalarField*>& nuisance,
                          const SamplingPoints& sampling, const std::vector<double>& candidates);

std::vector<double> default_bandwidth_candidates(const Window& window);

// Partial correlation: tau between the interest covariate and the smoothed
// residual field built from the nuisance covariates. bandwidth <= 0 selects
// the adaptive rule.
DependenceResult tau_partial(const PointPattern& pattern,
                             const std::vector<const ScalarField*>& nuisance,
                             const ScalarField& interest, Provenance provenance, double bandwidth,
                             const std::vector<double>& candidates, const SamplingPoints& sampling);

// Covariate-weighted residual measure of the window: the interest covariate
// summed over the points minus its integral against the fitted intensity.
DependenceResult cwr(const PointPattern& pattern, const ScalarField& lambda,
                     const ScalarField& interest);

// Mean covariate value at the points of the pattern.
DependenceResult mean_covariate(const PointPattern& pattern, const ScalarField& covariate);

}  // namespace ptcov
