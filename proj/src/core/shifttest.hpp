#pragma once

#include <cstdint>
#include <vector>

#include "core/depmeasure.hpp"

namespace ptcov {

enum class Statistic { tau_partial, cwr, mean_covariate };
enum class Correction { torus, variance };
enum class ShiftDist { disc, uniform_window };

struct ShiftTestConfig {
  Statistic statistic = Statistic::cwr;
  Provenance residuals = Provenance::nonparametric;
  Correction correction = Correction::torus;
  int n_shifts = 999;
  double radius = 0.0;  // <= 0 selects the largest radius keeping >= 1/4 overlap
  ShiftDist shift_dist = ShiftDist::disc;
  std::uint64_t seed = 0;
  int sampling_points = 100;
  double fixed_bandwidth = 0.0;            // <= 0 selects the adaptive rule
  std::vector<double> bandwidth_candidates;  // empty selects the default grid
};

struct ShiftTestResult {
  std::vector<double> statistics;    // T_0 .. T_N
  std::vector<double> standardized;  // S_0 .. S_N, variance correction only
  std::vector<double> areas;         // |W_i|
  std::vector<int> retained;         // points (CWR/mean) or sampling points (tau) in W_i
  double p_value = 1.0;
  double t0 = 0.0;
  double bandwidth = 0.0;
  double radius = 0.0;
};

// Monte Carlo p-value of the entry at index 0 within the whole sample,
// two-sided via absolute values; ties count as extreme.
double two_sided_mc_p(const std::vector<double>& values);

// Two-sided random shift Monte Carlo test of independence between the
// pattern and the interest covariate, conditional on the nuisance
// covariates. The residual object is built once from the unshifted data; the
// interest covariate is shifted. Shift vectors are snapped to whole grid
// cells so field shifts are exact permutations.
ShiftTestResult run_shift_test(const PointPattern& pattern,
                               const std::vector<const ScalarField*>& nuisance,
                               const ScalarField& interest, const ShiftTestConfig& config);

}  // namespace ptcov
