#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/pointsim.hpp"
#include "core/shifttest.hpp"

namespace ptcov {

// Runs fn(i) for i in [0, count) on `threads` workers (0 = hardware count).
// Exceptions are captured and rethrown on the calling thread.
void parallel_for(long count, int threads, const std::function<void(long)>& fn);

// One test entry of the replication harness: either a random shift test or
// the Wald test from the log-linear fit.
struct TestEntry {
  enum class Kind { shift, wald };
  Kind kind = Kind::shift;
  ShiftTestConfig shift;
  std::string label;
};

struct ReplicateConfig {
  std::string model;
  std::optional<double> a;
  std::optional<double> b;
  int replications = 100;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int grid_ncols = 128;
  int grid_nrows = 128;
  Window window = Window::rectangle(0.0, 0.0, 1.0, 1.0);
  GibbsConfig gibbs;
  std::vector<TestEntry> tests;
  int threads = 0;
};

struct RejectionRow {
  std::string label;
  double fraction = 0.0;
  double band_lo = 0.0;  // Wilson 95% interval
  double band_hi = 0.0;
  int replications = 0;
};

std::vector<RejectionRow> run_replicate(const ReplicateConfig& config);

// Per-replicate simulation + tests; exposed for the experiment suites.
struct ReplicateOutcome {
  std::vector<double> p_values;  // one per test entry
};
ReplicateOutcome run_single_replicate(const ReplicateConfig& config, const ModelSpec& spec,
                                      long rep);

}  // namespace ptcov
