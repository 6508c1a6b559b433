#include "core/harness.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "core/common.hpp"
#include "core/loglin.hpp"

namespace ptcov {

void parallel_for(long count, int threads, const std::function<void(long)>& fn) {
  if (count <= 0) return;
  int n_workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (n_workers < 1) n_workers = 1;
  n_workers = static_cast<int>(std::min<long>(n_workers, count));
  if (n_workers == 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<long> cursor{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      long i = cursor.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        cursor.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_workers));
  for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

ReplicateOutcome run_single_replicate(const ReplicateConfig& config, const ModelSpec& spec,
                                      long rep) {
  GridSpec grid = GridSpec::covering(config.window, config.grid_ncols, config.grid_nrows);
  Rng field_rng =
      Rng::substream(config.seed, {stream::fields, static_cast<std::uint64_t>(rep)});
  Rng pattern_rng =
      Rng::substream(config.seed, {stream::pattern, static_cast<std::uint64_t>(rep)});
  SimulationOutput sim = simulate_model(spec, grid, config.window, field_rng, pattern_rng,
                                        config.gibbs);

  ReplicateOutcome outcome;
  outcome.p_values.reserve(config.tests.size());
  for (std::size_t t = 0; t < config.tests.size(); ++t) {
    const TestEntry& entry = config.tests[t];
    if (entry.kind == TestEntry::Kind::wald) {
      std::vector<const ScalarField*> covs{&sim.c1, &sim.c2};
      try {
        LogLinFit fit = fit_loglinear(sim.pattern, covs, grid);
        outcome.p_values.push_back(wald_p_value(fit, 2));
      } catch (const Error&) {
        outcome.p_values.push_back(1.0);  // non-converged fits never reject
      }
      continue;
    }
    ShiftTestConfig shift = entry.shift;
    shift.seed = Rng::substream(config.seed,
                                {stream::shifts, static_cast<std::uint64_t>(rep),
                                 static_cast<std::uint64_t>(t)})
                     .next();
    std::vector<const ScalarField*> nuisance{&sim.c1};
    ShiftTestResult result = run_shift_test(sim.pattern, nuisance, sim.c2, shift);
    outcome.p_values.push_back(result.p_value);
  }
  return outcome;
}

std::vector<RejectionRow> run_replicate(const ReplicateConfig& config) {
  if (config.replications < 1)
    fail(ErrorKind::invalid_argument, "replications must be positive");
  if (config.tests.empty()) fail(ErrorKind::invalid_argument, "no tests configured");
  ModelSpec spec = catalog_model(config.model, config.a, config.b);

  std::vector<std::vector<double>> p_values(
      config.tests.size(), std::vector<double>(static_cast<std::size_t>(config.replications)));
  parallel_for(config.replications, config.threads, [&](long rep) {
    ReplicateOutcome outcome = run_single_replicate(config, spec, rep);
    for (std::size_t t = 0; t < config.tests.size(); ++t)
      p_values[t][static_cast<std::size_t>(rep)] = outcome.p_values[t];
  });

  std::vector<RejectionRow> rows;
  rows.reserve(config.tests.size());
  for (std::size_t t = 0; t < config.tests.size(); ++t) {
    long rejections = 0;
    for (double p : p_values[t])
      if (p <= config.alpha) ++rejections;
    double n = static_cast<double>(config.replications);
    double phat = static_cast<double>(rejections) / n;
    // Wilson 95% interval.
    double z = 1.959963984540054;
    double denom = 1.0 + z * z / n;
    double center = (phat + z * z / (2.0 * n)) / denom;
    double half = z * std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom;
    rows.push_back(RejectionRow{config.tests[t].label, phat, std::max(0.0, center - half),
                                std::min(1.0, center + half), config.replications});
  }
  return rows;
}

}  // namespace ptcov
