#include "core/select.hpp"

#include <algorithm>

#include "core/common.hpp"

namespace ptcov {

SelectionTrace backward_select(const PointPattern& pattern,
                               const std::vector<NamedCovariate>& covariates,
                               const ShiftTestConfig& base_config, double alpha) {
  if (covariates.empty())
    fail(ErrorKind::invalid_argument, "backward selection needs at least one covariate");
  if (!(alpha > 0.0 && alpha < 1.0))
    fail(ErrorKind::invalid_argument, "alpha must lie in (0, 1)");

  std::vector<NamedCovariate> active = covariates;
  std::sort(active.begin(), active.end(),
            [](const NamedCovariate& a, const NamedCovariate& b) { return a.name < b.name; });

  SelectionTrace trace;
  trace.alpha = alpha;
  std::uint64_t stage_index = 0;
  while (!active.empty()) {
    SelectionStage stage;
    for (const NamedCovariate& c : active) stage.active.push_back(c.name);

    for (std::size_t k = 0; k < active.size(); ++k) {
      std::vector<const ScalarField*> nuisance;
      for (std::size_t j = 0; j < active.size(); ++j)
        if (j != k) nuisance.push_back(active[j].field);
      ShiftTestConfig config = base_config;
      config.seed =
          Rng::substream(base_config.seed, {stream::select, stage_index, static_cast<std::uint64_t>(k)})
              .next();
      ShiftTestResult result = run_shift_test(pattern, nuisance, *active[k].field, config);
      stage.p_values.push_back(result.p_value);
    }

    // Highest p-value; ties already resolved toward the alphabetically first
    // name because `active` is sorted and strict inequality is required to
    // move the pick.
    std::size_t worst = 0;
    for (std::size_t k = 1; k < stage.p_values.size(); ++k)
      if (stage.p_values[k] > stage.p_values[worst]) worst = k;

    if (stage.p_values[worst] < alpha) {
      trace.stages.push_back(std::move(stage));
      break;  // every remaining covariate is significant
    }
    stage.removed = active[worst].name;
    trace.stages.push_back(std::move(stage));
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(worst));
    ++stage_index;
  }

  for (const NamedCovariate& c : active) trace.final_set.push_back(c.name);
  return trace;
}

}  // namespace ptcov
