#pragma once

#include <string>
#include <vector>

#include "core/shifttest.hpp"

namespace ptcov {

struct NamedCovariate {
  std::string name;
  const ScalarField* field = nullptr;
};

struct SelectionStage {
  std::vector<std::string> active;
  std::vector<double> p_values;  // aligned with `active`
  std::string removed;           // empty when the stage stopped the procedure
};

struct SelectionTrace {
  std::vector<SelectionStage> stages;
  std::vector<std::string> final_set;
  double alpha = 0.05;
};

// Backward elimination: at each stage every active covariate is tested as the
// interest covariate with the others as nuisance; the one with the highest
// p-value is removed until all remaining p-values fall below alpha. Ties
// break by covariate name order. Stage tests draw from independent seed
// substreams.
SelectionTrace backward_select(const PointPattern& pattern,
                               const std::vector<NamedCovariate>& covariates,
                               const ShiftTestConfig& base_config, double alpha);

}  // namespace ptcov
