#pragma once

#include <optional>
#include <vector>

#include "core/loglin.hpp"
#include "core/rhohat.hpp"
#include "core/smooth.hpp"

namespace ptcov {

enum class Provenance { parametric, nonparametric, constant };

// Signed residual measure: +1 atoms at the pattern points, minus the fitted
// intensity density.
struct ResidualMeasure {
  PointPattern pattern;
  ScalarField lambda;
  Provenance provenance = Provenance::constant;

  // n(X ∩ B) - integral of lambda over B.
  double evaluate(const Window& region) const;
};

struct ResidualField {
  ScalarField field;
  KernelSpec kernel;
  Provenance provenance = Provenance::constant;
};

// Fits the intensity surface for the requested provenance: parametric
// (log-linear fit), nonparametric (covariate-space kernel estimate), or the
// constant n/|W| when no covariates are given.
ScalarField fit_intensity(const PointPattern& pattern,
                          const std::vector<const ScalarField*>& covariates,
                          Provenance provenance, const GridSpec& grid);

ResidualMeasure residual_measure(const PointPattern& pattern, ScalarField lambda,
                                 Provenance provenance);

ResidualField smoothed_residual_field(const PointPattern& pattern, const ScalarField& lambda,
                                      Provenance provenance, const KernelSpec& kernel);

// Shared machinery for building smoothed residual fields at several
// bandwidths from one fitted intensity: the padded data spectrum is computed
// once and reused across kernels.
class ResidualFieldBuilder {
 public:
  ResidualFieldBuilder(const PointPattern& pattern, ScalarField lambda, Provenance provenance);

  ScalarField field(double bandwidth) const;
  const ScalarField& lambda() const { return lambda_; }
  Provenance provenance() const { return provenance_; }

 private:
  PointPattern pattern_;
  ScalarField lambda_;
  Provenance provenance_;
  ScalarField data_;  // point masses / cell area - lambda (window-masked)
  std::optional<double> constant_;
  mutable std::vector<std::complex<double>> spectrum_;  // lazy; not thread-safe
};

}  // namespace ptcov
