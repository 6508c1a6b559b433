#include "core/residual.hpp"

#include <cmath>

#include "core/common.hpp"

namespace ptcov {

double ResidualMeasure::evaluate(const Window& region) const {
  long count = 0;
  for (const Vec2& p : pattern.points)
    if (region.contains(p)) ++count;
  return static_cast<double>(count) - integrate(lambda, region);
}

namespace {

// Constant covariates carry no information and would make either estimator
// degenerate, so they are dropped from the intensity fit.
std::vector<const ScalarField*> drop_constant(const std::vector<const ScalarField*>& covariates) {
  std::vector<const ScalarField*> kept;
  for (const ScalarField* f : covariates) {
    bool varies = false;
    double v0 = 0.0;
    bool first = true;
    for (int r = 0; r < f->nrows() && !varies; ++r)
      for (int c = 0; c < f->ncols(); ++c) {
        if (!f->center_in_window(r, c)) continue;
        double v = f->at(r, c);
        if (first) {
          v0 = v;
          first = false;
        } else if (v != v0) {
          varies = true;
          break;
        }
      }
    if (varies) kept.push_back(f);
  }
  return kept;
}

}  // namespace

ScalarField fit_intensity(const PointPattern& pattern,
                          const std::vector<const ScalarField*>& covariates,
                          Provenance provenance, const GridSpec& grid) {
  std::vector<const ScalarField*> informative = drop_constant(covariates);
  if (informative.empty() || provenance == Provenance::constant) {
    double constant = static_cast<double>(pattern.size()) / pattern.window.area();
    return ScalarField(grid, pattern.window, constant);
  }
  if (provenance == Provenance::parametric)
    return fit_loglinear(pattern, informative, grid).lambda;
  return fit_rho(pattern, informative, grid).lambda;
}

ResidualMeasure residual_measure(const PointPattern& pattern, ScalarField lambda,
                                 Provenance provenance) {
  return ResidualMeasure{pattern, std::move(lambda), provenance};
}

ResidualField smoothed_residual_field(const PointPattern& pattern, const ScalarField& lambda,
                                      Provenance provenance, const KernelSpec& kernel) {
  ResidualFieldBuilder builder(pattern, lambda, provenance);
  return ResidualField{builder.field(kernel.bandwidth), kernel, provenance};
}

namespace {

bool is_constant_field(const ScalarField& f, double* value) {
  double v0 = 0.0;
  bool first = true;
  for (int r = 0; r < f.nrows(); ++r)
    for (int c = 0; c < f.ncols(); ++c) {
      if (!f.center_in_window(r, c)) continue;
      double v = f.at(r, c);
      if (first) {
        v0 = v;
        first = false;
      } else if (v != v0) {
        return false;
      }
    }
  *value = v0;
  return !first;
}

}  // namespace

ResidualFieldBuilder::ResidualFieldBuilder(const PointPattern& pattern, ScalarField lambda,
                                           Provenance provenance)
    : pattern_(pattern),
      lambda_(std::move(lambda)),
      provenance_(provenance),
      data_(lambda_.grid(), pattern.window, 0.0) {
  double constant = 0.0;
  if (provenance_ == Provenance::constant && is_constant_field(lambda_, &constant))
    constant_ = constant;

  // Point masses enter unmasked (the sum over points has no window
  // restriction); the intensity term integrates over W only.
  double inv_area = 1.0 / data_.cell_area();
  for (const Vec2& p : pattern_.points)
    data_.at(data_.row_of(p.y), data_.col_of(p.x)) += inv_area;
  if (!constant_) {
    for (int r = 0; r < data_.nrows(); ++r)
      for (int c = 0; c < data_.ncols(); ++c)
        if (data_.center_in_window(r, c)) {
          double v = lambda_.at(r, c);
          data_.at(r, c) -= std::isnan(v) ? 0.0 : v;
        }
  }
}

ScalarField ResidualFieldBuilder::field(double bandwidth) const {
  // Constant intensity reduces to the kernel estimate minus the constant,
  // cell-exact.
  if (constant_) {
    ScalarField out = kernel_intensity(pattern_, KernelSpec{bandwidth}, lambda_.grid());
    for (double& v : out.values()) v -= *constant_;
    return out;
  }
  auto sm = Smoother::get(lambda_.grid(), pattern_.window, bandwidth);
  if (spectrum_.empty()) spectrum_ = sm->padded_spectrum(data_);
  ScalarField conv = sm->convolve_spectrum(spectrum_, pattern_.window);
  const ScalarField& e = sm->edge();
  ScalarField out(lambda_.grid(), pattern_.window, 0.0);
  for (int r = 0; r < out.nrows(); ++r)
    for (int c = 0; c < out.ncols(); ++c) {
      double denom = e.at(r, c);
      out.at(r, c) = denom > 0.0 ? conv.at(r, c) / denom : 0.0;
    }
  return out;
}

}  // namespace ptcov
