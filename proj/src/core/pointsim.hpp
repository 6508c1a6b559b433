#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "core/randfield.hpp"
#include "core/raster.hpp"
#include "core/rng.hpp"

namespace ptcov {

// Expression tree over simulated fields, used to build intensity/trend
// surfaces and derived covariates.
class TrendExpr {
 public:
  static TrendExpr constant(double value);
  static TrendExpr field(int index);  // reference into the simulated field list
  static TrendExpr add(TrendExpr a, TrendExpr b);
  static TrendExpr mul(TrendExpr a, TrendExpr b);
  static TrendExpr exp(TrendExpr a);
  static TrendExpr square(TrendExpr a);
  static TrendExpr relu(TrendExpr a);      // max(., 0)
  static TrendExpr max_norm(TrendExpr a);  // divide by the max over the window

  ScalarField evaluate(const std::vector<ScalarField>& fields, const GridSpec& grid,
                       const Window& window) const;
  int max_field_index() const;
  void collect_fields(std::set<int>& out) const;

 private:
  enum class Op { constant, field, add, mul, exp, square, relu, max_norm };
  Op op_ = Op::constant;
  double value_ = 0.0;
  int index_ = 0;
  std::shared_ptr<const TrendExpr> lhs_, rhs_;
};

enum class Interaction { poisson, lgcp, strauss, hardcore_strauss };

struct StraussParams {
  double gamma = 1.0;
  double range = 0.0;
  double hardcore = 0.0;
};

struct GibbsConfig {
  long proposals = 100000;
  double p_birth = 0.35;
  double p_death = 0.35;  // remainder moves
};

// Declarative simulation model: intensity (Poisson), log-driving intensity
// construction (LGCP) or trend (Gibbs), plus covariate definitions.
struct ModelSpec {
  std::string name;
  Interaction interaction = Interaction::poisson;
  StraussParams strauss;
  TrendExpr intensity;  // Poisson/LGCP intensity, Gibbs trend beta(u)
  TrendExpr covariate_c1;
  TrendExpr covariate_c2;
  int n_fields = 0;  // Z fields consumed by the expressions
  GaussFieldSpec field_spec;
};

PointPattern simulate_poisson(const ScalarField& intensity, Rng& rng);

struct SimulationOutput {
  PointPattern pattern;
  ScalarField c1;
  ScalarField c2;
};

PointPattern simulate_gibbs(const StraussParams& params, const ScalarField& trend, Rng& rng,
                            const GibbsConfig& config = {});

// Draws the model's fields from `field_rng`, builds intensity and covariates,
// and simulates the pattern using `pattern_rng`.
SimulationOutput simulate_model(const ModelSpec& spec, const GridSpec& grid, const Window& window,
                                Rng& field_rng, Rng& pattern_rng, const GibbsConfig& gibbs = {});

// Named model catalog. `a` and `b` override the model's
// dependence-strength/covariate-correlation parameters where applicable.
ModelSpec catalog_model(const std::string& name, std::optional<double> a = std::nullopt,
                        std::optional<double> b = std::nullopt);
std::vector<std::string> catalog_names();

}  // namespace ptcov
