#include "core/loglin.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "core/common.hpp"

namespace ptcov {
namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

LogLinFit fit_loglinear(const PointPattern& pattern,
                        const std::vector<const ScalarField*>& covariates,
                        const GridSpec& grid) {
  const int m = static_cast<int>(covariates.size());
  const int dim = m + 1;
  const Window& window = pattern.window;
  for (const ScalarField* c : covariates)
    if (!c->grid().same_geometry(grid))
      fail(ErrorKind::data, "covariate grids have mismatched geometry");

  // Quadrature cells (centers inside the window) with standardized covariates.
  ScalarField mask(grid, window);
  std::vector<std::size_t> cells;
  for (int r = 0; r < grid.nrows; ++r)
    for (int c = 0; c < grid.ncols; ++c)
      if (mask.center_in_window(r, c))
        cells.push_back(static_cast<std::size_t>(r) * grid.ncols + c);
  double cell_area = grid.cell * grid.cell;

  Eigen::VectorXd mu = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd sd = Eigen::VectorXd::Ones(dim);
  for (int j = 1; j < dim; ++j) {
    const auto& vals = covariates[static_cast<std::size_t>(j - 1)]->values();
    double mean = 0.0;
    for (std::size_t f : cells) mean += vals[f];
    mean /= static_cast<double>(cells.size());
    double var = 0.0;
    for (std::size_t f : cells) var += (vals[f] - mean) * (vals[f] - mean);
    var /= static_cast<double>(cells.size());
    mu[j] = mean;
    sd[j] = var > 0.0 ? std::sqrt(var) : 1.0;
  }

  auto design_row = [&](std::size_t flat, Eigen::VectorXd& z) {
    z[0] = 1.0;
    for (int j = 1; j < dim; ++j)
      z[j] = (covariates[static_cast<std::size_t>(j - 1)]->values()[flat] - mu[j]) / sd[j];
  };

  // Condition check on the area-weighted design Gram matrix.
  {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd z(dim);
    for (std::size_t f : cells) {
      design_row(f, z);
      gram.noalias() += z * z.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    double lo = es.eigenvalues().minCoeff();
    double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || std::sqrt(hi / lo) > 1e8)
      fail(ErrorKind::numeric, "singular design: covariates are collinear on the grid");
  }

  // Data-point design rows (by raster lookup).
  std::vector<Eigen::VectorXd> point_rows;
  point_rows.reserve(pattern.size());
  {
    Eigen::VectorXd z(dim);
    for (const Vec2& p : pattern.points) {
      z[0] = 1.0;
      for (int j = 1; j < dim; ++j)
        z[j] = (covariates[static_cast<std::size_t>(j - 1)]->lookup(p) - mu[j]) / sd[j];
      point_rows.push_back(z);
    }
  }

  double n = static_cast<double>(pattern.size());
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(dim);
  beta[0] = std::log(std::max(n, 0.5) / window.area());

  auto log_lik = [&](const Eigen::VectorXd& b, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) {
    double ll = 0.0;
    if (grad) grad->setZero();
    if (hess) hess->setZero();
    Eigen::VectorXd z(dim);
    for (const auto& row : point_rows) {
      ll += b.dot(row);
      if (grad) *grad += row;
    }
    for (std::size_t f : cells) {
      design_row(f, z);
      double lambda = std::exp(b.dot(z)) * cell_area;
      ll -= lambda;
      if (grad) grad->noalias() -= lambda * z;
      if (hess) hess->noalias() += lambda * z * z.transpose();
    }
    return ll;
  };

  // Damped Newton iterations on the concave quadrature log-likelihood.
  Eigen::VectorXd grad(dim);
  Eigen::MatrixXd hess(dim, dim);
  double ll = log_lik(beta, &grad, &hess);
  int iter = 0;
  constexpr int kMaxIter = 60;
  for (; iter < kMaxIter && grad.lpNorm<Eigen::Infinity>() >= 1e-8; ++iter) {
    Eigen::VectorXd step = hess.ldlt().solve(grad);
    if (!step.allFinite()) fail(ErrorKind::numeric, "Newton step failed (singular Hessian)");
    // The acceptance slack must sit above the rounding noise of the
    // likelihood sum, or the final Newton contractions get rejected.
    double slack = 1e-10 * (std::abs(ll) + 1.0);
    double scale = 1.0;
    for (int half = 0; half < 40; ++half) {
      Eigen::VectorXd candidate = beta + scale * step;
      double cand_ll = log_lik(candidate, nullptr, nullptr);
      if (cand_ll >= ll - slack) {
        beta = candidate;
        ll = cand_ll;
        break;
      }
      scale *= 0.5;
    }
    ll = log_lik(beta, &grad, &hess);
    if (beta.lpNorm<Eigen::Infinity>() > 50.0)
      fail(ErrorKind::numeric, "log-linear fit diverged (coefficient beyond +/-50)");
  }
  if (grad.lpNorm<Eigen::Infinity>() >= 1e-8)
    fail(ErrorKind::numeric, "log-linear fit did not converge");

  Eigen::MatrixXd cov_std = hess.inverse();

  // Map the standardized coefficients and covariance back to original units.
  Eigen::MatrixXd back = Eigen::MatrixXd::Zero(dim, dim);
  back(0, 0) = 1.0;
  for (int j = 1; j < dim; ++j) {
    back(0, j) = -mu[j] / sd[j];
    back(j, j) = 1.0 / sd[j];
  }
  Eigen::VectorXd beta_orig = back * beta;
  Eigen::MatrixXd cov_orig = back * cov_std * back.transpose();
  if (beta_orig.lpNorm<Eigen::Infinity>() > 50.0)
    fail(ErrorKind::numeric, "log-linear fit diverged (coefficient beyond +/-50)");

  LogLinFit fit{std::vector<double>(static_cast<std::size_t>(dim)),
                std::vector<std::vector<double>>(static_cast<std::size_t>(dim),
                                                 std::vector<double>(static_cast<std::size_t>(dim))),
                ScalarField(grid, window, 0.0), iter, grad.lpNorm<Eigen::Infinity>()};
  for (int i = 0; i < dim; ++i) {
    fit.beta[static_cast<std::size_t>(i)] = beta_orig[i];
    for (int j = 0; j < dim; ++j)
      fit.covariance[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = cov_orig(i, j);
  }
  {
    Eigen::VectorXd z(dim);
    for (std::size_t f : cells) {
      design_row(f, z);
      fit.lambda.values()[f] = std::exp(beta.dot(z));
    }
  }
  return fit;
}

double wald_p_value(const LogLinFit& fit, int index) {
  if (index < 0 || index >= static_cast<int>(fit.beta.size()))
    fail(ErrorKind::invalid_argument, "coefficient index out of range");
  double var = fit.covariance[static_cast<std::size_t>(index)][static_cast<std::size_t>(index)];
  if (!(var > 0.0)) fail(ErrorKind::numeric, "nonpositive coefficient variance");
  double z = fit.beta[static_cast<std::size_t>(index)] / std::sqrt(var);
  return 2.0 * (1.0 - normal_cdf(std::abs(z)));
}

}  // namespace ptcov
