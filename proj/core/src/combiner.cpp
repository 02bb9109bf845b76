#include "rde/combiner.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "rde/error.hpp"

namespace rde {

namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_inputs(const FeatureMatrix& x, std::span<const Label> labels, double ridge, std::size_t n_params) {
  if (labels.size() != x.rows) throw InvalidArgument("combiner: label count does not match rows");
  if (n_params != x.cols + 1) throw InvalidArgument("combiner: parameter vector must have cols + 1 entries");
  if (ridge < 0.0) throw InvalidArgument("combiner: ridge must be nonnegative");
}

double linear(const FeatureMatrix& x, std::size_t i, std::span<const double> params) {
  double z = params[x.cols];
  const auto row = x.row(i);
  for (std::size_t c = 0; c < x.cols; ++c) z += params[c] * row[c];
  return z;
}

}  // namespace

double logistic_ridge_objective(const FeatureMatrix& x, std::span<const Label> labels, double ridge,
                                std::span<const double> params) {
  check_inputs(x, labels, ridge, params.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    const double z = linear(x, i, params);
    loss += softplus(z) - (labels[i] == Label::pos ? z : 0.0);
  }
  double penalty = 0.0;
  for (std::size_t c = 0; c < x.cols; ++c) penalty += params[c] * params[c];
  return loss + 0.5 * ridge * penalty;
}

std::vector<double> logistic_ridge_gradient(const FeatureMatrix& x, std::span<const Label> labels, double ridge,
                                            std::span<const double> params) {
  check_inputs(x, labels, ridge, params.size());
  std::vector<double> grad(params.size(), 0.0);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const double residual = sigmoid(linear(x, i, params)) - (labels[i] == Label::pos ? 1.0 : 0.0);
    const auto row = x.row(i);
    for (std::size_t c = 0; c < x.cols; ++c) grad[c] += residual * row[c];
    grad[x.cols] += residual;
  }
  for (std::size_t c = 0; c < x.cols; ++c) grad[c] += ridge * params[c];
  return grad;
}

LogisticRidgeFit train_logistic_ridge(const FeatureMatrix& x, std::span<const Label> labels, double ridge,
                                      double tolerance, int max_iterations) {
  const std::size_t k = x.cols;
  check_inputs(x, labels, ridge, k + 1);
  std::size_t n_pos = 0;
  for (auto l : labels) {
    if (l == Label::unlabeled) throw InvalidArgument("combiner: unlabeled training example");
    if (l == Label::pos) ++n_pos;
  }
  if (n_pos == 0 || n_pos == labels.size()) throw InvalidArgument("combiner: both classes must be present");

  std::vector<double> params(k + 1, 0.0);
  double objective = logistic_ridge_objective(x, labels, ridge, params);
  LogisticRidgeFit fit;

  for (int iter = 0; iter < max_iterations; ++iter) {
    auto grad = logistic_ridge_gradient(x, labels, ridge, params);
    double norm = 0.0;
    for (double g : grad) norm += g * g;
    norm = std::sqrt(norm);
    fit.iterations = iter;
    fit.gradient_norm = norm;
    if (norm <= tolerance) {
      fit.converged = true;
      break;
    }

    Eigen::MatrixXd hessian = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k + 1), static_cast<Eigen::Index>(k + 1));
    Eigen::VectorXd augmented(static_cast<Eigen::Index>(k + 1));
    for (std::size_t i = 0; i < x.rows; ++i) {
      const double p = sigmoid(linear(x, i, params));
      const double w = p * (1.0 - p);
      const auto row = x.row(i);
      for (std::size_t c = 0; c < k; ++c) augmented[static_cast<Eigen::Index>(c)] = row[c];
      augmented[static_cast<Eigen::Index>(k)] = 1.0;
      hessian.selfadjointView<Eigen::Lower>().rankUpdate(augmented, w);
    }
    hessian = hessian.selfadjointView<Eigen::Lower>();
    for (std::size_t c = 0; c < k; ++c) hessian(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c)) += ridge;
    // Keeps the intercept row solvable when every p(1-p) underflows.
    hessian.diagonal().array() += 1e-12;

    Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(grad.data(), static_cast<Eigen::Index>(k + 1));
    Eigen::VectorXd step = hessian.ldlt().solve(g);

    // Backtracking on the objective (Armijo with c = 1e-4). Near the optimum the
    // required decrease drops below the rounding of the objective, so allow a
    // few ulps or Newton stalls short of the gradient tolerance.
    const double slope = g.dot(step);
    const double rounding = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(objective);
    double scale = 1.0;
    std::vector<double> trial(k + 1);
    double trial_objective = objective;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      for (std::size_t c = 0; c <= k; ++c) trial[c] = params[c] - scale * step[static_cast<Eigen::Index>(c)];
      trial_objective = logistic_ridge_objective(x, labels, ridge, trial);
      if (trial_objective <= objective - 1e-4 * scale * slope + rounding) {
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) {
      // No decrease is representable any more; accept the best point only
      // if it is not worse, then stop.
      if (trial_objective <= objective) params = trial;
      auto final_grad = logistic_ridge_gradient(x, labels, ridge, params);
      double final_norm = 0.0;
      for (double v : final_grad) final_norm += v * v;
      fit.gradient_norm = std::sqrt(final_norm);
      fit.converged = fit.gradient_norm <= tolerance;
      fit.iterations = iter + 1;
      break;
    }
    params = trial;
    objective = trial_objective;
    fit.iterations = iter + 1;
  }
  if (!fit.converged) {
    auto grad = logistic_ridge_gradient(x, labels, ridge, params);
    double norm = 0.0;
    for (double v : grad) norm += v * v;
    fit.gradient_norm = std::sqrt(norm);
    fit.converged = fit.gradient_norm <= tolerance;
  }
  fit.weights.assign(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(k));
  fit.intercept = params[k];
  return fit;
}

}  // namespace rde
