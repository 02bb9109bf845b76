#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rde/corpus.hpp"

namespace rde {

/// Dense row-major matrix of combiner inputs.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
  std::span<const double> row(std::size_t i) const { return std::span<const double>(values).subspan(i * cols, cols); }
};

// Parameters are laid out as [w_0 .. w_{k-1}, intercept]. The objective is
//   sum_i log(1 + exp(z_i)) - y_i z_i + ridge/2 * |w|^2,   z_i = w.x_i + b
// with y_i = 1 for positives; the intercept is not penalized.

double logistic_ridge_objective(const FeatureMatrix& x, std::span<const Label> labels, double ridge,
                                std::span<const double> params);
std::vector<double> logistic_ridge_gradient(const FeatureMatrix& x, std::span<const Label> labels, double ridge,
                                            std::span<const double> params);

struct LogisticRidgeFit {
  std::vector<double> weights;
  double intercept = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;
  bool converged = false;
};

/// Damped Newton iterations from zero until the gradient norm drops to
/// `tolerance`. Throws InvalidArgument unless both classes are present and
/// ridge >= 0.
LogisticRidgeFit train_logistic_ridge(const FeatureMatrix& x, std::span<const Label> labels, double ridge,
                                      double tolerance = 1e-8, int max_iterations = 200);

}  // namespace rde
