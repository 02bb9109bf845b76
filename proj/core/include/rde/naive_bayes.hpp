#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rde/corpus.hpp"

namespace rde {

/// Bernoulli Naive Bayes with add-one smoothing,
/// theta_cj = (N_c(j) + 1) / (m_c + 2). The absent-feature terms are folded
/// into `bias`, so scoring touches only present ids.
class NaiveBayesModel {
 public:
  double bias = 0.0;
  std::vector<double> present_weights;

  /// Log-odds log P(y|x) - log P(not y|x).
  double score(const SparseExample& x) const;

  friend bool operator==(const NaiveBayesModel&, const NaiveBayesModel&) = default;
};

/// Throws InvalidArgument on unlabeled examples or a single class.
NaiveBayesModel naive_bayes(const Dataset& train);

void write_naive_bayes(std::ostream& out, const NaiveBayesModel& model, std::string_view config_echo = {});
NaiveBayesModel read_naive_bayes(std::istream& in, const std::string& source = "<naive-bayes>");

}  // namespace rde
