#pragma once

#include <span>
#include <vector>

#include "rde/corpus.hpp"

namespace rde {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct AucResult {
  double auc = 0.5;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::vector<RocPoint> curve;  // from (0,0) through every distinct threshold, descending
};

/// Normalized Mann-Whitney statistic with half credit for ties. Pair counts
/// are accumulated as integers (doubled), so the result is exact up to the
/// final division. Throws InvalidArgument on a single-class input, an
/// unlabeled entry, a NaN score, or mismatched lengths.
AucResult roc_auc(std::span<const double> scores, std::span<const Label> labels, bool with_curve = false);

/// Spearman rank correlation with average ranks for ties. Throws if the
/// inputs differ in length or have fewer than two entries.
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace rde
