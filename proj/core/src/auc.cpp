#include "rde/auc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "rde/error.hpp"

namespace rde {

AucResult roc_auc(std::span<const double> scores, std::span<const Label> labels, bool with_curve) {
  if (scores.size() != labels.size()) throw InvalidArgument("roc_auc: scores and labels differ in length");
  AucResult result;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == Label::unlabeled) throw InvalidArgument("roc_auc: unlabeled entry");
    if (std::isnan(scores[i])) throw InvalidArgument("roc_auc: NaN score");
    ++(labels[i] == Label::pos ? result.n_pos : result.n_neg);
  }
  if (result.n_pos == 0 || result.n_neg == 0) throw InvalidArgument("roc_auc: both classes must be present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Ascending pass: each positive beats every negative strictly below it.
  std::int64_t twice_correct = 0;
  std::int64_t neg_below = 0;
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start;
    std::int64_t pos = 0;
    std::int64_t neg = 0;
    while (end < order.size() && scores[order[end]] == scores[order[start]]) {
      ++(labels[order[end]] == Label::pos ? pos : neg);
      ++end;
    }
    twice_correct += 2 * pos * neg_below + pos * neg;
    neg_below += neg;
    start = end;
  }
  const auto pairs = static_cast<std::int64_t>(result.n_pos) * static_cast<std::int64_t>(result.n_neg);
  result.auc = static_cast<double>(twice_correct) / static_cast<double>(2 * pairs);

  if (with_curve) {
    result.curve.push_back({0.0, 0.0});
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    for (std::size_t end = order.size(); end > 0;) {
      std::size_t start = end;
      while (start > 0 && scores[order[start - 1]] == scores[order[end - 1]]) {
        --start;
        ++(labels[order[start]] == Label::pos ? tp : fp);
      }
      result.curve.push_back({static_cast<double>(fp) / static_cast<double>(result.n_neg),
                              static_cast<double>(tp) / static_cast<double>(result.n_pos)});
      end = start;
    }
  }
  return result;
}

namespace {

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start;
    while (end < order.size() && values[order[end]] == values[order[start]]) ++end;
    const double rank = 0.5 * static_cast<double>(start + end - 1) + 1.0;
    for (std::size_t i = start; i < end; ++i) ranks[order[i]] = rank;
    start = end;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw InvalidArgument("spearman: need two equal-length samples");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = (n + 1.0) / 2.0;
  double cov = 0.0;
  double va = 0.0;
  double vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - mean) * (rb[i] - mean);
    va += (ra[i] - mean) * (ra[i] - mean);
    vb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (va == 0.0 || vb == 0.0) return 0.0;
  return cov / std::sqrt(va * vb);
}

}  // namespace rde
