#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rde/corpus.hpp"

namespace rde {

/// Marginal and reference-row co-occurrence counts over a corpus.
///
/// Pair counts are kept only for the rows named as references, each row a
/// dense vector over all features. When the source dataset is fully labeled
/// the table also keeps positive-class splits of every count; negative-class
/// counts are derived as total minus positive.
class CountTable {
 public:
  CountTable() = default;
  CountTable(std::size_t n_features, std::vector<FeatureId> references, bool with_classes);

  std::int64_t n_examples() const noexcept { return n_examples_; }
  std::size_t n_features() const noexcept { return marginal_.size(); }
  bool has_class_counts() const noexcept { return with_classes_; }

  std::int64_t marginal(FeatureId j) const { return marginal_.at(j); }
  std::span<const std::int64_t> marginals() const noexcept { return marginal_; }

  std::span<const FeatureId> references() const noexcept { return references_; }
  bool has_reference(FeatureId r) const noexcept;

  /// N(j, r); either argument may be the reference row.
  std::int64_t pair(FeatureId a, FeatureId b) const;
  /// Row of N(r, j) over all j. Throws InvalidArgument if r is not a reference.
  std::span<const std::int64_t> pair_row(FeatureId r) const;

  // Class-split counts; throw InvalidArgument without class counts.
  std::int64_t class_examples(Label cls) const;
  std::int64_t class_marginal(FeatureId j, Label cls) const;
  std::int64_t class_pair(FeatureId a, FeatureId b, Label cls) const;

  double p(FeatureId a) const;
  double p_joint(FeatureId a, FeatureId b) const;
  /// P(a | b) = N(a,b) / N(b); throws UndefinedError when N(b) = 0.
  double p_given(FeatureId a, FeatureId b) const;

  /// Adds another table of identical shape (shard merge).
  CountTable& operator+=(const CountTable& other);
  friend bool operator==(const CountTable&, const CountTable&) = default;

  /// Accumulates one example.
  void add(const SparseExample& x, Label label);

 private:
  friend struct CountTableReader;

  std::size_t row_index(FeatureId r) const;
  std::optional<std::size_t> find_row(FeatureId r) const noexcept;
  void require_classes() const;

  std::int64_t n_examples_ = 0;
  std::int64_t n_pos_ = 0;
  bool with_classes_ = false;
  std::vector<std::int64_t> marginal_;
  std::vector<std::int64_t> marginal_pos_;
  std::vector<FeatureId> references_;   // sorted
  std::vector<std::int64_t> pair_;      // references_.size() x n_features
  std::vector<std::int64_t> pair_pos_;
};

/// Counts `data` with pair rows for `reference_ids`. Class splits are kept
/// iff every example is labeled. Examples are sharded across `threads`
/// workers and merged by integer addition, so the result does not depend on
/// the thread count. Throws InvalidArgument on an empty dataset.
CountTable count_corpus(const Dataset& data, std::span<const FeatureId> reference_ids, std::size_t threads = 1);

void write_counts(std::ostream& out, const CountTable& table, std::string_view config_echo = {});
CountTable read_counts(std::istream& in, const std::string& source = "<counts>");

struct ClassPrior {
  double p_pos = 0.5;
  double alpha = 1.0;  // P(y) / P(not y)

  /// Throws InvalidArgument if either class is empty.
  static ClassPrior from_counts(std::int64_t n_pos, std::int64_t n_neg);
  static ClassPrior from_probability(double p_pos);
};

/// Feature imbalance coefficient I(j) = (P(j,y) - alpha P(j,not y)) / P(j),
/// clamped into [-alpha, 1] against rounding.
double imbalance_coefficient(double p_joint_pos, double p_joint_neg, double alpha);

/// Conditional dependence D(j,r|l) = P(j,r|l) / (P(j|l) P(r|l)) - 1, or 0 when
/// either conditional is zero.
double dependence_coefficient(double p_jr_given, double p_j_given, double p_r_given);

struct ImbalanceVector {
  ClassPrior prior;
  std::vector<std::optional<double>> values;  // nullopt where N_l(j) = 0

  std::optional<double> operator[](FeatureId j) const { return values.at(j); }
  std::size_t undefined_count() const noexcept;
};

/// Requires class counts with both classes present.
ImbalanceVector imbalance(const CountTable& labeled);

struct DependenceCoefficients {
  FeatureId reference = 0;
  std::vector<double> d_pos;
  std::vector<double> d_neg;
};

/// Requires class counts and a pair row for r; throws if N(r) = 0.
DependenceCoefficients dependence(const CountTable& labeled, FeatureId r);

}  // namespace rde
