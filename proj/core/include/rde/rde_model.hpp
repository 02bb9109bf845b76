#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rde/corpus.hpp"
#include "rde/stats.hpp"

namespace rde {

enum class Polarity { pos, neg };

/// The reference of an RDE: an ordinary feature or one of the two gold
/// class indicators.
struct Reference {
  enum class Kind { feature, gold_pos, gold_neg };

  Kind kind = Kind::feature;
  FeatureId id = 0;  // meaningful only for Kind::feature

  static Reference feature(FeatureId id) { return {Kind::feature, id}; }
  static Reference gold(Polarity polarity) {
    return {polarity == Polarity::pos ? Kind::gold_pos : Kind::gold_neg, 0};
  }
  bool is_gold() const noexcept { return kind != Kind::feature; }

  friend bool operator==(const Reference&, const Reference&) = default;
};

/// Linear scorer with per-feature weights P(r|j) - P(r).
class RdeModel {
 public:
  RdeModel() = default;
  RdeModel(Reference reference, std::vector<double> weights, double ref_prob,
           std::optional<double> ref_imbalance = std::nullopt);

  const Reference& reference() const noexcept { return reference_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double weight(FeatureId j) const { return weights_.at(j); }
  std::size_t n_features() const noexcept { return weights_.size(); }
  double ref_prob() const noexcept { return ref_prob_; }
  std::optional<double> ref_imbalance() const noexcept { return ref_imbalance_; }
  void set_ref_imbalance(std::optional<double> value) { ref_imbalance_ = value; }

  bool is_pruned(FeatureId j) const { return pruned_.at(j) != 0; }
  std::vector<FeatureId> pruned_ids() const;
  std::size_t pruned_count() const noexcept;
  /// Replaces the pruned set.
  void set_pruned(std::span<const FeatureId> ids);

  /// Sum of unpruned weights over the example's ids, in ascending id order.
  double score(const SparseExample& x) const;
  std::vector<double> score_all(std::span<const SparseExample> xs) const;

  friend bool operator==(const RdeModel&, const RdeModel&) = default;

 private:
  Reference reference_;
  std::vector<double> weights_;
  std::vector<std::uint8_t> pruned_;
  double ref_prob_ = 0.0;
  std::optional<double> ref_imbalance_;
};

/// RDE for reference feature r from the table's counts. Throws
/// InvalidArgument when N(r) = 0 or r has no pair row.
RdeModel build_rde(const CountTable& table, FeatureId r);

/// RDE whose reference is the gold class indicator over a fully labeled
/// dataset. Positive and negative polarity weights are exact negations.
RdeModel build_semiperfect(const Dataset& data, Polarity polarity);

/// Same, from a class-split count table.
RdeModel build_semiperfect(const CountTable& labeled, Polarity polarity);

void write_model(std::ostream& out, const RdeModel& model, std::string_view config_echo = {});
RdeModel read_model(std::istream& in, const std::string& source = "<model>");

/// Body without the file header; used for embedding in ensemble files.
void write_model_body(std::ostream& out, const RdeModel& model);
RdeModel read_model_body(std::istream& in, const std::string& source, std::size_t& line_no);

}  // namespace rde
