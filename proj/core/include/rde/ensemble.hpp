#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rde/corpus.hpp"
#include "rde/rde_model.hpp"
#include "rde/stats.hpp"

namespace rde {

struct SelectionConfig {
  std::size_t k = 100;                    // number of reference features
  double t = 20.0;                        // pruning threshold on |P(j,r)/(P(j)P(r)) - 1|
  std::int64_t candidate_min_count = 20;  // candidates need labeled count above this
  double ridge = 40.0;                    // combiner L2 strength

  /// Throws InvalidArgument unless k >= 1, t > 0, ridge >= 0.
  void validate() const;

  friend bool operator==(const SelectionConfig&, const SelectionConfig&) = default;
};

/// Features whose count in `labeled` exceeds `min_count`, ascending id.
std::vector<FeatureId> candidate_references(const CountTable& labeled, std::int64_t min_count);

struct Selection {
  std::vector<FeatureId> references;  // best first
  std::vector<double> scores;         // matching ranking scores
  bool truncated = false;             // fewer candidates than k
};

/// Ranks candidates by ranking_score ascending (ties: smaller id first) and
/// keeps the top k. Throws InvalidArgument if no candidate has a defined,
/// nonzero I(r).
Selection select_references(std::span<const FeatureId> candidates, const CountTable& unlabeled,
                            const ImbalanceVector& labeled, const SelectionConfig& cfg);

/// Marks as pruned every j with |P(j,r)/(P(j)P(r)) - 1| > t, every j
/// unseen in `unlabeled`, and the reference feature itself.
RdeModel prune(RdeModel model, const CountTable& unlabeled, double t);

struct Standardization {
  double mean = 0.0;
  double stddev = 1.0;

  /// Centered and scaled value; 0 when stddev is 0.
  double apply(double raw) const noexcept { return stddev > 0.0 ? (raw - mean) / stddev : 0.0; }

  friend bool operator==(const Standardization&, const Standardization&) = default;
};

/// Raw member scores of x, each standardized by its member's constants.
std::vector<double> score_features(std::span<const RdeModel> members, std::span<const Standardization> norms,
                                   const SparseExample& x);

class EnsembleModel {
 public:
  std::vector<RdeModel> members;
  std::vector<Standardization> normalization;
  std::vector<double> combiner_weights;  // one per member, intercept last
  SelectionConfig config;
  std::string fingerprint;               // hash of the unlabeled count table

  std::vector<double> features(const SparseExample& x) const { return score_features(members, normalization, x); }

  /// Pre-sigmoid combiner output.
  double predict(const SparseExample& x) const;

  friend bool operator==(const EnsembleModel&, const EnsembleModel&) = default;
};

struct EnsembleTraining {
  EnsembleModel model;
  Selection selection;
  bool combiner_converged = false;
};

/// Full pipeline from precomputed tables. `unlabeled` must carry pair rows
/// for every candidate; `labeled_counts` must come from `labeled`.
EnsembleTraining train_ensemble(const Dataset& labeled, const CountTable& labeled_counts,
                                const CountTable& unlabeled, std::span<const FeatureId> candidates,
                                const SelectionConfig& cfg, std::size_t threads = 1);

/// Counts both datasets and runs the pipeline.
EnsembleTraining train_ensemble(const Dataset& labeled, const Dataset& unlabeled, const SelectionConfig& cfg,
                                std::size_t threads = 1);

/// Hash of the serialized table.
std::string count_fingerprint(const CountTable& table);

void write_ensemble(std::ostream& out, const EnsembleModel& model, std::string_view config_echo = {});
EnsembleModel read_ensemble(std::istream& in, const std::string& source = "<ensemble>");

}  // namespace rde
