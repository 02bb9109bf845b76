#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rde/bounds.hpp"
#include "rde/corpus.hpp"
#include "rde/rde_model.hpp"
#include "rde/stats.hpp"

namespace rde {

/// Within a component every feature is drawn independently with
/// probability q[j].
struct MixtureComponent {
  double weight = 1.0;
  std::vector<double> q;
};

/// Class-conditional Bernoulli feature model. One component per class gives
/// exact conditional independence between every pair of features; more
/// components introduce controlled dependence.
struct SyntheticSpec {
  double p_pos = 0.5;
  std::vector<MixtureComponent> pos;
  std::vector<MixtureComponent> neg;
  std::uint64_t seed = 0;

  std::size_t n_features() const noexcept { return pos.empty() ? 0 : pos.front().q.size(); }
  bool conditionally_independent() const noexcept { return pos.size() == 1 && neg.size() == 1; }

  /// Throws InvalidArgument on probabilities outside [0,1], p_pos outside
  /// (0,1), nonpositive weights, or ragged q vectors.
  void validate() const;

  static SyntheticSpec independent(double p_pos, std::vector<double> q_pos, std::vector<double> q_neg,
                                   std::uint64_t seed = 0);
};

/// Per-class mixture of a and b with weights (w, 1 - w). Same p_pos as a.
SyntheticSpec mix_specs(const SyntheticSpec& a, const SyntheticSpec& b, double w);

/// Independent spec with q drawn uniformly from [0, q_max].
SyntheticSpec random_independent_spec(std::size_t n_features, std::uint64_t seed, double q_max = 0.6);

/// Text-like benchmark: base rates scale*(j+1)^-exponent, a class shift of
/// +/- delta_j/2 on the logit scale (delta_j ~ N(0, class_signal)), and
/// `components` mixture components per class with N(0, component_noise)
/// logit jitter.
struct ZipfMixtureParams {
  std::size_t n_features = 2000;
  double p_pos = 0.3;
  double base_scale = 0.5;
  double base_exponent = 0.5;
  double class_signal = 0.1;
  double component_noise = 0.3;
  std::size_t components = 2;
};
SyntheticSpec zipf_mixture_spec(const ZipfMixtureParams& params, std::uint64_t seed);

/// Draws n fully labeled examples; reproducible from spec.seed.
Dataset synth_generate(const SyntheticSpec& spec, std::size_t n);

/// Builds a spec from key=value settings: either `preset=zipf_mixture` with
/// ZipfMixtureParams keys, or explicit `pos.<k>.weight`, `pos.<k>.q`
/// (comma-separated), and the same for `neg`. `p_pos` and `seed` apply to
/// both.
SyntheticSpec parse_spec(const std::map<std::string, std::string>& settings);

/// Corpus lines `<label>\tf<j> f<k> ...`, preceded by the artifact header.
void write_corpus(std::ostream& out, const Dataset& data, std::string_view config_echo = {});

/// Exact probabilities implied by a spec.
class PopulationStats {
 public:
  explicit PopulationStats(SyntheticSpec spec);

  const SyntheticSpec& spec() const noexcept { return spec_; }
  std::size_t n_features() const noexcept { return spec_.n_features(); }
  ClassPrior prior() const noexcept { return prior_; }

  double p(FeatureId j) const { return p_[j]; }
  double p_given(FeatureId j, Label cls) const;
  double p_joint(FeatureId j, FeatureId r) const;
  double p_joint_given(FeatureId j, FeatureId r, Label cls) const;
  /// nullopt where P(j) = 0.
  std::optional<double> imbalance(FeatureId j) const;
  double dependence(FeatureId j, FeatureId r, Label cls) const;

  /// RDE with exact weights P(r|j) - P(r) and known I(r).
  RdeModel rde(FeatureId r) const;
  RdeModel semiperfect(Polarity polarity) const;
  ReferenceStatistics reference_statistics(FeatureId r) const;

  /// Probability of observing exactly the feature set x.
  double example_probability(const SparseExample& x) const;

 private:
  SyntheticSpec spec_;
  ClassPrior prior_;
  std::vector<double> p_pos_;  // P(j | y)
  std::vector<double> p_neg_;
  std::vector<double> p_;
};

}  // namespace rde
