#include "rde/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "rde/error.hpp"
#include "rde/random.hpp"
#include "rde/text_io.hpp"

namespace rde {

namespace {

void validate_components(const std::vector<MixtureComponent>& comps, std::size_t n, const char* cls) {
  if (comps.empty()) throw InvalidArgument(std::string("synthetic spec: no ") + cls + " components");
  for (const auto& c : comps) {
    if (!(c.weight > 0.0)) throw InvalidArgument("synthetic spec: component weights must be positive");
    if (c.q.size() != n) throw InvalidArgument("synthetic spec: components disagree on feature count");
    for (double q : c.q) {
      if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("synthetic spec: probability outside [0,1]");
    }
  }
}

double total_weight(const std::vector<MixtureComponent>& comps) {
  double w = 0.0;
  for (const auto& c : comps) w += c.weight;
  return w;
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

void SyntheticSpec::validate() const {
  if (!(p_pos > 0.0 && p_pos < 1.0)) throw InvalidArgument("synthetic spec: p_pos must lie in (0,1)");
  const auto n = n_features();
  validate_components(pos, n, "positive");
  validate_components(neg, n, "negative");
}

SyntheticSpec SyntheticSpec::independent(double p_pos, std::vector<double> q_pos, std::vector<double> q_neg,
                                         std::uint64_t seed) {
  SyntheticSpec spec;
  spec.p_pos = p_pos;
  spec.pos.push_back({1.0, std::move(q_pos)});
  spec.neg.push_back({1.0, std::move(q_neg)});
  spec.seed = seed;
  spec.validate();
  return spec;
}

SyntheticSpec mix_specs(const SyntheticSpec& a, const SyntheticSpec& b, double w) {
  if (!(w > 0.0 && w < 1.0)) throw InvalidArgument("mix_specs: weight must lie in (0,1)");
  if (a.n_features() != b.n_features()) throw InvalidArgument("mix_specs: feature counts differ");
  SyntheticSpec out;
  out.p_pos = a.p_pos;
  out.seed = a.seed;
  auto combine = [w](const std::vector<MixtureComponent>& x, const std::vector<MixtureComponent>& y) {
    std::vector<MixtureComponent> merged;
    const double wx = total_weight(x);
    const double wy = total_weight(y);
    for (const auto& c : x) merged.push_back({w * c.weight / wx, c.q});
    for (const auto& c : y) merged.push_back({(1.0 - w) * c.weight / wy, c.q});
    return merged;
  };
  out.pos = combine(a.pos, b.pos);
  out.neg = combine(a.neg, b.neg);
  out.validate();
  return out;
}

SyntheticSpec random_independent_spec(std::size_t n_features, std::uint64_t seed, double q_max) {
  Rng rng(seed);
  std::vector<double> q_pos(n_features);
  std::vector<double> q_neg(n_features);
  for (auto& q : q_pos) q = rng.uniform(0.0, q_max);
  for (auto& q : q_neg) q = rng.uniform(0.0, q_max);
  const double p_pos = rng.uniform(0.1, 0.9);
  return SyntheticSpec::independent(p_pos, std::move(q_pos), std::move(q_neg), seed);
}

SyntheticSpec zipf_mixture_spec(const ZipfMixtureParams& params, std::uint64_t seed) {
  if (params.components < 1) throw InvalidArgument("zipf_mixture_spec: need at least one component");
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const auto n = params.n_features;
  std::vector<double> base_logit(n);
  std::vector<double> shift(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double b = std::clamp(params.base_scale * std::pow(static_cast<double>(j + 1), -params.base_exponent),
                                1e-9, 1.0 - 1e-9);
    base_logit[j] = std::log(b / (1.0 - b));
    shift[j] = params.class_signal * rng.normal();
  }
  SyntheticSpec spec;
  spec.p_pos = params.p_pos;
  spec.seed = seed;
  for (double sign : {1.0, -1.0}) {
    auto& comps = sign > 0 ? spec.pos : spec.neg;
    for (std::size_t k = 0; k < params.components; ++k) {
      MixtureComponent c;
      c.weight = 1.0 / static_cast<double>(params.components);
      c.q.resize(n);
      for (std::size_t j = 0; j < n; ++j) {
        c.q[j] = logistic(base_logit[j] + sign * shift[j] / 2.0 + params.component_noise * rng.normal());
      }
      comps.push_back(std::move(c));
    }
  }
  spec.validate();
  return spec;
}

Dataset synth_generate(const SyntheticSpec& spec, std::size_t n) {
  spec.validate();
  Rng rng(spec.seed);
  Dataset data;
  data.n_features = spec.n_features();
  data.provenance = "synthetic:seed=" + std::to_string(spec.seed);
  data.examples.reserve(n);
  data.labels.reserve(n);
  const double w_pos = total_weight(spec.pos);
  const double w_neg = total_weight(spec.neg);
  std::vector<FeatureId> ids;
  for (std::size_t i = 0; i < n; ++i) {
    const bool pos = rng.bernoulli(spec.p_pos);
    const auto& comps = pos ? spec.pos : spec.neg;
    double pick = rng.uniform() * (pos ? w_pos : w_neg);
    std::size_t k = 0;
    while (k + 1 < comps.size() && pick >= comps[k].weight) {
      pick -= comps[k].weight;
      ++k;
    }
    const auto& q = comps[k].q;
    ids.clear();
    for (FeatureId j = 0; j < q.size(); ++j) {
      if (rng.uniform() < q[j]) ids.push_back(j);
    }
    data.examples.push_back(SparseExample::from_ids(ids));
    data.labels.push_back(pos ? Label::pos : Label::neg);
  }
  return data;
}

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (auto field : io::split(text, ',')) out.push_back(io::parse_double(field));
  return out;
}

template <typename T>
void read_key(const std::map<std::string, std::string>& s, const std::string& key, T& dst) {
  auto it = s.find(key);
  if (it == s.end()) return;
  if constexpr (std::is_floating_point_v<T>) {
    dst = io::parse_double(it->second);
  } else {
    dst = static_cast<T>(io::parse_int(it->second));
  }
}

}  // namespace

SyntheticSpec parse_spec(const std::map<std::string, std::string>& settings) {
  try {
    double p_pos = 0.5;
    std::uint64_t seed = 0;
    read_key(settings, "p_pos", p_pos);
    read_key(settings, "seed", seed);
    auto preset = settings.find("preset");
    if (preset != settings.end()) {
      if (preset->second != "zipf_mixture") throw InvalidArgument("unknown preset '" + preset->second + "'");
      ZipfMixtureParams params;
      read_key(settings, "p_pos", params.p_pos);
      read_key(settings, "n_features", params.n_features);
      read_key(settings, "base_scale", params.base_scale);
      read_key(settings, "base_exponent", params.base_exponent);
      read_key(settings, "class_signal", params.class_signal);
      read_key(settings, "component_noise", params.component_noise);
      read_key(settings, "components", params.components);
      return zipf_mixture_spec(params, seed);
    }
    SyntheticSpec spec;
    spec.p_pos = p_pos;
    spec.seed = seed;
    for (const char* cls : {"pos", "neg"}) {
      auto& comps = std::string(cls) == "pos" ? spec.pos : spec.neg;
      for (std::size_t k = 0;; ++k) {
        const std::string prefix = std::string(cls) + "." + std::to_string(k) + ".";
        auto q = settings.find(prefix + "q");
        if (q == settings.end()) break;
        MixtureComponent c;
        read_key(settings, prefix + "weight", c.weight);
        c.q = parse_list(q->second);
        comps.push_back(std::move(c));
      }
    }
    spec.validate();
    return spec;
  } catch (const InvalidArgument&) {
    throw;
  } catch (const Error& e) {
    throw InvalidArgument(std::string("synthetic spec: ") + e.what());
  }
}

void write_corpus(std::ostream& out, const Dataset& data, std::string_view config_echo) {
  io::write_header(out, "corpus", config_echo);
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << to_string(data.labels[i]) << '\t';
    bool first = true;
    for (auto j : data.examples[i].ids()) {
      if (!first) out << ' ';
      out << 'f' << j;
      first = false;
    }
    out << '\n';
  }
}

PopulationStats::PopulationStats(SyntheticSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  prior_ = ClassPrior::from_probability(spec_.p_pos);
  const auto n = spec_.n_features();
  auto marginal = [n](const std::vector<MixtureComponent>& comps) {
    std::vector<double> out(n, 0.0);
    const double w = total_weight(comps);
    for (const auto& c : comps) {
      for (std::size_t j = 0; j < n; ++j) out[j] += c.weight / w * c.q[j];
    }
    return out;
  };
  p_pos_ = marginal(spec_.pos);
  p_neg_ = marginal(spec_.neg);
  p_.resize(n);
  for (std::size_t j = 0; j < n; ++j) p_[j] = spec_.p_pos * p_pos_[j] + (1.0 - spec_.p_pos) * p_neg_[j];
}

double PopulationStats::p_given(FeatureId j, Label cls) const { return cls == Label::pos ? p_pos_[j] : p_neg_[j]; }

double PopulationStats::p_joint_given(FeatureId j, FeatureId r, Label cls) const {
  if (j == r) return p_given(j, cls);
  const auto& comps = cls == Label::pos ? spec_.pos : spec_.neg;
  const double w = total_weight(comps);
  double sum = 0.0;
  for (const auto& c : comps) sum += c.weight / w * c.q[j] * c.q[r];
  return sum;
}

double PopulationStats::p_joint(FeatureId j, FeatureId r) const {
  return spec_.p_pos * p_joint_given(j, r, Label::pos) + (1.0 - spec_.p_pos) * p_joint_given(j, r, Label::neg);
}

std::optional<double> PopulationStats::imbalance(FeatureId j) const {
  if (p_[j] == 0.0) return std::nullopt;
  return imbalance_coefficient(spec_.p_pos * p_pos_[j], (1.0 - spec_.p_pos) * p_neg_[j], prior_.alpha);
}

double PopulationStats::dependence(FeatureId j, FeatureId r, Label cls) const {
  return dependence_coefficient(p_joint_given(j, r, cls), p_given(j, cls), p_given(r, cls));
}

RdeModel PopulationStats::rde(FeatureId r) const {
  if (p_[r] == 0.0) throw InvalidArgument("population rde: P(r) = 0");
  std::vector<double> weights(n_features(), 0.0);
  for (FeatureId j = 0; j < weights.size(); ++j) {
    if (p_[j] > 0.0) weights[j] = p_joint(j, r) / p_[j] - p_[r];
  }
  return RdeModel(Reference::feature(r), std::move(weights), p_[r], imbalance(r));
}

RdeModel PopulationStats::semiperfect(Polarity polarity) const {
  const double p_cls = polarity == Polarity::pos ? spec_.p_pos : 1.0 - spec_.p_pos;
  const auto& cond = polarity == Polarity::pos ? p_pos_ : p_neg_;
  std::vector<double> weights(n_features(), 0.0);
  for (FeatureId j = 0; j < weights.size(); ++j) {
    if (p_[j] > 0.0) weights[j] = cond[j] * p_cls / p_[j] - p_cls;
  }
  return RdeModel(Reference::gold(polarity), std::move(weights), p_cls,
                  polarity == Polarity::pos ? 1.0 : -prior_.alpha);
}

ReferenceStatistics PopulationStats::reference_statistics(FeatureId r) const {
  ReferenceStatistics stats;
  const auto n = n_features();
  stats.reference = r;
  stats.prior = prior_;
  stats.i_r = imbalance(r);
  stats.p_r = p_[r];
  stats.p_j = p_;
  stats.p_jr.resize(n);
  stats.i_j.resize(n);
  stats.d_pos.resize(n);
  stats.d_neg.resize(n);
  for (FeatureId j = 0; j < n; ++j) {
    stats.p_jr[j] = p_joint(j, r);
    stats.i_j[j] = imbalance(j);
    stats.d_pos[j] = dependence(j, r, Label::pos);
    stats.d_neg[j] = dependence(j, r, Label::neg);
  }
  return stats;
}

double PopulationStats::example_probability(const SparseExample& x) const {
  auto class_term = [&](const std::vector<MixtureComponent>& comps) {
    const double w = total_weight(comps);
    double sum = 0.0;
    for (const auto& c : comps) {
      double prod = c.weight / w;
      auto ids = x.ids();
      std::size_t next = 0;
      for (FeatureId j = 0; j < c.q.size(); ++j) {
        const bool present = next < ids.size() && ids[next] == j;
        if (present) ++next;
        prod *= present ? c.q[j] : 1.0 - c.q[j];
      }
      sum += prod;
    }
    return sum;
  };
  return spec_.p_pos * class_term(spec_.pos) + (1.0 - spec_.p_pos) * class_term(spec_.neg);
}

}  // namespace rde
