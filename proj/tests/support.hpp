#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "rde/auc.hpp"
#include "rde/corpus.hpp"
#include "rde/random.hpp"

namespace rde::test {

inline Dataset make_dataset(std::size_t n_features, const std::vector<std::vector<FeatureId>>& rows,
                            std::vector<Label> labels = {}) {
  Dataset d;
  d.n_features = n_features;
  for (const auto& ids : rows) d.examples.push_back(SparseExample::from_ids(ids));
  if (labels.empty()) labels.assign(rows.size(), Label::unlabeled);
  d.labels = std::move(labels);
  return d;
}

// Every binary vector over n features, as sparse examples.
inline std::vector<SparseExample> enumerate_support(std::size_t n) {
  std::vector<SparseExample> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<FeatureId> ids;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask >> j & 1) ids.push_back(static_cast<FeatureId>(j));
    }
    out.push_back(SparseExample::from_ids(std::move(ids)));
  }
  return out;
}

// O(n^2) pairwise AUC with half credit for ties.
inline double pairwise_auc(const std::vector<double>& scores, const std::vector<Label>& labels) {
  std::int64_t twice = 0, pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != Label::pos) continue;
    for (std::size_t k = 0; k < scores.size(); ++k) {
      if (labels[k] != Label::neg) continue;
      ++pairs;
      if (scores[i] > scores[k]) twice += 2;
      else if (scores[i] == scores[k]) twice += 1;
    }
  }
  return static_cast<double>(twice) / (2.0 * static_cast<double>(pairs));
}

inline Dataset random_labeled(Rng& rng, std::size_t n, std::size_t n_features, double density) {
  Dataset d;
  d.n_features = n_features;
  for (std::size_t i = 0; i < n; ++i) {
    // Both classes are present whenever n >= 2.
    const bool pos = i != 1 && (i % 2 == 0 || rng.bernoulli(0.3));
    std::vector<FeatureId> ids;
    for (std::size_t j = 0; j < n_features; ++j) {
      const double q = density * (pos ? 1.0 + 0.5 * static_cast<double>(j % 3) : 1.0);
      if (rng.bernoulli(std::min(q, 0.95))) ids.push_back(static_cast<FeatureId>(j));
    }
    d.examples.push_back(SparseExample::from_ids(std::move(ids)));
    d.labels.push_back(pos ? Label::pos : Label::neg);
  }
  return d;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("rde_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace rde::test

#include <cmath>

#include "rde/synthetic.hpp"

namespace rde::test {

// Exact population quantities of a mixture spec, computed directly from its
// parameters by summation over components.
class MixtureOracle {
 public:
  explicit MixtureOracle(const SyntheticSpec& spec) : spec_(spec) {}

  double class_prob(Label cls) const { return cls == Label::pos ? spec_.p_pos : 1.0 - spec_.p_pos; }
  double alpha() const { return spec_.p_pos / (1.0 - spec_.p_pos); }

  double cond(FeatureId j, Label cls) const { return cond2(j, j, cls); }
  double cond2(FeatureId j, FeatureId r, Label cls) const {
    const auto& comps = cls == Label::pos ? spec_.pos : spec_.neg;
    double total = 0.0, weight = 0.0;
    for (const auto& c : comps) {
      total += c.weight * (j == r ? c.q[j] : c.q[j] * c.q[r]);
      weight += c.weight;
    }
    return total / weight;
  }
  double p(FeatureId j) const { return p2(j, j); }
  double p2(FeatureId j, FeatureId r) const {
    return class_prob(Label::pos) * cond2(j, r, Label::pos) + class_prob(Label::neg) * cond2(j, r, Label::neg);
  }
  double imbalance(FeatureId j) const {
    return (class_prob(Label::pos) * cond(j, Label::pos) - alpha() * class_prob(Label::neg) * cond(j, Label::neg)) /
           p(j);
  }

  double example_prob(const SparseExample& x) const {
    double total = 0.0;
    for (Label cls : {Label::pos, Label::neg}) {
      const auto& comps = cls == Label::pos ? spec_.pos : spec_.neg;
      double weight = 0.0;
      for (const auto& c : comps) weight += c.weight;
      for (const auto& c : comps) {
        double prod = class_prob(cls) * c.weight / weight;
        for (std::size_t j = 0; j < c.q.size(); ++j) {
          prod *= x.contains(static_cast<FeatureId>(j)) ? c.q[j] : 1.0 - c.q[j];
        }
        total += prod;
      }
    }
    return total;
  }

  // Expected gap between the normalized reference and semi-perfect scores,
  // by enumeration of every example. Feature r itself is left out.
  double distance(FeatureId r) const {
    const auto n = spec_.n_features();
    const double p_r = p(r), i_r = imbalance(r), a = alpha(), p_y = class_prob(Label::pos);
    double total = 0.0;
    for (const auto& x : enumerate_support(n)) {
      double f_r = 0.0, f_y = 0.0;
      for (auto j : x.ids()) {
        if (j == r || p(j) <= 0.0) continue;
        f_r += p2(j, r) / p(j) - p_r;
        f_y += p_y * cond(j, Label::pos) / p(j) - p_y;
      }
      total += example_prob(x) * std::abs(f_r / (p_r * i_r) - (1 + a) * f_y / a);
    }
    return total;
  }

 private:
  const SyntheticSpec& spec_;
};

}  // namespace rde::test
