#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rde/corpus.hpp"
#include "rde/ensemble.hpp"

namespace rde {

enum class Method { surde, serde, perfrde, nb };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

struct ExperimentConfig {
  std::size_t n_labeled = 500;
  std::size_t n_test = 1000;
  std::size_t n_unlabeled = 0;  // 0 = everything not used for labeled/test
  std::vector<Method> methods{Method::surde, Method::serde, Method::perfrde, Method::nb};
  std::size_t resamples = 5;
  std::uint64_t seed = 1;
  SelectionConfig selection;
  std::size_t threads = 1;
};

struct MethodResult {
  Method method = Method::surde;
  std::vector<double> aucs;  // one per resample
  double mean = 0.0;
  double stddev = 0.0;       // population standard deviation
};

struct ExperimentReport {
  std::size_t resamples = 0;
  std::vector<MethodResult> methods;

  const MethodResult* find(Method method) const;
};

struct Split {
  std::vector<std::size_t> labeled;
  std::vector<std::size_t> test;
  std::vector<std::size_t> unlabeled;
};

/// Disjoint labeled/test/unlabeled index sets for one resample, drawn
/// without replacement with seed + resample. Labeled and test rows come from
/// examples with known labels. Throws InvalidArgument when the sizes exceed
/// the corpus.
Split make_split(const Dataset& corpus, const ExperimentConfig& cfg, std::size_t resample);

/// Trains each method on every resample and reports test AUC. PerfRDE is the
/// semi-perfect RDE over the whole corpus and requires full labels.
ExperimentReport run_experiment(const Dataset& corpus, const ExperimentConfig& cfg);

/// Human-readable table: method, mean, std, per-resample AUCs.
void write_report_table(std::ostream& out, const ExperimentReport& report);
/// CSV `method,resample,auc` rows followed by `method,mean,std` summary rows.
void write_report_csv(std::ostream& out, const ExperimentReport& report, std::string_view config_echo = {});

}  // namespace rde
