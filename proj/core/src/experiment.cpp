#include "rde/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "rde/auc.hpp"
#include "rde/error.hpp"
#include "rde/naive_bayes.hpp"
#include "rde/parallel.hpp"
#include "rde/random.hpp"
#include "rde/rde_model.hpp"
#include "rde/text_io.hpp"

namespace rde {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::surde: return "SuRDE";
    case Method::serde: return "SeRDE";
    case Method::perfrde: return "PerfRDE";
    case Method::nb: return "NB";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  std::string lowered(text);
  for (auto& c : lowered) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lowered == "surde") return Method::surde;
  if (lowered == "serde") return Method::serde;
  if (lowered == "perfrde") return Method::perfrde;
  if (lowered == "nb") return Method::nb;
  throw InvalidArgument("unknown method '" + std::string(text) + "'");
}

const MethodResult* ExperimentReport::find(Method method) const {
  for (const auto& m : methods) {
    if (m.method == method) return &m;
  }
  return nullptr;
}

Split make_split(const Dataset& corpus, const ExperimentConfig& cfg, std::size_t resample) {
  std::vector<std::size_t> known;
  std::vector<std::size_t> unknown;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    (corpus.labels[i] == Label::unlabeled ? unknown : known).push_back(i);
  }
  if (cfg.n_labeled + cfg.n_test > known.size()) {
    throw InvalidArgument("experiment: labeled + test (" + std::to_string(cfg.n_labeled + cfg.n_test) +
                          ") exceeds the " + std::to_string(known.size()) + " labeled examples");
  }
  Rng rng(cfg.seed + resample);
  rng.shuffle(std::span<std::size_t>(known));
  Split split;
  split.labeled.assign(known.begin(), known.begin() + static_cast<std::ptrdiff_t>(cfg.n_labeled));
  split.test.assign(known.begin() + static_cast<std::ptrdiff_t>(cfg.n_labeled),
                    known.begin() + static_cast<std::ptrdiff_t>(cfg.n_labeled + cfg.n_test));
  std::vector<std::size_t> rest(known.begin() + static_cast<std::ptrdiff_t>(cfg.n_labeled + cfg.n_test), known.end());
  rest.insert(rest.end(), unknown.begin(), unknown.end());
  std::sort(rest.begin(), rest.end());
  if (cfg.n_unlabeled > 0) {
    if (cfg.n_unlabeled > rest.size()) {
      throw InvalidArgument("experiment: requested " + std::to_string(cfg.n_unlabeled) + " unlabeled examples but only " +
                            std::to_string(rest.size()) + " remain");
    }
    rng.shuffle(std::span<std::size_t>(rest));
    rest.resize(cfg.n_unlabeled);
    std::sort(rest.begin(), rest.end());
  }
  split.unlabeled = std::move(rest);
  return split;
}

namespace {

template <typename Scorer>
double test_auc(const Dataset& test, Scorer&& scorer) {
  std::vector<double> scores;
  scores.reserve(test.size());
  for (const auto& x : test.examples) scores.push_back(scorer(x));
  return roc_auc(scores, test.labels).auc;
}

}  // namespace

ExperimentReport run_experiment(const Dataset& corpus, const ExperimentConfig& cfg) {
  if (cfg.resamples < 1) throw InvalidArgument("experiment: resamples must be >= 1");
  cfg.selection.validate();
  ExperimentReport report;
  report.resamples = cfg.resamples;
  if (cfg.methods.empty()) return report;

  const bool want_perf = std::find(cfg.methods.begin(), cfg.methods.end(), Method::perfrde) != cfg.methods.end();
  RdeModel perfect;
  if (want_perf) {
    if (!corpus.fully_labeled()) throw InvalidArgument("experiment: PerfRDE needs a fully labeled corpus");
    perfect = build_semiperfect(corpus, Polarity::pos);
  }

  // aucs[resample][method]
  std::vector<std::vector<double>> aucs(cfg.resamples, std::vector<double>(cfg.methods.size(), 0.0));
  parallel_for(cfg.resamples, cfg.threads, [&](std::size_t r) {
    const auto split = make_split(corpus, cfg, r);
    const auto labeled = corpus.subset(split.labeled);
    const auto test = corpus.subset(split.test);
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
      switch (cfg.methods[m]) {
        case Method::surde: {
          auto model = build_semiperfect(labeled, Polarity::pos);
          aucs[r][m] = test_auc(test, [&](const SparseExample& x) { return model.score(x); });
          break;
        }
        case Method::serde: {
          auto unlabeled = corpus.subset(split.unlabeled);
          std::fill(unlabeled.labels.begin(), unlabeled.labels.end(), Label::unlabeled);
          auto trained = train_ensemble(labeled, unlabeled, cfg.selection, 1);
          aucs[r][m] = test_auc(test, [&](const SparseExample& x) { return trained.model.predict(x); });
          break;
        }
        case Method::perfrde:
          aucs[r][m] = test_auc(test, [&](const SparseExample& x) { return perfect.score(x); });
          break;
        case Method::nb: {
          auto model = naive_bayes(labeled);
          aucs[r][m] = test_auc(test, [&](const SparseExample& x) { return model.score(x); });
          break;
        }
      }
    }
  });

  for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
    MethodResult result;
    result.method = cfg.methods[m];
    for (std::size_t r = 0; r < cfg.resamples; ++r) result.aucs.push_back(aucs[r][m]);
    const double n = static_cast<double>(result.aucs.size());
    result.mean = std::accumulate(result.aucs.begin(), result.aucs.end(), 0.0) / n;
    double var = 0.0;
    for (double a : result.aucs) var += (a - result.mean) * (a - result.mean);
    result.stddev = std::sqrt(var / n);
    report.methods.push_back(std::move(result));
  }
  return report;
}

void write_report_table(std::ostream& out, const ExperimentReport& report) {
  out << std::left << std::setw(9) << "method" << std::right << std::setw(9) << "mean" << std::setw(9) << "std"
      << "  per-resample AUC\n";
  for (const auto& m : report.methods) {
    out << std::left << std::setw(9) << to_string(m.method) << std::right << std::fixed << std::setprecision(4)
        << std::setw(9) << m.mean << std::setw(9) << m.stddev << ' ';
    for (double a : m.aucs) out << ' ' << a;
    out << '\n';
  }
  out.unsetf(std::ios::fixed);
  out << std::setprecision(6);
}

void write_report_csv(std::ostream& out, const ExperimentReport& report, std::string_view config_echo) {
  io::write_header(out, "experiment", config_echo);
  out << "method,resample,auc\n";
  for (const auto& m : report.methods) {
    for (std::size_t r = 0; r < m.aucs.size(); ++r) {
      out << to_string(m.method) << ',' << r << ',' << io::format_double(m.aucs[r]) << '\n';
    }
  }
  for (const auto& m : report.methods) {
    out << to_string(m.method) << ",mean," << io::format_double(m.mean) << '\n';
    out << to_string(m.method) << ",std," << io::format_double(m.stddev) << '\n';
  }
}

}  // namespace rde
