#include "rde/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "rde/bounds.hpp"
#include "rde/combiner.hpp"
#include "rde/error.hpp"
#include "rde/parallel.hpp"
#include "rde/text_io.hpp"

namespace rde {

void SelectionConfig::validate() const {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (!(t > 0.0)) throw InvalidArgument("t must be > 0");
  if (!(ridge >= 0.0)) throw InvalidArgument("ridge must be >= 0");
}

std::vector<FeatureId> candidate_references(const CountTable& labeled, std::int64_t min_count) {
  std::vector<FeatureId> out;
  for (FeatureId j = 0; j < labeled.n_features(); ++j) {
    if (labeled.marginal(j) > min_count) out.push_back(j);
  }
  return out;
}

Selection select_references(std::span<const FeatureId> candidates, const CountTable& unlabeled,
                            const ImbalanceVector& labeled, const SelectionConfig& cfg) {
  cfg.validate();
  if (candidates.empty()) throw InvalidArgument("select_references: no candidates");
  std::vector<std::pair<double, FeatureId>> ranked;
  ranked.reserve(candidates.size());
  bool any_defined = false;
  for (auto r : candidates) {
    auto i_r = labeled[r];
    if (i_r && *i_r != 0.0) any_defined = true;
    ranked.emplace_back(ranking_score(unlabeled, r, i_r), r);
  }
  if (!any_defined) throw InvalidArgument("select_references: every candidate has undefined or zero I(r)");
  std::sort(ranked.begin(), ranked.end());

  Selection out;
  out.truncated = ranked.size() < cfg.k;
  const auto keep = std::min(cfg.k, ranked.size());
  for (std::size_t i = 0; i < keep; ++i) {
    out.scores.push_back(ranked[i].first);
    out.references.push_back(ranked[i].second);
  }
  return out;
}

RdeModel prune(RdeModel model, const CountTable& unlabeled, double t) {
  if (model.reference().is_gold()) throw InvalidArgument("prune: gold references have no co-occurrence row");
  const auto r = model.reference().id;
  const auto deviations = cooccurrence_deviations(unlabeled, r);
  std::vector<FeatureId> pruned;
  for (FeatureId j = 0; j < deviations.size(); ++j) {
    if (j == r || !deviations[j] || std::abs(*deviations[j]) > t) pruned.push_back(j);
  }
  model.set_pruned(pruned);
  return model;
}

std::vector<double> score_features(std::span<const RdeModel> members, std::span<const Standardization> norms,
                                   const SparseExample& x) {
  if (members.size() != norms.size()) throw InvalidArgument("score_features: normalization size mismatch");
  std::vector<double> out(members.size());
  for (std::size_t m = 0; m < members.size(); ++m) out[m] = norms[m].apply(members[m].score(x));
  return out;
}

double EnsembleModel::predict(const SparseExample& x) const {
  if (combiner_weights.size() != members.size() + 1) throw InvalidArgument("ensemble: combiner size mismatch");
  const auto f = features(x);
  double z = combiner_weights.back();
  for (std::size_t m = 0; m < f.size(); ++m) z += combiner_weights[m] * f[m];
  return z;
}

std::string count_fingerprint(const CountTable& table) {
  std::ostringstream buffer;
  write_counts(buffer, table);
  return io::hex64(io::fnv1a(buffer.str()));
}

EnsembleTraining train_ensemble(const Dataset& labeled, const CountTable& labeled_counts,
                                const CountTable& unlabeled, std::span<const FeatureId> candidates,
                                const SelectionConfig& cfg, std::size_t threads) {
  cfg.validate();
  if (!labeled.fully_labeled()) throw InvalidArgument("train_ensemble: labeled set contains unlabeled examples");
  const auto imb = imbalance(labeled_counts);

  EnsembleTraining out;
  out.selection = select_references(candidates, unlabeled, imb, cfg);
  // Drop references that cannot form an RDE (worst-rank sentinel).
  auto& refs = out.selection.references;
  while (!refs.empty() && std::isinf(out.selection.scores[refs.size() - 1])) {
    refs.pop_back();
    out.selection.scores.pop_back();
  }

  const auto k = refs.size();
  std::vector<RdeModel> members(k);
  parallel_for(k, threads, [&](std::size_t i) {
    auto model = build_rde(unlabeled, refs[i]);
    model.set_ref_imbalance(imb[refs[i]]);
    members[i] = prune(std::move(model), unlabeled, cfg.t);
  });

  FeatureMatrix raw(labeled.size(), k);
  parallel_for(k, threads, [&](std::size_t c) {
    for (std::size_t i = 0; i < labeled.size(); ++i) raw(i, c) = members[c].score(labeled.examples[i]);
  });

  std::vector<Standardization> norms(k);
  const double m = static_cast<double>(labeled.size());
  for (std::size_t c = 0; c < k; ++c) {
    double mean = 0.0;
    for (std::size_t i = 0; i < labeled.size(); ++i) mean += raw(i, c);
    mean /= m;
    double var = 0.0;
    for (std::size_t i = 0; i < labeled.size(); ++i) var += (raw(i, c) - mean) * (raw(i, c) - mean);
    norms[c] = {mean, std::sqrt(var / m)};
    for (std::size_t i = 0; i < labeled.size(); ++i) raw(i, c) = norms[c].apply(raw(i, c));
  }

  auto fit = train_logistic_ridge(raw, labeled.labels, cfg.ridge);
  out.combiner_converged = fit.converged;
  out.model.members = std::move(members);
  out.model.normalization = std::move(norms);
  out.model.combiner_weights = std::move(fit.weights);
  out.model.combiner_weights.push_back(fit.intercept);
  out.model.config = cfg;
  out.model.fingerprint = count_fingerprint(unlabeled);
  return out;
}

EnsembleTraining train_ensemble(const Dataset& labeled, const Dataset& unlabeled, const SelectionConfig& cfg,
                                std::size_t threads) {
  if (labeled.n_features != unlabeled.n_features) throw InvalidArgument("train_ensemble: feature spaces differ");
  const auto labeled_counts = count_corpus(labeled, {}, threads);
  const auto candidates = candidate_references(labeled_counts, cfg.candidate_min_count);
  if (candidates.empty()) throw InvalidArgument("train_ensemble: no feature exceeds candidate_min_count");
  const auto unlabeled_counts = count_corpus(unlabeled, candidates, threads);
  return train_ensemble(labeled, labeled_counts, unlabeled_counts, candidates, cfg, threads);
}

void write_ensemble(std::ostream& out, const EnsembleModel& model, std::string_view config_echo) {
  std::map<std::string, std::string> echo{{"k", std::to_string(model.config.k)},
                                          {"t", io::format_double(model.config.t)},
                                          {"ridge", io::format_double(model.config.ridge)},
                                          {"candidate_min_count", std::to_string(model.config.candidate_min_count)}};
  for (auto field : io::split_whitespace(config_echo)) {
    const auto eq = field.find('=');
    if (eq != std::string_view::npos) echo.emplace(std::string(field.substr(0, eq)), std::string(field.substr(eq + 1)));
  }
  io::write_header(out, "ensemble", io::echo(echo));
  out << "fingerprint " << (model.fingerprint.empty() ? "none" : model.fingerprint) << '\n';
  out << "members " << model.members.size() << '\n';
  for (std::size_t m = 0; m < model.members.size(); ++m) {
    out << "member " << m << '\n';
    write_model_body(out, model.members[m]);
    out << "norm " << io::format_double(model.normalization[m].mean) << ' '
        << io::format_double(model.normalization[m].stddev) << '\n';
  }
  out << "combiner";
  for (double w : model.combiner_weights) out << ' ' << io::format_double(w);
  out << '\n';
}

EnsembleModel read_ensemble(std::istream& in, const std::string& source) {
  auto header = io::read_header(in, source);
  if (header.kind != "ensemble") throw ParseError(source, 1, "expected an ensemble file, got '" + header.kind + "'");
  EnsembleModel model;
  std::size_t line_no = 2;
  std::string line;
  auto expect = [&](std::string_view tag) {
    if (!io::next_line(in, line, line_no)) throw ParseError(source, line_no + 1, "unexpected end of file");
    auto fields = io::split_whitespace(line);
    if (fields.empty() || fields[0] != tag) throw ParseError(source, line_no, "expected '" + std::string(tag) + "'");
    return std::vector<std::string>(fields.begin() + 1, fields.end());
  };
  try {
    const auto& cfg = header.config;
    if (auto it = cfg.find("k"); it != cfg.end()) model.config.k = static_cast<std::size_t>(io::parse_int(it->second));
    if (auto it = cfg.find("t"); it != cfg.end()) model.config.t = io::parse_double(it->second);
    if (auto it = cfg.find("ridge"); it != cfg.end()) model.config.ridge = io::parse_double(it->second);
    if (auto it = cfg.find("candidate_min_count"); it != cfg.end()) {
      model.config.candidate_min_count = io::parse_int(it->second);
    }
    auto fp = expect("fingerprint").at(0);
    model.fingerprint = fp == "none" ? std::string() : fp;
    auto count = static_cast<std::size_t>(io::parse_int(expect("members").at(0)));
    for (std::size_t m = 0; m < count; ++m) {
      expect("member");
      model.members.push_back(read_model_body(in, source, line_no));
      auto norm = expect("norm");
      model.normalization.push_back({io::parse_double(norm.at(0)), io::parse_double(norm.at(1))});
    }
    for (const auto& w : expect("combiner")) model.combiner_weights.push_back(io::parse_double(w));
    if (model.combiner_weights.size() != count + 1) throw ParseError(source, line_no, "combiner size mismatch");
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(source, line_no, e.what());
  }
  return model;
}

}  // namespace rde
