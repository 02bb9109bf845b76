#include "rde/bounds.hpp"

#include <cmath>
#include <ostream>

#include "rde/error.hpp"
#include "rde/text_io.hpp"

namespace rde {

double distance(const RdeModel& rde, const RdeModel& perfect, std::span<const SparseExample> examples,
                const ClassPrior& prior, std::span<const double> weights) {
  if (perfect.reference().kind != Reference::Kind::gold_pos) {
    throw InvalidArgument("distance: second model must be the positive semi-perfect RDE");
  }
  const auto i_r = rde.ref_imbalance();
  if (!i_r || *i_r == 0.0) throw InvalidArgument("distance: I(r) must be known and nonzero");
  if (!weights.empty() && weights.size() != examples.size()) {
    throw InvalidArgument("distance: weight count does not match example count");
  }
  if (examples.empty()) throw InvalidArgument("distance: no examples");

  const double rde_scale = 1.0 / (rde.ref_prob() * *i_r);
  const double perfect_scale = (1.0 + prior.alpha) / prior.alpha;
  const auto skip = rde.reference().is_gold() ? std::optional<FeatureId>() : rde.reference().id;
  auto score = [&](const RdeModel& model, const SparseExample& x) {
    double s = 0.0;
    for (auto j : x.ids()) {
      if (j != skip && !model.is_pruned(j)) s += model.weight(j);
    }
    return s;
  };
  double sum = 0.0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const double gap = std::abs(score(rde, examples[i]) * rde_scale - score(perfect, examples[i]) * perfect_scale);
    sum += weights.empty() ? gap : weights[i] * gap;
  }
  return weights.empty() ? sum / static_cast<double>(examples.size()) : sum;
}

DecompositionSides decomposition_sides(const Joint2x2x2& joint) {
  double p_pos = 0.0;
  for (int j = 0; j < 2; ++j)
    for (int r = 0; r < 2; ++r) p_pos += joint[j][r][1];
  double p_neg = 0.0;
  for (int j = 0; j < 2; ++j)
    for (int r = 0; r < 2; ++r) p_neg += joint[j][r][0];
  if (std::abs(p_pos + p_neg - 1.0) > 1e-9) throw InvalidArgument("decomposition_sides: joint does not sum to 1");
  if (p_pos <= 0.0 || p_neg <= 0.0) throw UndefinedError("decomposition_sides: a class has zero probability");
  const double alpha = p_pos / p_neg;

  const double p_j_pos = joint[1][0][1] + joint[1][1][1];
  const double p_j_neg = joint[1][0][0] + joint[1][1][0];
  const double p_r_pos = joint[0][1][1] + joint[1][1][1];
  const double p_r_neg = joint[0][1][0] + joint[1][1][0];
  const double p_j = p_j_pos + p_j_neg;
  const double p_r = p_r_pos + p_r_neg;
  if (p_j <= 0.0 || p_r <= 0.0) throw UndefinedError("decomposition_sides: P(j) or P(r) is zero");
  const double p_jr = joint[1][1][0] + joint[1][1][1];

  const double i_j = imbalance_coefficient(p_j_pos, p_j_neg, alpha);
  const double i_r = imbalance_coefficient(p_r_pos, p_r_neg, alpha);
  const double d_pos = dependence_coefficient(joint[1][1][1] / p_pos, p_j_pos / p_pos, p_r_pos / p_pos);
  const double d_neg = dependence_coefficient(joint[1][1][0] / p_neg, p_j_neg / p_neg, p_r_neg / p_neg);

  DecompositionSides sides;
  sides.lhs = p_jr / (p_j * p_r) - 1.0 - i_r * i_j / alpha;
  sides.rhs = (alpha + i_j) * (alpha + i_r) / (alpha * (1.0 + alpha)) * d_pos +
              (1.0 - i_j) * (1.0 - i_r) / (1.0 + alpha) * d_neg;
  return sides;
}

ReferenceStatistics reference_statistics(const CountTable& unlabeled, const ImbalanceVector& imbalance,
                                         const DependenceCoefficients& dependence) {
  const auto r = dependence.reference;
  const auto n = unlabeled.n_features();
  if (imbalance.values.size() != n || dependence.d_pos.size() != n) {
    throw InvalidArgument("reference_statistics: labeled and unlabeled feature spaces differ");
  }
  if (unlabeled.n_examples() == 0) throw InvalidArgument("reference_statistics: empty unlabeled table");
  ReferenceStatistics stats;
  stats.reference = r;
  stats.prior = imbalance.prior;
  stats.i_r = imbalance[r];
  stats.p_r = unlabeled.p(r);
  const auto row = unlabeled.pair_row(r);
  const double total = static_cast<double>(unlabeled.n_examples());
  stats.p_j.resize(n);
  stats.p_jr.resize(n);
  for (FeatureId j = 0; j < n; ++j) {
    stats.p_j[j] = static_cast<double>(unlabeled.marginal(j)) / total;
    stats.p_jr[j] = static_cast<double>(row[j]) / total;
  }
  stats.i_j = imbalance.values;
  stats.d_pos = dependence.d_pos;
  stats.d_neg = dependence.d_neg;
  return stats;
}

ReferenceStatistics reference_statistics(const CountTable& unlabeled, const CountTable& labeled, FeatureId r) {
  return reference_statistics(unlabeled, imbalance(labeled), dependence(labeled, r));
}

namespace {

double require_nonzero_ir(const ReferenceStatistics& stats, const char* what) {
  if (!stats.i_r || *stats.i_r == 0.0) {
    throw InvalidArgument(std::string(what) + ": I(r) must be known and nonzero");
  }
  return *stats.i_r;
}

}  // namespace

DependenceBounds dependence_bound(const ReferenceStatistics& stats) {
  const double i_r = require_nonzero_ir(stats, "dependence_bound");
  const double alpha = stats.prior.alpha;
  DependenceBounds out;
  for (std::size_t j = 0; j < stats.p_j.size(); ++j) {
    const double p_j = stats.p_j[j];
    if (p_j == 0.0) continue;
    const double d_pos = std::abs(stats.d_pos[j]);
    const double d_neg = std::abs(stats.d_neg[j]);
    out.loose += p_j * std::max((alpha + i_r) / alpha * d_pos, (1.0 - i_r) * d_neg);
    if (!stats.i_j[j]) {
      ++out.excluded;
      continue;
    }
    const double i_j = *stats.i_j[j];
    out.tight += p_j * ((alpha + i_j) * (alpha + i_r) / (alpha * (1.0 + alpha)) * d_pos +
                        (1.0 - i_j) * (1.0 - i_r) / (1.0 + alpha) * d_neg);
  }
  out.tight /= std::abs(i_r);
  out.loose /= std::abs(i_r);
  return out;
}

CooccurrenceBound cooccurrence_bound(const ReferenceStatistics& stats) {
  const double i_r = require_nonzero_ir(stats, "cooccurrence_bound");
  const double alpha = stats.prior.alpha;
  if (stats.p_r <= 0.0) throw InvalidArgument("cooccurrence_bound: P(r) is zero");
  CooccurrenceBound out;
  out.sign_condition = true;
  double signed_sum = 0.0;
  double abs_sum = 0.0;
  for (std::size_t j = 0; j < stats.p_j.size(); ++j) {
    const double d_pos = stats.d_pos[j];
    const double d_neg = stats.d_neg[j];
    if (d_pos * d_neg < 0.0) out.sign_condition = false;
    const double p_j = stats.p_j[j];
    if (p_j == 0.0) continue;
    out.p_sum += p_j;
    out.first_term += p_j * std::abs(stats.p_jr[j] / (p_j * stats.p_r) - 1.0);
    if (!stats.i_j[j]) {
      ++out.excluded;
      continue;
    }
    const double i_j = *stats.i_j[j];
    const bool nonneg = d_pos > 0.0 || (d_pos == 0.0 && d_neg >= 0.0);
    signed_sum += nonneg ? p_j * i_j : -p_j * i_j;
    abs_sum += p_j * std::abs(i_j);
  }
  out.first_term /= std::abs(i_r);
  const double sign = i_r > 0.0 ? 1.0 : -1.0;
  out.m = -sign * signed_sum / alpha;
  out.m_upper = abs_sum / alpha;
  out.m_lower = -out.m_upper;
  return out;
}

std::vector<std::optional<double>> cooccurrence_deviations(const CountTable& unlabeled, FeatureId r) {
  const auto n_r = unlabeled.marginal(r);
  if (n_r == 0) throw InvalidArgument("reference " + std::to_string(r) + " never occurs");
  const auto row = unlabeled.pair_row(r);
  const double total = static_cast<double>(unlabeled.n_examples());
  std::vector<std::optional<double>> out(unlabeled.n_features());
  for (FeatureId j = 0; j < out.size(); ++j) {
    const auto n_j = unlabeled.marginal(j);
    if (n_j == 0) continue;
    out[j] = static_cast<double>(row[j]) * total / (static_cast<double>(n_j) * static_cast<double>(n_r)) - 1.0;
  }
  return out;
}

double ranking_score(const CountTable& unlabeled, FeatureId r, std::optional<double> i_r) {
  if (!i_r || *i_r == 0.0 || unlabeled.marginal(r) == 0) return kWorstRank;
  const double total = static_cast<double>(unlabeled.n_examples());
  const auto deviations = cooccurrence_deviations(unlabeled, r);
  double sum = 0.0;
  for (FeatureId j = 0; j < deviations.size(); ++j) {
    if (!deviations[j]) continue;
    sum += static_cast<double>(unlabeled.marginal(j)) / total * std::abs(*deviations[j]);
  }
  return sum / std::abs(*i_r);
}

BoundReport make_bound_report(const CountTable& unlabeled, const CountTable& labeled, FeatureId r,
                              const RdeModel& perfect, std::span<const SparseExample> eval) {
  BoundReport report;
  report.reference = r;
  auto stats = reference_statistics(unlabeled, labeled, r);
  report.i_r = stats.i_r;
  if (!stats.i_r || *stats.i_r == 0.0 || unlabeled.marginal(r) == 0) return report;
  report.dependence = dependence_bound(stats);
  report.cooccurrence = cooccurrence_bound(stats);
  auto model = build_rde(unlabeled, r);
  model.set_ref_imbalance(stats.i_r);
  const FeatureId self[] = {r};
  model.set_pruned(self);
  report.dist = distance(model, perfect, eval, stats.prior);
  return report;
}

std::string feature_name(FeatureId id, const Vocabulary* vocab) {
  if (vocab != nullptr && id < vocab->size()) return io::csv_field(vocab->token(id));
  return "f" + std::to_string(id);
}

void write_bound_reports(std::ostream& out, std::span<const BoundReport> rows, const Vocabulary* vocab) {
  auto opt = [](std::optional<double> v) { return v ? io::format_double(*v) : std::string(); };
  out << "ref_token,i_r,dist,bound_tight,bound_loose,t3_first,m,sign_ok\n";
  for (const auto& row : rows) {
    out << feature_name(row.reference, vocab) << ',' << opt(row.i_r) << ',' << opt(row.dist) << ',';
    if (row.dependence) {
      out << io::format_double(row.dependence->tight) << ',' << io::format_double(row.dependence->loose) << ',';
    } else {
      out << ",,";
    }
    if (row.cooccurrence) {
      out << io::format_double(row.cooccurrence->first_term) << ',' << io::format_double(row.cooccurrence->m) << ','
          << (row.cooccurrence->sign_condition ? 1 : 0);
    } else {
      out << ",,";
    }
    out << '\n';
  }
}

}  // namespace rde
