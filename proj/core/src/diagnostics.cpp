#include "rde/diagnostics.hpp"

#include <algorithm>
#include <ostream>

#include "rde/auc.hpp"
#include "rde/bounds.hpp"
#include "rde/error.hpp"
#include "rde/parallel.hpp"
#include "rde/text_io.hpp"

namespace rde {

std::vector<DiagnosticsRow> diagnostics(std::span<const FeatureId> candidates, const DiagnosticsInputs& inputs,
                                        std::size_t threads) {
  if (!inputs.eval.fully_labeled()) throw InvalidArgument("diagnostics: evaluation set must be fully labeled");
  const auto imb = imbalance(inputs.labeled);
  std::vector<DiagnosticsRow> rows(candidates.size());
  parallel_for(candidates.size(), threads, [&](std::size_t c) {
    const auto r = candidates[c];
    auto& row = rows[c];
    row.reference = r;
    row.i_r = imb[r];
    if (inputs.unlabeled.marginal(r) == 0) return;

    auto model = build_rde(inputs.unlabeled, r);
    model.set_ref_imbalance(row.i_r);
    const FeatureId self[] = {r};
    model.set_pruned(self);
    const double orientation = row.i_r && *row.i_r < 0.0 ? -1.0 : 1.0;
    std::vector<double> scores;
    scores.reserve(inputs.eval.size());
    for (const auto& x : inputs.eval.examples) scores.push_back(orientation * model.score(x));
    row.auc = roc_auc(scores, inputs.eval.labels).auc;

    if (!row.i_r || *row.i_r == 0.0) return;
    const auto stats = reference_statistics(inputs.unlabeled, imb, dependence(inputs.labeled, r));
    const auto t3 = cooccurrence_bound(stats);
    row.t3_first = t3.first_term;
    row.m = t3.m;
    row.sign_ok = t3.sign_condition;
    row.dist = distance(model, inputs.perfect, inputs.eval.examples, imb.prior);
  });
  std::stable_sort(rows.begin(), rows.end(), [](const DiagnosticsRow& a, const DiagnosticsRow& b) {
    if (a.auc != b.auc) return a.auc > b.auc;
    return a.reference < b.reference;
  });
  return rows;
}

void write_diagnostics(std::ostream& out, std::span<const DiagnosticsRow> rows, const Vocabulary* vocab,
                       std::string_view config_echo) {
  auto opt = [](std::optional<double> v) { return v ? io::format_double(*v) : std::string(); };
  io::write_header(out, "diagnostics", config_echo);
  out << "ref_token,i_r,auc,dist,t3_first_term,m,sign_ok\n";
  for (const auto& row : rows) {
    out << feature_name(row.reference, vocab) << ',' << opt(row.i_r) << ',' << io::format_double(row.auc) << ','
        << opt(row.dist) << ',' << opt(row.t3_first) << ',' << opt(row.m) << ','
        << (row.sign_ok ? (*row.sign_ok ? "1" : "0") : "") << '\n';
  }
}

}  // namespace rde
