#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "rde/corpus.hpp"
#include "rde/rde_model.hpp"
#include "rde/stats.hpp"

namespace rde {

/// One candidate reference: how well its RDE ranks held-out examples and
/// how far it sits from the semi-perfect RDE.
struct DiagnosticsRow {
  FeatureId reference = 0;
  std::optional<double> i_r;
  double auc = 0.5;                 // AUC of sign(I(r)) * f(x, r) on the evaluation set
  std::optional<double> dist;       // blank when I(r) is undefined or zero
  std::optional<double> t3_first;   // first term of the co-occurrence bound
  std::optional<double> m;
  std::optional<bool> sign_ok;
};

struct DiagnosticsInputs {
  const CountTable& unlabeled;  // pair rows for every candidate
  const CountTable& labeled;    // class counts and pair rows for every candidate
  const Dataset& eval;          // fully labeled held-out examples
  const RdeModel& perfect;      // positive semi-perfect RDE
};

/// Each candidate's RDE excludes the reference's own feature, as ensemble
/// members do. Rows sorted by AUC descending (ties: smaller id first). Candidates that
/// never occur in the unlabeled corpus score 0.5 with blank fields.
std::vector<DiagnosticsRow> diagnostics(std::span<const FeatureId> candidates, const DiagnosticsInputs& inputs,
                                        std::size_t threads = 1);

/// CSV with header `ref_token,i_r,auc,dist,t3_first_term,m,sign_ok`.
void write_diagnostics(std::ostream& out, std::span<const DiagnosticsRow> rows, const Vocabulary* vocab,
                       std::string_view config_echo = {});

}  // namespace rde
