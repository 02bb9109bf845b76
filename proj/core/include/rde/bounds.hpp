#pragma once

#include <array>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rde/corpus.hpp"
#include "rde/rde_model.hpp"
#include "rde/stats.hpp"

namespace rde {

/// Expected absolute gap between the normalized RDE score
/// f(x,r) / (P(r) I(r)) and the normalized semi-perfect score
/// (1 + alpha) f(x,y) / alpha. Examples are weighted uniformly unless
/// `weights` is given (then it must sum to 1 and match the example count).
/// A feature reference is left out of both scores, since it is not a feature
/// of its own classifier.
///
/// `rde.ref_imbalance()` must be set and nonzero; `perfect` must be the
/// positive-polarity semi-perfect model.
double distance(const RdeModel& rde, const RdeModel& perfect, std::span<const SparseExample> examples,
                const ClassPrior& prior, std::span<const double> weights = {});

/// Joint distribution over (j, r, class); index [j][r][cls] with 1 meaning
/// present / positive.
using Joint2x2x2 = std::array<std::array<std::array<double, 2>, 2>, 2>;

struct DecompositionSides {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Both sides of the identity
///   P(j,r)/(P(j)P(r)) - 1 - I(r)I(j)/alpha
///     = (alpha+I(j))(alpha+I(r))/(alpha(1+alpha)) D(j,r|y)
///     + (1-I(j))(1-I(r))/(1+alpha) D(j,r|not y).
/// Throws InvalidArgument unless the joint sums to 1, and UndefinedError if
/// P(j) or P(r) is zero or a class is empty.
DecompositionSides decomposition_sides(const Joint2x2x2& joint);

/// Per-reference inputs for the bounds. Marginal and co-occurrence
/// probabilities normally come from unlabeled counts; alpha, I and D from
/// labeled counts.
struct ReferenceStatistics {
  FeatureId reference = 0;
  ClassPrior prior;
  std::optional<double> i_r;
  double p_r = 0.0;
  std::vector<double> p_j;
  std::vector<double> p_jr;
  std::vector<std::optional<double>> i_j;
  std::vector<double> d_pos;
  std::vector<double> d_neg;
};

/// `unlabeled` needs a pair row for r; `labeled` needs class counts and a
/// pair row for r. Both must cover the same feature space.
ReferenceStatistics reference_statistics(const CountTable& unlabeled, const CountTable& labeled, FeatureId r);
ReferenceStatistics reference_statistics(const CountTable& unlabeled, const ImbalanceVector& imbalance,
                                         const DependenceCoefficients& dependence);

struct DependenceBounds {
  double tight = 0.0;
  double loose = 0.0;
  std::size_t excluded = 0;  // features with P(j) > 0 but undefined I(j)
};

/// Distance bounds in terms of I(r), I(j) and both dependence coefficients.
/// The loose form maximizes the tight one over I(j) in [-alpha, 1].
/// Throws InvalidArgument if I(r) is unknown or zero.
DependenceBounds dependence_bound(const ReferenceStatistics& stats);

struct CooccurrenceBound {
  double first_term = 0.0;
  double m = 0.0;
  double m_lower = 0.0;  // -(1/alpha) sum_j P(j)|I(j)|
  double m_upper = 0.0;
  double p_sum = 0.0;    // sum_j P(j); contains [m_lower, m_upper] when alpha >= 1
  bool sign_condition = false;
  std::size_t excluded = 0;

  /// first_term + m, meaningful only when sign_condition holds.
  std::optional<double> bound() const {
    if (!sign_condition) return std::nullopt;
    return first_term + m;
  }
};

/// Distance bound using unconditional co-occurrence plus the M correction.
/// j joins the nonnegative group when D(j,r|y) > 0, or D(j,r|y) = 0 and
/// D(j,r|not y) >= 0; M = -sign(I(r))/alpha * (sum_nonneg P(j)I(j) -
/// sum_neg P(j)I(j)). Throws InvalidArgument if I(r) is unknown or zero.
CooccurrenceBound cooccurrence_bound(const ReferenceStatistics& stats);

/// P(j,r)/(P(j)P(r)) - 1 for every j; nullopt where N(j) = 0. Needs a pair
/// row for r and N(r) > 0.
std::vector<std::optional<double>> cooccurrence_deviations(const CountTable& unlabeled, FeatureId r);

/// Reference selection criterion: (1/|I(r)|) sum_j P(j) |P(j,r)/(P(j)P(r)) - 1|
/// over unlabeled counts. Unknown or zero I(r) (or N(r) = 0) gives +infinity.
double ranking_score(const CountTable& unlabeled, FeatureId r, std::optional<double> i_r);

inline constexpr double kWorstRank = std::numeric_limits<double>::infinity();

struct BoundReport {
  FeatureId reference = 0;
  std::optional<double> i_r;
  std::optional<double> dist;
  std::optional<DependenceBounds> dependence;
  std::optional<CooccurrenceBound> cooccurrence;
};

/// Assembles the report for one reference. `eval` supplies the examples over
/// which the distance is averaged; `perfect` is the positive semi-perfect
/// RDE. The bounds keep the reference's own term, so they stay upper bounds
/// of the distance, which leaves it out. Fields that need a nonzero I(r) stay empty otherwise.
BoundReport make_bound_report(const CountTable& unlabeled, const CountTable& labeled, FeatureId r,
                              const RdeModel& perfect, std::span<const SparseExample> eval);

/// CSV with header `ref_token,i_r,dist,bound_tight,bound_loose,t3_first,m,sign_ok`.
/// Undefined fields are left blank.
void write_bound_reports(std::ostream& out, std::span<const BoundReport> rows, const Vocabulary* vocab);

/// CSV-safe token for `id`; "f<id>" when there is no vocabulary.
std::string feature_name(FeatureId id, const Vocabulary* vocab);

}  // namespace rde
