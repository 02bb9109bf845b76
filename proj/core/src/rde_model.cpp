#include "rde/rde_model.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "rde/error.hpp"
#include "rde/text_io.hpp"

namespace rde {

RdeModel::RdeModel(Reference reference, std::vector<double> weights, double ref_prob,
                   std::optional<double> ref_imbalance)
    : reference_(reference),
      weights_(std::move(weights)),
      pruned_(weights_.size(), 0),
      ref_prob_(ref_prob),
      ref_imbalance_(ref_imbalance) {}

std::vector<FeatureId> RdeModel::pruned_ids() const {
  std::vector<FeatureId> out;
  for (FeatureId j = 0; j < pruned_.size(); ++j) {
    if (pruned_[j]) out.push_back(j);
  }
  return out;
}

std::size_t RdeModel::pruned_count() const noexcept {
  return static_cast<std::size_t>(std::count(pruned_.begin(), pruned_.end(), std::uint8_t{1}));
}

void RdeModel::set_pruned(std::span<const FeatureId> ids) {
  std::fill(pruned_.begin(), pruned_.end(), std::uint8_t{0});
  for (auto j : ids) pruned_.at(j) = 1;
}

double RdeModel::score(const SparseExample& x) const {
  double sum = 0.0;
  for (auto j : x.ids()) {
    if (j < weights_.size() && !pruned_[j]) sum += weights_[j];
  }
  return sum;
}

std::vector<double> RdeModel::score_all(std::span<const SparseExample> xs) const {
  std::vector<double> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(score(x));
  return out;
}

namespace {

// (co * total - ref * marginal) / (marginal * total) evaluated with an exact
// integer numerator: the sign-flipped numerator of the complementary
// reference converts and divides to the bitwise negation.
double weight_from_counts(std::int64_t co, std::int64_t marginal, std::int64_t ref, std::int64_t total) {
  if (marginal == 0) return 0.0;
  const std::int64_t numerator = co * total - ref * marginal;
  const std::int64_t denominator = marginal * total;
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

}  // namespace

RdeModel build_rde(const CountTable& table, FeatureId r) {
  if (r >= table.n_features()) throw InvalidArgument("reference id out of range");
  const auto n_r = table.marginal(r);
  if (n_r == 0) throw InvalidArgument("reference " + std::to_string(r) + " never occurs (N(r) = 0)");
  const auto row = table.pair_row(r);
  const auto total = table.n_examples();
  std::vector<double> weights(table.n_features());
  for (FeatureId j = 0; j < weights.size(); ++j) {
    weights[j] = weight_from_counts(row[j], table.marginal(j), n_r, total);
  }
  return RdeModel(Reference::feature(r), std::move(weights),
                  static_cast<double>(n_r) / static_cast<double>(total));
}

RdeModel build_semiperfect(const CountTable& labeled, Polarity polarity) {
  if (!labeled.has_class_counts()) throw InvalidArgument("semi-perfect RDE needs a fully labeled dataset");
  const auto prior = ClassPrior::from_counts(labeled.class_examples(Label::pos), labeled.class_examples(Label::neg));
  const auto total = labeled.n_examples();
  const auto m_pos = labeled.class_examples(Label::pos);
  const double sign = polarity == Polarity::pos ? 1.0 : -1.0;
  // P(not y|j) - P(not y) = -(P(y|j) - P(y)); negating keeps the pair exact,
  // down to the sign of zero.
  std::vector<double> weights(labeled.n_features());
  for (FeatureId j = 0; j < weights.size(); ++j) {
    weights[j] = sign * weight_from_counts(labeled.class_marginal(j, Label::pos), labeled.marginal(j), m_pos, total);
  }
  const auto m_cls = polarity == Polarity::pos ? m_pos : labeled.class_examples(Label::neg);
  return RdeModel(Reference::gold(polarity), std::move(weights),
                  static_cast<double>(m_cls) / static_cast<double>(total),
                  polarity == Polarity::pos ? 1.0 : -prior.alpha);
}

RdeModel build_semiperfect(const Dataset& data, Polarity polarity) {
  if (!data.fully_labeled()) throw InvalidArgument("semi-perfect RDE needs a fully labeled dataset");
  return build_semiperfect(count_corpus(data, {}), polarity);
}

void write_model_body(std::ostream& out, const RdeModel& model) {
  out << "reference ";
  switch (model.reference().kind) {
    case Reference::Kind::feature: out << "feature " << model.reference().id; break;
    case Reference::Kind::gold_pos: out << "gold_pos"; break;
    case Reference::Kind::gold_neg: out << "gold_neg"; break;
  }
  out << '\n';
  out << "ref_prob " << io::format_double(model.ref_prob()) << '\n';
  out << "ref_imbalance " << (model.ref_imbalance() ? io::format_double(*model.ref_imbalance()) : "none") << '\n';
  out << "n_features " << model.n_features() << '\n';
  const auto w = model.weights();
  auto nnz = std::count_if(w.begin(), w.end(), [](double v) { return v != 0.0; });
  out << "weights " << nnz;
  for (FeatureId j = 0; j < w.size(); ++j) {
    if (w[j] != 0.0) out << ' ' << j << ':' << io::format_double(w[j]);
  }
  out << '\n';
  auto pruned = model.pruned_ids();
  out << "pruned " << pruned.size();
  for (auto j : pruned) out << ' ' << j;
  out << '\n';
}

RdeModel read_model_body(std::istream& in, const std::string& source, std::size_t& line_no) {
  std::string line;
  auto expect = [&](std::string_view tag) {
    if (!io::next_line(in, line, line_no)) throw ParseError(source, line_no + 1, "unexpected end of file");
    auto fields = io::split_whitespace(line);
    if (fields.empty() || fields[0] != tag) throw ParseError(source, line_no, "expected '" + std::string(tag) + "'");
    return std::vector<std::string>(fields.begin() + 1, fields.end());
  };
  try {
    auto ref_fields = expect("reference");
    Reference reference;
    if (ref_fields.at(0) == "feature") {
      reference = Reference::feature(static_cast<FeatureId>(io::parse_int(ref_fields.at(1))));
    } else if (ref_fields.at(0) == "gold_pos") {
      reference = Reference::gold(Polarity::pos);
    } else if (ref_fields.at(0) == "gold_neg") {
      reference = Reference::gold(Polarity::neg);
    } else {
      throw ParseError(source, line_no, "unknown reference kind");
    }
    double ref_prob = io::parse_double(expect("ref_prob").at(0));
    auto imb = expect("ref_imbalance").at(0);
    std::optional<double> ref_imbalance;
    if (imb != "none") ref_imbalance = io::parse_double(imb);
    auto n = static_cast<std::size_t>(io::parse_int(expect("n_features").at(0)));
    std::vector<double> weights(n, 0.0);
    auto w_fields = expect("weights");
    for (std::size_t i = 1; i < w_fields.size(); ++i) {
      std::string_view f = w_fields[i];
      auto colon = f.find(':');
      if (colon == std::string_view::npos) throw ParseError(source, line_no, "expected id:weight");
      auto j = static_cast<std::size_t>(io::parse_int(f.substr(0, colon)));
      if (j >= n) throw ParseError(source, line_no, "weight id out of range");
      weights[j] = io::parse_double(f.substr(colon + 1));
    }
    auto p_fields = expect("pruned");
    std::vector<FeatureId> pruned;
    for (std::size_t i = 1; i < p_fields.size(); ++i) {
      auto j = io::parse_int(p_fields[i]);
      if (j < 0 || static_cast<std::size_t>(j) >= n) throw ParseError(source, line_no, "pruned id out of range");
      pruned.push_back(static_cast<FeatureId>(j));
    }
    RdeModel model(reference, std::move(weights), ref_prob, ref_imbalance);
    model.set_pruned(pruned);
    return model;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(source, line_no, e.what());
  }
}

void write_model(std::ostream& out, const RdeModel& model, std::string_view config_echo) {
  io::write_header(out, "rde-model", config_echo);
  write_model_body(out, model);
}

RdeModel read_model(std::istream& in, const std::string& source) {
  auto header = io::read_header(in, source);
  if (header.kind != "rde-model") throw ParseError(source, 1, "expected an rde-model file, got '" + header.kind + "'");
  std::size_t line_no = 2;
  return read_model_body(in, source, line_no);
}

}  // namespace rde
