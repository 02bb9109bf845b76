#include "rde/stats.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "rde/error.hpp"
#include "rde/parallel.hpp"
#include "rde/text_io.hpp"

namespace rde {

CountTable::CountTable(std::size_t n_features, std::vector<FeatureId> references, bool with_classes)
    : with_classes_(with_classes), marginal_(n_features, 0), references_(std::move(references)) {
  std::sort(references_.begin(), references_.end());
  references_.erase(std::unique(references_.begin(), references_.end()), references_.end());
  if (!references_.empty() && references_.back() >= n_features) {
    throw InvalidArgument("reference id " + std::to_string(references_.back()) + " outside vocabulary of size " +
                          std::to_string(n_features));
  }
  pair_.assign(references_.size() * n_features, 0);
  if (with_classes_) {
    marginal_pos_.assign(n_features, 0);
    pair_pos_.assign(references_.size() * n_features, 0);
  }
}

std::optional<std::size_t> CountTable::find_row(FeatureId r) const noexcept {
  auto it = std::lower_bound(references_.begin(), references_.end(), r);
  if (it == references_.end() || *it != r) return std::nullopt;
  return static_cast<std::size_t>(it - references_.begin());
}

bool CountTable::has_reference(FeatureId r) const noexcept { return find_row(r).has_value(); }

std::size_t CountTable::row_index(FeatureId r) const {
  auto row = find_row(r);
  if (!row) throw InvalidArgument("feature " + std::to_string(r) + " has no pair counts in this table");
  return *row;
}

std::span<const std::int64_t> CountTable::pair_row(FeatureId r) const {
  auto row = row_index(r);
  return std::span<const std::int64_t>(pair_).subspan(row * n_features(), n_features());
}

std::int64_t CountTable::pair(FeatureId a, FeatureId b) const {
  if (auto row = find_row(a)) return pair_[*row * n_features() + b];
  return pair_[row_index(b) * n_features() + a];
}

void CountTable::require_classes() const {
  if (!with_classes_) throw InvalidArgument("count table has no class counts (dataset was not fully labeled)");
}

std::int64_t CountTable::class_examples(Label cls) const {
  require_classes();
  return cls == Label::pos ? n_pos_ : n_examples_ - n_pos_;
}

std::int64_t CountTable::class_marginal(FeatureId j, Label cls) const {
  require_classes();
  auto pos = marginal_pos_.at(j);
  return cls == Label::pos ? pos : marginal_[j] - pos;
}

std::int64_t CountTable::class_pair(FeatureId a, FeatureId b, Label cls) const {
  require_classes();
  std::size_t index = 0;
  if (auto row = find_row(a)) {
    index = *row * n_features() + b;
  } else {
    index = row_index(b) * n_features() + a;
  }
  auto pos = pair_pos_[index];
  return cls == Label::pos ? pos : pair_[index] - pos;
}

double CountTable::p(FeatureId a) const {
  if (n_examples_ == 0) throw UndefinedError("probability over an empty table");
  return static_cast<double>(marginal(a)) / static_cast<double>(n_examples_);
}

double CountTable::p_joint(FeatureId a, FeatureId b) const {
  if (n_examples_ == 0) throw UndefinedError("probability over an empty table");
  return static_cast<double>(pair(a, b)) / static_cast<double>(n_examples_);
}

double CountTable::p_given(FeatureId a, FeatureId b) const {
  auto denom = marginal(b);
  if (denom == 0) throw UndefinedError("P(" + std::to_string(a) + "|" + std::to_string(b) + ") with N(b) = 0");
  return static_cast<double>(pair(a, b)) / static_cast<double>(denom);
}

void CountTable::add(const SparseExample& x, Label label) {
  const bool pos = with_classes_ && label == Label::pos;
  ++n_examples_;
  if (pos) ++n_pos_;
  const auto ids = x.ids();
  const std::size_t n = n_features();
  for (auto j : ids) {
    ++marginal_[j];
    if (pos) ++marginal_pos_[j];
  }
  if (references_.empty()) return;
  // Both sequences are sorted: walk them together to find the reference rows
  // this example touches.
  auto ref = references_.begin();
  for (auto j : ids) {
    ref = std::lower_bound(ref, references_.end(), j);
    if (ref == references_.end()) break;
    if (*ref != j) continue;
    std::size_t base = static_cast<std::size_t>(ref - references_.begin()) * n;
    for (auto k : ids) ++pair_[base + k];
    if (pos) {
      for (auto k : ids) ++pair_pos_[base + k];
    }
  }
}

CountTable& CountTable::operator+=(const CountTable& other) {
  if (other.n_features() != n_features() || other.references_ != references_ ||
      other.with_classes_ != with_classes_) {
    throw InvalidArgument("cannot merge count tables of different shape");
  }
  n_examples_ += other.n_examples_;
  n_pos_ += other.n_pos_;
  auto add_into = [](std::vector<std::int64_t>& dst, const std::vector<std::int64_t>& src) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  };
  add_into(marginal_, other.marginal_);
  add_into(marginal_pos_, other.marginal_pos_);
  add_into(pair_, other.pair_);
  add_into(pair_pos_, other.pair_pos_);
  return *this;
}

CountTable count_corpus(const Dataset& data, std::span<const FeatureId> reference_ids, std::size_t threads) {
  if (data.empty()) throw InvalidArgument("cannot count an empty dataset");
  data.validate();
  std::vector<FeatureId> refs(reference_ids.begin(), reference_ids.end());
  const bool labeled = data.fully_labeled();

  const std::size_t shards = std::max<std::size_t>(1, std::min(threads, data.size()));
  std::vector<CountTable> partial(shards, CountTable(data.n_features, refs, labeled));
  parallel_for(shards, shards, [&](std::size_t s) {
    std::size_t begin = data.size() * s / shards;
    std::size_t end = data.size() * (s + 1) / shards;
    for (std::size_t i = begin; i < end; ++i) partial[s].add(data.examples[i], data.labels[i]);
  });
  for (std::size_t s = 1; s < shards; ++s) partial[0] += partial[s];
  return std::move(partial[0]);
}

namespace {

void write_dense(std::ostream& out, std::string_view tag, std::span<const std::int64_t> values) {
  out << tag;
  for (auto v : values) out << ' ' << v;
  out << '\n';
}

void write_sparse_row(std::ostream& out, std::string_view tag, FeatureId r, std::span<const std::int64_t> row) {
  auto nnz = std::count_if(row.begin(), row.end(), [](auto v) { return v != 0; });
  out << tag << ' ' << r << ' ' << nnz;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j] != 0) out << ' ' << j << ':' << row[j];
  }
  out << '\n';
}

}  // namespace

void write_counts(std::ostream& out, const CountTable& table, std::string_view config_echo) {
  io::write_header(out, "counts", config_echo);
  out << "n_examples " << table.n_examples() << '\n';
  out << "n_features " << table.n_features() << '\n';
  out << "classes " << (table.has_class_counts() ? 1 : 0);
  if (table.has_class_counts()) out << ' ' << table.class_examples(Label::pos);
  out << '\n';
  write_dense(out, "marginal", table.marginals());
  if (table.has_class_counts()) {
    std::vector<std::int64_t> pos(table.n_features());
    for (FeatureId j = 0; j < pos.size(); ++j) pos[j] = table.class_marginal(j, Label::pos);
    write_dense(out, "marginal_pos", pos);
  }
  out << "references " << table.references().size();
  for (auto r : table.references()) out << ' ' << r;
  out << '\n';
  for (auto r : table.references()) {
    write_sparse_row(out, "row", r, table.pair_row(r));
    if (table.has_class_counts()) {
      std::vector<std::int64_t> pos(table.n_features());
      for (FeatureId j = 0; j < pos.size(); ++j) pos[j] = table.class_pair(r, j, Label::pos);
      write_sparse_row(out, "row_pos", r, pos);
    }
  }
}

// Declared here so read_counts can fill private state without widening the
// public interface.
struct CountTableReader {
  static CountTable read(std::istream& in, const std::string& source);
};

CountTable CountTableReader::read(std::istream& in, const std::string& source) {
  auto header = io::read_header(in, source);
  if (header.kind != "counts") throw ParseError(source, 1, "expected a counts file, got '" + header.kind + "'");
  std::string line;
  std::size_t line_no = 2;
  auto expect = [&](std::string_view tag) {
    if (!io::next_line(in, line, line_no)) throw ParseError(source, line_no + 1, "unexpected end of file");
    auto fields = io::split_whitespace(line);
    if (fields.empty() || fields[0] != tag) {
      throw ParseError(source, line_no, "expected '" + std::string(tag) + "'");
    }
    return std::vector<std::string>(fields.begin() + 1, fields.end());
  };
  auto to_int = [&](std::string_view s) {
    try {
      return io::parse_int(s);
    } catch (const Error& e) {
      throw ParseError(source, line_no, e.what());
    }
  };

  auto n_examples = to_int(expect("n_examples").at(0));
  auto n_features = static_cast<std::size_t>(to_int(expect("n_features").at(0)));
  auto classes = expect("classes");
  bool with_classes = !classes.empty() && classes[0] == "1";
  std::int64_t n_pos = with_classes ? to_int(classes.at(1)) : 0;

  auto parse_dense = [&](std::string_view tag) {
    auto fields = expect(tag);
    if (fields.size() != n_features) throw ParseError(source, line_no, "wrong number of values");
    std::vector<std::int64_t> out;
    out.reserve(n_features);
    for (const auto& f : fields) out.push_back(to_int(f));
    return out;
  };
  auto marginal = parse_dense("marginal");
  std::vector<std::int64_t> marginal_pos;
  if (with_classes) marginal_pos = parse_dense("marginal_pos");

  auto ref_fields = expect("references");
  std::vector<FeatureId> refs;
  for (std::size_t i = 1; i < ref_fields.size(); ++i) refs.push_back(static_cast<FeatureId>(to_int(ref_fields[i])));

  CountTable table(n_features, refs, with_classes);
  table.n_examples_ = n_examples;
  table.n_pos_ = n_pos;
  table.marginal_ = std::move(marginal);
  table.marginal_pos_ = std::move(marginal_pos);

  auto parse_row = [&](std::string_view tag, std::vector<std::int64_t>& dst) {
    auto fields = expect(tag);
    auto r = static_cast<FeatureId>(to_int(fields.at(0)));
    auto base = table.row_index(r) * n_features;
    for (std::size_t i = 2; i < fields.size(); ++i) {
      auto colon = fields[i].find(':');
      if (colon == std::string::npos) throw ParseError(source, line_no, "expected id:count");
      auto j = static_cast<std::size_t>(to_int(std::string_view(fields[i]).substr(0, colon)));
      if (j >= n_features) throw ParseError(source, line_no, "feature id out of range");
      dst[base + j] = to_int(std::string_view(fields[i]).substr(colon + 1));
    }
  };
  for (std::size_t i = 0; i < table.references_.size(); ++i) {
    parse_row("row", table.pair_);
    if (with_classes) parse_row("row_pos", table.pair_pos_);
  }
  return table;
}

CountTable read_counts(std::istream& in, const std::string& source) { return CountTableReader::read(in, source); }

ClassPrior ClassPrior::from_counts(std::int64_t n_pos, std::int64_t n_neg) {
  if (n_pos <= 0 || n_neg <= 0) throw InvalidArgument("class prior undefined: one class has no examples");
  ClassPrior prior;
  prior.p_pos = static_cast<double>(n_pos) / static_cast<double>(n_pos + n_neg);
  prior.alpha = static_cast<double>(n_pos) / static_cast<double>(n_neg);
  return prior;
}

ClassPrior ClassPrior::from_probability(double p_pos) {
  if (!(p_pos > 0.0 && p_pos < 1.0)) throw InvalidArgument("class prior must lie in (0, 1)");
  return ClassPrior{p_pos, p_pos / (1.0 - p_pos)};
}

double imbalance_coefficient(double p_joint_pos, double p_joint_neg, double alpha) {
  double total = p_joint_pos + p_joint_neg;
  if (total <= 0.0) throw UndefinedError("imbalance of a feature with zero probability");
  double value = (p_joint_pos - alpha * p_joint_neg) / total;
  return std::clamp(value, -alpha, 1.0);
}

double dependence_coefficient(double p_jr_given, double p_j_given, double p_r_given) {
  if (p_j_given == 0.0 || p_r_given == 0.0) return 0.0;
  return p_jr_given / (p_j_given * p_r_given) - 1.0;
}

std::size_t ImbalanceVector::undefined_count() const noexcept {
  return static_cast<std::size_t>(std::count(values.begin(), values.end(), std::nullopt));
}

ImbalanceVector imbalance(const CountTable& labeled) {
  ImbalanceVector out;
  out.prior = ClassPrior::from_counts(labeled.class_examples(Label::pos), labeled.class_examples(Label::neg));
  out.values.resize(labeled.n_features());
  for (FeatureId j = 0; j < labeled.n_features(); ++j) {
    if (labeled.marginal(j) == 0) continue;
    out.values[j] = imbalance_coefficient(static_cast<double>(labeled.class_marginal(j, Label::pos)),
                                          static_cast<double>(labeled.class_marginal(j, Label::neg)),
                                          out.prior.alpha);
  }
  return out;
}

DependenceCoefficients dependence(const CountTable& labeled, FeatureId r) {
  if (!labeled.has_class_counts()) throw InvalidArgument("dependence coefficients need class counts");
  if (labeled.marginal(r) == 0) throw InvalidArgument("reference " + std::to_string(r) + " absent from corpus");
  DependenceCoefficients out;
  out.reference = r;
  const auto n = labeled.n_features();
  out.d_pos.assign(n, 0.0);
  out.d_neg.assign(n, 0.0);
  for (Label cls : {Label::pos, Label::neg}) {
    auto& dst = cls == Label::pos ? out.d_pos : out.d_neg;
    const double m = static_cast<double>(labeled.class_examples(cls));
    if (m == 0.0) continue;
    const double p_r = static_cast<double>(labeled.class_marginal(r, cls)) / m;
    for (FeatureId j = 0; j < n; ++j) {
      const double p_j = static_cast<double>(labeled.class_marginal(j, cls)) / m;
      const double p_jr = static_cast<double>(labeled.class_pair(r, j, cls)) / m;
      dst[j] = dependence_coefficient(p_jr, p_j, p_r);
    }
  }
  return out;
}

}  // namespace rde
