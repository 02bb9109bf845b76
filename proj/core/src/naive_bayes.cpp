#include "rde/naive_bayes.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "rde/error.hpp"
#include "rde/text_io.hpp"

namespace rde {

double NaiveBayesModel::score(const SparseExample& x) const {
  double z = bias;
  for (auto j : x.ids()) {
    if (j < present_weights.size()) z += present_weights[j];
  }
  return z;
}

NaiveBayesModel naive_bayes(const Dataset& train) {
  train.validate();
  if (!train.fully_labeled()) throw InvalidArgument("naive_bayes: training set has unlabeled examples");
  const auto m_pos = static_cast<double>(train.count(Label::pos));
  const auto m_neg = static_cast<double>(train.count(Label::neg));
  if (m_pos == 0.0 || m_neg == 0.0) throw InvalidArgument("naive_bayes: both classes must be present");

  std::vector<double> n_pos(train.n_features, 0.0);
  std::vector<double> n_neg(train.n_features, 0.0);
  for (std::size_t i = 0; i < train.size(); ++i) {
    auto& counts = train.labels[i] == Label::pos ? n_pos : n_neg;
    for (auto j : train.examples[i].ids()) counts[j] += 1.0;
  }

  NaiveBayesModel model;
  model.bias = std::log(m_pos) - std::log(m_neg);
  model.present_weights.resize(train.n_features);
  for (std::size_t j = 0; j < train.n_features; ++j) {
    const double theta_pos = (n_pos[j] + 1.0) / (m_pos + 2.0);
    const double theta_neg = (n_neg[j] + 1.0) / (m_neg + 2.0);
    const double absent = std::log1p(-theta_pos) - std::log1p(-theta_neg);
    model.bias += absent;
    model.present_weights[j] = std::log(theta_pos) - std::log(theta_neg) - absent;
  }
  return model;
}

void write_naive_bayes(std::ostream& out, const NaiveBayesModel& model, std::string_view config_echo) {
  io::write_header(out, "naive-bayes", config_echo);
  out << "bias " << io::format_double(model.bias) << '\n';
  out << "weights " << model.present_weights.size();
  for (double w : model.present_weights) out << ' ' << io::format_double(w);
  out << '\n';
}

NaiveBayesModel read_naive_bayes(std::istream& in, const std::string& source) {
  auto header = io::read_header(in, source);
  if (header.kind != "naive-bayes") throw ParseError(source, 1, "expected a naive-bayes file");
  NaiveBayesModel model;
  std::string line;
  std::size_t line_no = 2;
  try {
    if (!io::next_line(in, line, line_no)) throw ParseError(source, line_no + 1, "unexpected end of file");
    auto bias = io::split_whitespace(line);
    if (bias.size() != 2 || bias[0] != "bias") throw ParseError(source, line_no, "expected 'bias'");
    model.bias = io::parse_double(bias[1]);
    if (!io::next_line(in, line, line_no)) throw ParseError(source, line_no + 1, "unexpected end of file");
    auto fields = io::split_whitespace(line);
    if (fields.size() < 2 || fields[0] != "weights") throw ParseError(source, line_no, "expected 'weights'");
    auto n = static_cast<std::size_t>(io::parse_int(fields[1]));
    if (fields.size() != n + 2) throw ParseError(source, line_no, "weight count mismatch");
    for (std::size_t j = 0; j < n; ++j) model.present_weights.push_back(io::parse_double(fields[j + 2]));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(source, line_no, e.what());
  }
  return model;
}

}  // namespace rde
