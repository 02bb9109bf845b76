#include "rde/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "rde/error.hpp"
#include "rde/text_io.hpp"

namespace rde {

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::unigram: return "unigram";
    case FeatureKind::bigram: return "bigram";
    case FeatureKind::both: return "both";
  }
  return "unigram";
}

FeatureKind parse_feature_kind(std::string_view text) {
  if (text == "unigram") return FeatureKind::unigram;
  if (text == "bigram") return FeatureKind::bigram;
  if (text == "both") return FeatureKind::both;
  throw InvalidArgument("unknown feature kind '" + std::string(text) + "'");
}

std::string_view to_string(Label label) {
  switch (label) {
    case Label::pos: return "pos";
    case Label::neg: return "neg";
    case Label::unlabeled: return "?";
  }
  return "?";
}

std::vector<std::string> tokenize(std::string_view text, FeatureKind kind) {
  std::vector<std::string> unigrams;
  for (auto word : io::split_whitespace(text)) {
    std::string lowered(word);
    // ASCII-only folding leaves multi-byte UTF-8 sequences untouched.
    for (auto& c : lowered) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    unigrams.push_back(std::move(lowered));
  }
  if (kind == FeatureKind::unigram) return unigrams;

  std::vector<std::string> out;
  if (kind == FeatureKind::both) out = unigrams;
  for (std::size_t i = 0; i + 1 < unigrams.size(); ++i) {
    out.push_back(unigrams[i] + "_" + unigrams[i + 1]);
  }
  return out;
}

Vocabulary::Vocabulary(std::vector<Entry> entries, FeatureKind kind, std::int64_t min_count)
    : entries_(std::move(entries)), kind_(kind), min_count_(min_count) {
  index_.reserve(entries_.size());
  for (std::size_t id = 0; id < entries_.size(); ++id) {
    auto [it, inserted] = index_.emplace(entries_[id].token, static_cast<FeatureId>(id));
    if (!inserted) throw InvalidArgument("duplicate vocabulary token '" + entries_[id].token + "'");
  }
}

std::optional<FeatureId> Vocabulary::lookup(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocabulary(std::span<const std::vector<std::string>> docs, FeatureKind kind,
                            std::int64_t min_count) {
  if (min_count < 1) throw InvalidArgument("min_count must be >= 1");
  std::unordered_map<std::string, std::int64_t> df;
  std::vector<std::string_view> seen;
  for (const auto& doc : docs) {
    seen.assign(doc.begin(), doc.end());
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (auto token : seen) ++df[std::string(token)];
  }

  std::vector<Vocabulary::Entry> entries;
  for (auto& [token, count] : df) {
    if (count >= min_count) entries.push_back({token, count});
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.doc_count != b.doc_count) return a.doc_count > b.doc_count;
    return a.token < b.token;
  });
  return Vocabulary(std::move(entries), kind, min_count);
}

void write_vocabulary(std::ostream& out, const Vocabulary& vocab, std::string_view config_echo) {
  std::string echo_line = "kind=" + std::string(to_string(vocab.kind())) +
                          " min_count=" + std::to_string(vocab.min_count());
  if (!config_echo.empty()) {
    echo_line += ' ';
    echo_line += config_echo;
  }
  io::write_header(out, "vocab", echo_line);
  FeatureId id = 0;
  for (const auto& entry : vocab.entries()) {
    out << entry.token << '\t' << id++ << '\t' << entry.doc_count << '\n';
  }
}

Vocabulary read_vocabulary(std::istream& in, const std::string& source) {
  auto header = io::read_header(in, source);
  if (header.kind != "vocab") throw ParseError(source, 1, "expected a vocab file, got '" + header.kind + "'");
  auto kind = FeatureKind::unigram;
  std::int64_t min_count = 1;
  try {
    if (auto it = header.config.find("kind"); it != header.config.end()) kind = parse_feature_kind(it->second);
    if (auto it = header.config.find("min_count"); it != header.config.end()) min_count = io::parse_int(it->second);
  } catch (const Error& e) {
    throw ParseError(source, 2, e.what());
  }

  std::vector<Vocabulary::Entry> entries;
  std::string line;
  std::size_t line_no = 2;
  while (io::next_line(in, line, line_no)) {
    if (line.empty()) continue;
    auto fields = io::split(line, '\t');
    if (fields.size() != 3) throw ParseError(source, line_no, "expected token\\tid\\tdoc_count");
    std::int64_t id = 0;
    std::int64_t count = 0;
    try {
      id = io::parse_int(fields[1]);
      count = io::parse_int(fields[2]);
    } catch (const Error& e) {
      throw ParseError(source, line_no, e.what());
    }
    if (id != static_cast<std::int64_t>(entries.size())) {
      throw ParseError(source, line_no, "ids must be contiguous and sorted");
    }
    entries.push_back({std::string(fields[0]), count});
  }
  try {
    return Vocabulary(std::move(entries), kind, min_count);
  } catch (const InvalidArgument& e) {
    throw ParseError(source, line_no, e.what());
  }
}

SparseExample SparseExample::from_ids(std::vector<FeatureId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  SparseExample out;
  out.ids_ = std::move(ids);
  return out;
}

bool SparseExample::contains(FeatureId id) const noexcept {
  return std::binary_search(ids_.begin(), ids_.end(), id);
}

SparseExample vectorize(std::span<const std::string> tokens, const Vocabulary& vocab) {
  std::vector<FeatureId> ids;
  ids.reserve(tokens.size());
  for (const auto& token : tokens) {
    if (auto id = vocab.lookup(token)) ids.push_back(*id);
  }
  return SparseExample::from_ids(std::move(ids));
}

bool Dataset::fully_labeled() const noexcept {
  return std::none_of(labels.begin(), labels.end(), [](Label l) { return l == Label::unlabeled; });
}

std::size_t Dataset::count(Label label) const noexcept {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.n_features = n_features;
  out.provenance = provenance;
  out.examples.reserve(indices.size());
  out.labels.reserve(indices.size());
  for (auto i : indices) {
    out.examples.push_back(examples.at(i));
    out.labels.push_back(labels.at(i));
  }
  return out;
}

void Dataset::validate() const {
  if (examples.size() != labels.size()) {
    throw InvalidArgument("dataset has " + std::to_string(examples.size()) + " examples but " +
                          std::to_string(labels.size()) + " labels");
  }
  for (const auto& x : examples) {
    if (!x.empty() && x.ids().back() >= n_features) {
      throw InvalidArgument("feature id " + std::to_string(x.ids().back()) + " outside vocabulary of size " +
                            std::to_string(n_features));
    }
  }
}

std::vector<Document> read_corpus(std::istream& in, const std::string& source) {
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (io::next_line(in, line, line_no)) {
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(source, line_no, "missing tab between label and text");
    std::string_view label(line.data(), tab);
    Document doc;
    if (label == "pos") {
      doc.label = Label::pos;
    } else if (label == "neg") {
      doc.label = Label::neg;
    } else if (label == "?") {
      doc.label = Label::unlabeled;
    } else {
      throw ParseError(source, line_no, "unknown label '" + std::string(label) + "'");
    }
    doc.text = line.substr(tab + 1);
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus " + path.string());
  return read_corpus(in, path.string());
}

Dataset load_dataset(std::istream& in, const Vocabulary& vocab, const std::string& source) {
  Dataset data;
  data.n_features = vocab.size();
  data.provenance = source;
  for (auto& doc : read_corpus(in, source)) {
    auto tokens = tokenize(doc.text, vocab.kind());
    data.examples.push_back(vectorize(tokens, vocab));
    data.labels.push_back(doc.label);
  }
  return data;
}

Dataset load_dataset(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus " + path.string());
  return load_dataset(in, vocab, path.string());
}

}  // namespace rde
