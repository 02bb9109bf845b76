#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rde {

using FeatureId = std::uint32_t;

enum class FeatureKind { unigram, bigram, both };

enum class Label : std::uint8_t { neg, pos, unlabeled };

std::string_view to_string(FeatureKind kind);
FeatureKind parse_feature_kind(std::string_view text);
std::string_view to_string(Label label);

/// Lowercases and splits on whitespace. Bigrams join adjacent unigrams with
/// '_'. Duplicates are kept; `both` emits all unigrams then all bigrams.
std::vector<std::string> tokenize(std::string_view text, FeatureKind kind);

/// Dense token <-> id map. Ids are assigned in descending document
/// frequency, ties broken lexicographically, so id order doubles as a
/// frequency ranking.
class Vocabulary {
 public:
  struct Entry {
    std::string token;
    std::int64_t doc_count = 0;
  };

  Vocabulary() = default;

  /// Entries must already be in id order; throws on duplicate tokens.
  Vocabulary(std::vector<Entry> entries, FeatureKind kind, std::int64_t min_count);

  std::optional<FeatureId> lookup(std::string_view token) const;
  const std::string& token(FeatureId id) const { return entries_.at(id).token; }
  std::int64_t doc_count(FeatureId id) const { return entries_.at(id).doc_count; }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  FeatureKind kind() const noexcept { return kind_; }
  std::int64_t min_count() const noexcept { return min_count_; }
  std::span<const Entry> entries() const noexcept { return entries_; }

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::vector<Entry> entries_;
  std::unordered_map<std::string, FeatureId, StringHash, std::equal_to<>> index_;
  FeatureKind kind_ = FeatureKind::unigram;
  std::int64_t min_count_ = 1;
};

Vocabulary build_vocabulary(std::span<const std::vector<std::string>> docs,
                            FeatureKind kind, std::int64_t min_count);

void write_vocabulary(std::ostream& out, const Vocabulary& vocab, std::string_view config_echo = {});
Vocabulary read_vocabulary(std::istream& in, const std::string& source = "<vocab>");

/// Binary occurrence vector: strictly increasing feature ids.
class SparseExample {
 public:
  SparseExample() = default;

  /// Sorts and deduplicates.
  static SparseExample from_ids(std::vector<FeatureId> ids);

  std::span<const FeatureId> ids() const noexcept { return ids_; }
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  bool contains(FeatureId id) const noexcept;

  friend bool operator==(const SparseExample&, const SparseExample&) = default;

 private:
  std::vector<FeatureId> ids_;
};

SparseExample vectorize(std::span<const std::string> tokens, const Vocabulary& vocab);

struct Dataset {
  std::vector<SparseExample> examples;
  std::vector<Label> labels;
  std::size_t n_features = 0;
  std::string provenance;

  std::size_t size() const noexcept { return examples.size(); }
  bool empty() const noexcept { return examples.empty(); }
  bool fully_labeled() const noexcept;
  std::size_t count(Label label) const noexcept;

  /// Copy of the rows at `indices`, in that order.
  Dataset subset(std::span<const std::size_t> indices) const;

  /// Throws InvalidArgument if examples/labels lengths differ or an id is
  /// outside [0, n_features).
  void validate() const;
};

/// One raw corpus record before vectorization.
struct Document {
  Label label = Label::unlabeled;
  std::string text;
};

/// Parses `<label>\t<text>` lines; label in {pos, neg, ?}. Lines beginning
/// with '#' and empty lines are skipped. Errors name the 1-based line.
std::vector<Document> read_corpus(std::istream& in, const std::string& source = "<corpus>");
std::vector<Document> read_corpus(const std::filesystem::path& path);

Dataset load_dataset(std::istream& in, const Vocabulary& vocab, const std::string& source = "<corpus>");
Dataset load_dataset(const std::filesystem::path& path, const Vocabulary& vocab);

}  // namespace rde
