#pragma once

// Shared helpers for the plain-text artifact formats.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace rde::io {

inline constexpr int kFormatVersion = 1;

/// Shortest round-trip decimal representation.
std::string format_double(double value);
double parse_double(std::string_view text);
std::int64_t parse_int(std::string_view text);

/// Writes `#rde <kind> v1` followed by `#config <echo>`.
void write_header(std::ostream& out, std::string_view kind, std::string_view config_echo);

struct Header {
  std::string kind;
  std::map<std::string, std::string> config;
};

/// Reads the two header lines. Throws ParseError if the magic or version
/// does not match. Config echo tokens without '=' are ignored.
Header read_header(std::istream& in, const std::string& source);

/// Peeks the kind from the first header line without consuming the stream
/// state beyond what a fresh reader expects.
std::string peek_kind(const std::string& path);

std::vector<std::string_view> split(std::string_view text, char sep);
std::vector<std::string_view> split_whitespace(std::string_view text);

/// Parses `key=value` lines; '#' starts a comment line. Later keys win.
std::map<std::string, std::string> parse_key_values(std::istream& in, const std::string& source);

/// Renders a key=value map as a single space-separated line (sorted keys).
std::string echo(const std::map<std::string, std::string>& config);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(std::string_view text);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t value);

/// Reads the next line, stripping a trailing '\r'. Increments `line_no`.
bool next_line(std::istream& in, std::string& line, std::size_t& line_no);

}  // namespace rde::io
