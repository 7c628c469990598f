#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gg {

enum class Tag { think_open, think_close, answer_open, answer_close };

inline constexpr std::array<Tag, 4> kAllFormatTags = {Tag::think_open, Tag::think_close,
                                                      Tag::answer_open, Tag::answer_close};

std::string_view tag_literal(Tag t);
/// Key used in serialized tag-count maps ("think-open", ...).
std::string_view tag_key(Tag t);

struct Span {
  std::size_t begin = 0;  // byte offsets into the answer block, half-open
  std::size_t end = 0;

  bool operator==(const Span&) const = default;
};

struct Statement {
  std::string text;            // sentence with citation markers removed
  std::vector<int> citations;  // as written, including out-of-range indices
  Span span;

  bool operator==(const Statement&) const = default;
};

struct TagCounts {
  std::array<int, 4> counts{};

  int operator[](Tag t) const { return counts[static_cast<std::size_t>(t)]; }
  int& operator[](Tag t) { return counts[static_cast<std::size_t>(t)]; }
  bool operator==(const TagCounts&) const = default;
};

struct ParsedResponse {
  std::string raw;
  std::optional<std::string> think;
  std::string answer;
  bool has_answer_block = false;
  TagCounts tag_counts;
  bool format_ok = false;
  std::vector<Statement> statements;
};

/// Total: never throws on any input.
ParsedResponse parse_response(std::string_view raw);

std::vector<Statement> segment_statements(std::string_view answer);

/// Number of non-overlapping occurrences of `needle` in `haystack`.
int count_occurrences(std::string_view haystack, std::string_view needle);

/// The answer with every well-formed citation marker removed.
std::string strip_citations(std::string_view answer);

}  // namespace gg
