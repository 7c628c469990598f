#pragma once

// Tag/citation mutation fuzzer over well-formed responses, plus the
// round-trip property used for the well-formed survivors.

#include <cctype>
#include <random>
#include <string>
#include <vector>

#include "gg/response_parser.hpp"
#include "gg/text.hpp"

namespace gg::oracle {

inline std::string squash(std::string_view s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  return out;
}

inline std::string seed_response(std::mt19937_64& rng) {
  static const std::vector<std::string> words = {"Paris", "is", "large", "e.g.", "Dr.", "3.5", "U.S.", "é", "…", "goals"};
  static const std::vector<std::string> ends = {".", "!", "?", ""};
  auto pick = [&](const auto& v) { return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)]; };
  std::string answer;
  int sentences = std::uniform_int_distribution<int>(1, 4)(rng);
  for (int s = 0; s < sentences; ++s) {
    int n = std::uniform_int_distribution<int>(1, 6)(rng);
    for (int k = 0; k < n; ++k) answer += pick(words) + " ";
    int cites = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int k = 0; k < cites; ++k) answer += "[" + std::to_string(std::uniform_int_distribution<int>(1, 12)(rng)) + "]";
    answer += pick(ends) + " ";
  }
  return "<think>Looking at the documents.</think>\n<answer>" + answer + "</answer>";
}

/// Applies 0-3 random tag/citation edits.
inline std::string mutate(std::string s, std::mt19937_64& rng) {
  static const std::vector<std::string> tokens = {"<think>", "</think>", "<answer>", "</answer>", "[1]", "[99]",
                                                  "[0]", "[", "]", "[12", "[-1]", "[99999999999999999999]", "<",
                                                  "</", "\n", " ", ".", "<answer"};
  int edits = std::uniform_int_distribution<int>(0, 3)(rng);
  for (int e = 0; e < edits; ++e) {
    std::size_t pos = s.empty() ? 0 : std::uniform_int_distribution<std::size_t>(0, s.size())(rng);
    switch (rng() % 4) {
      case 0: s.insert(pos, tokens[rng() % tokens.size()]); break;
      case 1:
        if (!s.empty()) s.erase(std::min(pos, s.size() - 1), 1 + rng() % 8);
        break;
      case 2: {
        const std::string& tag = tokens[rng() % 4];
        auto at = s.find(tag);
        if (at != std::string::npos) s.erase(at, tag.size());
        break;
      }
      default: s.insert(pos, 1, static_cast<char>(rng() & 0xFF)); break;
    }
  }
  return s;
}

/// For a well-formed parse: re-wrapping the blocks reparses identically and
/// the statements rejoin (whitespace aside) to the marker-free answer.
inline bool round_trips(const ParsedResponse& p) {
  if (!p.format_ok || !p.think) return false;
  ParsedResponse again = parse_response("<think>" + *p.think + "</think><answer>" + p.answer + "</answer>");
  if (!again.format_ok || again.answer != p.answer || again.think != p.think || again.statements != p.statements)
    return false;
  std::string joined;
  for (const Statement& st : p.statements) {
    if (text::is_blank(st.text)) return false;
    joined += st.text;
  }
  return squash(joined) == squash(strip_citations(p.answer));
}

}  // namespace gg::oracle
