#include "gg/response_parser.hpp"

#include <algorithm>
#include <cctype>
#include <climits>

#include "gg/text.hpp"

namespace gg {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

// Words whose trailing period does not end a sentence.
constexpr std::string_view kAbbreviations[] = {
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "cf", "fig", "approx", "e.g", "i.e", "no",
};

// Closing characters that may trail terminal punctuation.
constexpr std::string_view kClosers[] = {"\"", "'", ")", "\xE2\x80\x9D", "\xE2\x80\x99", "\xC2\xBB"};

struct Marker {
  std::size_t length = 0;  // 0 when no marker starts here
  int index = 0;
};

// "[" digits "]" with k >= 1; large indices saturate (and are invalid).
Marker marker_at(std::string_view s, std::size_t i) {
  if (i >= s.size() || s[i] != '[') return {};
  std::size_t j = i + 1;
  long long value = 0;
  while (j < s.size() && is_digit(s[j])) {
    value = std::min<long long>(value * 10 + (s[j] - '0'), INT_MAX);
    ++j;
  }
  if (j == i + 1 || j >= s.size() || s[j] != ']' || value < 1) return {};
  return {j + 1 - i, static_cast<int>(value)};
}

std::size_t closer_at(std::string_view s, std::size_t i) {
  for (std::string_view c : kClosers)
    if (s.substr(i, c.size()) == c) return c.size();
  return 0;
}

std::string lower_word_before(std::string_view s, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0 && !is_space(s[b - 1]) && s[b - 1] != '(' && s[b - 1] != '"') --b;
  std::string w(s.substr(b, dot - b));
  for (char& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return w;
}

// Single letters separated by dots: "j", "u.s", "e.g".
bool is_initialism(std::string_view w) {
  if (w.empty()) return false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    bool want_letter = (i % 2 == 0);
    if (want_letter ? !is_alpha(w[i]) : w[i] != '.') return false;
  }
  return w.size() % 2 == 1;
}

bool period_guarded(std::string_view s, std::size_t dot) {
  if (dot > 0 && dot + 1 < s.size() && is_digit(s[dot - 1]) && is_digit(s[dot + 1])) return true;
  std::string w = lower_word_before(s, dot);
  if (is_initialism(w)) return true;
  return std::find(std::begin(kAbbreviations), std::end(kAbbreviations), w) !=
         std::end(kAbbreviations);
}

// If a sentence ends at the terminal punctuation at `i`, returns the offset
// just past the punctuation run and any closers; otherwise 0.
std::size_t sentence_end_at(std::string_view s, std::size_t i) {
  if (!is_terminal(s[i])) return 0;
  if (s[i] == '.' && period_guarded(s, i)) return 0;
  std::size_t j = i;
  while (j < s.size() && is_terminal(s[j])) ++j;
  while (j < s.size()) {
    std::size_t n = closer_at(s, j);
    if (n == 0) break;
    j += n;
  }
  if (j == s.size() || is_space(s[j]) || marker_at(s, j).length > 0) return j;
  return 0;
}

void append_stripped(std::string& out, std::vector<int>* citations, std::string_view piece) {
  for (std::size_t k = 0; k < piece.size();) {
    Marker m = marker_at(piece, k);
    if (m.length > 0) {
      while (!out.empty() && is_space(out.back())) out.pop_back();
      if (citations) citations->push_back(m.index);
      k += m.length;
    } else {
      out.push_back(piece[k++]);
    }
  }
}

}  // namespace

std::string_view tag_literal(Tag t) {
  switch (t) {
    case Tag::think_open: return "<think>";
    case Tag::think_close: return "</think>";
    case Tag::answer_open: return "<answer>";
    case Tag::answer_close: return "</answer>";
  }
  return "";
}

std::string_view tag_key(Tag t) {
  switch (t) {
    case Tag::think_open: return "think-open";
    case Tag::think_close: return "think-close";
    case Tag::answer_open: return "answer-open";
    case Tag::answer_close: return "answer-close";
  }
  return "";
}

int count_occurrences(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return 0;
  int n = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size()))
    ++n;
  return n;
}

std::string strip_citations(std::string_view answer) {
  std::string out;
  out.reserve(answer.size());
  append_stripped(out, nullptr, answer);
  return out;
}

std::vector<Statement> segment_statements(std::string_view answer) {
  std::vector<Statement> out;
  std::size_t pos = 0;
  const std::size_t n = answer.size();
  while (true) {
    while (pos < n && is_space(answer[pos])) ++pos;
    if (pos >= n) break;
    const std::size_t start = pos;
    std::size_t end = 0;
    for (std::size_t i = start; i < n;) {
      if (Marker m = marker_at(answer, i); m.length > 0) {
        i += m.length;
        continue;
      }
      if (std::size_t e = sentence_end_at(answer, i); e > 0) {
        end = e;
        // Markers that immediately follow the punctuation belong here too.
        for (std::size_t k = e;;) {
          while (k < n && is_space(answer[k])) ++k;
          Marker m = marker_at(answer, k);
          if (m.length == 0) break;
          k += m.length;
          end = k;
        }
        break;
      }
      ++i;
    }
    if (end == 0) end = start + text::trim(answer.substr(start)).size();

    Statement st;
    st.span = {start, end};
    append_stripped(st.text, &st.citations, answer.substr(start, end - start));
    st.text = std::string(text::trim(st.text));
    if (st.text.empty()) {
      if (!out.empty()) {
        Statement& prev = out.back();
        prev.citations.insert(prev.citations.end(), st.citations.begin(), st.citations.end());
        prev.span.end = end;
      }
    } else {
      out.push_back(std::move(st));
    }
    pos = end;
  }
  return out;
}

ParsedResponse parse_response(std::string_view raw) {
  ParsedResponse p;
  p.raw = std::string(raw);
  for (Tag t : kAllFormatTags) p.tag_counts[t] = count_occurrences(raw, tag_literal(t));

  const auto npos = std::string_view::npos;
  const std::size_t to = raw.find(tag_literal(Tag::think_open));
  std::size_t tc = npos;
  if (to != npos) {
    tc = raw.find(tag_literal(Tag::think_close), to);
    if (tc != npos) {
      std::size_t b = to + tag_literal(Tag::think_open).size();
      p.think = std::string(raw.substr(b, tc - b));
    }
  }
  const std::size_t ao = raw.find(tag_literal(Tag::answer_open));
  std::size_t ac = npos;
  if (ao != npos) {
    ac = raw.find(tag_literal(Tag::answer_close), ao);
    if (ac != npos) {
      std::size_t b = ao + tag_literal(Tag::answer_open).size();
      p.answer = std::string(raw.substr(b, ac - b));
      p.has_answer_block = true;
    }
  }

  bool once = std::all_of(kAllFormatTags.begin(), kAllFormatTags.end(),
                          [&](Tag t) { return p.tag_counts[t] == 1; });
  if (once && to < tc && tc < ao && ao < ac && !text::is_blank(p.answer)) {
    std::size_t think_end = tc + tag_literal(Tag::think_close).size();
    std::size_t answer_end = ac + tag_literal(Tag::answer_close).size();
    p.format_ok = text::is_blank(raw.substr(0, to)) &&
                  text::is_blank(raw.substr(think_end, ao - think_end)) &&
                  text::is_blank(raw.substr(answer_end));
  }
  p.statements = segment_statements(p.answer);
  return p;
}

}  // namespace gg
