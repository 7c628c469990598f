#pragma once

#include <string>
#include <string_view>

namespace gg::text {

/// Matching normal form: NFKC compatibility fold with case folding, Unicode
/// punctuation removed, whitespace runs collapsed to one ASCII space and
/// trimmed. Invalid UTF-8 is replaced with U+FFFD before folding.
std::string normalize(std::string_view s);

/// Levenshtein distance over Unicode code points.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);

/// 1 - distance / max(|a|, |b|) on code points; two empty strings are
/// identical and score 1.
double edit_similarity(std::string_view a, std::string_view b);

std::u32string to_u32(std::string_view utf8);

std::string_view trim(std::string_view s);
bool is_blank(std::string_view s);

/// Substring test on normalized forms; an empty needle never matches.
bool contains_normalized(std::string_view haystack, std::string_view needle);

}  // namespace gg::text
