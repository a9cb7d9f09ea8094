#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pointspeak {

std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(std::u32string_view s);

// Lowercased (Unicode-aware), trimmed, internal whitespace collapsed to a
// single space. Two label names are the same label iff their canonical
// forms are byte-identical.
std::string canonical_name(std::string_view name);

// Lowercase, apostrophes removed, other punctuation replaced by spaces,
// split on whitespace.
std::vector<std::string> normalize_tokens(std::string_view text);

// Levenshtein distance over code points.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);

std::size_t utf8_length(std::string_view s);

}  // namespace pointspeak
