#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ragds::text {

/// Collapses every run of ASCII whitespace to one space and trims both ends.
std::string normalize_whitespace(std::string_view s);

std::vector<std::string> split_whitespace(std::string_view s);
std::size_t count_whitespace_tokens(std::string_view s);

std::string to_lower_ascii(std::string_view s);

/// Dedup key for an instruction: lowercased, whitespace-collapsed, with
/// trailing punctuation removed.
std::string normalize_instruction(std::string_view s);

/// Number of UTF-8 code points (continuation bytes are not counted).
std::size_t utf8_length(std::string_view s);

bool contains_case_insensitive(std::string_view haystack, std::string_view needle);

std::size_t levenshtein(std::string_view a, std::string_view b);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace ragds::text
