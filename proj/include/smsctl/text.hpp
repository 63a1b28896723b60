#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace smsctl::text {

std::vector<std::string> split(std::string_view s, char sep);

// Like split, but an empty input yields an empty list and empty items are dropped.
std::vector<std::string> split_list(std::string_view s, char sep);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string_view trim(std::string_view s);

std::string to_lower(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix);

// Double-quoted string with \" \\ \n \t escapes. Returns the unquoted text.
std::string unquote(std::string_view s);
std::string quote(std::string_view s);

// Splits a line into whitespace separated words; double-quoted words may contain spaces.
std::vector<std::string> shell_words(std::string_view line);

// Shortest round-trip decimal with at least one fractional digit ("0.0", "1.5", "2.75").
std::string format_score(double v);

} // namespace smsctl::text
