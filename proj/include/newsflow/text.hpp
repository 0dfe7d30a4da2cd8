#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace newsflow {

// Lowercases and collapses runs of whitespace to a single space; trims both ends.
std::string normalize_phrase(std::string_view raw);

std::vector<std::string> tokenize(std::string_view phrase);

std::size_t token_count(std::string_view phrase);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::vector<std::string> split(std::string_view s, char sep);

std::string trim(std::string_view s);

}  // namespace newsflow
