#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ipof {

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

// Whole-token parse; rejects trailing garbage and empty input.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

std::string_view trim(std::string_view text);
std::vector<std::string_view> split(std::string_view text, char delimiter);

}  // namespace ipof
