#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace maxhedge {

// Shortest-round-trip-safe text for a double: 17 significant digits, printf "%.17g" style.
std::string format_double(double value);

// Parses a whole field as a double; nullopt on trailing garbage or an empty field.
std::optional<double> parse_double(std::string_view text);
std::optional<unsigned long long> parse_unsigned(std::string_view text);

// Splits on a single delimiter; keeps empty fields.
std::vector<std::string_view> split(std::string_view text, char delimiter);

}  // namespace maxhedge
