#pragma once

// Small string helpers shared by the parsers and emitters.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fraccite::text {

std::string_view trim(std::string_view s) noexcept;
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b) noexcept;
std::vector<std::string> split(std::string_view s, char sep);

std::optional<std::int64_t> parse_int(std::string_view s) noexcept;
std::optional<double> parse_double(std::string_view s) noexcept;

// RFC 4180 style: double quotes protect separators, "" is an escaped quote.
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_escape(std::string_view field);

// Fixed-point with `places` decimals (presentation only).
std::string format_fixed(double value, int places);
// Shortest representation that round-trips to the same double.
std::string format_exact(double value);

}  // namespace fraccite::text
