#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chronoscope::text {

/// Splits on '\t'; a trailing '\r' is dropped first.
std::vector<std::string_view> split_tabs(std::string_view line);

template <typename Int>
std::optional<Int> parse_int(std::string_view field) {
  Int value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) return std::nullopt;
  return value;
}

std::optional<double> parse_double(std::string_view field);

/// Shortest representation that round-trips; "nan"/"inf" for non-finite.
std::string format_double(double value);

/// Calls `fn(line, line_number)` for every line of the file (1-based, without
/// the terminating LF). Reads in fixed-size chunks.
void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::string_view, std::size_t)>& fn);

std::string read_file(const std::filesystem::path& path);
/// Truncates and writes; throws Io on failure.
void write_file(const std::filesystem::path& path, std::string_view contents);

/// True for blank lines and lines starting with '#'.
bool is_comment_or_blank(std::string_view line);

}  // namespace chronoscope::text
