#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace patrol {

std::string read_text_file(const std::filesystem::path& path);

// Creates parent directories as needed.
void write_text_file(const std::filesystem::path& path, std::string_view contents);

// "line L, column C: what" for a JSON parse failure at byte offset `byte`.
std::string describe_parse_error(std::string_view text, std::size_t byte, std::string_view what);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t value);

// printf-style fixed-point formatting, e.g. format_fixed(0.5, 3) == "0.500".
std::string format_fixed(double value, int decimals);

}  // namespace patrol
