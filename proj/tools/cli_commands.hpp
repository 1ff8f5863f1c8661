#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace patrol::cli {

// Exit codes: 0 success, 2 configuration error, 3 data error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Path of a map shipped under data/maps.
std::filesystem::path bundled_map(std::string_view file_name);

}  // namespace patrol::cli
