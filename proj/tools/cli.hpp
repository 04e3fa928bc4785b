#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace budgetsvm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // file errors, failed verification
inline constexpr int kExitUsage = 2;    // bad flags

/// Runs one command line (without the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// run.csv -> run_B500.csv
std::filesystem::path with_budget_suffix(const std::filesystem::path& path, std::size_t budget);

/// "200,500,1000" -> {200, 500, 1000}; throws std::invalid_argument on junk.
std::vector<std::size_t> parse_budget_list(const std::string& text);

}  // namespace budgetsvm::cli
