#pragma once

// Command-line driver. Every report is JSON with `schema: 1` and a `config`
// echo; grids and trajectories are CSV files whose first line is
// "# config <json>". Numbers carry 15 significant digits.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace ionsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitTolerance = 3;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "IONSIM_OUTPUT_DIR";

/// Shortest text with at most 15 significant digits; '.' separator, no locale.
std::string format_number(double value);

/// The double nearest to `value` printed at 15 significant digits.
double round_significant(double value);

/// `explicit_path` if non-empty, otherwise `default_name` inside the
/// directory named by IONSIM_OUTPUT_DIR (or the working directory).
std::filesystem::path resolve_output(const std::string& explicit_path, const std::string& default_name);

/// Writes rows of numbers under a config header and a column header.
void write_csv(const std::filesystem::path& path, const std::string& config_json,
               const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ionsim::cli
