#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include "ionsim/cli.hpp"

namespace ionsim::cli {

namespace {

constexpr int kSignificantDigits = 15;

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general,
                                 kSignificantDigits);
  return {buf.data(), res.ptr};
}

double round_significant(double value) {
  if (!std::isfinite(value)) return value;
  const std::string text = format_number(value);
  double out = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), out);
  return out;
}

std::filesystem::path resolve_output(const std::string& explicit_path, const std::string& default_name) {
  if (!explicit_path.empty()) return explicit_path;
  const char* dir = std::getenv(kOutputDirEnv);
  if (dir != nullptr && *dir != '\0') return std::filesystem::path(dir) / default_name;
  return default_name;
}

void write_csv(const std::filesystem::path& path, const std::string& config_json,
               const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path.string() + " for writing");
  file << "# config " << config_json << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) file << (i ? "," : "") << columns[i];
  file << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) file << (i ? "," : "") << format_number(row[i]);
    file << '\n';
  }
  if (!file) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace ionsim::cli
