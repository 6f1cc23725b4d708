#include "dhillon/registry.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dhillon/errors.hpp"

namespace dhillon {

namespace {

// Expands (value, count) pairs.
std::vector<double> expand(std::initializer_list<std::pair<double, int>> runs) {
  std::vector<double> out;
  for (const auto& [v, k] : runs) out.insert(out.end(), static_cast<std::size_t>(k), v);
  return out;
}

std::vector<double> diesel_engine() {
  return expand({{1, 17}, {2, 8},  {3, 5},  {4, 4},  {5, 2},  {6, 1},  {7, 4},  {8, 1},  {9, 1},
                 {11, 3}, {13, 1}, {14, 1}, {15, 2}, {16, 1}, {18, 1}, {21, 3}, {22, 1}, {25, 1},
                 {26, 1}, {28, 1}, {32, 1}, {52, 1}, {59, 1}});
}

std::vector<double> line_divider() {
  return expand({{1, 23}, {2, 8},  {3, 6},  {4, 6},  {5, 5},  {6, 6},  {7, 2},  {8, 4},  {9, 1},
                 {11, 7}, {12, 1}, {14, 2}, {15, 1}, {17, 2}, {18, 1}, {19, 1}, {21, 1}, {24, 1},
                 {29, 1}, {31, 1}, {32, 1}, {34, 1}});
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\"");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::vector<std::string> builtin_names() { return {"diesel_engine", "line_divider"}; }

std::optional<Dataset> builtin_dataset(std::string_view name) {
  if (name == "diesel_engine") return Dataset(diesel_engine(), "diesel_engine");
  if (name == "line_divider") return Dataset(line_divider(), "line_divider");
  return std::nullopt;
}

Dataset parse_times_csv(std::string_view text, std::string label) {
  std::vector<double> times;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t row = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++row;
    const std::string cell = trim(line);
    if (cell.empty()) continue;
    if (cell.find(',') != std::string::npos) {
      throw DomainError("row " + std::to_string(row) + ": expected a single column, got '" + cell + "'");
    }
    if (first_content && cell == "time") {
      first_content = false;
      continue;
    }
    first_content = false;
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0' || errno == ERANGE) {
      throw DomainError("row " + std::to_string(row) + ": '" + cell + "' is not a number");
    }
    if (!std::isfinite(v) || !(v > 0.0)) {
      throw DomainError("row " + std::to_string(row) + ": failure time must be positive and finite, got " + cell);
    }
    times.push_back(v);
  }
  if (times.empty()) throw DomainError("no failure times found");
  return Dataset(std::move(times), std::move(label));
}

Dataset resolve_dataset(const std::string& name_or_path) {
  if (auto d = builtin_dataset(name_or_path)) return *d;
  std::ifstream f(name_or_path, std::ios::binary);
  if (!f) throw DomainError("unknown dataset '" + name_or_path + "' (not a builtin name or readable file)");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_times_csv(ss.str(), name_or_path);
}

}  // namespace dhillon
