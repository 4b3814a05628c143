#pragma once

#include <array>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>

namespace pemda {

/// Flat `key = value` configuration. Blank lines and text after `#` are
/// ignored; keys may contain dots (e.g. `interpolant.kind`). A repeated key
/// keeps its last value.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& origin = "<config>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

/// "16" -> 16x16x16, "32x32x16" -> {32, 32, 16}.
std::array<int, 3> parse_grid_spec(const std::string& text);

}  // namespace pemda
