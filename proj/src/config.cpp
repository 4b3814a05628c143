#include "pemda/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "pemda/errors.hpp"

namespace pemda {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& origin) {
  Config c;
  c.origin_ = origin;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(fmt::format("{}:{}: expected 'key = value'", origin, lineno));
    }
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ValidationError(fmt::format("{}:{}: empty key", origin, lineno));
    c.values_[std::move(key)] = std::move(value);
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open config file '{}'", path.string()));
  return parse(in, path.string());
}

std::optional<std::string> Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double Config::get_double(const std::string& key) const {
  const auto v = get(key);
  if (!v) throw ValidationError(fmt::format("{}: missing key '{}'", origin_, key));
  std::istringstream s(*v);
  double x = 0;
  s >> x;
  if (!s || !(s >> std::ws).eof()) throw ValidationError(fmt::format("{}: '{}' is not a number: '{}'", origin_, key, *v));
  return x;
}

long long Config::get_int(const std::string& key) const {
  const auto v = get(key);
  if (!v) throw ValidationError(fmt::format("{}: missing key '{}'", origin_, key));
  long long x = 0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), x);
  if (ec != std::errc() || ptr != v->data() + v->size()) {
    throw ValidationError(fmt::format("{}: '{}' is not an integer: '{}'", origin_, key, *v));
  }
  return x;
}

std::array<int, 3> parse_grid_spec(const std::string& text) {
  auto bad = [&] { return ValidationError(fmt::format("bad grid '{}' (expected N or NXxNYxNZ)", text)); };
  std::vector<int> parts;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, 'x')) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size()) throw bad();
    parts.push_back(v);
  }
  if (text.empty() || text.back() == 'x') throw bad();
  if (parts.size() == 1) return {parts[0], parts[0], parts[0]};
  if (parts.size() != 3) throw bad();
  return {parts[0], parts[1], parts[2]};
}

}  // namespace pemda
