#include "pemda/records.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include <json.hpp>

#include "pemda/errors.hpp"

namespace pemda {

namespace {

using Field = double NormReport::*;

constexpr std::pair<const char*, Field> kNormKeys[] = {
    {"l2_u", &NormReport::l2_u},       {"l2_b", &NormReport::l2_b},         {"l4_A", &NormReport::l4_A},
    {"l4_Astar", &NormReport::l4_Astar}, {"h1_u", &NormReport::h1_u},       {"h1_b", &NormReport::h1_b},
    {"h2_u", &NormReport::h2_u},       {"h2_b", &NormReport::h2_b},         {"dz_u_l2", &NormReport::dz_u_l2},
    {"dz_b_l2", &NormReport::dz_b_l2}, {"grad_u_l2", &NormReport::grad_u_l2}, {"grad_b_l2", &NormReport::grad_b_l2},
};

void put(std::string& s, const char* key, double v) {
  if (std::isfinite(v)) {
    fmt::format_to(std::back_inserter(s), ",\"{}\":{:.17g}", key, v);
  } else {
    fmt::format_to(std::back_inserter(s), ",\"{}\":null", key);
  }
}

double get(const nlohmann::json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw IoError(fmt::format("record is missing key '{}'", key));
  if (it->is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!it->is_number()) throw IoError(fmt::format("record key '{}' is not a number", key));
  return it->get<double>();
}

}  // namespace

std::string format_record(const RunRecord& r) {
  std::string s = fmt::format("{{\"v\":{}", kRecordFormatVersion);
  put(s, "t", r.t);
  put(s, "dt", r.dt);
  for (const auto& [key, field] : kNormKeys) put(s, key, r.norms.*field);
  if (r.err_l2) {
    put(s, "err_l2", *r.err_l2);
  } else {
    s += ",\"err_l2\":null";
  }
  put(s, "budget_residual", r.budget_residual);
  put(s, "baro_div_u", r.baro_div_u);
  put(s, "baro_div_b", r.baro_div_b);
  s += '}';
  return s;
}

RunRecord parse_record(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(fmt::format("malformed record: {}", e.what()));
  }
  if (!j.is_object()) throw IoError("record is not a JSON object");
  const auto v = j.find("v");
  if (v == j.end() || !v->is_number_integer() || v->get<int>() != kRecordFormatVersion) {
    throw IoError(fmt::format("unsupported record version (expected {})", kRecordFormatVersion));
  }
  RunRecord r;
  r.t = get(j, "t");
  r.dt = get(j, "dt");
  for (const auto& [key, field] : kNormKeys) r.norms.*field = get(j, key);
  const auto e = j.find("err_l2");
  if (e == j.end()) throw IoError("record is missing key 'err_l2'");
  if (!e->is_null()) r.err_l2 = e->get<double>();
  r.budget_residual = get(j, "budget_residual");
  r.baro_div_u = get(j, "baro_div_u");
  r.baro_div_b = get(j, "baro_div_b");
  return r;
}

void write_records(std::ostream& out, const std::vector<RunRecord>& records) {
  for (const RunRecord& r : records) out << format_record(r) << '\n';
}

void write_records(const std::filesystem::path& path, const std::vector<RunRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  write_records(out, records);
  out.flush();
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

std::vector<RunRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
  std::vector<RunRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(parse_record(line));
    } catch (const IoError& e) {
      throw IoError(fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
    }
  }
  return out;
}

RecordWriter::RecordWriter(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
}

void RecordWriter::append(const RunRecord& r) {
  out_ << format_record(r) << '\n';
  out_.flush();
  if (!out_) throw IoError(fmt::format("write to '{}' failed", path_.string()));
}

double empirical_k0(const std::vector<RunRecord>& records) {
  double k0 = 0.0;
  for (const RunRecord& r : records) {
    const NormReport& n = r.norms;
    const double l4a = n.l4_A * n.l4_A, l4s = n.l4_Astar * n.l4_Astar;
    k0 = std::max({k0, n.l2_u * n.l2_u + n.l2_b * n.l2_b, l4a * l4a + l4s * l4s, n.h1_u * n.h1_u + n.h1_b * n.h1_b,
                   n.h2_u * n.h2_u + n.h2_b * n.h2_b});
  }
  return k0;
}

}  // namespace pemda
