#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pemda/state.hpp"

namespace pemda {

/// One diagnostic row per time step.
struct RunRecord {
  double t = 0.0;
  double dt = 0.0;
  NormReport norms;
  // ||u - u_ref||^2 + ||b - b_ref||^2 for runs with a reference.
  std::optional<double> err_l2;
  double budget_residual = 0.0;
  double baro_div_u = 0.0;
  double baro_div_b = 0.0;

  bool operator==(const RunRecord&) const = default;
};

// Record files are newline-delimited JSON objects, one per record, with the
// keys
//   v, t, dt, l2_u, l2_b, l4_A, l4_Astar, h1_u, h1_b, h2_u, h2_b,
//   dz_u_l2, dz_b_l2, grad_u_l2, grad_b_l2, err_l2, budget_residual,
//   baro_div_u, baro_div_b
// in that order. "v" is the format version (currently 1); err_l2 is null when
// the run has no reference. Numbers carry 17 significant digits so the file
// round-trips bit-exactly.
inline constexpr int kRecordFormatVersion = 1;

std::string format_record(const RunRecord& r);
RunRecord parse_record(const std::string& line);

void write_records(std::ostream& out, const std::vector<RunRecord>& records);
void write_records(const std::filesystem::path& path, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_records(const std::filesystem::path& path);

/// Appends records to a file as they are produced.
class RecordWriter {
 public:
  explicit RecordWriter(const std::filesystem::path& path);
  void append(const RunRecord& r);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

/// Running maxima of the quantities the uniform bound k0 controls:
/// ||u||^2 + ||b||^2, ||A||_4^4 + ||A*||_4^4, H1 and H2 squared norms.
double empirical_k0(const std::vector<RunRecord>& records);

}  // namespace pemda
