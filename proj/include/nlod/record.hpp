#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nlod {

/// One emitted result row. Field order below is the documented column order.
struct ExperimentRecord {
  std::string command;
  double s = 0.0;
  double p = 0.0;
  double alpha = 0.0;
  std::optional<double> sigma;  ///< empty for hard / limit rows
  int N = 0;
  double lambda = 0.0;
  double seminorm_term = 0.0;
  double penalty_term = 0.0;
  int iterations = 0;
  double el_residual = 0.0;
  std::uint64_t design_checksum = 0;
  std::uint64_t seed = 0;
  double wall_time_ms = 0.0;
};

enum class RecordFormat { csv, jsonlines };

/// Parses "csv" / "jsonlines"; anything else is a validation error.
RecordFormat record_format_from_name(const std::string& name);

/// The fixed CSV header line (no trailing newline).
std::string record_header();

/// Doubles printed with 17 significant digits: lossless round-trip.
std::string format_double(double v);

/// FNV-1a 64-bit hash over the little-endian int64 bytes of
/// llround(value * 1e12) per entry: a stable checksum of the design vector
/// rounded at 1e-12.
std::uint64_t design_checksum(const Eigen::VectorXd& values);

/// Writes records to a stream in the chosen format. CSV always starts with the
/// header line; jsonlines writes one object per line with keys equal to the
/// field names (sigma is null when absent).
void emit_records(const std::vector<ExperimentRecord>& records, std::ostream& out,
                  RecordFormat format);

/// Writes records to a file; unwritable path -> IoError.
void emit_records(const std::vector<ExperimentRecord>& records, const std::string& path,
                  RecordFormat format);

/// Reads records back (inverse of emit_records); used by the round-trip tests.
std::vector<ExperimentRecord> parse_records(std::istream& in, RecordFormat format);
std::vector<ExperimentRecord> parse_records_file(const std::string& path, RecordFormat format);

}  // namespace nlod
