#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tristat/analysis.hpp"
#include "tristat/calibration.hpp"
#include "tristat/measurement.hpp"
#include "tristat/noise_model.hpp"

namespace tristat {

inline constexpr std::string_view kMeasurementHeader =
    "panel_id,color_id,brightness,repeat_index,timestamp,X,Y,Z";
inline constexpr int kFormatVersion = 1;

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// Locale-independent strict parse of a full field. Returns false on junk.
bool parse_double(std::string_view text, double& out);

// Measurement CSV ------------------------------------------------------------

std::vector<MeasurementRecord> parse_measurements(std::istream& in);
std::vector<MeasurementRecord> read_measurements(const std::filesystem::path& path);

std::string format_measurements(std::span<const MeasurementRecord> records);
void write_measurements(const std::filesystem::path& path,
                        std::span<const MeasurementRecord> records);

// Versioned key-value documents ---------------------------------------------

/// `key = value` lines; `#` starts a comment line. Keys are unique.
class KeyValueDocument {
 public:
  static KeyValueDocument Parse(std::istream& in);

  void Set(const std::string& key, const std::string& value);
  void Set(const std::string& key, double value) { Set(key, format_double(value)); }

  bool Has(const std::string& key) const { return values_.contains(key); }
  const std::string& Get(const std::string& key) const;
  double GetDouble(const std::string& key) const;
  long long GetInt(const std::string& key) const;

  /// Checks `kind` and `format_version`.
  void RequireKind(std::string_view kind) const;

  std::string Format(std::string_view comment = {}) const;

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::string> values_;
};

KeyValueDocument to_document(const NoiseModel& model);
NoiseModel noise_model_from_document(const KeyValueDocument& doc);
void write_noise_model(const std::filesystem::path& path, const NoiseModel& model);
NoiseModel read_noise_model(const std::filesystem::path& path);

KeyValueDocument to_document(const CalibrationMatrix& calib);
CalibrationMatrix calibration_from_document(const KeyValueDocument& doc);
void write_calibration(const std::filesystem::path& path, const CalibrationMatrix& calib);
CalibrationMatrix read_calibration(const std::filesystem::path& path);

// Histogram CSV --------------------------------------------------------------

/// Columns bin_lo,bin_hi,count; the overflow row has an empty bin_hi.
std::string format_histogram(const DeltaEHistogram& h);

/// Reads a user-supplied histogram (e.g. a digitized external study). The
/// mean is estimated from bin centers.
DeltaEHistogram read_histogram(const std::filesystem::path& path, DeltaEGrouping grouping);

// Files ----------------------------------------------------------------------

/// Writes to a sibling temp file and renames over `path`.
void atomic_write(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace tristat
