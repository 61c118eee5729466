#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tristat/analysis.hpp"
#include "tristat/simulator.hpp"

namespace tristat {

struct ReportOptions {
  HistogramBins bins;
  /// Colors included in delta E histograms; empty means all.
  std::vector<std::string> delta_e_colors{"red", "green", "blue"};
  bool svg = true;
  std::optional<std::filesystem::path> external_histogram;
};

/// Everything a pipeline run needs. Loaded from JSON, validated up front.
struct ScenarioConfig {
  CampaignSpec campaign;
  std::vector<std::string> fit_colors{"red", "green", "blue", "white"};
  std::vector<std::string> holdout_colors{"cyan", "magenta", "yellow"};
  /// Panel calibrated against all others; empty selects the first panel.
  std::string source_panel;
  double calibration_brightness = 1.0;
  ReportOptions report;

  void Validate() const;
};

/// 13 panels, 20 palette colors, 12 repeats at full brightness, seed 1,
/// default within/between models.
ScenarioConfig default_scenario();

ScenarioConfig parse_scenario(std::string_view json_text);
/// Relative external_histogram paths resolve against the file's directory.
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Canonical JSON (sorted keys, fully populated) of a scenario.
std::string scenario_to_json(const ScenarioConfig& config);

/// FNV-1a of the canonical JSON.
std::string config_hash(const ScenarioConfig& config);

}  // namespace tristat
