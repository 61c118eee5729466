#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tristat/analysis.hpp"
#include "tristat/scenario.hpp"

namespace tristat {

/// A named output file produced in memory.
struct Artifact {
  std::string name;
  std::string content;
};

std::string k_table_csv(const KTable& table);
std::string group_stds_csv(std::span<const GroupStd> stds);
std::string directional_stds_csv(std::span<const DirectionalStd> stds);
std::string pca_csv(const PcaSummary& pca);
std::string comparison_csv(const WeightingComparison& cmp);

struct PlotSeries {
  std::string label;
  std::string color = "#1f77b4";
  std::vector<std::pair<double, double>> points;
  bool line = false;  // polyline instead of markers
};

/// Minimal standalone SVG line/scatter plot with linear axes.
std::string render_svg(const std::string& title, const std::string& x_label,
                       const std::string& y_label, std::span<const PlotSeries> series);

/// Everything `analyze` can derive from a record set. Sections that the data
/// cannot support (e.g. between-panel stats for one panel) stay empty and
/// are explained in `notes`.
struct AnalysisOutput {
  Tristimulus white;
  std::optional<KTable> k_table;
  std::optional<NoiseModel> within_model;
  std::optional<BetweenPanelStds> between;
  std::optional<NoiseModel> between_model;
  std::vector<std::string> flagged_colors;
  std::optional<PcaSummary> pca;
  std::size_t trend_series = 0;
  std::size_t significant_trends = 0;
  std::optional<DeltaEHistogram> within_hist;
  std::optional<DeltaEHistogram> between_hist;
  std::optional<DeltaEHistogram> external_hist;
  std::vector<std::string> notes;
  std::vector<Artifact> files;
};

AnalysisOutput analyze_records(std::span<const MeasurementRecord> records,
                               const ReportOptions& options,
                               std::optional<Tristimulus> white = std::nullopt);

/// Markdown summary of a full pipeline run. Embeds the config hash and seed.
std::string render_report(const ScenarioConfig& config, const AnalysisOutput& analysis,
                          const WeightingComparison* comparison,
                          std::size_t clamped_components);

}  // namespace tristat
