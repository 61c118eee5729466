#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tristat/calibration.hpp"
#include "tristat/measurement.hpp"
#include "tristat/noise_model.hpp"

namespace tristat {

/// (color id, brightness) identifying one group of repeated measurements.
struct GroupKey {
  std::string color_id;
  double brightness = 1.0;

  friend auto operator<=>(const GroupKey&, const GroupKey&) = default;
};

/// Records of one panel grouped by (color, brightness). Each group is sorted
/// by repeat index.
struct PanelDataset {
  std::string panel_id;
  std::map<GroupKey, std::vector<MeasurementRecord>> groups;
};

/// Splits records by panel (sorted by panel id).
std::vector<PanelDataset> group_by_panel(std::span<const MeasurementRecord> records);

std::vector<Tristimulus> xyz_of(std::span<const MeasurementRecord> records);

inline constexpr std::array<Direction, 6> kAllDirections = {
    Direction::kX, Direction::kY, Direction::kZ, Direction::kV1, Direction::kV2, Direction::kV3};

/// Directional stds of every group with >= 2 repeats, along X/Y/Z and the
/// mean-anchored v1/v2/v3.
struct GroupStd {
  GroupKey key;
  std::string panel_id;
  double sum_xyz = 0.0;
  std::size_t sample_count = 0;
  std::array<double, 6> sigma{};  // indexed like kAllDirections

  DirectionalStd ToDirectionalStd() const;
};

std::vector<GroupStd> within_panel_stds(const PanelDataset& dataset);

/// All within-panel DirectionalStd points across datasets (input to
/// fit_noise_model).
std::vector<DirectionalStd> within_panel_directional_stds(
    std::span<const PanelDataset> datasets);

/// k x 1000 per panel and direction with across-panel mean and std.
struct KTable {
  std::vector<std::string> panel_ids;
  std::vector<Direction> directions;
  std::vector<std::vector<double>> k_x1000;  // [direction][panel]
  std::vector<double> mean;                  // per direction
  std::vector<double> stddev;                // per direction, n - 1 divisor

  double Mean(Direction d) const;
};

KTable panel_k_table(std::span<const PanelDataset> datasets);

struct BetweenPanelStds {
  std::vector<DirectionalStd> stds;
  /// True when some panel had several repeats of a color and only the
  /// first one was used.
  bool dropped_repeats = false;
};

/// One measurement per panel and (color, brightness); basis anchored at the
/// cross-panel mean.
BetweenPanelStds between_panel_std(std::span<const MeasurementRecord> records);

/// Colors whose larger perpendicular std exceeds `factor` times the model's
/// perpendicular prediction a (X+Y+Z).
std::vector<std::string> flag_excess_perpendicular(std::span<const DirectionalStd> stds,
                                                   const NoiseModel& model,
                                                   double factor = 2.0);

struct TimeSeries {
  std::vector<std::pair<double, double>> points;  // (timestamp, X+Y+Z)
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double p_value = 1.0;  // two-sided t-test of slope = 0
  bool significant = false;
};

TimeSeries time_series(const PanelDataset& dataset, const std::string& color_id,
                       double brightness = 1.0, double alpha = 0.05);

enum class DeltaEGrouping { kWithinRegion, kBetweenPanels, kExternalBetweenRegions };

std::string_view to_string(DeltaEGrouping g);
DeltaEGrouping delta_e_grouping_from_string(std::string_view s);

struct HistogramBins {
  double width = 0.25;
  double max = 10.0;
};

struct DeltaEHistogram {
  std::vector<double> edges;  // counts[i] covers [edges[i], edges[i+1]); last count is overflow
  std::vector<std::size_t> counts;
  double mean = 0.0;
  std::size_t sample_count = 0;
  DeltaEGrouping grouping = DeltaEGrouping::kWithinRegion;
};

DeltaEHistogram histogram_of(std::span<const double> values, DeltaEGrouping grouping,
                             const HistogramBins& bins = {});

/// Raw delta E values: each measurement against its group's average L*a*b*.
/// within_region groups by (panel, color, brightness); between_panels uses
/// one measurement per panel per (color, brightness).
std::vector<double> delta_e_values(std::span<const MeasurementRecord> records,
                                   DeltaEGrouping grouping, const Tristimulus& white,
                                   std::span<const std::string> colors = {});

DeltaEHistogram delta_e_histogram(std::span<const MeasurementRecord> records,
                                  DeltaEGrouping grouping, const Tristimulus& white,
                                  const HistogramBins& bins = {},
                                  std::span<const std::string> colors = {});

/// Mean of the measured white at its highest brightness when present,
/// otherwise the mean of the (color, brightness) group with the largest mean Y.
Tristimulus default_reference_white(std::span<const MeasurementRecord> records);

struct PcaSummary {
  std::vector<double> angles_to_v1_deg;  // one per group with >= 3 repeats
  std::vector<double> angles_to_y_deg;
  double mean_angle_to_v1 = 0.0;
  double mean_angle_to_y = 0.0;
};

PcaSummary pca_summary(std::span<const PanelDataset> datasets);

/// Mean XYZ of the repeats of each listed color on one panel at one
/// brightness, paired source-to-reference.
std::vector<MeasurementPair> pairs_between(const PanelDataset& source,
                                           const PanelDataset& reference,
                                           std::span<const std::string> colors,
                                           double brightness = 1.0);

struct DevicePairResult {
  std::string source_panel;
  std::string reference_panel;
  Evaluation proposed;
  Evaluation uniform;

  bool ProposedWins() const { return proposed.mean_error < uniform.mean_error; }
};

struct WeightingComparison {
  std::vector<DevicePairResult> pairs;
  std::size_t proposed_wins = 0;
};

/// Calibrates `source_panel` to every other panel with both weightings,
/// fitting on `fit_colors` and evaluating on `holdout_colors`.
WeightingComparison compare_weightings(std::span<const PanelDataset> datasets,
                                       const std::string& source_panel,
                                       std::span<const std::string> fit_colors,
                                       std::span<const std::string> holdout_colors,
                                       const NoiseModel& model, double brightness = 1.0);

}  // namespace tristat
