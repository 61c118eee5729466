#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tristat/measurement.hpp"
#include "tristat/noise_model.hpp"
#include "tristat/palette.hpp"

namespace tristat {

using Rng = std::mt19937_64;

/// Independent generator for panel `index` derived from the master seed.
Rng panel_stream(std::uint64_t seed, std::uint64_t index);

/// Noise-free outputs of one simulated panel. Static offsets are baked into
/// true_colors; temporal_model drives the per-measurement noise.
struct PanelSpec {
  std::string panel_id;
  std::map<std::string, Tristimulus> true_colors;
  NoiseModel static_offset_model = NoiseModel::BetweenPanel();
  NoiseModel temporal_model = NoiseModel::WithinPanel();
};

struct CampaignSpec {
  std::size_t n_panels = 1;
  std::size_t repeats_per_color = 12;
  std::vector<ColorSpec> colors;
  std::vector<double> brightness_levels{1.0};
  std::uint64_t seed = 0;
  NoiseModel between_panel = NoiseModel::BetweenPanel();
  NoiseModel within_panel = NoiseModel::WithinPanel();
  double measurement_interval_s = 1.0;

  /// Throws ValidationError describing the first violated constraint.
  void Validate() const;
};

/// Counts XYZ components that came out negative and were clamped to zero.
struct ClampCounter {
  std::size_t components = 0;
};

/// Zero-mean draw with covariance covariance(model, c), added to c.
Vec3 draw_offset(const NoiseModel& model, const Tristimulus& c, Rng& rng);

/// Each true color = population mean + one draw from the between-panel model.
PanelSpec sample_panel(std::span<const ColorSpec> population, const std::string& panel_id,
                       const NoiseModel& static_offset_model,
                       const NoiseModel& temporal_model, Rng& rng,
                       ClampCounter* clamps = nullptr);

/// True color (scaled by brightness) plus one temporal-noise draw.
Tristimulus sample_measurement(const PanelSpec& panel, const std::string& color_id,
                               Rng& rng, double brightness = 1.0,
                               ClampCounter* clamps = nullptr);

struct Campaign {
  std::vector<PanelSpec> panels;
  std::vector<MeasurementRecord> records;
  std::size_t clamped_components = 0;
};

/// Records ordered by panel, brightness, color, repeat. Each panel draws
/// from its own panel_stream, so output does not depend on scheduling.
Campaign run_campaign(const CampaignSpec& spec);

std::string panel_label(std::size_t index, std::size_t n_panels);

}  // namespace tristat
