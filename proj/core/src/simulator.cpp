#include "tristat/simulator.hpp"

#include <cmath>
#include <set>

#include "tristat/error.hpp"

namespace tristat {

Rng panel_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32), 0x7472u};
  return Rng(seq);
}

void CampaignSpec::Validate() const {
  if (n_panels < 1) throw ValidationError("campaign needs at least one panel");
  if (repeats_per_color < 1) throw ValidationError("campaign needs repeats_per_color >= 1");
  if (colors.empty()) throw ValidationError("campaign color set is empty");
  if (brightness_levels.empty()) throw ValidationError("campaign has no brightness levels");
  for (double b : brightness_levels) {
    if (!(b > 0.0 && b <= 1.0)) {
      throw ValidationError("brightness levels must lie in (0, 1], got " + std::to_string(b));
    }
  }
  std::set<std::string> ids;
  for (const auto& c : colors) {
    if (!(c.xyz.Sum() > 0.0)) throw ValidationError("color '" + c.id + "' is black");
    if (!ids.insert(c.id).second) throw ValidationError("duplicate color id '" + c.id + "'");
  }
  std::set<double> levels(brightness_levels.begin(), brightness_levels.end());
  if (levels.size() != brightness_levels.size()) {
    throw ValidationError("duplicate brightness level");
  }
  if (!(measurement_interval_s >= 0.0)) {
    throw ValidationError("measurement interval must be non-negative");
  }
}

Vec3 draw_offset(const NoiseModel& model, const Tristimulus& c, Rng& rng) {
  std::normal_distribution<double> normal;
  const Vec3 z(normal(rng), normal(rng), normal(rng));
  return covariance_factor(model, c) * z;
}

namespace {

Tristimulus AddNoise(const NoiseModel& model, const Tristimulus& c, Rng& rng,
                     ClampCounter* clamps) {
  int clamped = 0;
  Tristimulus out = Tristimulus::ClampFromVector(c.vec() + draw_offset(model, c, rng), &clamped);
  if (clamps != nullptr) clamps->components += static_cast<std::size_t>(clamped);
  return out;
}

}  // namespace

PanelSpec sample_panel(std::span<const ColorSpec> population, const std::string& panel_id,
                       const NoiseModel& static_offset_model,
                       const NoiseModel& temporal_model, Rng& rng, ClampCounter* clamps) {
  PanelSpec panel{panel_id, {}, static_offset_model, temporal_model};
  for (const auto& color : population) {
    if (!(color.xyz.Sum() > 0.0)) {
      throw NumericalError("degenerate population color '" + color.id + "'");
    }
    panel.true_colors.emplace(color.id, AddNoise(static_offset_model, color.xyz, rng, clamps));
  }
  return panel;
}

Tristimulus sample_measurement(const PanelSpec& panel, const std::string& color_id,
                               Rng& rng, double brightness, ClampCounter* clamps) {
  const auto it = panel.true_colors.find(color_id);
  if (it == panel.true_colors.end()) {
    throw ValidationError("panel '" + panel.panel_id + "' has no color '" + color_id + "'");
  }
  const Tristimulus truth = it->second.Scaled(brightness);
  if (!(truth.Sum() > 0.0)) return truth;
  return AddNoise(panel.temporal_model, truth, rng, clamps);
}

std::string panel_label(std::size_t index, std::size_t n_panels) {
  const std::size_t width = std::to_string(n_panels).size();
  std::string digits = std::to_string(index + 1);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return "P" + digits;
}

Campaign run_campaign(const CampaignSpec& spec) {
  spec.Validate();
  Campaign campaign;
  campaign.panels.reserve(spec.n_panels);
  campaign.records.reserve(spec.n_panels * spec.colors.size() *
                           spec.brightness_levels.size() * spec.repeats_per_color);
  ClampCounter clamps;
  for (std::size_t p = 0; p < spec.n_panels; ++p) {
    Rng rng = panel_stream(spec.seed, p);
    PanelSpec panel = sample_panel(spec.colors, panel_label(p, spec.n_panels),
                                   spec.between_panel, spec.within_panel, rng, &clamps);
    std::size_t tick = 0;
    for (double level : spec.brightness_levels) {
      for (const auto& color : spec.colors) {
        for (std::size_t r = 0; r < spec.repeats_per_color; ++r) {
          MeasurementRecord rec;
          rec.panel_id = panel.panel_id;
          rec.color_id = color.id;
          rec.brightness = level;
          rec.repeat_index = static_cast<int>(r);
          rec.timestamp = static_cast<double>(tick++) * spec.measurement_interval_s;
          rec.xyz = sample_measurement(panel, color.id, rng, level, &clamps);
          campaign.records.push_back(std::move(rec));
        }
      }
    }
    campaign.panels.push_back(std::move(panel));
  }
  campaign.clamped_components = clamps.components;
  return campaign;
}

}  // namespace tristat
