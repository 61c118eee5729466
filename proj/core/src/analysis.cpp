#include "tristat/analysis.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "tristat/error.hpp"

namespace tristat {
namespace {

Vec3 UnitVector(Direction d, const DirectionBasis& basis) {
  switch (d) {
    case Direction::kX: return Vec3::UnitX();
    case Direction::kY: return Vec3::UnitY();
    case Direction::kZ: return Vec3::UnitZ();
    case Direction::kV1: return basis.v1;
    case Direction::kV2: return basis.v2;
    case Direction::kV3: return basis.v3;
  }
  return Vec3::Zero();
}

std::size_t DirectionIndex(Direction d) {
  const auto it = std::find(kAllDirections.begin(), kAllDirections.end(), d);
  return static_cast<std::size_t>(it - kAllDirections.begin());
}

bool Selected(std::span<const std::string> colors, const std::string& id) {
  return colors.empty() || std::find(colors.begin(), colors.end(), id) != colors.end();
}

std::string DescribeKey(const GroupKey& key) {
  std::ostringstream os;
  os << key.color_id << "@" << key.brightness;
  return os.str();
}

/// First repeat of every panel, per (color, brightness), ordered by panel id.
std::map<GroupKey, std::vector<const MeasurementRecord*>> FirstRepeatPerPanel(
    std::span<const MeasurementRecord> records, bool* dropped) {
  std::map<GroupKey, std::map<std::string, const MeasurementRecord*>> chosen;
  for (const auto& rec : records) {
    auto& slot = chosen[{rec.color_id, rec.brightness}][rec.panel_id];
    if (slot == nullptr) {
      slot = &rec;
      continue;
    }
    if (dropped != nullptr) *dropped = true;
    if (rec.repeat_index < slot->repeat_index) slot = &rec;
  }
  std::map<GroupKey, std::vector<const MeasurementRecord*>> out;
  for (auto& [key, per_panel] : chosen) {
    auto& v = out[key];
    for (auto& [panel, rec] : per_panel) v.push_back(rec);
  }
  return out;
}

/// Delta E of each Lab color against the component-wise Lab average.
void AppendDeltaE(std::span<const Tristimulus> colors, const Tristimulus& white,
                  std::vector<double>& out) {
  std::vector<LabColor> labs;
  labs.reserve(colors.size());
  LabColor avg{0.0, 0.0, 0.0, white};
  for (const auto& c : colors) {
    labs.push_back(xyz_to_lab(c, white));
    avg.L += labs.back().L;
    avg.a += labs.back().a;
    avg.b += labs.back().b;
  }
  const double n = static_cast<double>(labs.size());
  avg.L /= n;
  avg.a /= n;
  avg.b /= n;
  for (const auto& lab : labs) out.push_back(delta_e76(lab, avg));
}

}  // namespace

std::vector<PanelDataset> group_by_panel(std::span<const MeasurementRecord> records) {
  std::map<std::string, PanelDataset> panels;
  for (const auto& rec : records) {
    auto& ds = panels[rec.panel_id];
    ds.panel_id = rec.panel_id;
    ds.groups[{rec.color_id, rec.brightness}].push_back(rec);
  }
  std::vector<PanelDataset> out;
  out.reserve(panels.size());
  for (auto& [id, ds] : panels) {
    for (auto& [key, group] : ds.groups) {
      std::sort(group.begin(), group.end(),
                [](const MeasurementRecord& a, const MeasurementRecord& b) {
                  return a.repeat_index < b.repeat_index;
                });
    }
    out.push_back(std::move(ds));
  }
  return out;
}

std::vector<Tristimulus> xyz_of(std::span<const MeasurementRecord> records) {
  std::vector<Tristimulus> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.xyz);
  return out;
}

DirectionalStd GroupStd::ToDirectionalStd() const {
  DirectionalStd d;
  d.sigma_v1 = sigma[DirectionIndex(Direction::kV1)];
  d.sigma_v2 = sigma[DirectionIndex(Direction::kV2)];
  d.sigma_v3 = sigma[DirectionIndex(Direction::kV3)];
  d.sum_xyz = sum_xyz;
  d.color_id = key.color_id;
  d.panel_id = panel_id;
  d.brightness = key.brightness;
  d.sample_count = sample_count;
  return d;
}

std::vector<GroupStd> within_panel_stds(const PanelDataset& dataset) {
  std::vector<GroupStd> out;
  for (const auto& [key, group] : dataset.groups) {
    if (group.size() < 2) continue;
    const std::vector<Tristimulus> samples = xyz_of(group);
    const Tristimulus mean = sample_mean(samples);
    if (!(mean.Sum() > 0.0)) continue;
    const DirectionBasis basis = direction_basis(mean);
    GroupStd g;
    g.key = key;
    g.panel_id = dataset.panel_id;
    g.sum_xyz = mean.Sum();
    g.sample_count = samples.size();
    for (std::size_t i = 0; i < kAllDirections.size(); ++i) {
      g.sigma[i] = directional_std(samples, UnitVector(kAllDirections[i], basis));
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<DirectionalStd> within_panel_directional_stds(
    std::span<const PanelDataset> datasets) {
  std::vector<DirectionalStd> out;
  for (const auto& ds : datasets) {
    for (const auto& g : within_panel_stds(ds)) out.push_back(g.ToDirectionalStd());
  }
  return out;
}

double KTable::Mean(Direction d) const {
  const auto it = std::find(directions.begin(), directions.end(), d);
  if (it == directions.end()) throw ValidationError("direction not in table");
  return mean[static_cast<std::size_t>(it - directions.begin())];
}

KTable panel_k_table(std::span<const PanelDataset> datasets) {
  if (datasets.empty()) throw ValidationError("panel_k_table needs at least one panel");
  KTable table;
  table.directions.assign(kAllDirections.begin(), kAllDirections.end());
  table.k_x1000.assign(kAllDirections.size(), {});
  std::vector<std::string> offenders;
  for (const auto& ds : datasets) {
    const std::vector<GroupStd> stds = within_panel_stds(ds);
    if (stds.empty()) {
      for (const auto& [key, group] : ds.groups) {
        offenders.push_back(ds.panel_id + "/" + DescribeKey(key) + " (" +
                            std::to_string(group.size()) + " repeat)");
      }
      continue;
    }
    table.panel_ids.push_back(ds.panel_id);
    for (std::size_t i = 0; i < kAllDirections.size(); ++i) {
      std::vector<KPoint> points;
      points.reserve(stds.size());
      for (const auto& g : stds) points.push_back({g.sum_xyz, g.sigma[i]});
      table.k_x1000[i].push_back(1000.0 * fit_k(points, kAllDirections[i]).k);
    }
  }
  if (!offenders.empty()) {
    std::ostringstream os;
    os << "insufficient repeats (need >= 2 for at least one color per panel):";
    for (const auto& o : offenders) os << " " << o;
    throw ValidationError(os.str());
  }
  for (const auto& row : table.k_x1000) {
    const double n = static_cast<double>(row.size());
    const double mu = std::accumulate(row.begin(), row.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : row) ss += (v - mu) * (v - mu);
    table.mean.push_back(mu);
    table.stddev.push_back(row.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0);
  }
  return table;
}

BetweenPanelStds between_panel_std(std::span<const MeasurementRecord> records) {
  BetweenPanelStds out;
  const auto groups = FirstRepeatPerPanel(records, &out.dropped_repeats);
  if (groups.empty()) throw ValidationError("between_panel_std of an empty record set");
  std::vector<std::string> offenders;
  for (const auto& [key, recs] : groups) {
    if (recs.size() < 2) {
      offenders.push_back(DescribeKey(key));
      continue;
    }
    std::vector<Tristimulus> samples;
    samples.reserve(recs.size());
    for (const auto* r : recs) samples.push_back(r->xyz);
    DirectionalStd d = directional_stds(samples, key.color_id);
    d.brightness = key.brightness;
    out.stds.push_back(std::move(d));
  }
  if (!offenders.empty()) {
    std::ostringstream os;
    os << "between-panel statistics need >= 2 panels per color; too few for:";
    for (const auto& o : offenders) os << " " << o;
    throw ValidationError(os.str());
  }
  return out;
}

std::vector<std::string> flag_excess_perpendicular(std::span<const DirectionalStd> stds,
                                                   const NoiseModel& model, double factor) {
  std::vector<std::string> flagged;
  for (const auto& d : stds) {
    const double predicted = model.a() * d.sum_xyz;
    if (std::max(d.sigma_v2, d.sigma_v3) > factor * predicted) {
      if (std::find(flagged.begin(), flagged.end(), d.color_id) == flagged.end()) {
        flagged.push_back(d.color_id);
      }
    }
  }
  return flagged;
}

TimeSeries time_series(const PanelDataset& dataset, const std::string& color_id,
                       double brightness, double alpha) {
  const auto it = dataset.groups.find({color_id, brightness});
  if (it == dataset.groups.end()) {
    throw ValidationError("panel '" + dataset.panel_id + "' has no records for " +
                          DescribeKey({color_id, brightness}));
  }
  TimeSeries ts;
  for (const auto& rec : it->second) {
    if (!rec.timestamp) {
      throw ValidationError("time series for " + DescribeKey(it->first) +
                            " on panel '" + dataset.panel_id + "' has missing timestamps");
    }
    ts.points.emplace_back(*rec.timestamp, rec.xyz.Sum());
  }
  std::sort(ts.points.begin(), ts.points.end());
  const std::size_t n = ts.points.size();
  if (n < 2) return ts;

  double mt = 0.0, ms = 0.0;
  for (const auto& [t, s] : ts.points) {
    mt += t;
    ms += s;
  }
  mt /= static_cast<double>(n);
  ms /= static_cast<double>(n);
  double stt = 0.0, sts = 0.0;
  for (const auto& [t, s] : ts.points) {
    stt += (t - mt) * (t - mt);
    sts += (t - mt) * (s - ms);
  }
  if (!(stt > 0.0)) throw ValidationError("time series timestamps are all equal");
  ts.slope = sts / stt;
  ts.intercept = ms - ts.slope * mt;
  if (n < 3) return ts;

  double rss = 0.0;
  for (const auto& [t, s] : ts.points) {
    const double e = s - (ts.intercept + ts.slope * t);
    rss += e * e;
  }
  const double dof = static_cast<double>(n - 2);
  ts.slope_stderr = std::sqrt(rss / dof / stt);
  const double scale = std::max(std::abs(ms), 1.0);
  if (ts.slope_stderr <= 1e-14 * scale) {
    // Exact line: significant iff it actually moves.
    ts.p_value = std::abs(ts.slope) * std::sqrt(stt) > 1e-12 * scale ? 0.0 : 1.0;
  } else {
    const boost::math::students_t dist(dof);
    const double t = std::abs(ts.slope / ts.slope_stderr);
    ts.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
  }
  ts.significant = ts.p_value < alpha;
  return ts;
}

std::string_view to_string(DeltaEGrouping g) {
  switch (g) {
    case DeltaEGrouping::kWithinRegion: return "within_region";
    case DeltaEGrouping::kBetweenPanels: return "between_panels";
    case DeltaEGrouping::kExternalBetweenRegions: return "external_between_regions";
  }
  return "?";
}

DeltaEGrouping delta_e_grouping_from_string(std::string_view s) {
  if (s == "within_region") return DeltaEGrouping::kWithinRegion;
  if (s == "between_panels") return DeltaEGrouping::kBetweenPanels;
  if (s == "external_between_regions") return DeltaEGrouping::kExternalBetweenRegions;
  throw ValidationError("unknown delta E grouping '" + std::string(s) + "'");
}

DeltaEHistogram histogram_of(std::span<const double> values, DeltaEGrouping grouping,
                             const HistogramBins& bins) {
  if (!(bins.width > 0.0) || !(bins.max > 0.0)) {
    throw ValidationError("histogram bins need positive width and range");
  }
  const auto n_bins = static_cast<std::size_t>(std::llround(bins.max / bins.width));
  if (n_bins == 0) throw ValidationError("histogram range is narrower than one bin");
  DeltaEHistogram h;
  h.grouping = grouping;
  for (std::size_t i = 0; i <= n_bins; ++i) h.edges.push_back(bins.width * static_cast<double>(i));
  h.counts.assign(n_bins + 1, 0);
  double total = 0.0;
  for (double v : values) {
    const auto bin = v >= h.edges.back() ? n_bins
                                         : static_cast<std::size_t>(std::floor(v / bins.width));
    ++h.counts[std::min(bin, n_bins)];
    total += v;
  }
  h.sample_count = values.size();
  h.mean = values.empty() ? 0.0 : total / static_cast<double>(values.size());
  return h;
}

std::vector<double> delta_e_values(std::span<const MeasurementRecord> records,
                                   DeltaEGrouping grouping, const Tristimulus& white,
                                   std::span<const std::string> colors) {
  std::vector<double> out;
  switch (grouping) {
    case DeltaEGrouping::kWithinRegion:
      for (const auto& ds : group_by_panel(records)) {
        for (const auto& [key, group] : ds.groups) {
          if (group.size() < 2 || !Selected(colors, key.color_id)) continue;
          AppendDeltaE(xyz_of(group), white, out);
        }
      }
      break;
    case DeltaEGrouping::kBetweenPanels:
      for (const auto& [key, recs] : FirstRepeatPerPanel(records, nullptr)) {
        if (recs.size() < 2 || !Selected(colors, key.color_id)) continue;
        std::vector<Tristimulus> samples;
        for (const auto* r : recs) samples.push_back(r->xyz);
        AppendDeltaE(samples, white, out);
      }
      break;
    case DeltaEGrouping::kExternalBetweenRegions:
      throw ValidationError(
          "external between-regions histograms are read from file, not computed");
  }
  if (out.empty()) {
    throw ValidationError(std::string("no ") + std::string(to_string(grouping)) +
                          " groups with at least 2 measurements");
  }
  return out;
}

DeltaEHistogram delta_e_histogram(std::span<const MeasurementRecord> records,
                                  DeltaEGrouping grouping, const Tristimulus& white,
                                  const HistogramBins& bins,
                                  std::span<const std::string> colors) {
  const std::vector<double> values = delta_e_values(records, grouping, white, colors);
  return histogram_of(values, grouping, bins);
}

Tristimulus default_reference_white(std::span<const MeasurementRecord> records) {
  if (records.empty()) throw ValidationError("cannot derive a reference white from no records");
  std::map<GroupKey, std::pair<Vec3, std::size_t>> sums;
  for (const auto& r : records) {
    auto& [acc, n] = sums[{r.color_id, r.brightness}];
    if (n == 0) acc.setZero();
    acc += r.xyz.vec();
    ++n;
  }
  const std::pair<Vec3, std::size_t>* best = nullptr;
  double best_brightness = -1.0;
  for (const auto& [key, value] : sums) {
    if (key.color_id == "white" && key.brightness > best_brightness) {
      best = &value;
      best_brightness = key.brightness;
    }
  }
  if (best == nullptr) {
    double best_y = -1.0;
    for (const auto& [key, value] : sums) {
      const double y = value.first[1] / static_cast<double>(value.second);
      if (y > best_y) {
        best = &value;
        best_y = y;
      }
    }
  }
  const Tristimulus white =
      Tristimulus::FromVector(best->first / static_cast<double>(best->second));
  if (!(white.X() > 0.0 && white.Y() > 0.0 && white.Z() > 0.0)) {
    throw ValidationError("derived reference white is not strictly positive");
  }
  return white;
}

PcaSummary pca_summary(std::span<const PanelDataset> datasets) {
  PcaSummary out;
  for (const auto& ds : datasets) {
    for (const auto& [key, group] : ds.groups) {
      if (group.size() < 3) continue;
      const std::vector<Tristimulus> samples = xyz_of(group);
      PrincipalAxis pa;
      try {
        pa = principal_axis(samples);
      } catch (const NumericalError&) {
        continue;  // zero variance
      }
      out.angles_to_v1_deg.push_back(pa.angle_to_v1_deg);
      const double cy = std::clamp(std::abs(pa.axis.y()), 0.0, 1.0);
      out.angles_to_y_deg.push_back(std::acos(cy) * 180.0 / std::numbers::pi);
    }
  }
  if (out.angles_to_v1_deg.empty()) {
    throw ValidationError("PCA summary needs a group with >= 3 non-identical repeats");
  }
  const double n = static_cast<double>(out.angles_to_v1_deg.size());
  out.mean_angle_to_v1 =
      std::accumulate(out.angles_to_v1_deg.begin(), out.angles_to_v1_deg.end(), 0.0) / n;
  out.mean_angle_to_y =
      std::accumulate(out.angles_to_y_deg.begin(), out.angles_to_y_deg.end(), 0.0) / n;
  return out;
}

std::vector<MeasurementPair> pairs_between(const PanelDataset& source,
                                           const PanelDataset& reference,
                                           std::span<const std::string> colors,
                                           double brightness) {
  auto mean_of = [brightness](const PanelDataset& ds, const std::string& color) {
    const auto it = ds.groups.find({color, brightness});
    if (it == ds.groups.end() || it->second.empty()) {
      throw ValidationError("panel '" + ds.panel_id + "' has no measurement of " +
                            DescribeKey({color, brightness}));
    }
    return sample_mean(xyz_of(it->second));
  };
  std::vector<MeasurementPair> out;
  out.reserve(colors.size());
  for (const auto& color : colors) {
    out.push_back({mean_of(source, color), mean_of(reference, color), color});
  }
  return out;
}

WeightingComparison compare_weightings(std::span<const PanelDataset> datasets,
                                       const std::string& source_panel,
                                       std::span<const std::string> fit_colors,
                                       std::span<const std::string> holdout_colors,
                                       const NoiseModel& model, double brightness) {
  const auto src = std::find_if(datasets.begin(), datasets.end(),
                                [&](const PanelDataset& d) { return d.panel_id == source_panel; });
  if (src == datasets.end()) {
    throw ValidationError("unknown source panel '" + source_panel + "'");
  }
  if (datasets.size() < 2) throw ValidationError("weighting comparison needs >= 2 panels");
  WeightingComparison out;
  for (const auto& ref : datasets) {
    if (ref.panel_id == source_panel) continue;
    const auto fit = pairs_between(*src, ref, fit_colors, brightness);
    const auto hold = pairs_between(*src, ref, holdout_colors, brightness);
    DevicePairResult r;
    r.source_panel = source_panel;
    r.reference_panel = ref.panel_id;
    r.proposed = evaluate(fit_matrix(fit, model, Weighting::kProposed), hold);
    r.uniform = evaluate(fit_matrix(fit, model, Weighting::kUniform), hold);
    if (r.ProposedWins()) ++out.proposed_wins;
    out.pairs.push_back(std::move(r));
  }
  return out;
}

}  // namespace tristat
