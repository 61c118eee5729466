#include "tristat/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "tristat/error.hpp"
#include "tristat/io.hpp"

namespace tristat {
namespace {

constexpr std::array<const char*, 6> kDirectionColors = {"#d62728", "#2ca02c", "#1f77b4",
                                                         "#000000", "#ff7f0e", "#9467bd"};

std::string Fixed(double v, int digits) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::string EscapeXml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Std-vs-(X+Y+Z) scatter per direction with the fitted k lines.
std::string StdCurvePlot(const std::string& title, std::span<const DirectionalStd> stds) {
  std::vector<PlotSeries> series;
  double max_sum = 0.0;
  for (const auto& d : stds) max_sum = std::max(max_sum, d.sum_xyz);
  const std::array<Direction, 3> dirs = {Direction::kV1, Direction::kV2, Direction::kV3};
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    PlotSeries pts{std::string(to_string(dirs[i])), kDirectionColors[3 + i], {}, false};
    for (const auto& d : stds) pts.points.emplace_back(d.sum_xyz, d.Sigma(dirs[i]));
    const double k = fit_k(stds, dirs[i]).k;
    PlotSeries fit{"k " + std::string(to_string(dirs[i])), kDirectionColors[3 + i],
                   {{0.0, 0.0}, {max_sum, k * max_sum}}, true};
    series.push_back(std::move(pts));
    series.push_back(std::move(fit));
  }
  return render_svg(title, "X+Y+Z", "standard deviation", series);
}

std::string HistogramPlot(const std::vector<std::pair<std::string, const DeltaEHistogram*>>& hists) {
  std::vector<PlotSeries> series;
  const std::array<const char*, 3> colors = {"#1f77b4", "#ff7f0e", "#2ca02c"};
  std::size_t i = 0;
  for (const auto& [label, h] : hists) {
    PlotSeries s{label, colors[i++ % colors.size()], {}, true};
    const double total = std::max<double>(1.0, static_cast<double>(h->sample_count));
    for (std::size_t b = 0; b + 1 < h->edges.size() && b < h->counts.size(); ++b) {
      const double f = static_cast<double>(h->counts[b]) / total;
      s.points.emplace_back(h->edges[b], f);
      s.points.emplace_back(h->edges[b + 1], f);
    }
    series.push_back(std::move(s));
  }
  return render_svg("Delta E histograms", "delta E (CIE76)", "fraction", series);
}

}  // namespace

std::string k_table_csv(const KTable& table) {
  std::ostringstream os;
  os << "direction";
  for (const auto& id : table.panel_ids) os << ',' << id;
  os << ",mean,std\n";
  for (std::size_t d = 0; d < table.directions.size(); ++d) {
    os << to_string(table.directions[d]);
    for (double v : table.k_x1000[d]) os << ',' << format_double(v);
    os << ',' << format_double(table.mean[d]) << ',' << format_double(table.stddev[d]) << '\n';
  }
  return os.str();
}

std::string group_stds_csv(std::span<const GroupStd> stds) {
  std::ostringstream os;
  os << "panel_id,color_id,brightness,n,sum_xyz,sigma_X,sigma_Y,sigma_Z,sigma_v1,sigma_v2,sigma_v3\n";
  for (const auto& g : stds) {
    os << g.panel_id << ',' << g.key.color_id << ',' << format_double(g.key.brightness) << ','
       << g.sample_count << ',' << format_double(g.sum_xyz);
    for (double s : g.sigma) os << ',' << format_double(s);
    os << '\n';
  }
  return os.str();
}

std::string directional_stds_csv(std::span<const DirectionalStd> stds) {
  std::ostringstream os;
  os << "color_id,brightness,n,sum_xyz,sigma_v1,sigma_v2,sigma_v3\n";
  for (const auto& d : stds) {
    os << d.color_id << ',' << format_double(d.brightness) << ',' << d.sample_count << ','
       << format_double(d.sum_xyz) << ',' << format_double(d.sigma_v1) << ','
       << format_double(d.sigma_v2) << ',' << format_double(d.sigma_v3) << '\n';
  }
  return os.str();
}

std::string pca_csv(const PcaSummary& pca) {
  std::ostringstream os;
  os << "group,angle_to_v1_deg,angle_to_y_deg\n";
  for (std::size_t i = 0; i < pca.angles_to_v1_deg.size(); ++i) {
    os << i << ',' << format_double(pca.angles_to_v1_deg[i]) << ','
       << format_double(pca.angles_to_y_deg[i]) << '\n';
  }
  return os.str();
}

std::string comparison_csv(const WeightingComparison& cmp) {
  std::ostringstream os;
  os << "source_panel,reference_panel,color_id,proposed_error,uniform_error\n";
  for (const auto& p : cmp.pairs) {
    for (std::size_t i = 0; i < p.proposed.per_pair.size(); ++i) {
      os << p.source_panel << ',' << p.reference_panel << ',' << p.proposed.per_pair[i].color_id
         << ',' << format_double(p.proposed.per_pair[i].error) << ','
         << format_double(p.uniform.per_pair[i].error) << '\n';
    }
    os << p.source_panel << ',' << p.reference_panel << ",mean,"
       << format_double(p.proposed.mean_error) << ',' << format_double(p.uniform.mean_error)
       << '\n';
  }
  return os.str();
}

std::string render_svg(const std::string& title, const std::string& x_label,
                       const std::string& y_label, std::span<const PlotSeries> series) {
  constexpr double kW = 640, kH = 420, kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  xmin = std::min(xmin, 0.0);
  ymin = std::min(ymin, 0.0);
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
     << EscapeXml(title) << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    os << "<text x=\"" << px(xv) << "\" y=\"" << kTop + ph + 15
       << "\" text-anchor=\"middle\">" << format_double(std::round(xv * 1e4) / 1e4) << "</text>\n";
    os << "<text x=\"" << kLeft - 5 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
       << format_double(std::round(yv * 1e6) / 1e6) << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 10 << "\" text-anchor=\"middle\">"
     << EscapeXml(x_label) << "</text>\n";
  os << "<text transform=\"translate(14," << kTop + ph / 2
     << ") rotate(-90)\" text-anchor=\"middle\">" << EscapeXml(y_label) << "</text>\n";

  double legend_y = kTop + 10;
  for (const auto& s : series) {
    if (s.line) {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" points=\"";
      for (const auto& [x, y] : s.points) os << px(x) << ',' << py(y) << ' ';
      os << "\"/>\n";
    } else {
      for (const auto& [x, y] : s.points) {
        os << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"2.5\" fill=\"" << s.color
           << "\"/>\n";
      }
    }
    os << "<rect x=\"" << kW - kRight + 10 << "\" y=\"" << legend_y - 8
       << "\" width=\"10\" height=\"10\" fill=\"" << s.color << "\"/>\n";
    os << "<text x=\"" << kW - kRight + 25 << "\" y=\"" << legend_y << "\">" << EscapeXml(s.label)
       << "</text>\n";
    legend_y += 16;
  }
  os << "</svg>\n";
  return os.str();
}

AnalysisOutput analyze_records(std::span<const MeasurementRecord> records,
                               const ReportOptions& options, std::optional<Tristimulus> white) {
  if (records.empty()) throw ValidationError("no measurement records to analyze");
  AnalysisOutput out;
  out.white = white ? *white : default_reference_white(records);
  const std::vector<PanelDataset> datasets = group_by_panel(records);

  // Within-panel noise.
  std::vector<GroupStd> group_stds;
  for (const auto& ds : datasets) {
    const auto s = within_panel_stds(ds);
    group_stds.insert(group_stds.end(), s.begin(), s.end());
  }
  if (!group_stds.empty()) {
    out.files.push_back({"within_stds.csv", group_stds_csv(group_stds)});
    try {
      out.k_table = panel_k_table(datasets);
      out.files.push_back({"k_table.csv", k_table_csv(*out.k_table)});
    } catch (const ValidationError& e) {
      out.notes.push_back(std::string("k table skipped: ") + e.what());
    }
    std::vector<DirectionalStd> points;
    for (const auto& g : group_stds) points.push_back(g.ToDirectionalStd());
    try {
      out.within_model = fit_noise_model(points);
    } catch (const Error& e) {
      out.notes.push_back(std::string("within-panel model fit failed: ") + e.what());
    }
    if (options.svg) {
      std::vector<DirectionalStd> first_panel;
      for (const auto& p : points) {
        if (p.panel_id == datasets.front().panel_id) first_panel.push_back(p);
      }
      out.files.push_back({"within_std_curves.svg",
                           StdCurvePlot("Within-panel std, panel " + datasets.front().panel_id,
                                        first_panel)});
    }
    try {
      out.pca = pca_summary(datasets);
      out.files.push_back({"pca_angles.csv", pca_csv(*out.pca)});
    } catch (const ValidationError& e) {
      out.notes.push_back(std::string("PCA skipped: ") + e.what());
    }
  } else {
    out.notes.push_back("no (panel, color) group has >= 2 repeats; within-panel statistics skipped");
  }

  // Between-panel noise.
  if (datasets.size() >= 2) {
    try {
      out.between = between_panel_std(records);
      if (out.between->dropped_repeats) {
        out.notes.push_back("between-panel statistics use the first repeat of each panel only");
      }
      out.files.push_back({"between_stds.csv", directional_stds_csv(out.between->stds)});
      out.between_model = fit_noise_model(out.between->stds);
      out.flagged_colors = flag_excess_perpendicular(out.between->stds, *out.between_model);
      if (options.svg) {
        out.files.push_back(
            {"between_std_curves.svg", StdCurvePlot("Between-panel std", out.between->stds)});
      }
    } catch (const Error& e) {
      out.notes.push_back(std::string("between-panel statistics skipped: ") + e.what());
    }
  } else {
    out.notes.push_back("single panel; between-panel statistics skipped");
  }

  // Trend check on the brightest white-like series of every panel.
  std::ostringstream ts_csv;
  ts_csv << "panel_id,color_id,brightness,timestamp,sum_xyz\n";
  std::ostringstream trend_csv;
  trend_csv << "panel_id,color_id,brightness,n,slope,slope_stderr,p_value,significant\n";
  std::vector<PlotSeries> ts_series;
  for (const auto& ds : datasets) {
    const GroupKey* key = nullptr;
    for (const auto& [k, g] : ds.groups) {
      if (k.color_id == "white" && (key == nullptr || k.brightness > key->brightness)) key = &k;
    }
    if (key == nullptr) continue;
    const auto& group = ds.groups.at(*key);
    if (group.size() < 3 ||
        std::any_of(group.begin(), group.end(), [](const auto& r) { return !r.timestamp; })) {
      continue;
    }
    const TimeSeries ts = time_series(ds, key->color_id, key->brightness);
    ++out.trend_series;
    if (ts.significant) ++out.significant_trends;
    for (const auto& [t, s] : ts.points) {
      ts_csv << ds.panel_id << ',' << key->color_id << ',' << format_double(key->brightness) << ','
             << format_double(t) << ',' << format_double(s) << '\n';
    }
    trend_csv << ds.panel_id << ',' << key->color_id << ',' << format_double(key->brightness)
              << ',' << ts.points.size() << ',' << format_double(ts.slope) << ','
              << format_double(ts.slope_stderr) << ',' << format_double(ts.p_value) << ','
              << (ts.significant ? 1 : 0) << '\n';
    // Time relative to the first measurement of the series.
    PlotSeries ps{ds.panel_id, kDirectionColors[ts_series.size() % kDirectionColors.size()], {},
                  true};
    for (const auto& [t, s] : ts.points) ps.points.emplace_back(t - ts.points.front().first, s);
    ts_series.push_back(std::move(ps));
  }
  if (out.trend_series > 0) {
    out.files.push_back({"time_series.csv", ts_csv.str()});
    out.files.push_back({"trends.csv", trend_csv.str()});
    if (options.svg) {
      out.files.push_back({"time_series.svg",
                           render_svg("X+Y+Z of white over time", "seconds since first measurement",
                                      "X+Y+Z", ts_series)});
    }
  }

  // Delta E.
  try {
    out.within_hist = delta_e_histogram(records, DeltaEGrouping::kWithinRegion, out.white,
                                        options.bins, options.delta_e_colors);
    out.files.push_back({"delta_e_within_region.csv", format_histogram(*out.within_hist)});
  } catch (const ValidationError& e) {
    out.notes.push_back(std::string("within-region delta E skipped: ") + e.what());
  }
  if (datasets.size() >= 2) {
    try {
      out.between_hist = delta_e_histogram(records, DeltaEGrouping::kBetweenPanels, out.white,
                                           options.bins, options.delta_e_colors);
      out.files.push_back({"delta_e_between_panels.csv", format_histogram(*out.between_hist)});
    } catch (const ValidationError& e) {
      out.notes.push_back(std::string("between-panel delta E skipped: ") + e.what());
    }
  }
  if (options.external_histogram) {
    out.external_hist =
        read_histogram(*options.external_histogram, DeltaEGrouping::kExternalBetweenRegions);
  }
  if (options.svg && (out.within_hist || out.between_hist || out.external_hist)) {
    std::vector<std::pair<std::string, const DeltaEHistogram*>> hists;
    if (out.within_hist) hists.emplace_back("one panel, one region", &*out.within_hist);
    if (out.external_hist) hists.emplace_back("regions (external)", &*out.external_hist);
    if (out.between_hist) hists.emplace_back("between panels", &*out.between_hist);
    out.files.push_back({"delta_e_histograms.svg", HistogramPlot(hists)});
  }
  return out;
}

std::string render_report(const ScenarioConfig& config, const AnalysisOutput& analysis,
                          const WeightingComparison* comparison, std::size_t clamped_components) {
  std::ostringstream os;
  os << "# tristat report\n\n";
  os << "- config hash: `" << config_hash(config) << "`\n";
  os << "- seed: " << config.campaign.seed << "\n";
  os << "- panels: " << config.campaign.n_panels << ", colors: " << config.campaign.colors.size()
     << ", repeats: " << config.campaign.repeats_per_color << "\n";
  os << "- clamped negative components: " << clamped_components << "\n";
  os << "- reference white (data-derived unless overridden): " << format_double(analysis.white.X())
     << ", " << format_double(analysis.white.Y()) << ", " << format_double(analysis.white.Z())
     << "\n\n";

  if (analysis.k_table) {
    const KTable& t = *analysis.k_table;
    os << "## Within-panel std factors (k x 1000)\n\n| direction | mean | std |\n|---|---|---|\n";
    for (std::size_t d = 0; d < t.directions.size(); ++d) {
      os << "| " << to_string(t.directions[d]) << " | " << Fixed(t.mean[d], 3) << " | "
         << Fixed(t.stddev[d], 3) << " |\n";
    }
    os << "\n";
  }
  auto model_line = [&os](const char* name, const NoiseModel& m) {
    os << "- " << name << ": a = " << format_double(m.a()) << " (1/" << Fixed(1.0 / m.a(), 1)
       << "), ratio = " << Fixed(m.ratio(), 3) << "\n";
  };
  os << "## Fitted noise models\n\n";
  model_line("configured within-panel", config.campaign.within_panel);
  model_line("configured between-panel", config.campaign.between_panel);
  if (analysis.within_model) model_line("fitted within-panel", *analysis.within_model);
  if (analysis.between_model) model_line("fitted between-panel", *analysis.between_model);
  if (analysis.within_model && analysis.between_model) {
    os << "- between/within k_v1 factor: "
       << Fixed(analysis.between_model->fits()[0].k / analysis.within_model->fits()[0].k, 3)
       << "\n";
  }
  if (!analysis.flagged_colors.empty()) {
    os << "- colors with perpendicular std above 2x model:";
    for (const auto& c : analysis.flagged_colors) os << " " << c;
    os << "\n";
  }
  os << "\n";
  if (analysis.pca) {
    os << "## Principal axis\n\n- mean angle to v1: " << Fixed(analysis.pca->mean_angle_to_v1, 2)
       << " deg\n- mean angle to Y: " << Fixed(analysis.pca->mean_angle_to_y, 2) << " deg\n\n";
  }
  if (analysis.trend_series > 0) {
    os << "## Trends\n\n- white series with a significant slope (5%): "
       << analysis.significant_trends << " of " << analysis.trend_series << "\n\n";
  }
  os << "## Delta E (CIE76)\n\n";
  if (analysis.within_hist) os << "- within region mean: " << Fixed(analysis.within_hist->mean, 3) << "\n";
  if (analysis.external_hist) {
    os << "- between regions (external) mean: " << Fixed(analysis.external_hist->mean, 3) << "\n";
  }
  if (analysis.between_hist) {
    os << "- between panels mean: " << Fixed(analysis.between_hist->mean, 3) << "\n";
  }
  os << "- just noticeable difference: 2.3\n\n";

  if (comparison != nullptr) {
    os << "## Calibration: proposed vs uniform weighting\n\n";
    os << "| reference | proposed | uniform |\n|---|---|---|\n";
    for (const auto& p : comparison->pairs) {
      os << "| " << p.reference_panel << " | " << Fixed(p.proposed.mean_error, 4) << " | "
         << Fixed(p.uniform.mean_error, 4) << " |\n";
    }
    os << "\nProposed weighting has the lower error in " << comparison->proposed_wins << " of "
       << comparison->pairs.size() << " device pairs.\n\n";
  }
  if (!analysis.notes.empty()) {
    os << "## Notes\n\n";
    for (const auto& n : analysis.notes) os << "- " << n << "\n";
  }
  return os.str();
}

}  // namespace tristat
