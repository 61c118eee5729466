#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "tristat/analysis.hpp"
#include "tristat/calibration.hpp"
#include "tristat/error.hpp"
#include "tristat/io.hpp"
#include "tristat/report.hpp"
#include "tristat/scenario.hpp"
#include "tristat/simulator.hpp"

namespace tristat::cli {
namespace {

namespace fs = std::filesystem;

struct ScenarioFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> panels;
  std::optional<std::size_t> repeats;
  std::optional<std::size_t> colors;
  std::vector<double> brightness;

  void Register(CLI::App* cmd) {
    cmd->add_option("--config", config, "Scenario JSON file");
    cmd->add_option("--seed", seed, "Master RNG seed (overrides config)");
    cmd->add_option("--panels", panels, "Number of simulated panels");
    cmd->add_option("--repeats", repeats, "Repeats per color and brightness");
    cmd->add_option("--colors", colors, "Number of palette colors");
    cmd->add_option("--brightness", brightness, "Brightness levels in (0,1]")->delimiter(',');
  }

  ScenarioConfig Resolve() const {
    ScenarioConfig c = config.empty() ? default_scenario() : load_scenario(config);
    if (seed) c.campaign.seed = *seed;
    if (panels) c.campaign.n_panels = *panels;
    if (repeats) c.campaign.repeats_per_color = *repeats;
    if (colors) c.campaign.colors = standard_palette(*colors);
    if (!brightness.empty()) {
      c.campaign.brightness_levels = brightness;
      c.calibration_brightness = *std::max_element(brightness.begin(), brightness.end());
    }
    c.Validate();
    return c;
  }
};

struct CalibrationFlags {
  std::string model;
  std::vector<std::string> fit_colors{"red", "green", "blue", "white"};
  std::vector<std::string> holdout_colors{"cyan", "magenta", "yellow"};
  double brightness = 1.0;

  void Register(CLI::App* cmd, bool with_holdout) {
    cmd->add_option("--model", model,
                    "Noise model file (default: between-panel preset; only the ratio matters)");
    cmd->add_option("--fit-colors", fit_colors, "Colors used for fitting")
        ->delimiter(',')
        ->capture_default_str();
    if (with_holdout) {
      cmd->add_option("--holdout-colors", holdout_colors, "Colors used for evaluation")
          ->delimiter(',')
          ->capture_default_str();
    }
    cmd->add_option("--brightness", brightness, "Brightness level of the calibration colors")
        ->capture_default_str();
  }

  NoiseModel Model() const {
    return model.empty() ? NoiseModel::BetweenPanel() : read_noise_model(model);
  }
};

Tristimulus ParseWhite(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double d = 0.0;
    if (!parse_double(item, d)) throw ValidationError("--white expects X,Y,Z");
    v.push_back(d);
  }
  if (v.size() != 3) throw ValidationError("--white expects X,Y,Z");
  return Tristimulus(v[0], v[1], v[2]);
}

void WriteArtifacts(const fs::path& dir, const std::vector<Artifact>& files) {
  fs::create_directories(dir);
  for (const auto& f : files) atomic_write(dir / f.name, f.content);
}

const PanelDataset& FindPanel(const std::vector<PanelDataset>& datasets, const std::string& id) {
  for (const auto& d : datasets) {
    if (d.panel_id == id) return d;
  }
  throw ValidationError("no panel '" + id + "' in the measurements");
}

void PrintComparison(std::ostream& out, const WeightingComparison& cmp) {
  out << std::left << std::setw(12) << "reference" << std::setw(14) << "proposed"
      << std::setw(14) << "uniform" << "winner\n";
  out << std::fixed << std::setprecision(5);
  for (const auto& p : cmp.pairs) {
    out << std::setw(12) << p.reference_panel << std::setw(14) << p.proposed.mean_error
        << std::setw(14) << p.uniform.mean_error << (p.ProposedWins() ? "proposed" : "uniform")
        << "\n";
  }
  out << "proposed weighting wins " << cmp.proposed_wins << " of " << cmp.pairs.size()
      << " device pairs\n";
  out.unsetf(std::ios::fixed);
}

int Dispatch(CLI::App& app, std::ostream& out, std::ostream& err, int argc,
             const char* const* argv) {
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");
  app.footer(
      "Exit codes: 0 ok, 2 parse error, 3 validation error, 4 numerical error, 1 other.");

  // simulate
  ScenarioFlags sim_flags;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "Simulate a measurement campaign to CSV");
  sim_flags.Register(simulate);
  simulate->add_option("--out", sim_out, "Output measurement CSV")->required();

  // fit-noise
  std::string fit_in, fit_out, fit_mode = "within";
  auto* fit_noise = app.add_subcommand("fit-noise", "Fit (a, ratio) from measurements");
  fit_noise->add_option("--in", fit_in, "Measurement CSV")->required();
  fit_noise->add_option("--out", fit_out, "Output noise model file")->required();
  fit_noise->add_option("--mode", fit_mode, "within (repeats) or between (across panels)")
      ->check(CLI::IsMember({"within", "between"}))
      ->capture_default_str();

  // analyze
  std::string an_in, an_dir, an_white, an_config, an_external;
  bool an_no_svg = false;
  auto* analyze = app.add_subcommand("analyze", "Tables, histograms and plots from measurements");
  analyze->add_option("--in", an_in, "Measurement CSV")->required();
  analyze->add_option("--out-dir", an_dir, "Directory for CSV/SVG outputs")->required();
  analyze->add_option("--config", an_config, "Scenario JSON (report options)");
  analyze->add_option("--white", an_white, "Reference white X,Y,Z for L*a*b*");
  analyze->add_option("--external-histogram", an_external,
                      "Between-regions delta E histogram CSV to co-plot");
  analyze->add_flag("--no-svg", an_no_svg, "Skip SVG plots");

  // calibrate
  std::string cal_in, cal_out, cal_source, cal_reference, cal_weighting = "proposed";
  CalibrationFlags cal_flags;
  auto* calibrate = app.add_subcommand("calibrate", "Fit a 3x3 matrix from source to reference");
  calibrate->add_option("--in", cal_in, "Measurement CSV")->required();
  calibrate->add_option("--source", cal_source, "Panel to be calibrated")->required();
  calibrate->add_option("--reference", cal_reference, "Reference panel")->required();
  calibrate->add_option("--weighting", cal_weighting, "proposed or uniform")
      ->check(CLI::IsMember({"proposed", "uniform"}))
      ->capture_default_str();
  calibrate->add_option("--out", cal_out, "Output matrix file")->required();
  cal_flags.Register(calibrate, false);

  // evaluate
  std::string ev_in, ev_out, ev_source, ev_reference, ev_matrix;
  CalibrationFlags ev_flags;
  auto* evaluate_cmd =
      app.add_subcommand("evaluate", "Holdout errors, proposed vs uniform weighting");
  evaluate_cmd->add_option("--in", ev_in, "Measurement CSV")->required();
  evaluate_cmd->add_option("--source", ev_source, "Panel to be calibrated (default: first)");
  evaluate_cmd->add_option("--reference", ev_reference, "Reference panel (with --matrix)");
  evaluate_cmd->add_option("--matrix", ev_matrix, "Evaluate this matrix file instead of fitting");
  evaluate_cmd->add_option("--out", ev_out, "Write per-color errors as CSV");
  ev_flags.Register(evaluate_cmd, true);

  // report
  ScenarioFlags rep_flags;
  std::string rep_in, rep_dir;
  auto* report = app.add_subcommand("report", "Run the full pipeline and write a report");
  rep_flags.Register(report);
  report->add_option("--in", rep_in, "Use these measurements instead of simulating");
  report->add_option("--out-dir", rep_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParseFailure;
  }

  if (*simulate) {
    const ScenarioConfig config = sim_flags.Resolve();
    const Campaign campaign = run_campaign(config.campaign);
    write_measurements(sim_out, campaign.records);
    out << "wrote " << campaign.records.size() << " records (" << config.campaign.n_panels
        << " panels, seed " << config.campaign.seed << ") to " << sim_out << "\n";
    if (campaign.clamped_components > 0) {
      err << "warning: clamped " << campaign.clamped_components
          << " negative XYZ components to zero\n";
    }
    return kOk;
  }

  if (*fit_noise) {
    const auto records = read_measurements(fit_in);
    NoiseModel model = NoiseModel::WithinPanel();
    if (fit_mode == "within") {
      model = fit_noise_model(within_panel_directional_stds(group_by_panel(records)));
    } else {
      const BetweenPanelStds b = between_panel_std(records);
      if (b.dropped_repeats) err << "note: using the first repeat of each panel only\n";
      model = fit_noise_model(b.stds);
    }
    write_noise_model(fit_out, model);
    out << "a = " << format_double(model.a()) << ", ratio = " << format_double(model.ratio())
        << " -> " << fit_out << "\n";
    return kOk;
  }

  if (*analyze) {
    const auto records = read_measurements(an_in);
    ReportOptions options = an_config.empty() ? ReportOptions{} : load_scenario(an_config).report;
    if (an_no_svg) options.svg = false;
    if (!an_external.empty()) options.external_histogram = an_external;
    std::optional<Tristimulus> white;
    if (!an_white.empty()) white = ParseWhite(an_white);
    const AnalysisOutput result = analyze_records(records, options, white);
    WriteArtifacts(an_dir, result.files);
    for (const auto& f : result.files) out << "wrote " << (fs::path(an_dir) / f.name).string() << "\n";
    for (const auto& n : result.notes) err << "note: " << n << "\n";
    return kOk;
  }

  if (*calibrate) {
    const auto datasets = group_by_panel(read_measurements(cal_in));
    const auto pairs = pairs_between(FindPanel(datasets, cal_source),
                                     FindPanel(datasets, cal_reference), cal_flags.fit_colors,
                                     cal_flags.brightness);
    const CalibrationMatrix calib =
        fit_matrix(pairs, cal_flags.Model(), weighting_from_string(cal_weighting));
    write_calibration(cal_out, calib);
    out << "fitted " << to_string(calib.weighting) << " matrix from " << calib.fit_pairs
        << " pairs (condition number " << format_double(calib.condition_number) << ") -> "
        << cal_out << "\n";
    return kOk;
  }

  if (*evaluate_cmd) {
    const auto datasets = group_by_panel(read_measurements(ev_in));
    if (datasets.empty()) throw ValidationError("no measurements");
    const std::string source = ev_source.empty() ? datasets.front().panel_id : ev_source;
    if (!ev_matrix.empty()) {
      if (ev_reference.empty()) throw ValidationError("--matrix needs --reference");
      const CalibrationMatrix calib = read_calibration(ev_matrix);
      const auto hold = pairs_between(FindPanel(datasets, source), FindPanel(datasets, ev_reference),
                                      ev_flags.holdout_colors, ev_flags.brightness);
      const Evaluation e = evaluate(calib, hold);
      std::ostringstream csv;
      csv << "color_id,error\n";
      for (const auto& p : e.per_pair) {
        out << p.color_id << ": " << format_double(p.error) << "\n";
        csv << p.color_id << ',' << format_double(p.error) << '\n';
      }
      out << "mean: " << format_double(e.mean_error) << "\n";
      if (!ev_out.empty()) atomic_write(ev_out, csv.str());
      return kOk;
    }
    const WeightingComparison cmp =
        compare_weightings(datasets, source, ev_flags.fit_colors, ev_flags.holdout_colors,
                           ev_flags.Model(), ev_flags.brightness);
    PrintComparison(out, cmp);
    if (!ev_out.empty()) atomic_write(ev_out, comparison_csv(cmp));
    return kOk;
  }

  if (*report) {
    const ScenarioConfig config = rep_flags.Resolve();
    std::vector<MeasurementRecord> records;
    std::size_t clamped = 0;
    if (rep_in.empty()) {
      Campaign campaign = run_campaign(config.campaign);
      records = std::move(campaign.records);
      clamped = campaign.clamped_components;
    } else {
      records = read_measurements(rep_in);
    }
    AnalysisOutput analysis = analyze_records(records, config.report);
    const auto datasets = group_by_panel(records);
    std::optional<WeightingComparison> cmp;
    if (datasets.size() >= 2) {
      const std::string source =
          config.source_panel.empty() ? datasets.front().panel_id : config.source_panel;
      try {
        cmp = compare_weightings(datasets, source, config.fit_colors, config.holdout_colors,
                                 config.campaign.between_panel, config.calibration_brightness);
        analysis.files.push_back({"calibration_comparison.csv", comparison_csv(*cmp)});
      } catch (const ValidationError& e) {
        analysis.notes.push_back(std::string("calibration comparison skipped: ") + e.what());
      }
    }
    if (rep_in.empty()) {
      analysis.files.push_back({"measurements.csv", format_measurements(records)});
    }
    analysis.files.push_back({"scenario.json", scenario_to_json(config) + "\n"});
    analysis.files.push_back(
        {"report.md", render_report(config, analysis, cmp ? &*cmp : nullptr, clamped)});
    WriteArtifacts(rep_dir, analysis.files);
    out << "wrote report to " << (fs::path(rep_dir) / "report.md").string() << " (config hash "
        << config_hash(config) << ")\n";
    return kOk;
  }
  return kFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  CLI::App app{"tristat: tristimulus noise modeling and weighted display calibration"};
  app.name("tristat");
  try {
    return Dispatch(app, out, err, static_cast<int>(argv.size()), argv.data());
  } catch (const ParseError& e) {
    err << "error[parse]: " << e.what() << "\n";
    return kParseFailure;
  } catch (const ValidationError& e) {
    err << "error[validation]: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const NumericalError& e) {
    err << "error[numerical]: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error[internal]: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace tristat::cli
