#include "tristat/scenario.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <set>

#include "tristat/error.hpp"
#include "tristat/io.hpp"

namespace tristat {
namespace {

using nlohmann::json;

void RejectUnknownKeys(const json& obj, std::initializer_list<std::string_view> allowed,
                       std::string_view where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ValidationError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <typename T>
T Get(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad value for '") + key + "': " + e.what());
  }
}

NoiseModel ModelFrom(const json& obj, const NoiseModel& fallback) {
  if (!obj.is_object()) throw ValidationError("model entry must be an object");
  RejectUnknownKeys(obj, {"a", "ratio"}, "model");
  return NoiseModel(Get(obj, "a", fallback.a()), Get(obj, "ratio", fallback.ratio()),
                    fallback.provenance());
}

std::vector<ColorSpec> ColorsFrom(const json& value) {
  if (value.is_number_integer()) {
    const auto n = value.get<long long>();
    if (n < 1) throw ValidationError("campaign.colors must be >= 1");
    return standard_palette(static_cast<std::size_t>(n));
  }
  if (!value.is_array()) {
    throw ValidationError("campaign.colors must be a count or a list");
  }
  const std::vector<ColorSpec> palette = standard_palette(kMaxPaletteSize);
  std::vector<ColorSpec> out;
  for (const auto& item : value) {
    if (item.is_string()) {
      out.push_back(find_color(palette, item.get<std::string>()));
    } else if (item.is_object()) {
      RejectUnknownKeys(item, {"id", "xyz"}, "color");
      const auto xyz = Get<std::vector<double>>(item, "xyz", {});
      if (xyz.size() != 3) throw ValidationError("color xyz must have 3 components");
      out.push_back({Get<std::string>(item, "id", ""), Tristimulus(xyz[0], xyz[1], xyz[2])});
      if (out.back().id.empty()) throw ValidationError("color entry without id");
    } else {
      throw ValidationError("color entries must be ids or {id, xyz} objects");
    }
  }
  return out;
}

json ToJson(const ScenarioConfig& c) {
  json colors = json::array();
  for (const auto& col : c.campaign.colors) {
    colors.push_back({{"id", col.id}, {"xyz", {col.xyz.X(), col.xyz.Y(), col.xyz.Z()}}});
  }
  json report = {{"bin_width", c.report.bins.width},
                 {"bin_max", c.report.bins.max},
                 {"delta_e_colors", c.report.delta_e_colors},
                 {"svg", c.report.svg}};
  report["external_histogram"] =
      c.report.external_histogram ? json(c.report.external_histogram->string()) : json(nullptr);
  return {
      {"seed", c.campaign.seed},
      {"campaign",
       {{"panels", c.campaign.n_panels},
        {"repeats", c.campaign.repeats_per_color},
        {"colors", colors},
        {"brightness", c.campaign.brightness_levels},
        {"measurement_interval_s", c.campaign.measurement_interval_s}}},
      {"models",
       {{"within", {{"a", c.campaign.within_panel.a()}, {"ratio", c.campaign.within_panel.ratio()}}},
        {"between",
         {{"a", c.campaign.between_panel.a()}, {"ratio", c.campaign.between_panel.ratio()}}}}},
      {"calibration",
       {{"fit_colors", c.fit_colors},
        {"holdout_colors", c.holdout_colors},
        {"source_panel", c.source_panel},
        {"brightness", c.calibration_brightness}}},
      {"report", report},
  };
}

}  // namespace

void ScenarioConfig::Validate() const {
  campaign.Validate();
  if (fit_colors.size() < 3) {
    throw ValidationError("calibration fit set needs >= 3 colors");
  }
  if (holdout_colors.empty()) throw ValidationError("calibration holdout set is empty");
  for (const auto* set : {&fit_colors, &holdout_colors}) {
    for (const auto& id : *set) find_color(campaign.colors, id);
  }
  if (std::find(campaign.brightness_levels.begin(), campaign.brightness_levels.end(),
                calibration_brightness) == campaign.brightness_levels.end()) {
    throw ValidationError("calibration brightness is not one of the campaign levels");
  }
  if (!(report.bins.width > 0.0) || !(report.bins.max > report.bins.width)) {
    throw ValidationError("report bins need 0 < bin_width < bin_max");
  }
}

ScenarioConfig default_scenario() {
  ScenarioConfig c;
  c.campaign.n_panels = 13;
  c.campaign.repeats_per_color = 12;
  c.campaign.colors = standard_palette(20);
  c.campaign.brightness_levels = {1.0};
  c.campaign.seed = 1;
  return c;
}

ScenarioConfig parse_scenario(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < json_text.size(); ++i) {
      if (json_text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(line, column, std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ValidationError("scenario must be a JSON object");
  RejectUnknownKeys(root, {"seed", "campaign", "models", "calibration", "report"}, "scenario");

  ScenarioConfig c = default_scenario();
  c.campaign.seed = Get<std::uint64_t>(root, "seed", c.campaign.seed);

  if (root.contains("campaign")) {
    const json& cam = root.at("campaign");
    RejectUnknownKeys(cam, {"panels", "repeats", "colors", "brightness", "measurement_interval_s"},
                      "campaign");
    c.campaign.n_panels = Get<std::size_t>(cam, "panels", c.campaign.n_panels);
    c.campaign.repeats_per_color = Get<std::size_t>(cam, "repeats", c.campaign.repeats_per_color);
    if (cam.contains("colors")) c.campaign.colors = ColorsFrom(cam.at("colors"));
    c.campaign.brightness_levels =
        Get<std::vector<double>>(cam, "brightness", c.campaign.brightness_levels);
    c.campaign.measurement_interval_s =
        Get<double>(cam, "measurement_interval_s", c.campaign.measurement_interval_s);
  }
  if (root.contains("models")) {
    const json& models = root.at("models");
    RejectUnknownKeys(models, {"within", "between"}, "models");
    if (models.contains("within")) {
      c.campaign.within_panel = ModelFrom(models.at("within"), c.campaign.within_panel);
    }
    if (models.contains("between")) {
      c.campaign.between_panel = ModelFrom(models.at("between"), c.campaign.between_panel);
    }
  }
  if (root.contains("calibration")) {
    const json& cal = root.at("calibration");
    RejectUnknownKeys(cal, {"fit_colors", "holdout_colors", "source_panel", "brightness"},
                      "calibration");
    c.fit_colors = Get(cal, "fit_colors", c.fit_colors);
    c.holdout_colors = Get(cal, "holdout_colors", c.holdout_colors);
    c.source_panel = Get(cal, "source_panel", c.source_panel);
    c.calibration_brightness = Get(cal, "brightness", c.calibration_brightness);
  }
  if (root.contains("report")) {
    const json& rep = root.at("report");
    RejectUnknownKeys(rep, {"bin_width", "bin_max", "delta_e_colors", "svg", "external_histogram"},
                      "report");
    c.report.bins.width = Get(rep, "bin_width", c.report.bins.width);
    c.report.bins.max = Get(rep, "bin_max", c.report.bins.max);
    c.report.delta_e_colors = Get(rep, "delta_e_colors", c.report.delta_e_colors);
    c.report.svg = Get(rep, "svg", c.report.svg);
    if (rep.contains("external_histogram") && !rep.at("external_histogram").is_null()) {
      c.report.external_histogram = Get<std::string>(rep, "external_histogram", "");
    }
  }
  c.Validate();
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  ScenarioConfig c = parse_scenario(read_file(path));
  auto& ext = c.report.external_histogram;
  if (ext && ext->is_relative()) ext = path.parent_path() / *ext;
  return c;
}

std::string scenario_to_json(const ScenarioConfig& config) {
  return ToJson(config).dump(2);
}

std::string config_hash(const ScenarioConfig& config) {
  return fnv1a_hex(ToJson(config).dump());
}

}  // namespace tristat
