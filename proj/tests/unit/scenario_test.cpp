#include "tristat/scenario.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include "tristat/error.hpp"
#include "tristat/io.hpp"

namespace tristat {
namespace {

TEST(Scenario, DefaultShape) {
  const ScenarioConfig c = default_scenario();
  EXPECT_EQ(c.campaign.n_panels, 13u);
  EXPECT_EQ(c.campaign.repeats_per_color, 12u);
  EXPECT_EQ(c.campaign.colors.size(), 20u);
  EXPECT_EQ(c.fit_colors.size(), 4u);
  EXPECT_EQ(c.holdout_colors.size(), 3u);
  EXPECT_NO_THROW(c.Validate());
}

TEST(Scenario, EmptyObjectIsDefault) {
  EXPECT_EQ(config_hash(parse_scenario("{}")), config_hash(default_scenario()));
}

TEST(Scenario, ParsesAllSections) {
  const ScenarioConfig c = parse_scenario(R"({
    "seed": 9,
    "campaign": {"panels": 4, "repeats": 3,
                 "colors": ["red", "green", "blue", "white", {"id": "teal", "xyz": [10, 20, 30]}],
                 "brightness": [0.5, 1.0], "measurement_interval_s": 2.5},
    "models": {"within": {"a": 0.001}, "between": {"ratio": 4}},
    "calibration": {"fit_colors": ["red", "green", "blue"], "holdout_colors": ["teal"],
                    "source_panel": "P2", "brightness": 0.5},
    "report": {"bin_width": 0.5, "bin_max": 5, "delta_e_colors": [], "svg": false}
  })");
  EXPECT_EQ(c.campaign.seed, 9u);
  EXPECT_EQ(c.campaign.n_panels, 4u);
  ASSERT_EQ(c.campaign.colors.size(), 5u);
  EXPECT_EQ(c.campaign.colors[4].xyz, Tristimulus(10, 20, 30));
  EXPECT_EQ(c.campaign.measurement_interval_s, 2.5);
  EXPECT_EQ(c.campaign.within_panel.a(), 0.001);
  EXPECT_EQ(c.campaign.within_panel.ratio(), 5.0);
  EXPECT_EQ(c.campaign.between_panel.a(), 1.0 / 400.0);
  EXPECT_EQ(c.campaign.between_panel.ratio(), 4.0);
  EXPECT_EQ(c.source_panel, "P2");
  EXPECT_EQ(c.calibration_brightness, 0.5);
  EXPECT_FALSE(c.report.svg);
  EXPECT_TRUE(c.report.delta_e_colors.empty());
}

TEST(Scenario, Errors) {
  EXPECT_THROW(parse_scenario("{"), ParseError);
  EXPECT_THROW(parse_scenario("[]"), ValidationError);
  EXPECT_THROW(parse_scenario(R"({"sead": 1})"), ValidationError);
  EXPECT_THROW(parse_scenario(R"({"campaign": {"colors": ["mauve"]}})"), ValidationError);
  EXPECT_THROW(parse_scenario(R"({"campaign": {"brightness": [0]}})"), ValidationError);
  EXPECT_THROW(parse_scenario(R"({"campaign": {"panels": "many"}})"), ValidationError);
  EXPECT_THROW(parse_scenario(R"({"models": {"within": {"ratio": 0.5}}})"), ValidationError);
  EXPECT_THROW(parse_scenario(R"({"calibration": {"fit_colors": ["red", "green"]}})"),
               ValidationError);
  EXPECT_THROW(parse_scenario(R"({"calibration": {"brightness": 0.5}})"), ValidationError);
}

TEST(Scenario, JsonParseErrorPosition) {
  try {
    parse_scenario("{\n  \"seed\": ,\n}");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Scenario, CanonicalJsonRoundTrip) {
  ScenarioConfig c = default_scenario();
  c.campaign.seed = 123;
  c.campaign.n_panels = 5;
  const ScenarioConfig back = parse_scenario(scenario_to_json(c));
  EXPECT_EQ(config_hash(back), config_hash(c));
  c.campaign.seed = 124;
  EXPECT_NE(config_hash(back), config_hash(c));
}

TEST(Scenario, ExternalHistogramRelativeToFile) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "tristat_scenario_test";
  fs::create_directories(dir);
  atomic_write(dir / "s.json", R"({"report": {"external_histogram": "ext.csv"}})");
  const ScenarioConfig c = load_scenario(dir / "s.json");
  ASSERT_TRUE(c.report.external_histogram.has_value());
  EXPECT_EQ(*c.report.external_histogram, dir / "ext.csv");
  fs::remove_all(dir);
}

}  // namespace
}  // namespace tristat
