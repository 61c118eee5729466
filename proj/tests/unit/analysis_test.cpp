#include "tristat/analysis.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "test_support.hpp"
#include "tristat/error.hpp"
#include "tristat/simulator.hpp"

namespace tristat {
namespace {

MeasurementRecord Rec(std::string panel, std::string color, int repeat, Tristimulus xyz,
                      double brightness = 1.0, std::optional<double> t = std::nullopt) {
  return {std::move(panel), std::move(color), brightness, repeat, t, xyz};
}

CampaignSpec Spec(std::size_t panels, std::size_t colors, std::size_t repeats, std::uint64_t seed) {
  CampaignSpec spec;
  spec.n_panels = panels;
  spec.colors = standard_palette(colors);
  spec.repeats_per_color = repeats;
  spec.seed = seed;
  return spec;
}

TEST(GroupByPanel, SortsPanelsAndRepeats) {
  std::vector<MeasurementRecord> recs{Rec("B", "red", 1, {1, 0, 0}), Rec("A", "red", 0, {1, 0, 0}),
                                      Rec("B", "red", 0, {2, 0, 0})};
  const auto ds = group_by_panel(recs);
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds[0].panel_id, "A");
  const auto& g = ds[1].groups.at({"red", 1.0});
  EXPECT_EQ(g[0].repeat_index, 0);
  EXPECT_EQ(g[1].repeat_index, 1);
}

TEST(WithinPanelStds, HandComputedGroup) {
  std::vector<MeasurementRecord> recs{Rec("A", "w", 0, {10, 10, 10}), Rec("A", "w", 1, {12, 12, 12}),
                                      Rec("A", "single", 0, {1, 1, 1})};
  const auto stds = within_panel_stds(group_by_panel(recs)[0]);
  ASSERT_EQ(stds.size(), 1u);
  EXPECT_DOUBLE_EQ(stds[0].sum_xyz, 33.0);
  EXPECT_DOUBLE_EQ(stds[0].sigma[0], 1.0);  // X
  EXPECT_NEAR(stds[0].sigma[3], std::sqrt(3.0), 1e-12);  // v1
  EXPECT_NEAR(stds[0].sigma[4], 0.0, 1e-12);
}

TEST(KTable, ZeroNoiseGivesZero) {
  CampaignSpec spec = Spec(3, 10, 4, 1);
  spec.within_panel = NoiseModel(1e-300, 5.0, Provenance::kWithinPanel);
  const auto records = run_campaign(spec).records;
  const KTable t = panel_k_table(group_by_panel(records));
  ASSERT_EQ(t.panel_ids.size(), 3u);
  for (const auto& row : t.k_x1000)
    for (double v : row) EXPECT_LT(v, 1e-250);
}

TEST(KTable, SingleColorProtocol) {
  // One color per panel: k is sigma / (X+Y+Z) exactly.
  std::vector<MeasurementRecord> recs;
  recs.push_back(Rec("A", "w", 0, {10, 10, 10}));
  recs.push_back(Rec("A", "w", 1, {12, 12, 12}));
  recs.push_back(Rec("B", "w", 0, {20, 20, 20}));
  recs.push_back(Rec("B", "w", 1, {20, 20, 20}));
  const KTable t = panel_k_table(group_by_panel(recs));
  EXPECT_NEAR(t.k_x1000[0][0], 1000.0 / 33.0, 1e-9);
  EXPECT_EQ(t.k_x1000[0][1], 0.0);
  EXPECT_NEAR(t.mean[0], 500.0 / 33.0, 1e-9);
  EXPECT_NEAR(t.stddev[0], std::sqrt(2.0) * 500.0 / 33.0, 1e-9);  // n-1 divisor
  EXPECT_NEAR(t.Mean(Direction::kV1), 1000.0 * std::sqrt(3.0) / 33.0 / 2.0, 1e-9);
}

TEST(KTable, InsufficientRepeatsListsGroups) {
  std::vector<MeasurementRecord> recs{Rec("A", "w", 0, {1, 1, 1}), Rec("A", "w", 1, {1, 1, 1}),
                                      Rec("B", "red", 0, {1, 0, 0})};
  try {
    panel_k_table(group_by_panel(recs));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("B/red"), std::string::npos) << e.what();
  }
}

TEST(FitFromSimulation, RecoversWithinModel) {
  const auto records = run_campaign(Spec(13, 20, 12, 5)).records;
  const NoiseModel m = fit_noise_model(within_panel_directional_stds(group_by_panel(records)));
  EXPECT_NEAR(m.ratio(), 5.0, 1.0);
  EXPECT_NEAR(m.a(), 1.0 / 2000.0, 0.2 / 2000.0);
}

TEST(BetweenPanelStd, IdenticalPanelsGiveZero) {
  std::vector<MeasurementRecord> recs;
  for (const char* p : {"A", "B", "C"}) {
    recs.push_back(Rec(p, "w", 0, {5, 6, 7}));
    recs.push_back(Rec(p, "w", 1, {9, 9, 9}));
  }
  const auto b = between_panel_std(recs);
  EXPECT_TRUE(b.dropped_repeats);
  ASSERT_EQ(b.stds.size(), 1u);
  EXPECT_NEAR(b.stds[0].sigma_v1, 0.0, 1e-12);
  EXPECT_NEAR(b.stds[0].sigma_v2, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(b.stds[0].sum_xyz, 18.0);
}

TEST(BetweenPanelStd, NeedsTwoPanels) {
  std::vector<MeasurementRecord> recs{Rec("A", "w", 0, {1, 1, 1}), Rec("A", "w", 1, {1, 1, 1})};
  EXPECT_THROW(between_panel_std(recs), ValidationError);
}

TEST(BetweenPanelStd, RatioAndFactorFromSimulation) {
  const auto records = run_campaign(Spec(13, 20, 1, 8)).records;
  const auto b = between_panel_std(records);
  EXPECT_FALSE(b.dropped_repeats);
  const NoiseModel m = fit_noise_model(b.stds);
  EXPECT_NEAR(m.ratio(), 5.0, 1.5);
  EXPECT_NEAR(m.a(), 1.0 / 400.0, 0.4 / 400.0);
}

TEST(FlagExcessPerpendicular, DetectsInjectedColor) {
  std::vector<DirectionalStd> stds(2);
  stds[0].color_id = "ok";
  stds[0].sum_xyz = 100;
  stds[0].sigma_v2 = 0.05;
  stds[1].color_id = "bad";
  stds[1].sum_xyz = 100;
  stds[1].sigma_v3 = 0.2;
  const auto flagged = flag_excess_perpendicular(stds, NoiseModel::WithinPanel());
  ASSERT_EQ(flagged.size(), 1u);
  EXPECT_EQ(flagged[0], "bad");
}

PanelDataset Series(const std::vector<double>& sums) {
  std::vector<MeasurementRecord> recs;
  for (std::size_t i = 0; i < sums.size(); ++i) {
    const double v = sums[i] / 3.0;
    recs.push_back(Rec("A", "w", static_cast<int>(i), {v, v, v}, 1.0, static_cast<double>(i)));
  }
  return group_by_panel(recs)[0];
}

TEST(TimeSeries, ConstantAndRamp) {
  const TimeSeries flat = time_series(Series({30, 30, 30, 30}), "w");
  EXPECT_NEAR(flat.slope, 0.0, 1e-12);
  EXPECT_FALSE(flat.significant);

  const TimeSeries ramp = time_series(Series({30, 31, 32, 33, 34}), "w");
  EXPECT_NEAR(ramp.slope, 1.0, 1e-12);
  EXPECT_NEAR(ramp.intercept, 30.0, 1e-12);
  EXPECT_TRUE(ramp.significant);
}

TEST(TimeSeries, HandComputedTTest) {
  const std::vector<double> s{1.0, 1.1, 2.5, 2.2, 3.0};
  const TimeSeries ts = time_series(Series(s), "w");
  // OLS by hand: mean t = 2, stt = 10, sts = 5.1, mean s = 1.96.
  EXPECT_NEAR(ts.slope, 0.51, 1e-12);
  EXPECT_NEAR(ts.intercept, 0.94, 1e-12);
  // Reference values from an independent regression routine.
  EXPECT_NEAR(ts.slope / ts.slope_stderr, 3.98648429402106, 1e-9);
  EXPECT_NEAR(ts.p_value, 0.028257570668680197, 1e-9);
}

TEST(TimeSeries, StationaryNoiseRarelySignificant) {
  int significant = 0;
  const int trials = 200;
  for (int seed = 0; seed < trials; ++seed) {
    const auto records = run_campaign(Spec(1, 4, 30, static_cast<std::uint64_t>(seed))).records;
    significant += time_series(group_by_panel(records)[0], "white").significant ? 1 : 0;
  }
  EXPECT_LE(significant, trials / 10);
}

TEST(TimeSeries, MissingGroupOrTimestamps) {
  std::vector<MeasurementRecord> recs{Rec("A", "w", 0, {1, 1, 1}), Rec("A", "w", 1, {1, 1, 1})};
  const auto ds = group_by_panel(recs)[0];
  EXPECT_THROW(time_series(ds, "red"), ValidationError);
  EXPECT_THROW(time_series(ds, "w"), ValidationError);
}

TEST(Histogram, BinsAndOverflow) {
  const std::vector<double> v{0.0, 0.1, 0.25, 0.6, 9.99, 10.0, 42.0};
  const DeltaEHistogram h = histogram_of(v, DeltaEGrouping::kWithinRegion);
  ASSERT_EQ(h.counts.size(), 41u);
  ASSERT_EQ(h.edges.size(), 41u);
  EXPECT_EQ(h.counts[0], 2u);
  EXPECT_EQ(h.counts[1], 1u);
  EXPECT_EQ(h.counts[2], 1u);
  EXPECT_EQ(h.counts[39], 1u);
  EXPECT_EQ(h.counts[40], 2u);
  EXPECT_EQ(h.sample_count, 7u);
  EXPECT_NEAR(h.mean, (0.1 + 0.25 + 0.6 + 9.99 + 10.0 + 42.0) / 7.0, 1e-12);
  EXPECT_THROW(histogram_of(v, DeltaEGrouping::kWithinRegion, {0.0, 10.0}), ValidationError);
}

TEST(DeltaE, PairAroundAverage) {
  const Tristimulus white(95.047, 100, 108.883);
  std::vector<MeasurementRecord> recs{Rec("A", "c", 0, {20, 20, 20}), Rec("A", "c", 1, {22, 21, 19})};
  const auto v = delta_e_values(recs, DeltaEGrouping::kWithinRegion, white);
  ASSERT_EQ(v.size(), 2u);
  const double full = delta_e76(xyz_to_lab(recs[0].xyz, white), xyz_to_lab(recs[1].xyz, white));
  EXPECT_NEAR(v[0], full / 2, 1e-12);
  EXPECT_NEAR(v[1], full / 2, 1e-12);
  EXPECT_THROW(delta_e_values(recs, DeltaEGrouping::kBetweenPanels, white), ValidationError);
  EXPECT_THROW(delta_e_values(recs, DeltaEGrouping::kExternalBetweenRegions, white),
               ValidationError);
}

TEST(DeltaEProperty, HistogramConsistentAndOrderInvariant) {
  auto records = run_campaign(Spec(4, 10, 6, 12)).records;
  const Tristimulus white = default_reference_white(records);
  const auto h = delta_e_histogram(records, DeltaEGrouping::kWithinRegion, white);
  EXPECT_EQ(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}), h.sample_count);
  EXPECT_EQ(h.sample_count, records.size());

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(records.begin(), records.end(), rng);
    const auto g = delta_e_histogram(records, DeltaEGrouping::kWithinRegion, white);
    EXPECT_EQ(g.counts, h.counts);
    EXPECT_NEAR(g.mean, h.mean, 1e-12);
    const auto b = between_panel_std(records);
    EXPECT_EQ(b.stds.size(), 10u);
  }
}

TEST(DeltaE, WithinSmallerThanBetween) {
  const auto records = run_campaign(Spec(13, 20, 12, 2)).records;
  const Tristimulus white = default_reference_white(records);
  const std::vector<std::string> rgb{"red", "green", "blue"};
  const auto within = delta_e_histogram(records, DeltaEGrouping::kWithinRegion, white, {}, rgb);
  const auto between = delta_e_histogram(records, DeltaEGrouping::kBetweenPanels, white, {}, rgb);
  EXPECT_LT(within.mean, between.mean);
  EXPECT_EQ(within.sample_count, 13u * 3u * 12u);
  EXPECT_EQ(between.sample_count, 13u * 3u);
}

TEST(DefaultReferenceWhite, PrefersBrightestWhite) {
  std::vector<MeasurementRecord> recs{Rec("A", "white", 0, {50, 50, 50}, 0.5),
                                      Rec("A", "white", 0, {90, 100, 110}, 1.0),
                                      Rec("A", "glare", 0, {200, 300, 200}, 1.0)};
  EXPECT_EQ(default_reference_white(recs), Tristimulus(90, 100, 110));
  recs.erase(recs.begin(), recs.begin() + 2);
  EXPECT_EQ(default_reference_white(recs), Tristimulus(200, 300, 200));
}

TEST(PcaSummary, AlignedWithV1OnSimulation) {
  const auto records = run_campaign(Spec(3, 10, 12, 4)).records;
  const PcaSummary s = pca_summary(group_by_panel(records));
  EXPECT_EQ(s.angles_to_v1_deg.size(), 30u);
  EXPECT_LT(s.mean_angle_to_v1, 15.0);
}

TEST(PairsBetween, AveragesRepeats) {
  std::vector<MeasurementRecord> recs{Rec("A", "w", 0, {1, 1, 1}), Rec("A", "w", 1, {3, 3, 3}),
                                      Rec("B", "w", 0, {2, 2, 2})};
  const auto ds = group_by_panel(recs);
  const std::vector<std::string> colors{"w"};
  const auto pairs = pairs_between(ds[0], ds[1], colors);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].source, Tristimulus(2, 2, 2));
  EXPECT_EQ(pairs[0].reference, Tristimulus(2, 2, 2));
  const std::vector<std::string> missing{"red"};
  EXPECT_THROW(pairs_between(ds[0], ds[1], missing), ValidationError);
}

TEST(CompareWeightings, PairsSourceWithEveryOtherPanel) {
  const auto records = run_campaign(Spec(5, 7, 12, 6)).records;
  const auto ds = group_by_panel(records);
  const std::vector<std::string> fit{"red", "green", "blue", "white"};
  const std::vector<std::string> hold{"cyan", "magenta", "yellow"};
  const auto cmp = compare_weightings(ds, "P1", fit, hold, NoiseModel::BetweenPanel());
  ASSERT_EQ(cmp.pairs.size(), 4u);
  std::size_t wins = 0;
  for (const auto& p : cmp.pairs) {
    EXPECT_EQ(p.source_panel, "P1");
    EXPECT_NE(p.reference_panel, "P1");
    EXPECT_EQ(p.proposed.per_pair.size(), 3u);
    wins += p.ProposedWins() ? 1 : 0;
  }
  EXPECT_EQ(wins, cmp.proposed_wins);
  EXPECT_THROW(compare_weightings(ds, "P9", fit, hold, NoiseModel::BetweenPanel()),
               ValidationError);
}

}  // namespace
}  // namespace tristat
