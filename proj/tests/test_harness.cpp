#include <gtest/gtest.h>

#include <cmath>

#include "selfcal/harness.hpp"

using namespace selfcal;

TEST(ParseSnrGrid, RangeAndList) {
  EXPECT_EQ(parse_snr_grid("10:40:5"), (std::vector<double>{10, 15, 20, 25, 30, 35, 40}));
  EXPECT_EQ(parse_snr_grid("0:1:0.5"), (std::vector<double>{0, 0.5, 1}));
  EXPECT_EQ(parse_snr_grid("12, 3.5,-4"), (std::vector<double>{12, 3.5, -4}));
  EXPECT_EQ(parse_snr_grid("7"), (std::vector<double>{7}));
  EXPECT_THROW(parse_snr_grid("10:0:5"), std::invalid_argument);
  EXPECT_THROW(parse_snr_grid("10:20:0"), std::invalid_argument);
  EXPECT_THROW(parse_snr_grid("a,b"), std::invalid_argument);
  EXPECT_THROW(parse_snr_grid(""), std::invalid_argument);
}

TEST(ParseBudget, Modes) {
  ExperimentConfig cfg;
  parse_budget("time:256", cfg);
  EXPECT_EQ(cfg.budget_mode, BudgetMode::Time);
  EXPECT_EQ(cfg.budget_value, 256);
  parse_budget("measurements:12", cfg);
  EXPECT_EQ(cfg.budget_mode, BudgetMode::Measurements);
  EXPECT_EQ(cfg.budget_value, 12);
  EXPECT_THROW(parse_budget("slots:3", cfg), std::invalid_argument);
  EXPECT_THROW(parse_budget("time:-1", cfg), std::invalid_argument);
  EXPECT_THROW(parse_budget("time", cfg), std::invalid_argument);
}

TEST(ParseTopologySpec, Kinds) {
  ExperimentConfig cfg;
  parse_topology_spec("daisy", cfg);
  EXPECT_EQ(cfg.topology, TopologyKind::Daisy);
  parse_topology_spec("file:/tmp/x.json", cfg);
  EXPECT_EQ(cfg.topology, TopologyKind::File);
  EXPECT_EQ(cfg.topology_path, "/tmp/x.json");
  EXPECT_THROW(parse_topology_spec("ring", cfg), std::invalid_argument);
  EXPECT_EQ(topology_label(TopologyKind::Star), "star");
}

TEST(ExperimentConfig, Validation) {
  ExperimentConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.trials = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.reference = 130;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.snr_grid_db.clear();
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

namespace {

ExperimentConfig small_config(TopologyKind kind) {
  ExperimentConfig cfg;
  cfg.m = 9;
  cfg.reference = 5;
  cfg.topology = kind;
  cfg.snr_grid_db = {20, 30};
  cfg.trials = 400;
  cfg.master_seed = 5;
  return cfg;
}

}  // namespace

TEST(RunSnrSweep, RowsFollowGridAndBudget) {
  auto cfg = small_config(TopologyKind::Daisy);
  cfg.budget_mode = BudgetMode::Time;
  cfg.budget_value = 16;
  const auto rows = run_snr_sweep(cfg);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].snr_db, 20);
  EXPECT_EQ(rows[0].topology, "daisy");
  EXPECT_EQ(rows[0].repetitions, 4);
  EXPECT_EQ(rows[0].remainder_seconds, 0.0);
  // Mid daisy on 9 antennas: dbar = 5/2, so the bound is 2.5 rho / 4.
  EXPECT_DOUBLE_EQ(rows[0].average_crlb_alpha, 2.5 * 0.01 / 4.0);
  EXPECT_DOUBLE_EQ(rows[1].average_crlb_alpha, 2.5 * 0.001 / 4.0);
  for (const auto& row : rows) {
    EXPECT_NEAR(row.average_mse_alpha, row.average_crlb_alpha, 0.15 * row.average_crlb_alpha);
    EXPECT_EQ(row.hazard_rate, 0.0);
    EXPECT_FALSE(row.flagged);
  }
}

TEST(RunSnrSweep, MeasurementBudgetDefaultsToOneRound) {
  const auto rows = run_snr_sweep(small_config(TopologyKind::Star));
  EXPECT_EQ(rows[0].repetitions, 1);
  EXPECT_DOUBLE_EQ(rows[0].average_crlb_alpha, 0.01);
}

TEST(RunSnrSweep, IndependentOfThreadCount) {
  auto cfg = small_config(TopologyKind::Daisy);
  cfg.threads = 1;
  const auto one = run_snr_sweep(cfg);
  cfg.threads = 3;
  const auto three = run_snr_sweep(cfg);
  ASSERT_EQ(one.size(), three.size());
  for (std::size_t k = 0; k < one.size(); ++k) {
    EXPECT_EQ(one[k].average_mse_alpha, three[k].average_mse_alpha);
    EXPECT_EQ(one[k].average_mse_beta, three[k].average_mse_beta);
  }
}

TEST(RunSnrSweep, SeedChangesResults) {
  auto cfg = small_config(TopologyKind::Daisy);
  const auto a = run_snr_sweep(cfg);
  cfg.master_seed = 6;
  const auto b = run_snr_sweep(cfg);
  EXPECT_NE(a[0].average_mse_alpha, b[0].average_mse_alpha);
}

TEST(RunSnrSweep, VeryLowSnrStillProducesRows) {
  auto cfg = small_config(TopologyKind::Daisy);
  cfg.snr_grid_db = {-30};
  cfg.trials = 200;
  const auto rows = run_snr_sweep(cfg);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_GE(rows[0].hazard_rate, 0.0);
  EXPECT_LE(rows[0].hazard_rate, 1.0);
  EXPECT_EQ(rows[0].flagged, rows[0].hazard_rate > kHazardFlagRate);
}

TEST(VerifyStarOptimality, SmallCases) {
  const auto r = verify_star_optimality(5, 2);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.trees, 125u);
  EXPECT_EQ(r.min_mean_distance, Rational(1));
  EXPECT_EQ(r.minimizers, 1u);
  EXPECT_TRUE(r.minimizers_are_reference_star);
  std::uint64_t total = 0;
  for (const auto& [mean, count] : r.distribution) total += count;
  EXPECT_EQ(total, 125u);
  EXPECT_TRUE(verify_star_optimality(7, 7).passed);
}

TEST(VerifyTimeBounds, SmallCases) {
  const auto r = verify_time_bounds(5);
  EXPECT_TRUE(r.passed) << (r.failures.empty() ? "" : r.failures.front());
  EXPECT_EQ(r.min_time, SlotCount{4});
  EXPECT_EQ(r.max_time, SlotCount{8});
  EXPECT_EQ(r.paths, 60u);
  EXPECT_EQ(r.stars, 5u);
  EXPECT_EQ(r.at_min, 60u);
  EXPECT_EQ(r.at_max, 5u);
  EXPECT_TRUE(verify_time_bounds(7).passed);
}

TEST(VerifyDaisyOptimality, RangeWithBruteForce) {
  const auto r = verify_daisy_optimality(3, 40, 7);
  EXPECT_TRUE(r.passed);
  EXPECT_TRUE(r.parity_monotone);
  ASSERT_EQ(r.entries.size(), 38u);
  EXPECT_FALSE(r.entries[1].daisy_beats_star);  // m = 4
  EXPECT_TRUE(r.entries[2].daisy_beats_star);   // m = 5
  EXPECT_TRUE(r.entries[2].brute_forced);
  EXPECT_EQ(r.entries[2].brute_force_min, Rational(3, 4));
  EXPECT_FALSE(r.entries[10].brute_forced);
}
