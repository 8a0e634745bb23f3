#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "selfcal/serialize.hpp"

using namespace selfcal;

TEST(TopologyJson, RoundTripRandomTrees) {
  std::mt19937_64 gen(51);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 2 + static_cast<int>(gen() % 30);
    const auto t = Topology::from_edges(m, 1 + static_cast<int>(gen() % m), oracle::random_tree_edges(m, gen));
    ASSERT_EQ(topology_from_json(topology_to_json(t)), t);
  }
}

TEST(TopologyJson, RejectsBadInput) {
  EXPECT_THROW(topology_from_json("{"), std::invalid_argument);
  EXPECT_THROW(topology_from_json(R"({"m": 3, "reference": 1})"), std::invalid_argument);
  EXPECT_THROW(topology_from_json(R"({"m": 3, "reference": 1, "edges": [[1, 2]]})"), TopologyError);
  EXPECT_THROW(topology_from_json(R"({"m": 3, "reference": 1, "edges": [[1, 2], [2]]})"), std::invalid_argument);
}

TEST(TopologyJson, FileLoad) {
  const auto path = (std::filesystem::temp_directory_path() / "selfcal_topology_test.json").string();
  write_text_file(path, R"({"m": 4, "reference": 2, "edges": [[1, 2], [2, 3], [3, 4]]})");
  const auto t = load_topology_file(path);
  EXPECT_EQ(t.reference(), 2);
  EXPECT_TRUE(t.is_path());
  std::filesystem::remove(path);
  EXPECT_THROW(load_topology_file(path), std::invalid_argument);
}

TEST(GainsJson, RoundTripIsExact) {
  ScenarioParams s;
  s.tx_amplitude = 0.37;
  const auto g = draw_gains(20, s, 3);
  const auto back = gains_from_json(gains_to_json(g));
  EXPECT_EQ(back.alpha, g.alpha);
  EXPECT_EQ(back.beta, g.beta);
}

TEST(MeasurementsJson, RoundTripIsExact) {
  const auto t = Topology::daisy(6, 3);
  const auto s = ScenarioParams{}.with_snr_db(13.0);
  const auto ms = synthesize(t, draw_gains(6, s, 1), s, 3, 2);
  const auto back = measurements_from_json(measurements_to_json(ms));
  ASSERT_EQ(back.repetitions(), 3);
  ASSERT_EQ(back.observations().size(), ms.observations().size());
  for (std::size_t k = 0; k < ms.observations().size(); ++k) {
    EXPECT_EQ(back.observations()[k].link, ms.observations()[k].link);
    EXPECT_EQ(back.observations()[k].values, ms.observations()[k].values);
  }
}

TEST(CrlbReportCsv, HeaderAndRows) {
  const auto csv = crlb_report_to_csv(crlb_closed_form(Topology::daisy(3, 2), ScenarioParams{}));
  EXPECT_EQ(csv,
            "antenna,d_m,crlb_alpha,crlb_beta,rho_a,rho_b,I,F_seconds,T_arb_seconds\n"
            "1,1,1,1,1,1,1,0,4\n"
            "3,1,1,1,1,1,1,0,4\n");
}

TEST(SweepCsv, HeaderAndRows) {
  SweepRow row;
  row.snr_db = 30;
  row.topology = "daisy";
  row.m = 129;
  row.reference = 64;
  row.repetitions = 64;
  row.average_crlb_alpha = 0.0005079345703125;
  row.average_crlb_beta = 0.0005079345703125;
  row.average_mse_alpha = 0.0005;
  row.average_mse_beta = 0.00051;
  row.trials = 10;
  const auto csv = sweep_to_csv({row});
  EXPECT_EQ(csv,
            "snr_db,topology,m,reference,I,F_seconds,avg_crlb_alpha,avg_crlb_beta,avg_mse_alpha,avg_mse_beta,"
            "trials,hazard_rate\n"
            "30,daisy,129,64,64,0,0.0005079345703125,0.0005079345703125,0.0005,0.00051,10,0\n");
}

TEST(ConfigJson, KeysOverrideDefaults) {
  const auto cfg = config_from_json(
      R"({"m": 17, "reference": 9, "topology": "daisy", "snr": "0:10:5", "trials": 50, "seed": 8,
          "budget": "time:64", "format": "json", "threads": 2})");
  EXPECT_EQ(cfg.m, 17);
  EXPECT_EQ(cfg.reference, 9);
  EXPECT_EQ(cfg.topology, TopologyKind::Daisy);
  EXPECT_EQ(cfg.snr_grid_db, (std::vector<double>{0, 5, 10}));
  EXPECT_EQ(cfg.trials, 50);
  EXPECT_EQ(cfg.master_seed, 8u);
  EXPECT_EQ(cfg.budget_mode, BudgetMode::Time);
  EXPECT_EQ(cfg.budget_value, 64);
  EXPECT_EQ(cfg.output_format, OutputFormat::Json);
  EXPECT_EQ(cfg.threads, 2u);

  const auto list = config_from_json(R"({"snr": [1, 2]})");
  EXPECT_EQ(list.snr_grid_db, (std::vector<double>{1, 2}));
  EXPECT_EQ(list.m, 129);
  EXPECT_THROW(config_from_json(R"({"m": "x"})"), std::invalid_argument);
}
