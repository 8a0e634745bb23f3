#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "selfcal/crlb.hpp"
#include "selfcal/scenario.hpp"
#include "selfcal/topology.hpp"

namespace selfcal {

enum class TopologyKind { Star, Daisy, File };
enum class BudgetMode { Measurements, Time };
enum class OutputFormat { Csv, Json };

struct ExperimentConfig {
  int m = 129;
  int reference = 64;
  TopologyKind topology = TopologyKind::Star;
  std::string topology_path;  // used when topology == File; m and reference then come from the file
  std::vector<double> snr_grid_db{10, 15, 20, 25, 30, 35, 40};
  int trials = 1000;
  std::uint64_t master_seed = 1;
  BudgetMode budget_mode = BudgetMode::Measurements;
  /// Number of scalar measurements (Measurements mode) or of slots of length T (Time
  /// mode). Zero selects 2(M-1) in either mode.
  std::int64_t budget_value = 0;
  OutputFormat output_format = OutputFormat::Csv;
  std::string output_path;

  Complex line_gain{1.0, 0.0};
  double tx_amplitude = 1.0;
  double rx_amplitude = 1.0;
  double slot_duration = 1.0;
  /// Worker threads for Monte-Carlo trials; 0 picks the hardware concurrency. Results do
  /// not depend on this value.
  unsigned threads = 0;

  /// Throws std::invalid_argument.
  void validate() const;
  ScenarioParams scenario() const;
};

/// "lo:hi:step" (inclusive of hi within rounding) or a comma-separated list, in dB.
std::vector<double> parse_snr_grid(std::string_view text);

/// "star", "daisy" or "file:<path>".
void parse_topology_spec(std::string_view text, ExperimentConfig& cfg);

/// "measurements:N" or "time:N".
void parse_budget(std::string_view text, ExperimentConfig& cfg);

/// Star, daisy, or the file-described wiring named by the config.
Topology build_topology(const ExperimentConfig& cfg);

std::string topology_label(TopologyKind kind);

struct SweepRow {
  double snr_db = 0.0;
  std::string topology;
  int m = 0;
  int reference = 0;
  std::int64_t repetitions = 1;
  double remainder_seconds = 0.0;
  double average_crlb_alpha = 0.0;
  double average_crlb_beta = 0.0;
  double average_mse_alpha = 0.0;
  double average_mse_beta = 0.0;
  int trials = 0;
  double hazard_rate = 0.0;
  bool flagged = false;  // hazard rate above 1%
};

inline constexpr double kHazardFlagRate = 0.01;

/// Monte-Carlo sweep over the SNR grid: each trial draws gains, synthesizes I
/// repetitions, collapses, estimates and scores. Trial t at grid point k is keyed by
/// (master_seed, k, t), and aggregation runs in trial order, so output is identical
/// for any thread count. Trials that hit a DivisionHazard are excluded from the MSE
/// average and counted in `hazard_rate`.
std::vector<SweepRow> run_snr_sweep(const ExperimentConfig& cfg);
std::vector<SweepRow> run_snr_sweep(const ExperimentConfig& cfg, const Topology& t);

/// Enumerates every tree on m antennas with the given reference and checks that the
/// minimum mean calibration distance is 1, attained only by the reference-centered star.
struct StarOptimalityReport {
  int m = 0;
  int reference = 0;
  std::uint64_t trees = 0;
  Rational min_mean_distance;
  std::uint64_t minimizers = 0;
  bool minimizers_are_reference_star = false;
  std::map<Rational, std::uint64_t> distribution;  // mean distance -> tree count
  bool passed = false;
};

StarOptimalityReport verify_star_optimality(int m, int reference);

/// Collection time 2 * N_max * T over every tree: within [4T, 2(M-1)T], low end exactly
/// for paths, high end exactly for stars, and every schedule valid.
struct TimeBoundsReport {
  int m = 0;
  std::uint64_t trees = 0;
  SlotCount min_time;
  SlotCount max_time;
  std::uint64_t paths = 0;
  std::uint64_t stars = 0;
  std::uint64_t at_min = 0;
  std::uint64_t at_max = 0;
  std::vector<std::string> failures;
  bool passed = false;
};

TimeBoundsReport verify_time_bounds(int m);

struct DaisyOptimalityEntry {
  int m = 0;
  Rational ratio;
  bool daisy_beats_star = false;
  bool brute_forced = false;
  Rational brute_force_min;  // min over all trees of dbar / I under a 2(M-1)T budget
  std::uint64_t brute_force_minimizers = 0;
  bool passed = false;
};

/// For each m in [m_lo, m_hi]: the mid-referenced daisy beats the star iff m >= 5, and
/// for m <= brute_force_cap exhaustive enumeration confirms the best budgeted wiring.
/// Also checks the ratio decreases within each parity class.
struct DaisyOptimalityReport {
  std::vector<DaisyOptimalityEntry> entries;
  bool parity_monotone = false;
  bool passed = false;
};

DaisyOptimalityReport verify_daisy_optimality(int m_lo, int m_hi, int brute_force_cap = TreeEnumerator::kDefaultCap);

}  // namespace selfcal
