#include "cli.hpp"

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "selfcal/crlb.hpp"
#include "selfcal/estimator.hpp"
#include "selfcal/harness.hpp"
#include "selfcal/rng.hpp"
#include "selfcal/serialize.hpp"
#include "selfcal/simulate.hpp"
#include "selfcal/topology.hpp"

namespace selfcal::cli {

namespace {

struct TopologyOptions {
  std::string topology = "star";
  int m = 129;
  int reference = 64;

  void attach(CLI::App& app) {
    app.add_option("--topology", topology, "star, daisy or file:<path.json>")->capture_default_str();
    app.add_option("--m", m, "number of antennas")->capture_default_str();
    app.add_option("--ref", reference, "reference antenna (1-based)")->capture_default_str();
  }

  ExperimentConfig config() const {
    ExperimentConfig cfg;
    cfg.m = m;
    cfg.reference = reference;
    parse_topology_spec(topology, cfg);
    return cfg;
  }

  Topology build() const { return build_topology(config()); }
};

struct ScenarioOptions {
  std::vector<double> line_gain{1.0, 0.0};
  double tx_amplitude = 1.0;
  double rx_amplitude = 1.0;
  double slot_duration = 1.0;
  double noise_variance = 0.0;
  double snr_db = NAN;

  void attach(CLI::App& app, bool with_noise) {
    app.add_option("--line-gain", line_gain, "line gain h as RE IM")->expected(2)->capture_default_str();
    app.add_option("--tx-amp", tx_amplitude, "transmit gain amplitude a")->capture_default_str();
    app.add_option("--rx-amp", rx_amplitude, "receive gain amplitude b")->capture_default_str();
    app.add_option("--slot-duration", slot_duration, "seconds per measurement slot T")->capture_default_str();
    if (with_noise) {
      auto* snr = app.add_option("--snr", snr_db, "SNR in dB; sets sigma^2 = a^2 b^2 |h|^2 / SNR");
      app.add_option("--noise-variance", noise_variance, "noise variance sigma^2")->excludes(snr);
    }
  }

  ScenarioParams build(double default_noise) const {
    ScenarioParams s;
    s.line_gain = {line_gain.at(0), line_gain.at(1)};
    s.tx_amplitude = tx_amplitude;
    s.rx_amplitude = rx_amplitude;
    s.slot_duration = slot_duration;
    s.noise_variance = noise_variance > 0.0 ? noise_variance : default_noise;
    if (!std::isnan(snr_db)) s = s.with_snr_db(snr_db);
    s.validate();
    return s;
  }
};

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

OutputFormat parse_format(const std::string& text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "json") return OutputFormat::Json;
  throw std::invalid_argument(fmt::format("format '{}' must be csv or json", text));
}

std::string rational_text(const Rational& r) {
  return r.denominator() == 1 ? fmt::format("{}", r.numerator())
                              : fmt::format("{}/{} ({})", r.numerator(), r.denominator(),
                                            boost::rational_cast<double>(r));
}

int verify_star(int m, int reference, std::ostream& out) {
  const auto report = verify_star_optimality(m, reference);
  out << fmt::format("star optimality, M={} reference={}: {} trees\n", report.m, report.reference, report.trees);
  for (const auto& [mean, count] : report.distribution) {
    out << fmt::format("  mean distance {:>16}: {} trees\n", rational_text(mean), count);
  }
  out << fmt::format("  minimum {} attained by {} tree(s); reference-centered star: {}\n",
                     rational_text(report.min_mean_distance), report.minimizers,
                     report.minimizers_are_reference_star ? "yes" : "no");
  out << (report.passed ? "PASS\n" : "FAIL\n");
  return report.passed ? kSuccess : kAcceptanceFailure;
}

int verify_time(int m, std::ostream& out) {
  const auto report = verify_time_bounds(m);
  out << fmt::format("collection time bounds, M={}: {} trees, {} paths, {} stars\n", report.m, report.trees,
                     report.paths, report.stars);
  out << fmt::format("  min {}T on {} trees, max {}T on {} trees, allowed [4T, {}T]\n", report.min_time.value,
                     report.at_min, report.max_time.value, report.at_max, 2 * (m - 1));
  for (const auto& failure : report.failures) out << "  " << failure << "\n";
  out << (report.passed ? "PASS\n" : "FAIL\n");
  return report.passed ? kSuccess : kAcceptanceFailure;
}

int verify_daisy(int m_lo, int m_hi, std::ostream& out) {
  const auto report = verify_daisy_optimality(m_lo, m_hi);
  out << fmt::format("daisy chain under a 2(M-1)T budget, M in [{}, {}]\n", m_lo, m_hi);
  for (const auto& e : report.entries) {
    out << fmt::format("  M={:>4} dbar/I={:<28} {}", e.m, rational_text(e.ratio),
                       e.daisy_beats_star ? "daisy < star" : "star <= daisy");
    if (e.brute_forced) {
      out << fmt::format("  exhaustive min {} over {} minimizer(s)", rational_text(e.brute_force_min),
                         e.brute_force_minimizers);
    }
    out << (e.passed ? "" : "  MISMATCH") << "\n";
  }
  out << fmt::format("  decreasing within each parity class: {}\n", report.parity_monotone ? "yes" : "no");
  out << (report.passed ? "PASS\n" : "FAIL\n");
  return report.passed ? kSuccess : kAcceptanceFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Internal self-calibration analysis for massive-MIMO base stations"};
  app.require_subcommand(1);

  // crlb
  auto* crlb_cmd = app.add_subcommand("crlb", "closed-form CRLB table for a wiring");
  TopologyOptions crlb_topo;
  ScenarioOptions crlb_scn;
  std::string crlb_budget;
  std::string crlb_format = "csv";
  std::string crlb_out;
  bool crlb_numeric_check = false;
  std::uint64_t crlb_seed = 1;
  crlb_topo.attach(*crlb_cmd);
  crlb_scn.attach(*crlb_cmd, true);
  crlb_cmd->add_option("--budget", crlb_budget, "time:N slots of T (default: one round of 2(M-1) measurements)");
  crlb_cmd->add_option("--format", crlb_format, "csv or json")->capture_default_str();
  crlb_cmd->add_option("--out", crlb_out, "output path (default stdout)");
  crlb_cmd->add_flag("--numeric", crlb_numeric_check, "cross-check against Fisher-matrix inversion with random gains");
  crlb_cmd->add_option("--seed", crlb_seed, "gain seed for --numeric")->capture_default_str();

  // schedule
  auto* sched_cmd = app.add_subcommand("schedule", "parallel measurement schedule as JSON");
  TopologyOptions sched_topo;
  double sched_slot = 1.0;
  std::string sched_out;
  sched_topo.attach(*sched_cmd);
  sched_cmd->add_option("--slot-duration", sched_slot, "seconds per slot T")->capture_default_str();
  sched_cmd->add_option("--out", sched_out, "output path (default stdout)");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "draw gains and synthesize noisy measurements");
  TopologyOptions sim_topo;
  ScenarioOptions sim_scn;
  int sim_reps = 1;
  std::uint64_t sim_seed = 1;
  std::string sim_out;
  std::string sim_gains_out;
  sim_topo.attach(*sim_cmd);
  sim_scn.attach(*sim_cmd, true);
  sim_cmd->add_option("--reps", sim_reps, "independent repetitions I")->capture_default_str();
  sim_cmd->add_option("--seed", sim_seed, "master seed")->capture_default_str();
  sim_cmd->add_option("--out", sim_out, "measurement set JSON (default stdout)");
  sim_cmd->add_option("--gains-out", sim_gains_out, "write the ground-truth gains JSON here");

  // estimate
  auto* est_cmd = app.add_subcommand("estimate", "ML gain estimates from a saved measurement set");
  TopologyOptions est_topo;
  ScenarioOptions est_scn;
  std::string est_measurements;
  std::string est_gains;
  std::string est_out;
  est_topo.attach(*est_cmd);
  est_scn.attach(*est_cmd, false);
  est_cmd->add_option("--measurements", est_measurements, "measurement set JSON")->required();
  est_cmd->add_option("--gains", est_gains, "ground-truth gains JSON (reference gains and error report)")->required();
  est_cmd->add_option("--out", est_out, "estimates JSON (default stdout)");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Monte-Carlo MSE vs. CRLB over an SNR grid");
  std::string sweep_config;
  TopologyOptions sweep_topo;
  ScenarioOptions sweep_scn;
  std::string sweep_budget;
  std::string sweep_snr;
  int sweep_trials = 0;
  std::uint64_t sweep_seed = 0;
  std::string sweep_format;
  std::string sweep_out;
  unsigned sweep_threads = 0;
  sweep_cmd->add_option("--config", sweep_config, "ExperimentConfig JSON; flags override it");
  sweep_topo.attach(*sweep_cmd);
  sweep_scn.attach(*sweep_cmd, false);
  sweep_cmd->add_option("--budget", sweep_budget, "measurements:N or time:N (default measurements:2(M-1))");
  sweep_cmd->add_option("--snr", sweep_snr, "SNR grid lo:hi:step or list, dB (default 10:40:5)");
  sweep_cmd->add_option("--trials", sweep_trials, "Monte-Carlo trials per grid point");
  sweep_cmd->add_option("--seed", sweep_seed, "master seed");
  sweep_cmd->add_option("--format", sweep_format, "csv or json");
  sweep_cmd->add_option("--out", sweep_out, "output path (default stdout)");
  sweep_cmd->add_option("--threads", sweep_threads, "worker threads (0 = hardware concurrency)");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "exhaustive checks of the wiring optimality results");
  std::string verify_prop = "all";
  int verify_m = 0;
  int verify_ref = 1;
  int verify_m_max = 129;
  verify_cmd->add_option("--prop", verify_prop,
                         "1|star (star optimal), 2|time (collection time bounds), 3|daisy (budgeted daisy), all")
      ->capture_default_str();
  verify_cmd->add_option("--m", verify_m, "antenna count (default: 5 for 1 and 2; range 3..--m-max for 3)");
  verify_cmd->add_option("--ref", verify_ref, "reference antenna for the star check")->capture_default_str();
  verify_cmd->add_option("--m-max", verify_m_max, "upper end of the daisy ratio range")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (*crlb_cmd) {
      const Topology t = crlb_topo.build();
      const ScenarioParams s = crlb_scn.build(1.0);
      CrlbReport report = crlb_closed_form(t, s);
      if (!crlb_budget.empty()) {
        ExperimentConfig cfg;
        parse_budget(crlb_budget, cfg);
        if (cfg.budget_mode != BudgetMode::Time) {
          const std::int64_t round = 2 * static_cast<std::int64_t>(t.size() - 1);
          report = budgeted_average_crlb(t, s, SlotCount{(cfg.budget_value / round) * time_to_collect(t).value});
        } else {
          report = budgeted_average_crlb(t, s, SlotCount{cfg.budget_value});
        }
      }
      emit(crlb_out, parse_format(crlb_format) == OutputFormat::Csv ? crlb_report_to_csv(report)
                                                                    : crlb_report_to_json(report),
           out);
      if (crlb_numeric_check) {
        const RfGains gains = draw_gains(t.size(), s, crlb_seed);
        const auto numeric = crlb_numeric(fisher_matrix(t, gains, s));
        const auto closed = crlb_closed_form(t, s);
        double worst = 0.0;
        for (std::size_t k = 0; k < numeric.alpha.size(); ++k) {
          worst = std::max(worst, std::abs(numeric.alpha[k] - closed.alpha[k]) / closed.alpha[k]);
          worst = std::max(worst, std::abs(numeric.beta[k] - closed.beta[k]) / closed.beta[k]);
        }
        err << fmt::format("numeric cross-check: max relative deviation {:.3e}, condition number {:.3e}\n", worst,
                           numeric.condition_number);
        if (worst > 1e-9) return kAcceptanceFailure;
      }
      return kSuccess;
    }

    if (*sched_cmd) {
      if (!(sched_slot > 0.0)) throw std::invalid_argument("slot duration must be positive");
      const Topology t = sched_topo.build();
      emit(sched_out, schedule_to_json(measurement_schedule(t, sched_slot)), out);
      return kSuccess;
    }

    if (*sim_cmd) {
      const Topology t = sim_topo.build();
      const ScenarioParams s = sim_scn.build(0.0);
      const RfGains gains = draw_gains(t.size(), s, rng::stream_key(sim_seed, {1}));
      const MeasurementSet ms = synthesize(t, gains, s, sim_reps, rng::stream_key(sim_seed, {2}));
      emit(sim_out, measurements_to_json(ms), out);
      if (!sim_gains_out.empty()) write_text_file(sim_gains_out, gains_to_json(gains));
      return kSuccess;
    }

    if (*est_cmd) {
      const Topology t = est_topo.build();
      ScenarioParams s = est_scn.build(1.0);
      const MeasurementSet ms = measurements_from_json(read_text_file(est_measurements));
      const RfGains truth = gains_from_json(read_text_file(est_gains));
      if (truth.size() != t.size()) {
        throw std::invalid_argument(
            fmt::format("gains file covers {} antennas, topology has {}", truth.size(), t.size()));
      }
      const auto est = ml_estimate(collapse_repetitions(ms), t, s, truth.alpha_of(t.reference()),
                                   truth.beta_of(t.reference()));
      const auto error = estimation_error(est, truth);
      emit(est_out, estimates_to_json(est), out);
      err << fmt::format("average squared error: alpha {:.6e}, beta {:.6e}\n", error.average_alpha,
                         error.average_beta);
      return kSuccess;
    }

    if (*sweep_cmd) {
      ExperimentConfig cfg = sweep_config.empty() ? ExperimentConfig{} : config_from_json(read_text_file(sweep_config));
      if (sweep_cmd->count("--topology") > 0) parse_topology_spec(sweep_topo.topology, cfg);
      if (sweep_cmd->count("--m") > 0) cfg.m = sweep_topo.m;
      if (sweep_cmd->count("--ref") > 0) cfg.reference = sweep_topo.reference;
      if (!sweep_budget.empty()) parse_budget(sweep_budget, cfg);
      if (!sweep_snr.empty()) cfg.snr_grid_db = parse_snr_grid(sweep_snr);
      if (sweep_cmd->count("--trials") > 0) cfg.trials = sweep_trials;
      if (sweep_cmd->count("--seed") > 0) cfg.master_seed = sweep_seed;
      if (!sweep_format.empty()) cfg.output_format = parse_format(sweep_format);
      if (!sweep_out.empty()) cfg.output_path = sweep_out;
      if (sweep_cmd->count("--threads") > 0) cfg.threads = sweep_threads;
      if (sweep_cmd->count("--line-gain") > 0) cfg.line_gain = {sweep_scn.line_gain.at(0), sweep_scn.line_gain.at(1)};
      if (sweep_cmd->count("--tx-amp") > 0) cfg.tx_amplitude = sweep_scn.tx_amplitude;
      if (sweep_cmd->count("--rx-amp") > 0) cfg.rx_amplitude = sweep_scn.rx_amplitude;
      if (sweep_cmd->count("--slot-duration") > 0) cfg.slot_duration = sweep_scn.slot_duration;

      const auto rows = run_snr_sweep(cfg);
      emit(cfg.output_path, cfg.output_format == OutputFormat::Csv ? sweep_to_csv(rows) : sweep_to_json(rows), out);
      for (const auto& row : rows) {
        if (row.flagged) {
          err << fmt::format("warning: SNR {} dB lost {:.1f}% of trials to division hazards\n", row.snr_db,
                             100.0 * row.hazard_rate);
        }
      }
      return kSuccess;
    }

    if (*verify_cmd) {
      const bool all = verify_prop == "all";
      int code = kSuccess;
      bool matched = false;
      const auto merge = [&code](int c) { code = std::max(code, c); };
      if (all || verify_prop == "1" || verify_prop == "star") {
        matched = true;
        merge(verify_star(verify_m > 0 ? verify_m : 5, verify_ref, out));
      }
      if (all || verify_prop == "2" || verify_prop == "time") {
        matched = true;
        merge(verify_time(verify_m > 0 ? verify_m : 5, out));
      }
      if (all || verify_prop == "3" || verify_prop == "daisy") {
        matched = true;
        merge(verify_m > 0 ? verify_daisy(verify_m, verify_m, out) : verify_daisy(3, verify_m_max, out));
      }
      if (!matched) {
        err << fmt::format("unknown --prop '{}'; use 1, 2, 3, star, time, daisy or all\n", verify_prop);
        return kUsage;
      }
      return code;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kUsage;
}

}  // namespace selfcal::cli
