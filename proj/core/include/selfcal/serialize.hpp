#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "selfcal/crlb.hpp"
#include "selfcal/estimator.hpp"
#include "selfcal/harness.hpp"
#include "selfcal/simulate.hpp"
#include "selfcal/topology.hpp"

// Text formats. Parsers throw std::invalid_argument on malformed input (and
// TopologyError for wiring that is not a spanning tree). Complex numbers are
// written as [re, im] pairs.

namespace selfcal {

/// {"m": int, "reference": int, "edges": [[p, q], ...]}
std::string topology_to_json(const Topology& t);
Topology topology_from_json(std::string_view text);
Topology load_topology_file(const std::string& path);

/// {"slot_duration": seconds, "slots": [[[tx, rx], ...], ...]}
std::string schedule_to_json(const Schedule& schedule);

std::string crlb_report_to_json(const CrlbReport& report);
/// Columns: antenna, d_m, crlb_alpha, crlb_beta, rho_a, rho_b, I, F_seconds, T_arb_seconds.
std::string crlb_report_to_csv(const CrlbReport& report);

std::string gains_to_json(const RfGains& gains);
RfGains gains_from_json(std::string_view text);

std::string measurements_to_json(const MeasurementSet& ms);
MeasurementSet measurements_from_json(std::string_view text);

std::string estimates_to_json(const GainEstimates& est);

/// Columns: snr_db, topology, m, reference, I, F_seconds, avg_crlb_alpha, avg_crlb_beta,
/// avg_mse_alpha, avg_mse_beta, trials, hazard_rate.
std::string sweep_to_csv(const std::vector<SweepRow>& rows);
std::string sweep_to_json(const std::vector<SweepRow>& rows);

/// Keys mirror ExperimentConfig field names; "topology" is "star", "daisy" or
/// "file:<path>", "snr" accepts a grid string or an array, "budget" accepts
/// "measurements:N" / "time:N". Missing keys keep their defaults.
ExperimentConfig config_from_json(std::string_view text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view contents);

}  // namespace selfcal
