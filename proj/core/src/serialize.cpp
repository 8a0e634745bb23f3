#include "selfcal/serialize.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace selfcal {

using json = nlohmann::json;

namespace {

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw std::invalid_argument(fmt::format("expected [re, im], got {}", j.dump()));
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json parse(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(fmt::format("malformed {} JSON: {}", what, e.what()));
  }
}

template <typename T>
T required(const json& j, const char* key, std::string_view what) {
  if (!j.is_object() || !j.contains(key)) {
    throw std::invalid_argument(fmt::format("{} JSON is missing \"{}\"", what, key));
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(fmt::format("{} JSON field \"{}\": {}", what, key, e.what()));
  }
}

std::string csv_number(double v) { return fmt::format("{}", v); }

}  // namespace

std::string topology_to_json(const Topology& t) {
  json edges = json::array();
  for (const auto& e : t.edges()) edges.push_back({e.p, e.q});
  return json{{"m", t.size()}, {"reference", t.reference()}, {"edges", edges}}.dump(2) + "\n";
}

Topology topology_from_json(std::string_view text) {
  const json j = parse(text, "topology");
  const int m = required<int>(j, "m", "topology");
  const int reference = required<int>(j, "reference", "topology");
  const auto pairs = required<std::vector<std::vector<int>>>(j, "edges", "topology");
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& pair : pairs) {
    if (pair.size() != 2) throw std::invalid_argument("topology edges must be [p, q] pairs");
    edges.push_back({pair[0], pair[1]});
  }
  return Topology::from_edges(m, reference, edges);
}

Topology load_topology_file(const std::string& path) { return topology_from_json(read_text_file(path)); }

std::string schedule_to_json(const Schedule& schedule) {
  json slots = json::array();
  for (const auto& slot : schedule.slots) {
    json links = json::array();
    for (const auto& link : slot) links.push_back({link.tx, link.rx});
    slots.push_back(std::move(links));
  }
  return json{{"slot_duration", schedule.slot_duration}, {"slots", slots}}.dump() + "\n";
}

std::string crlb_report_to_json(const CrlbReport& r) {
  json antennas = json::array();
  for (std::size_t k = 0; k < r.antennas.size(); ++k) {
    antennas.push_back({{"antenna", r.antennas[k]},
                        {"d_m", r.distances[k]},
                        {"crlb_alpha", r.alpha[k]},
                        {"crlb_beta", r.beta[k]}});
  }
  return json{{"antennas", antennas},
              {"average_alpha", r.average_alpha},
              {"average_beta", r.average_beta},
              {"mean_distance", {{"num", r.mean_distance.numerator()}, {"den", r.mean_distance.denominator()}}},
              {"rho_a", r.rho.rho_a},
              {"rho_b", r.rho.rho_b},
              {"I", r.repetitions},
              {"F_seconds", r.remainder.seconds(r.slot_duration)},
              {"T_arb_seconds", r.collection_time.seconds(r.slot_duration)}}
             .dump(2) +
         "\n";
}

std::string crlb_report_to_csv(const CrlbReport& r) {
  std::string out = "antenna,d_m,crlb_alpha,crlb_beta,rho_a,rho_b,I,F_seconds,T_arb_seconds\n";
  for (std::size_t k = 0; k < r.antennas.size(); ++k) {
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.antennas[k], r.distances[k], csv_number(r.alpha[k]),
                       csv_number(r.beta[k]), csv_number(r.rho.rho_a), csv_number(r.rho.rho_b), r.repetitions,
                       csv_number(r.remainder.seconds(r.slot_duration)),
                       csv_number(r.collection_time.seconds(r.slot_duration)));
  }
  return out;
}

std::string gains_to_json(const RfGains& gains) {
  json alpha = json::array();
  json beta = json::array();
  for (const auto z : gains.alpha) alpha.push_back(complex_json(z));
  for (const auto z : gains.beta) beta.push_back(complex_json(z));
  return json{{"alpha", alpha}, {"beta", beta}}.dump() + "\n";
}

RfGains gains_from_json(std::string_view text) {
  const json j = parse(text, "gains");
  RfGains g;
  for (const auto& z : required<json>(j, "alpha", "gains")) g.alpha.push_back(complex_from(z));
  for (const auto& z : required<json>(j, "beta", "gains")) g.beta.push_back(complex_from(z));
  if (g.alpha.size() != g.beta.size()) throw std::invalid_argument("gains JSON: alpha and beta differ in length");
  return g;
}

std::string measurements_to_json(const MeasurementSet& ms) {
  json observations = json::array();
  for (const auto& obs : ms.observations()) {
    json values = json::array();
    for (const auto v : obs.values) values.push_back(complex_json(v));
    observations.push_back({{"tx", obs.link.tx}, {"rx", obs.link.rx}, {"values", values}});
  }
  return json{{"repetitions", ms.repetitions()},
              {"sounding_value", complex_json(ms.sounding_value())},
              {"observations", observations}}
             .dump() +
         "\n";
}

MeasurementSet measurements_from_json(std::string_view text) {
  const json j = parse(text, "measurement set");
  const int repetitions = required<int>(j, "repetitions", "measurement set");
  const Complex sounding =
      j.contains("sounding_value") ? complex_from(j.at("sounding_value")) : Complex{1.0, 0.0};
  std::vector<Observation> observations;
  for (const auto& o : required<json>(j, "observations", "measurement set")) {
    Observation obs;
    obs.link = {required<int>(o, "tx", "observation"), required<int>(o, "rx", "observation")};
    for (const auto& v : required<json>(o, "values", "observation")) obs.values.push_back(complex_from(v));
    observations.push_back(std::move(obs));
  }
  return MeasurementSet(repetitions, std::move(observations), sounding);
}

std::string estimates_to_json(const GainEstimates& est) {
  json antennas = json::array();
  for (std::size_t k = 0; k < est.antennas.size(); ++k) {
    antennas.push_back(
        {{"antenna", est.antennas[k]}, {"alpha", complex_json(est.alpha[k])}, {"beta", complex_json(est.beta[k])}});
  }
  return json{{"reference_alpha", complex_json(est.reference_alpha)},
              {"reference_beta", complex_json(est.reference_beta)},
              {"antennas", antennas}}
             .dump(2) +
         "\n";
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "snr_db,topology,m,reference,I,F_seconds,avg_crlb_alpha,avg_crlb_beta,avg_mse_alpha,avg_mse_beta,trials,"
      "hazard_rate\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", csv_number(r.snr_db), r.topology, r.m, r.reference,
                       r.repetitions, csv_number(r.remainder_seconds), csv_number(r.average_crlb_alpha),
                       csv_number(r.average_crlb_beta), csv_number(r.average_mse_alpha),
                       csv_number(r.average_mse_beta), r.trials, csv_number(r.hazard_rate));
  }
  return out;
}

std::string sweep_to_json(const std::vector<SweepRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"snr_db", r.snr_db},
                   {"topology", r.topology},
                   {"m", r.m},
                   {"reference", r.reference},
                   {"I", r.repetitions},
                   {"F_seconds", r.remainder_seconds},
                   {"avg_crlb_alpha", r.average_crlb_alpha},
                   {"avg_crlb_beta", r.average_crlb_beta},
                   {"avg_mse_alpha", r.average_mse_alpha},
                   {"avg_mse_beta", r.average_mse_beta},
                   {"trials", r.trials},
                   {"hazard_rate", r.hazard_rate},
                   {"flagged", r.flagged}});
  }
  return out.dump(2) + "\n";
}

ExperimentConfig config_from_json(std::string_view text) {
  const json j = parse(text, "experiment config");
  if (!j.is_object()) throw std::invalid_argument("experiment config must be a JSON object");
  ExperimentConfig cfg;
  try {
    if (j.contains("m")) cfg.m = j.at("m").get<int>();
    if (j.contains("reference")) cfg.reference = j.at("reference").get<int>();
    if (j.contains("topology")) parse_topology_spec(j.at("topology").get<std::string>(), cfg);
    if (j.contains("snr")) {
      const auto& snr = j.at("snr");
      cfg.snr_grid_db = snr.is_string() ? parse_snr_grid(snr.get<std::string>()) : snr.get<std::vector<double>>();
    }
    if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
    if (j.contains("seed")) cfg.master_seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("budget")) parse_budget(j.at("budget").get<std::string>(), cfg);
    if (j.contains("format")) {
      const auto format = j.at("format").get<std::string>();
      if (format == "csv") {
        cfg.output_format = OutputFormat::Csv;
      } else if (format == "json") {
        cfg.output_format = OutputFormat::Json;
      } else {
        throw std::invalid_argument(fmt::format("unknown output format '{}'", format));
      }
    }
    if (j.contains("out")) cfg.output_path = j.at("out").get<std::string>();
    if (j.contains("line_gain")) cfg.line_gain = complex_from(j.at("line_gain"));
    if (j.contains("tx_amplitude")) cfg.tx_amplitude = j.at("tx_amplitude").get<double>();
    if (j.contains("rx_amplitude")) cfg.rx_amplitude = j.at("rx_amplitude").get<double>();
    if (j.contains("slot_duration")) cfg.slot_duration = j.at("slot_duration").get<double>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<unsigned>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(fmt::format("experiment config: {}", e.what()));
  }
  return cfg;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument(fmt::format("cannot open '{}'", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", path));
}

}  // namespace selfcal
