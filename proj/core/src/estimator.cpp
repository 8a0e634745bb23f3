#include "selfcal/estimator.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace selfcal {

MeasurementSet collapse_repetitions(const MeasurementSet& ms) {
  if (ms.repetitions() == 1) return ms;
  std::vector<Observation> collapsed;
  collapsed.reserve(ms.observations().size());
  const double scale = 1.0 / ms.repetitions();
  for (const auto& obs : ms.observations()) {
    Complex sum{0.0, 0.0};
    for (const Complex v : obs.values) sum += v;
    collapsed.push_back({obs.link, {sum * scale}});
  }
  return MeasurementSet(1, std::move(collapsed), ms.sounding_value());
}

namespace {

int position_of(const std::vector<int>& antennas, int antenna) {
  const auto it = std::lower_bound(antennas.begin(), antennas.end(), antenna);
  if (it == antennas.end() || *it != antenna) {
    throw std::out_of_range(fmt::format("antenna {} is not an ordinary antenna", antenna));
  }
  return static_cast<int>(it - antennas.begin());
}

}  // namespace

Complex GainEstimates::alpha_of(int antenna) const { return alpha[position_of(antennas, antenna)]; }
Complex GainEstimates::beta_of(int antenna) const { return beta[position_of(antennas, antenna)]; }

GainEstimates ml_estimate(const MeasurementSet& ms, const Topology& t, const ScenarioParams& s, Complex ref_alpha,
                          Complex ref_beta, const EstimatorOptions& options) {
  s.validate();
  if (ms.repetitions() != 1) {
    throw std::invalid_argument(
        fmt::format("ml_estimate needs a collapsed measurement set, got I={}", ms.repetitions()));
  }
  if (ref_alpha == Complex{} || ref_beta == Complex{}) {
    throw std::invalid_argument("reference gains must be nonzero");
  }

  const int m = t.size();
  std::vector<Complex> alpha(m + 1);
  std::vector<Complex> beta(m + 1);
  alpha[t.reference()] = ref_alpha;
  beta[t.reference()] = ref_beta;

  const Complex h = s.line_gain * ms.sounding_value();
  const double alpha_floor = options.relative_floor * s.tx_amplitude;
  const double beta_floor = options.relative_floor * s.rx_amplitude;
  const auto& parent = t.parents();

  for (int q : t.bfs_order()) {
    if (q == t.reference()) continue;
    const int p = parent[q];
    beta[q] = ms.value(p, q) / (h * alpha[p]);
    alpha[q] = ms.value(q, p) / (beta[p] * h);
    if (!(std::abs(beta[q]) >= beta_floor) || !(std::abs(alpha[q]) >= alpha_floor)) {
      throw DivisionHazard(
          fmt::format("estimate for antenna {} collapsed below the floor (|alpha|={:.3g}, |beta|={:.3g}); "
                      "SNR too low for propagation along the calibration path",
                      q, std::abs(alpha[q]), std::abs(beta[q])),
          q);
    }
  }

  GainEstimates est;
  est.antennas = t.ordinary_antennas();
  est.reference_alpha = ref_alpha;
  est.reference_beta = ref_beta;
  est.alpha.reserve(est.antennas.size());
  est.beta.reserve(est.antennas.size());
  for (int k : est.antennas) {
    est.alpha.push_back(alpha[k]);
    est.beta.push_back(beta[k]);
  }
  return est;
}

EstimationError estimation_error(const GainEstimates& est, const RfGains& truth) {
  if (est.alpha.size() != est.antennas.size() || est.beta.size() != est.antennas.size()) {
    throw std::invalid_argument("estimate vectors do not match their antenna list");
  }
  EstimationError err;
  err.antennas = est.antennas;
  err.alpha.reserve(est.antennas.size());
  err.beta.reserve(est.antennas.size());
  double sum_alpha = 0.0;
  double sum_beta = 0.0;
  for (std::size_t k = 0; k < est.antennas.size(); ++k) {
    const int antenna = est.antennas[k];
    if (antenna < 1 || antenna > truth.size()) {
      throw std::invalid_argument(fmt::format("antenna {} is outside the ground truth", antenna));
    }
    err.alpha.push_back(std::norm(est.alpha[k] - truth.alpha_of(antenna)));
    err.beta.push_back(std::norm(est.beta[k] - truth.beta_of(antenna)));
    sum_alpha += err.alpha.back();
    sum_beta += err.beta.back();
  }
  if (!est.antennas.empty()) {
    err.average_alpha = sum_alpha / static_cast<double>(est.antennas.size());
    err.average_beta = sum_beta / static_cast<double>(est.antennas.size());
  }
  return err;
}

}  // namespace selfcal
