#include "selfcal/crlb.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace selfcal {

void ScenarioParams::validate() const {
  if (line_gain == Complex{0.0, 0.0} || !std::isfinite(std::abs(line_gain))) {
    throw std::invalid_argument("line gain must be nonzero and finite");
  }
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
    throw std::invalid_argument(fmt::format("noise variance must be >= 0, got {}", noise_variance));
  }
  if (!(tx_amplitude > 0.0) || !(rx_amplitude > 0.0)) {
    throw std::invalid_argument(
        fmt::format("gain amplitudes must be positive, got a={} b={}", tx_amplitude, rx_amplitude));
  }
  if (!(slot_duration > 0.0)) {
    throw std::invalid_argument(fmt::format("slot duration must be positive, got {}", slot_duration));
  }
}

ScenarioParams ScenarioParams::with_snr_db(double snr_db) const {
  ScenarioParams out = *this;
  const double signal = tx_amplitude * tx_amplitude * rx_amplitude * rx_amplitude * std::norm(line_gain);
  out.noise_variance = signal * std::pow(10.0, -snr_db / 10.0);
  return out;
}

bool RfGains::has_amplitudes(double a, double b, double relative_tolerance) const {
  if (alpha.size() != beta.size()) return false;
  const auto close = [relative_tolerance](Complex z, double amplitude) {
    return std::abs(std::abs(z) - amplitude) <= relative_tolerance * amplitude;
  };
  return std::all_of(alpha.begin(), alpha.end(), [&](Complex z) { return close(z, a); }) &&
         std::all_of(beta.begin(), beta.end(), [&](Complex z) { return close(z, b); });
}

NoiseRatios noise_ratios(const ScenarioParams& s) {
  s.validate();
  if (!(s.noise_variance > 0.0)) throw std::invalid_argument("bounds need a positive noise variance");
  const double h2 = std::norm(s.line_gain);
  return {s.noise_variance / (s.tx_amplitude * s.tx_amplitude * h2),
          s.noise_variance / (s.rx_amplitude * s.rx_amplitude * h2)};
}

int FisherMatrix::alpha_row(int antenna) const {
  const auto it = std::lower_bound(antennas.begin(), antennas.end(), antenna);
  if (it == antennas.end() || *it != antenna) {
    throw std::out_of_range(fmt::format("antenna {} has no row in the Fisher matrix", antenna));
  }
  return static_cast<int>(it - antennas.begin());
}

int FisherMatrix::beta_row(int antenna) const {
  return alpha_row(antenna) + static_cast<int>(antennas.size());
}

FisherMatrix fisher_matrix_for_edges(int m, int reference, std::span<const Edge> edges,
                                     const RfGains& gains, const ScenarioParams& s) {
  noise_ratios(s);  // validates, including sigma^2 > 0
  if (m < 2 || reference < 1 || reference > m) {
    throw std::invalid_argument(fmt::format("invalid antenna count {} or reference {}", m, reference));
  }
  if (gains.size() != m || gains.beta.size() != gains.alpha.size()) {
    throw std::invalid_argument(fmt::format("gain vectors must have {} entries", m));
  }

  FisherMatrix j;
  for (int k = 1; k <= m; ++k) {
    if (k != reference) j.antennas.push_back(k);
  }
  const int n = m - 1;
  j.entries = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  const auto position = [reference](int antenna) { return antenna < reference ? antenna - 1 : antenna - 2; };

  for (const Edge& e : edges) {
    if (e.p < 1 || e.p > m || e.q < 1 || e.q > m || e.p == e.q) {
      throw std::invalid_argument(fmt::format("malformed edge ({},{})", e.p, e.q));
    }
    // Each wired pair contributes y_{p<-q} and y_{q<-p}; accumulate both endpoints.
    for (const auto& [u, v] : {std::pair{e.p, e.q}, std::pair{e.q, e.p}}) {
      if (u == reference) continue;
      const int row = position(u);
      j.entries(row, row) += std::norm(gains.beta_of(v));          // A
      j.entries(n + row, n + row) += std::norm(gains.alpha_of(v));  // B
      if (v != reference) {
        // D(u, v) = beta_u * conj(alpha_v), stored in the beta-row / alpha-column block.
        const int col = position(v);
        const Complex d = gains.beta_of(u) * std::conj(gains.alpha_of(v));
        j.entries(n + row, col) += d;
        j.entries(col, n + row) += std::conj(d);
      }
    }
  }
  j.entries *= std::norm(s.line_gain) / s.noise_variance;
  return j;
}

FisherMatrix fisher_matrix(const Topology& t, const RfGains& gains, const ScenarioParams& s,
                           double amplitude_tolerance) {
  s.validate();
  if (!gains.has_amplitudes(s.tx_amplitude, s.rx_amplitude, amplitude_tolerance)) {
    throw std::invalid_argument(fmt::format("gains violate |alpha|={} |beta|={} within relative {}",
                                            s.tx_amplitude, s.rx_amplitude, amplitude_tolerance));
  }
  return fisher_matrix_for_edges(t.size(), t.reference(), t.edges(), gains, s);
}

NumericCrlb crlb_numeric(const FisherMatrix& j, double max_condition) {
  const int n = j.order();
  if (n == 0 || n % 2 != 0 || static_cast<std::size_t>(n) != 2 * j.antennas.size()) {
    throw std::invalid_argument("Fisher matrix order does not match its index map");
  }

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(j.entries, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw SingularFisherError("eigenvalue solve failed", INFINITY);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  const double condition = lo > 0.0 ? hi / lo : INFINITY;
  if (!(condition <= max_condition)) {
    throw SingularFisherError(
        fmt::format("Fisher matrix is singular or ill-conditioned (condition {:.3g} > {:.3g}); "
                    "the wiring is not effective or the gains are degenerate",
                    condition, max_condition),
        condition);
  }

  const Eigen::LLT<Eigen::MatrixXcd> llt(j.entries);
  if (llt.info() != Eigen::Success) {
    throw SingularFisherError("Fisher matrix is not positive definite", condition);
  }
  const Eigen::MatrixXcd inverse = llt.solve(Eigen::MatrixXcd::Identity(n, n));

  NumericCrlb out;
  out.antennas = j.antennas;
  out.condition_number = condition;
  const int half = n / 2;
  out.alpha.reserve(half);
  out.beta.reserve(half);
  for (int k = 0; k < half; ++k) {
    out.alpha.push_back(inverse(k, k).real());
    out.beta.push_back(inverse(half + k, half + k).real());
  }
  return out;
}

SlotCount time_to_collect(const Topology& t) { return SlotCount{2 * static_cast<std::int64_t>(max_degree(t))}; }

RepetitionBudget repetition_budget(SlotCount budget, SlotCount t_arb) {
  if (t_arb.value <= 0) throw std::invalid_argument("collection time must be positive");
  if (budget < t_arb) {
    throw std::invalid_argument(
        fmt::format("budget of {} slots is below one collection round of {} slots", budget.value, t_arb.value));
  }
  return {budget.value / t_arb.value, SlotCount{budget.value % t_arb.value}};
}

namespace {

CrlbReport closed_form_report(const Topology& t, const ScenarioParams& s, std::int64_t repetitions,
                              SlotCount remainder) {
  const auto profile = calibration_distances(t);
  CrlbReport r;
  r.rho = noise_ratios(s);
  r.antennas = profile.antennas;
  r.distances = profile.distances;
  r.mean_distance = profile.mean;
  r.repetitions = repetitions;
  r.remainder = remainder;
  r.collection_time = time_to_collect(t);
  r.slot_duration = s.slot_duration;
  const auto reps = static_cast<double>(repetitions);
  for (int d : profile.distances) {
    r.alpha.push_back(d * r.rho.rho_b / reps);
    r.beta.push_back(d * r.rho.rho_a / reps);
  }
  const double dbar = boost::rational_cast<double>(profile.mean);
  r.average_alpha = dbar * r.rho.rho_b / reps;
  r.average_beta = dbar * r.rho.rho_a / reps;
  return r;
}

}  // namespace

CrlbReport crlb_closed_form(const Topology& t, const ScenarioParams& s) {
  return closed_form_report(t, s, 1, SlotCount{0});
}

CrlbReport budgeted_average_crlb(const Topology& t, const ScenarioParams& s, SlotCount budget) {
  const auto [reps, remainder] = repetition_budget(budget, time_to_collect(t));
  return closed_form_report(t, s, reps, remainder);
}

Rational daisy_mean_distance(int m, int f) {
  if (m < 2 || f < 1 || f > m) {
    throw std::invalid_argument(fmt::format("need M >= 2 and 1 <= f <= M, got M={} f={}", m, f));
  }
  const std::int64_t mm = m;
  const std::int64_t ff = f;
  return Rational(mm - 2 * ff, 2) + Rational((ff - 1) * (ff - 1), mm - 1) + 1;
}

OptimalReference optimal_reference(int m) {
  if (m < 2) throw std::invalid_argument(fmt::format("need at least 2 antennas, got {}", m));
  const int f = (m + 1) / 2;
  return {f, daisy_mean_distance(m, f)};
}

DaisyAdvantage daisy_advantage(int m) {
  if (m < 3) throw std::invalid_argument(fmt::format("the daisy budget ratio needs M >= 3, got {}", m));
  const std::int64_t mm = m;
  DaisyAdvantage out;
  out.ratio = m % 2 == 1 ? Rational(mm + 1, 2 * mm - 2) : Rational(mm * mm, 2 * mm * mm - 6 * mm + 4);
  out.asymptote = Rational(1, 2);
  return out;
}

}  // namespace selfcal
