#pragma once

#include <complex>
#include <vector>

namespace selfcal {

using Complex = std::complex<double>;

/// Physical constants of one calibration run. Every line shares the gain `line_gain`,
/// and all transmit (receive) chains share the amplitude `tx_amplitude` (`rx_amplitude`).
struct ScenarioParams {
  Complex line_gain{1.0, 0.0};
  double noise_variance = 1.0;  // per complex measurement; 0 means noiseless synthesis
  double tx_amplitude = 1.0;
  double rx_amplitude = 1.0;
  double slot_duration = 1.0;  // seconds per sounding measurement

  /// Throws std::invalid_argument on a zero line gain, negative noise, or non-positive
  /// amplitudes or slot duration.
  void validate() const;

  /// Sets the noise variance from SNR = a^2 b^2 |h|^2 / sigma^2 (unit sounding signal).
  ScenarioParams with_snr_db(double snr_db) const;
};

/// Ground-truth RF gains, indexed by 1-based antenna through the accessors.
struct RfGains {
  std::vector<Complex> alpha;  // transmit
  std::vector<Complex> beta;   // receive

  int size() const noexcept { return static_cast<int>(alpha.size()); }
  Complex alpha_of(int antenna) const { return alpha.at(static_cast<std::size_t>(antenna - 1)); }
  Complex beta_of(int antenna) const { return beta.at(static_cast<std::size_t>(antenna - 1)); }

  /// True when every |alpha_m| = a and |beta_m| = b within `relative_tolerance`.
  bool has_amplitudes(double a, double b, double relative_tolerance = 1e-12) const;
};

}  // namespace selfcal
