#pragma once

#include <cstdint>
#include <vector>

#include "selfcal/scenario.hpp"
#include "selfcal/topology.hpp"

namespace selfcal {

/// Unit-amplitude-scaled gains with phases i.i.d. uniform on [-pi, pi); deterministic in `seed`.
RfGains draw_gains(int m, const ScenarioParams& s, std::uint64_t seed);

/// All repetitions of one directed measurement y_{rx <- tx}.
struct Observation {
  Link link;
  std::vector<Complex> values;  // one entry per repetition
};

/// Noisy sounding measurements over every wired pair, in both directions, I times each.
class MeasurementSet {
 public:
  /// Throws std::invalid_argument if any observation does not carry exactly `repetitions`
  /// values or a directed link appears twice.
  MeasurementSet(int repetitions, std::vector<Observation> observations, Complex sounding_value = {1.0, 0.0});

  int repetitions() const noexcept { return repetitions_; }
  Complex sounding_value() const noexcept { return sounding_value_; }
  /// Sorted by link.
  const std::vector<Observation>& observations() const noexcept { return observations_; }

  bool contains(int tx, int rx) const { return find(tx, rx) != nullptr; }
  /// y_{rx <- tx} for repetition 1..I. Throws std::out_of_range for unmeasured links.
  Complex value(int tx, int rx, int repetition = 1) const;
  const Observation& at(int tx, int rx) const;

  /// Total number of scalar observations, 2(M-1) * I for a tree.
  std::size_t size() const noexcept { return observations_.size() * static_cast<std::size_t>(repetitions_); }

 private:
  const Observation* find(int tx, int rx) const;

  int repetitions_;
  Complex sounding_value_;
  std::vector<Observation> observations_;
};

/// y_{rx <- tx} = beta_rx * h * alpha_tx * 1 + n with n circularly-symmetric complex
/// Gaussian of variance sigma^2. The noise sample for (tx, rx, repetition) is keyed by
/// those indices and `seed`, independent of generation order.
MeasurementSet synthesize(const Topology& t, const RfGains& gains, const ScenarioParams& s, int repetitions,
                          std::uint64_t seed);

}  // namespace selfcal
