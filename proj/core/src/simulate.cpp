#include "selfcal/simulate.hpp"

#include <algorithm>
#include <numbers>

#include <fmt/format.h>

#include "selfcal/rng.hpp"

namespace selfcal {

namespace {

constexpr std::uint64_t kAlphaStream = 1;
constexpr std::uint64_t kBetaStream = 2;
constexpr std::uint64_t kNoiseStream = 3;

}  // namespace

RfGains draw_gains(int m, const ScenarioParams& s, std::uint64_t seed) {
  if (m < 2) throw std::invalid_argument(fmt::format("need at least 2 antennas, got {}", m));
  s.validate();
  const auto alpha_key = rng::stream_key(seed, {kAlphaStream});
  const auto beta_key = rng::stream_key(seed, {kBetaStream});
  const auto phase = [](std::uint64_t key, int antenna) {
    return -std::numbers::pi + 2.0 * std::numbers::pi * rng::uniform(key, static_cast<std::uint64_t>(antenna));
  };

  RfGains g;
  g.alpha.reserve(m);
  g.beta.reserve(m);
  for (int k = 1; k <= m; ++k) {
    g.alpha.push_back(std::polar(s.tx_amplitude, phase(alpha_key, k)));
    g.beta.push_back(std::polar(s.rx_amplitude, phase(beta_key, k)));
  }
  return g;
}

MeasurementSet::MeasurementSet(int repetitions, std::vector<Observation> observations, Complex sounding_value)
    : repetitions_(repetitions), sounding_value_(sounding_value), observations_(std::move(observations)) {
  if (repetitions_ < 1) throw std::invalid_argument(fmt::format("repetitions must be >= 1, got {}", repetitions_));
  std::sort(observations_.begin(), observations_.end(),
            [](const Observation& a, const Observation& b) { return a.link < b.link; });
  for (std::size_t k = 0; k < observations_.size(); ++k) {
    const auto& obs = observations_[k];
    if (obs.values.size() != static_cast<std::size_t>(repetitions_)) {
      throw std::invalid_argument(fmt::format("link {}->{} carries {} values, expected {}", obs.link.tx,
                                              obs.link.rx, obs.values.size(), repetitions_));
    }
    if (k > 0 && observations_[k - 1].link == obs.link) {
      throw std::invalid_argument(fmt::format("link {}->{} appears twice", obs.link.tx, obs.link.rx));
    }
  }
}

const Observation* MeasurementSet::find(int tx, int rx) const {
  const Link key{tx, rx};
  const auto it = std::lower_bound(observations_.begin(), observations_.end(), key,
                                   [](const Observation& o, const Link& l) { return o.link < l; });
  return it != observations_.end() && it->link == key ? &*it : nullptr;
}

const Observation& MeasurementSet::at(int tx, int rx) const {
  const Observation* obs = find(tx, rx);
  if (obs == nullptr) throw std::out_of_range(fmt::format("no measurement for link {}->{}", tx, rx));
  return *obs;
}

Complex MeasurementSet::value(int tx, int rx, int repetition) const {
  const auto& obs = at(tx, rx);
  if (repetition < 1 || repetition > repetitions_) {
    throw std::out_of_range(fmt::format("repetition {} outside 1..{}", repetition, repetitions_));
  }
  return obs.values[static_cast<std::size_t>(repetition - 1)];
}

MeasurementSet synthesize(const Topology& t, const RfGains& gains, const ScenarioParams& s, int repetitions,
                          std::uint64_t seed) {
  s.validate();
  if (gains.size() != t.size()) {
    throw std::invalid_argument(fmt::format("gains cover {} antennas, topology has {}", gains.size(), t.size()));
  }
  if (repetitions < 1) throw std::invalid_argument(fmt::format("repetitions must be >= 1, got {}", repetitions));

  const Complex sounding{1.0, 0.0};
  std::vector<Observation> observations;
  observations.reserve(2 * t.edges().size());
  for (const Edge& e : t.edges()) {
    for (const Link link : {Link{e.p, e.q}, Link{e.q, e.p}}) {
      const Complex clean = gains.beta_of(link.rx) * s.line_gain * gains.alpha_of(link.tx) * sounding;
      const auto key = rng::stream_key(seed, {kNoiseStream, static_cast<std::uint64_t>(link.tx),
                                              static_cast<std::uint64_t>(link.rx)});
      Observation obs{link, std::vector<Complex>(static_cast<std::size_t>(repetitions), clean)};
      if (s.noise_variance > 0.0) {
        for (int r = 0; r < repetitions; ++r) {
          obs.values[r] += rng::circular_normal(key, static_cast<std::uint64_t>(r), s.noise_variance);
        }
      }
      observations.push_back(std::move(obs));
    }
  }
  return MeasurementSet(repetitions, std::move(observations), sounding);
}

}  // namespace selfcal
