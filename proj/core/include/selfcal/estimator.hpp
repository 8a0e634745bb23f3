#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "selfcal/scenario.hpp"
#include "selfcal/simulate.hpp"
#include "selfcal/topology.hpp"

namespace selfcal {

/// Per-link sample mean over repetitions. Under i.i.d. Gaussian noise this is a
/// sufficient statistic; the result has I = 1 and noise variance sigma^2 / I.
MeasurementSet collapse_repetitions(const MeasurementSet& ms);

struct GainEstimates {
  std::vector<int> antennas;  // ordinary antennas, ascending
  std::vector<Complex> alpha;
  std::vector<Complex> beta;
  Complex reference_alpha;
  Complex reference_beta;

  Complex alpha_of(int antenna) const;
  Complex beta_of(int antenna) const;
};

struct EstimatorOptions {
  /// An intermediate estimate smaller than this fraction of its nominal amplitude aborts
  /// the solve.
  double relative_floor = 1e-9;
};

class DivisionHazard : public std::runtime_error {
 public:
  DivisionHazard(const std::string& what, int antenna) : std::runtime_error(what), antenna_(antenna) {}
  int antenna() const noexcept { return antenna_; }

 private:
  int antenna_;
};

/// Maximum-likelihood gains for a tree wiring. Walking breadth-first from the
/// reference, each edge (parent p, child q) gives
///   beta_q  = y_{q<-p} / (h * alpha_p),   alpha_q = y_{p<-q} / (beta_p * h).
/// With 2(M-1) observations and 2(M-1) unknowns every residual vanishes, which
/// maximizes the Gaussian likelihood.
///
/// Requires a collapsed set (I = 1). Throws DivisionHazard when an estimate falls
/// below the floor.
GainEstimates ml_estimate(const MeasurementSet& ms, const Topology& t, const ScenarioParams& s, Complex ref_alpha,
                          Complex ref_beta, const EstimatorOptions& options = {});

struct EstimationError {
  std::vector<int> antennas;
  std::vector<double> alpha;  // |alpha_hat - alpha|^2
  std::vector<double> beta;
  double average_alpha = 0.0;
  double average_beta = 0.0;
};

EstimationError estimation_error(const GainEstimates& est, const RfGains& truth);

}  // namespace selfcal
