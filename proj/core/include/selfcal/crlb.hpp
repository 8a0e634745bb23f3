#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "selfcal/scenario.hpp"
#include "selfcal/topology.hpp"

namespace selfcal {

/// Inverse-SNR ratios that scale every bound:
/// rho_a = sigma^2 / (a^2 |h|^2), rho_b = sigma^2 / (b^2 |h|^2).
struct NoiseRatios {
  double rho_a = 0.0;
  double rho_b = 0.0;
};

NoiseRatios noise_ratios(const ScenarioParams& s);

/// Fisher information for theta = [alpha^T, beta^T]^T over the ordinary antennas.
///
/// Layout is [[A, D^H], [D, B]] scaled by |h|^2 / sigma^2, where A and B are the
/// diagonal neighbour-power sums and D = Diag{beta} * Abar * Diag{conj(alpha)} with Abar
/// the interconnection matrix stripped of the reference row and column.
struct FisherMatrix {
  Eigen::MatrixXcd entries;
  std::vector<int> antennas;  // ordinary antennas; alpha row k, beta row k + antennas.size()

  int order() const noexcept { return static_cast<int>(entries.rows()); }
  int alpha_row(int antenna) const;
  int beta_row(int antenna) const;
};

/// Requires the gains to satisfy the common-amplitude assumption within
/// `amplitude_tolerance` (relative).
FisherMatrix fisher_matrix(const Topology& t, const RfGains& gains, const ScenarioParams& s,
                           double amplitude_tolerance = 1e-9);

/// Same construction for an arbitrary, unvalidated edge list (used to show that
/// non-effective wirings lead to a singular matrix). No amplitude check.
FisherMatrix fisher_matrix_for_edges(int m, int reference, std::span<const Edge> edges,
                                     const RfGains& gains, const ScenarioParams& s);

class SingularFisherError : public std::runtime_error {
 public:
  SingularFisherError(const std::string& what, double condition_number)
      : std::runtime_error(what), condition_number_(condition_number) {}
  double condition_number() const noexcept { return condition_number_; }

 private:
  double condition_number_;
};

struct NumericCrlb {
  std::vector<int> antennas;
  std::vector<double> alpha;
  std::vector<double> beta;
  double condition_number = 0.0;
};

inline constexpr double kMaxFisherCondition = 1e12;

/// Diagonal of J^{-1}, from a Hermitian solve of J X = I. Throws SingularFisherError
/// when J is not positive definite or its condition number exceeds `max_condition`.
NumericCrlb crlb_numeric(const FisherMatrix& j, double max_condition = kMaxFisherCondition);

struct CrlbReport {
  std::vector<int> antennas;
  std::vector<int> distances;
  std::vector<double> alpha;  // CRLB(alpha_m) = d_m rho_b / I
  std::vector<double> beta;   // CRLB(beta_m) = d_m rho_a / I
  double average_alpha = 0.0;
  double average_beta = 0.0;
  Rational mean_distance;
  NoiseRatios rho;
  std::int64_t repetitions = 1;
  SlotCount remainder;
  SlotCount collection_time;
  double slot_duration = 1.0;
};

/// Per-antenna bounds from calibration distances, one measurement round (I = 1).
CrlbReport crlb_closed_form(const Topology& t, const ScenarioParams& s);

/// T_arb = 2 * N_max slots.
SlotCount time_to_collect(const Topology& t);

struct RepetitionBudget {
  std::int64_t repetitions = 0;  // I
  SlotCount remainder;           // F
};

/// I = floor(budget / t_arb), F = budget mod t_arb. Throws std::invalid_argument when
/// the budget does not cover one collection round.
RepetitionBudget repetition_budget(SlotCount budget, SlotCount t_arb);

/// Closed-form report with I full collection rounds inside `budget`; the leftover F
/// slots are recorded but unused.
CrlbReport budgeted_average_crlb(const Topology& t, const ScenarioParams& s, SlotCount budget);

/// Mean calibration distance of a daisy chain with reference at position f:
/// (M - 2f)/2 + (f - 1)^2/(M - 1) + 1.
Rational daisy_mean_distance(int m, int f);

struct OptimalReference {
  int reference = 0;
  Rational mean_distance;
};

/// Daisy-chain reference position floor((M + 1)/2) and its mean distance.
OptimalReference optimal_reference(int m);

struct DaisyAdvantage {
  Rational ratio;      // dbar / I for the mid-referenced daisy under a 2(M-1)T budget
  Rational asymptote;  // limit as M grows
};

/// (M+1)/(2M-2) for odd M, M^2/(2M^2-6M+4) for even M; requires M >= 3.
DaisyAdvantage daisy_advantage(int m);

}  // namespace selfcal
