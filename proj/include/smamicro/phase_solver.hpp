#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace smamicro {

/// Per-triangle binary phase: 1 selects the first variant, 0 the second.
using PhaseField = std::vector<std::uint8_t>;

struct PairwiseTerm {
  int first = -1;
  int second = -1;
  double weight = 0.0;  ///< cost paid when the two phases differ, >= 0
};

/// Binary labeling problem  min_z  sum_T unary[T] z_T + sum_E w_E |z+ - z-|.
/// `previous` is the phase field of the last time step; it only enters the
/// tie-breaking (the dissipation sign is already folded into `unary`).
struct PhaseProblem {
  std::vector<double> unary;
  std::vector<PairwiseTerm> pairwise;
  PhaseField previous;

  int size() const { return static_cast<int>(unary.size()); }
  bool decoupled() const;
  /// Throws std::invalid_argument on size mismatch, bad indices, non-finite
  /// or negative weights.
  void validate() const;
};

class CoupledProblemError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double phase_objective(const PhaseProblem& problem, const PhaseField& z);

/// Sign rule: z = 0 where unary > 0, z = 1 where unary < 0, previous value on
/// ties. Throws CoupledProblemError if any pairwise weight is nonzero.
PhaseField solve_decoupled(const PhaseProblem& problem);

/// Exact minimizer via a minimum s-t cut. Among all minimizers returns one
/// with the fewest changes relative to `previous`.
PhaseField solve_coupled(const PhaseProblem& problem);

/// Dispatches to solve_decoupled when all weights vanish.
PhaseField solve_phase(const PhaseProblem& problem);

struct LpRelaxationReport {
  double candidate_objective = 0.0;  ///< objective of the checked binary z
  double lp_objective = 0.0;         ///< optimum over z in [0,1], sigma >= |z+ - z-|
  double dual_bound = 0.0;           ///< b^T y of the simplex multipliers
  double duality_gap = 0.0;          ///< candidate_objective - dual_bound
  double dual_infeasibility = 0.0;
  bool lp_integral = false;          ///< LP vertex has all z, sigma in {0,1}
  bool sigma_identity = false;       ///< LP sigma equals |z+ - z-| on every edge
  bool candidate_optimal = false;    ///< duality_gap <= tolerance
  std::vector<double> lp_z;
  std::vector<double> lp_sigma;
};

/// Solves the LP relaxation with multipliers sigma constrained by
/// z+ - z- - sigma <= 0 and z- - z+ - sigma <= 0, and certifies `z`.
LpRelaxationReport lp_relaxation_check(const PhaseProblem& problem, const PhaseField& z,
                                       double gap_tolerance = 1e-9);

}  // namespace smamicro
