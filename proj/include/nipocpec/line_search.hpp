#pragma once

#include <string_view>
#include <vector>

#include "nipocpec/merit.hpp"
#include "nipocpec/riccati.hpp"

namespace nipocpec {

enum class StepKind { kFullStep, kSocStep, kBacktracked, kFailure };

std::string_view to_string(StepKind kind);

struct LineSearchOptions {
  double nu_alpha = 0.7;
  double alpha_min = 0.01;
  double nu_d = 1e-4;
  double nu_g = 1e-7;
  bool soc_enabled = true;
};

struct LineSearchOutcome {
  Iterate y;
  double alpha = 0.0;
  StepKind kind = StepKind::kFailure;
  int trials = 0;
  std::vector<double> trial_alphas;
  double merit_start = 0.0;
  double merit_accepted = 0.0;
  bool soc_attempted = false;
};

/// Linearization data at the current iterate that the search needs.
struct SearchPoint {
  const Iterate& y;
  const std::vector<StageEval>& evals;  // with derivatives, at y
  const KKTResidual& residual;          // T at y
  double violation;                     // sum M at y
  double s;
  double z;
};

/// Backtracking Armijo search on the l1 merit function with at most one
/// second-order correction when the full step lowers the cost but is rejected.
/// `state.beta` must already be updated for this direction; the search stores
/// the slope and directional derivative it used.
LineSearchOutcome line_search_with_soc(const DiscretizedOCPEC& problem, const SearchPoint& point,
                                       const StageVector& direction,
                                       const StageFactorization& fact, RiccatiSolver& solver,
                                       MeritState& state, const LineSearchOptions& options);

/// Correction term added to T for the second-order correction: constraint
/// values at the full step, FB rows scaled with the current iterate's
/// Jacobian, zero gradient block.
KKTResidual soc_correction(const DiscretizedOCPEC& problem, const SearchPoint& point,
                           const Iterate& full_step, const std::vector<StageEval>& full_evals,
                           double nu_g);

}  // namespace nipocpec
