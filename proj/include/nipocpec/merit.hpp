#pragma once

#include <vector>

#include "nipocpec/kkt.hpp"

namespace nipocpec {

/// l1 constraint violation M_k = |Psi_G|_1 + |C|_1 + |x_{k-1} + F|_1 + |Psi_Phi|_1.
struct ConstraintViolation {
  std::vector<double> per_stage;
  double total = 0.0;
};

ConstraintViolation constraint_violation(const DiscretizedOCPEC& problem, const Iterate& y,
                                         const std::vector<StageEval>& evals, double z);
ConstraintViolation constraint_violation(const DiscretizedOCPEC& problem, const Iterate& y,
                                         double s, double z);

double total_cost(const std::vector<StageEval>& evals);

/// Theta = sum L + beta * sum M.
double merit(const DiscretizedOCPEC& problem, const Iterate& y, double s, double z, double beta);
double merit(const std::vector<StageEval>& evals, double violation, double beta);

/// sum_k grad L_k . dZ_k
double cost_slope(const std::vector<StageEval>& evals, const StageVector& direction);

inline constexpr double kViolationFloor = 1e-12;
inline constexpr double kPenaltyPad = 1e-4;

/// beta = max(beta_prev, slope / ((1 - rho) sum M) + pad) when sum M is above
/// the floor; otherwise beta_prev.
double update_penalty(double beta_prev, double slope, double violation, double rho);

/// D Theta = slope - beta * sum M.
inline double directional_derivative(double slope, double violation, double beta) {
  return slope - beta * violation;
}

struct MeritState {
  double beta = 1.0;
  double rho = 0.1;
  double slope = 0.0;
  double directional_derivative = 0.0;
  double last_alpha = 0.0;
};

}  // namespace nipocpec
