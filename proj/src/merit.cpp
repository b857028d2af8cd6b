#include "nipocpec/merit.hpp"

#include <algorithm>

#include "nipocpec/fischer_burmeister.hpp"

namespace nipocpec {

ConstraintViolation constraint_violation(const DiscretizedOCPEC& problem, const Iterate& y,
                                         const std::vector<StageEval>& evals, double z) {
  const int N = problem.dims().N;
  ConstraintViolation m;
  m.per_stage.resize(N);
  for (int k = 0; k < N; ++k) {
    const StageEval& ev = evals[k];
    double v = fb(Vec(y.sigma(k)), ev.G, z).lpNorm<1>();
    v += ev.C.lpNorm<1>();
    v += dynamics_defect(problem, y, k, ev).lpNorm<1>();
    v += fb(Vec(y.gamma(k)), ev.Phi, z).lpNorm<1>();
    m.per_stage[k] = v;
    m.total += v;
  }
  return m;
}

ConstraintViolation constraint_violation(const DiscretizedOCPEC& problem, const Iterate& y,
                                         double s, double z) {
  return constraint_violation(problem, y, evaluate_stages(problem, y, s, false), z);
}

double total_cost(const std::vector<StageEval>& evals) {
  double c = 0.0;
  for (const auto& ev : evals) c += ev.cost;
  return c;
}

double merit(const std::vector<StageEval>& evals, double violation, double beta) {
  return total_cost(evals) + beta * violation;
}

double merit(const DiscretizedOCPEC& problem, const Iterate& y, double s, double z, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("merit: beta must be positive");
  const auto evals = evaluate_stages(problem, y, s, false);
  return merit(evals, constraint_violation(problem, y, evals, z).total, beta);
}

double cost_slope(const std::vector<StageEval>& evals, const StageVector& direction) {
  double slope = 0.0;
  for (int k = 0; k < direction.stages(); ++k) {
    slope += evals[k].cost_gradient.dot(direction.z(k));
  }
  return slope;
}

double update_penalty(double beta_prev, double slope, double violation, double rho) {
  if (violation <= kViolationFloor) return beta_prev;
  return std::max(beta_prev, slope / ((1.0 - rho) * violation) + kPenaltyPad);
}

}  // namespace nipocpec
