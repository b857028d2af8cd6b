#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nipocpec/restoration.hpp"

namespace nipocpec {

struct SolverOptions {
  int k_max = 500;
  double tol_primal = 1e-4;
  double tol_dual = 1e-4;
  double tol_max = 1e-2;

  double s_init = 1e-1;
  double z_init = 1e-1;
  double s_final = 1e-4;
  double z_final = 1e-4;
  double kappa_st = 0.2;
  double kappa_zt = 0.2;
  double kappa_se = 1.5;
  double kappa_ze = 1.5;

  double nu_j = 1e-7;
  double nu_g = 1e-7;

  double rho = 0.1;
  double beta0 = 1.0;
  double alpha_min = 0.01;
  double nu_alpha = 0.7;
  double nu_d = 1e-4;
  bool soc_enabled = true;

  double nu_sc = 1e-6;
  double nu_m = 0.9;
  double lambda_max = 1000.0;
  int j_max = 20;

  RiccatiOptions riccati;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  RestorationOptions restoration() const;
  LineSearchOptions line_search() const;
};

enum class SolveStatus { kOptimal, kMaxIterations, kRestorationFailed, kEvaluatorError };

std::string_view to_string(SolveStatus status);

struct IterationRecord {
  int iteration = 0;
  // measured at the iterate the step started from
  double cost = 0.0;
  double merit = 0.0;
  double violation = 0.0;
  double primal_inf = 0.0;
  double dual_inf = 0.0;
  double kkt_norm = 0.0;
  // step; merit_accepted uses the same beta, s and z as merit
  double merit_accepted = 0.0;
  double alpha = 0.0;
  StepKind kind = StepKind::kFailure;
  int trials = 0;
  double s = 0.0;
  double z = 0.0;
  double beta = 0.0;
  double directional_derivative = 0.0;
  bool soc_attempted = false;
  bool frp = false;
};

struct RestorationEvent {
  int iteration = 0;
  RestorationStatus status = RestorationStatus::kFailed;
  int inner_iterations = 0;
  double violation_before = 0.0;
  double violation_after = 0.0;
  bool soc_used = false;
};

struct TerminationDecision {
  bool stop = false;
  bool primal = false;
  bool dual = false;
  bool max = false;
  /// True when the disjunction held through exactly one branch.
  bool single_branch() const { return stop && (int(primal) + int(dual) + int(max)) == 1; }
};

struct SolveReport {
  SolveStatus status = SolveStatus::kMaxIterations;
  Iterate y;
  double s = 0.0;
  double z = 0.0;
  int iterations = 0;
  int accepted_steps = 0;
  std::vector<IterationRecord> history;
  std::vector<RestorationEvent> restorations;
  TerminationDecision termination;
  double final_cost = 0.0;
  double final_primal_inf = 0.0;
  double final_dual_inf = 0.0;
  long factorizations = 0;
  long resolves = 0;
  double wall_time = 0.0;
  std::string message;
};

/// (s <= s* and z <= z*) and (primal <= T_p or dual <= T_d or max <= T_max).
TerminationDecision check_termination(double s, double z, double primal_inf, double dual_inf,
                                      const SolverOptions& options);

/// Superlinear decrease toward (s*, z*) when primal_inf <= 10 T_p.
std::pair<double, double> update_perturbation(double s, double z, double primal_inf,
                                              const SolverOptions& options);

/// Primals zero, inequality duals one, equality duals zero.
Iterate cold_start(const DiscretizedOCPEC& problem);

/// Continuation loop: termination test, Newton direction by Riccati
/// recursion, penalty update, merit line search with SOC, restoration on
/// failure, perturbation update.
SolveReport solve(const DiscretizedOCPEC& problem, const Iterate& y0,
                  const SolverOptions& options = {});

}  // namespace nipocpec
