#pragma once

#include <vector>

#include "nipocpec/line_search.hpp"

namespace nipocpec {

struct RestorationOptions {
  double nu_sc = 1e-6;
  double nu_m = 0.9;
  double lambda_max = 1000.0;
  int j_max = 20;
  double nu_j = 1e-7;
  double nu_g = 1e-7;
  double rho = 0.1;
  double beta0 = 1.0;
  double nu_alpha = 0.7;
  double alpha_min = 0.01;
  double nu_d = 1e-4;
  RiccatiOptions riccati;
};

/// Feasibility NLP: the parent's constraints with the proximity objective
/// 1/2 (Z - Z_ref)^T D (Z - Z_ref), D = nu_sc diag(min(1, 1/|Z_ref|)).
struct RestorationProblem {
  DiscretizedOCPEC problem;
  std::vector<Vec> reference;
  std::vector<Vec> scaling;
};

RestorationProblem build_restoration(const DiscretizedOCPEC& problem, const Iterate& start,
                                     double nu_sc = 1e-6);

enum class RestorationStatus { kRestored, kFailed };

struct RestorationOutcome {
  Iterate y;
  RestorationStatus status = RestorationStatus::kFailed;
  int inner_iterations = 0;
  double violation_start = 0.0;
  double violation_end = 0.0;
  /// (s, z) used by every inner iteration, and the inner step kinds.
  std::vector<std::pair<double, double>> perturbations;
  std::vector<StepKind> steps;
  bool duals_reset = false;
};

/// Approximately solves the feasibility NLP with SOC disabled and (s, z)
/// frozen, stopping once sum M <= nu_m * sum M(start). On success the
/// equality duals are recovered by least squares; on failure the start iterate
/// is returned unchanged.
RestorationOutcome run_restoration(const DiscretizedOCPEC& problem, const Iterate& start, double s,
                                   double z, const RestorationOptions& options,
                                   RiccatiSolver* solver = nullptr);

struct EqualityDuals {
  std::vector<Vec> eta;
  std::vector<Vec> lambda;
  bool reset = false;
};

/// Stage-wise minimum-norm least-squares solve of
///   [C_z^T F_z^T] (eta_k, lambda_k) = -(grad L - G_z^T sigma - Phi_z^T gamma + [lambda_{k+1}; 0])
/// from the last stage backwards. Everything is zeroed if the stacked result
/// reaches lambda_max in the infinity norm.
EqualityDuals recover_equality_duals(const DiscretizedOCPEC& problem, const Iterate& y, double s,
                                     double lambda_max = 1000.0);

}  // namespace nipocpec
