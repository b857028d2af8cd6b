#pragma once

#include <map>
#include <string>
#include <vector>

#include "nipocpec/iterate.hpp"
#include "nipocpec/problem.hpp"

namespace nipocpec {

struct DerivativeCheckOptions {
  double step = 1e-7;
  /// Relative error above which an entry is flagged; |a - b| / max(1, |b|).
  double tol = 1e-6;
  /// Relaxation parameter used when evaluating Phi.
  double s = 1e-2;
  /// Seed for the multipliers weighting the constraint Hessians.
  unsigned long seed = 0;
  bool hessians = true;
};

struct FlaggedEntry {
  std::string function;
  int stage = 0;
  int row = 0;
  int col = 0;
  double supplied = 0.0;
  double finite_difference = 0.0;
  double error = 0.0;
};

struct DerivativeReport {
  /// Largest relative error per function name: cost_gradient, G_z, C_z, F_z,
  /// Phi_z, cost_hessian, constraint_hessian.
  std::map<std::string, double> max_error;
  std::vector<FlaggedEntry> flagged;
  double tol = 0.0;

  bool passed() const { return flagged.empty(); }
};

/// Central finite differences of every supplied derivative at the primal part
/// of z. Hessians are checked against differences of the supplied gradients,
/// with seeded multipliers for the constraint part.
DerivativeReport check_derivatives(const DiscretizedOCPEC& problem, const Iterate& z,
                                   const DerivativeCheckOptions& options = {});
DerivativeReport check_derivatives(const DiscretizedOCPEC& problem, const Iterate& z, double tol);

}  // namespace nipocpec
