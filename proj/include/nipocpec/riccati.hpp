#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "nipocpec/kkt.hpp"

namespace nipocpec {

/// Raised when a reduced stage block is numerically singular.
class SingularStageBlock : public std::runtime_error {
 public:
  explicit SingularStageBlock(int stage)
      : std::runtime_error("singular reduced block at stage " + std::to_string(stage)),
        stage_(stage) {}
  int stage() const { return stage_; }

 private:
  int stage_;
};

struct RiccatiOptions {
  /// Reduced blocks whose (row-equilibrated) condition estimate exceeds this
  /// are rejected.
  double max_condition = 1e14;
  /// Use the structural shortcut: B_U A^{-1} B_L only touches the (x, x) block
  /// and needs the (lambda, lambda) block of A^{-1}, i.e. nx solves per stage
  /// instead of ny.
  bool structural_shortcut = true;
  /// When the reduced blocks do not carry N * nz positive eigenvalues in total
  /// (the inertia of K with a positive definite reduced Hessian), refactor with
  /// delta * I added to every primal block, growing delta until they do.
  /// Matrices with the right inertia are factored unchanged.
  bool inertia_correction = true;
  double delta_init = 1e-4;
  double delta_growth = 10.0;
  double delta_decrease = 3.0;
  double delta_max = 1e10;
};

/// LU factors of the reduced blocks A_k from the backward recursion
///   A_{N-1} = J_{N-1},  A_k = J_k - B_U A_{k+1}^{-1} B_L.
/// Enough to reduce and solve any right-hand side without refactoring.
class StageFactorization {
 public:
  StageFactorization() = default;

  const Dimensions& dims() const { return dims_; }
  bool valid() const { return valid_; }
  int stages() const { return static_cast<int>(lu_.size()); }
  /// Primal-block shift the factors include (0 when none was needed).
  double regularization() const { return delta_; }
  /// The (shifted) system the factors belong to.
  const KKTMatrix& system() const { return system_; }

  /// A_k^{-1} b for stage k, undoing the row equilibration.
  Vec solve_stage(int k, const Vec& rhs) const;

 private:
  friend class RiccatiSolver;

  Dimensions dims_;
  KKTMatrix system_;
  std::vector<Eigen::PartialPivLU<Mat>> lu_;
  std::vector<Vec> row_scale_;
  double delta_ = 0.0;
  bool valid_ = false;
};

struct RiccatiSolution {
  StageVector direction;
  StageFactorization factorization;
};

/// Backward/forward recursion on K dY = -T followed by one step of iterative
/// refinement. Keeps counters so callers can verify that resolves never
/// refactor.
class RiccatiSolver {
 public:
  explicit RiccatiSolver(RiccatiOptions options = {}) : options_(options) {}

  RiccatiSolution factor_and_solve(const KKTMatrix& kkt, const KKTResidual& rhs);
  StageVector resolve(const StageFactorization& fact, const KKTResidual& rhs);

  long factorizations() const { return factorizations_; }
  long resolves() const { return resolves_; }
  long inertia_trials() const { return inertia_trials_; }
  double last_regularization() const { return last_delta_; }

 private:
  bool factor_blocks(const KKTMatrix& kkt, double delta, StageFactorization& fact, int* positives,
                     int* failed_stage) const;

  RiccatiOptions options_;
  long factorizations_ = 0;
  long resolves_ = 0;
  long inertia_trials_ = 0;
  double last_delta_ = 0.0;
};

RiccatiSolution factor_and_solve(const KKTMatrix& kkt, const KKTResidual& rhs,
                                 const RiccatiOptions& options = {});
StageVector resolve(const StageFactorization& fact, const KKTResidual& rhs);

}  // namespace nipocpec
