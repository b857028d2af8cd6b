#pragma once

#include <memory>
#include <vector>

#include "nipocpec/types.hpp"

namespace nipocpec {

/// Stage cost L_k(Z_k) of the discretized problem, Z_k = (x, tau, p, w).
/// Implementations must be pure and reentrant.
class StageCost {
 public:
  virtual ~StageCost() = default;
  virtual double value(int stage, const Vec& z) const = 0;
  virtual Vec gradient(int stage, const Vec& z) const = 0;
  virtual Mat hessian(int stage, const Vec& z) const = 0;
};

/// Stage constraints of the discretized problem: inequalities G >= 0,
/// equalities C = 0 and the dynamics map F = f dt - x, all functions of Z_k.
class StageConstraints {
 public:
  virtual ~StageConstraints() = default;

  virtual Vec inequality(int stage, const Vec& z) const = 0;
  virtual Mat inequality_jacobian(int stage, const Vec& z) const = 0;
  virtual Vec equality(int stage, const Vec& z) const = 0;
  virtual Mat equality_jacobian(int stage, const Vec& z) const = 0;
  virtual Vec dynamics(int stage, const Vec& z) const = 0;
  virtual Mat dynamics_jacobian(int stage, const Vec& z) const = 0;

  /// Second derivative of -sigma^T G + eta^T C + lambda^T F with respect to Z.
  virtual Mat weighted_hessian(int stage, const Vec& z, const Vec& sigma, const Vec& eta,
                               const Vec& lambda) const = 0;
};

/// Values (and optionally first derivatives) of every stage function at one
/// point. Jacobians are taken with respect to Z; Phi's Jacobian is nonzero only
/// in the (p, w) columns and never depends on s.
struct StageEval {
  double cost = 0.0;
  Vec cost_gradient;
  Vec G, C, F, Phi;
  Mat G_z, C_z, F_z, Phi_z;
  bool has_derivatives = false;
};

/// The stage-wise NLP obtained by transcribing an OCPEC. Immutable after
/// construction; safe to share between threads as long as the evaluators are.
class DiscretizedOCPEC {
 public:
  DiscretizedOCPEC(Dimensions dims, BoundData bounds, Vec x0,
                   std::shared_ptr<const StageCost> cost,
                   std::shared_ptr<const StageConstraints> constraints);

  const Dimensions& dims() const { return dims_; }
  const BoundData& bounds() const { return bounds_; }
  const Vec& x0() const { return x0_; }
  const StageCost& cost() const { return *cost_; }
  const StageConstraints& constraints() const { return *constraints_; }
  std::shared_ptr<const StageConstraints> shared_constraints() const { return constraints_; }

  /// Same constraints, different objective (used by feasibility restoration).
  DiscretizedOCPEC with_cost(std::shared_ptr<const StageCost> cost) const;

  Vec phi(const Vec& z, double s) const;
  Mat phi_jacobian(const Vec& z) const;

  /// Evaluates every stage function; first derivatives only when requested.
  /// Evaluator failures are rethrown as EvaluationError tagged with the stage.
  StageEval evaluate(int stage, const Vec& z, double s, bool derivatives) const;

  /// Hessian of the Hamiltonian
  ///   H = L - sigma^T G + eta^T C + lambda^T F - gamma^T Phi
  /// with respect to Z.
  Mat hamiltonian_hessian(int stage, const Vec& z, const Vec& sigma, const Vec& eta,
                          const Vec& lambda, const Vec& gamma) const;

 private:
  Dimensions dims_;
  BoundData bounds_;
  Vec x0_;
  std::shared_ptr<const StageCost> cost_;
  std::shared_ptr<const StageConstraints> constraints_;
};

}  // namespace nipocpec
