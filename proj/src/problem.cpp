#include "nipocpec/problem.hpp"

#include <string>

#include "nipocpec/scholtes.hpp"

namespace nipocpec {

DiscretizedOCPEC::DiscretizedOCPEC(Dimensions dims, BoundData bounds, Vec x0,
                                   std::shared_ptr<const StageCost> cost,
                                   std::shared_ptr<const StageConstraints> constraints)
    : dims_(dims),
      bounds_(std::move(bounds)),
      x0_(std::move(x0)),
      cost_(std::move(cost)),
      constraints_(std::move(constraints)) {
  dims_.validate();
  bounds_.validate();
  if (!cost_ || !constraints_) throw std::invalid_argument("problem: missing evaluator");
  if (bounds_.size() != dims_.np) throw DimensionError("problem: bounds length must equal np");
  if (scholtes_row_count(bounds_) != dims_.ngamma) {
    throw DimensionError("problem: ngamma inconsistent with the bound pattern");
  }
  if (x0_.size() != dims_.nx) throw DimensionError("problem: x0 length must equal nx");
}

DiscretizedOCPEC DiscretizedOCPEC::with_cost(std::shared_ptr<const StageCost> cost) const {
  return DiscretizedOCPEC(dims_, bounds_, x0_, std::move(cost), constraints_);
}

Vec DiscretizedOCPEC::phi(const Vec& z, double s) const {
  const int off = dims_.nx + dims_.ntau;
  return build_scholtes_phi(z.segment(off, dims_.np), z.segment(off + dims_.np, dims_.nw), s,
                            bounds_);
}

Mat DiscretizedOCPEC::phi_jacobian(const Vec& z) const {
  const int off = dims_.nx + dims_.ntau;
  Mat jac = Mat::Zero(dims_.ngamma, dims_.nz());
  jac.rightCols(2 * dims_.np) = build_scholtes_jacobian(
      z.segment(off, dims_.np), z.segment(off + dims_.np, dims_.nw), bounds_);
  return jac;
}

namespace {

void expect_size(long got, int want, const char* what, int stage) {
  if (got != want) {
    throw EvaluationError(std::string("evaluator returned wrong size for ") + what, stage);
  }
}

}  // namespace

StageEval DiscretizedOCPEC::evaluate(int stage, const Vec& z, double s, bool derivatives) const {
  StageEval ev;
  try {
    ev.cost = cost_->value(stage, z);
    ev.G = constraints_->inequality(stage, z);
    ev.C = constraints_->equality(stage, z);
    ev.F = constraints_->dynamics(stage, z);
    ev.Phi = phi(z, s);
    if (derivatives) {
      ev.cost_gradient = cost_->gradient(stage, z);
      ev.G_z = constraints_->inequality_jacobian(stage, z);
      ev.C_z = constraints_->equality_jacobian(stage, z);
      ev.F_z = constraints_->dynamics_jacobian(stage, z);
      ev.Phi_z = phi_jacobian(z);
      ev.has_derivatives = true;
    }
  } catch (const EvaluationError&) {
    throw;
  } catch (const std::exception& e) {
    throw EvaluationError(e.what(), stage);
  }
  expect_size(ev.G.size(), dims_.nsigma, "G", stage);
  expect_size(ev.C.size(), dims_.neta, "C", stage);
  expect_size(ev.F.size(), dims_.nx, "F", stage);
  if (derivatives) {
    expect_size(ev.cost_gradient.size(), dims_.nz(), "grad L", stage);
    if (ev.G_z.rows() != dims_.nsigma || ev.G_z.cols() != dims_.nz() ||
        ev.C_z.rows() != dims_.neta || ev.C_z.cols() != dims_.nz() ||
        ev.F_z.rows() != dims_.nx || ev.F_z.cols() != dims_.nz()) {
      throw EvaluationError("evaluator returned a Jacobian of wrong shape", stage);
    }
  }
  if (!std::isfinite(ev.cost) || !ev.G.allFinite() || !ev.C.allFinite() || !ev.F.allFinite()) {
    throw EvaluationError("evaluator returned a non-finite value", stage);
  }
  return ev;
}

Mat DiscretizedOCPEC::hamiltonian_hessian(int stage, const Vec& z, const Vec& sigma,
                                          const Vec& eta, const Vec& lambda,
                                          const Vec& gamma) const {
  Mat hess;
  try {
    hess = cost_->hessian(stage, z) + constraints_->weighted_hessian(stage, z, sigma, eta, lambda);
  } catch (const EvaluationError&) {
    throw;
  } catch (const std::exception& e) {
    throw EvaluationError(e.what(), stage);
  }
  if (hess.rows() != dims_.nz() || hess.cols() != dims_.nz()) {
    throw EvaluationError("evaluator returned a Hessian of wrong shape", stage);
  }
  const int np = dims_.np;
  if (np > 0) {
    hess.bottomRightCorner(2 * np, 2 * np) -= build_scholtes_weighted_hessian(gamma, bounds_);
  }
  return hess;
}

}  // namespace nipocpec
