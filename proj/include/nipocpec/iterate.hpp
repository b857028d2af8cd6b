#pragma once

#include "nipocpec/types.hpp"

namespace nipocpec {

/// Flat stage-major vector with per-stage blocks ordered
/// (sigma, eta, lambda, gamma, x, tau, p, w).
///
/// The same layout serves primal-dual iterates, Newton directions and KKT
/// residuals; for a residual the blocks hold, in the same positions, the scaled
/// FB rows of (sigma, G), C, the dynamics defect, the scaled FB rows of
/// (gamma, Phi) and the Hamiltonian gradient.
class StageVector {
 public:
  StageVector() = default;
  explicit StageVector(const Dimensions& dims)
      : dims_(dims), data_(Vec::Zero(dims.total())) {}
  StageVector(const Dimensions& dims, Vec data);

  const Dimensions& dims() const { return dims_; }
  Vec& data() { return data_; }
  const Vec& data() const { return data_; }
  int stages() const { return dims_.N; }

  long stage_offset(int k) const { return static_cast<long>(k) * dims_.ny(); }

  auto stage(int k) { return data_.segment(stage_offset(k), dims_.ny()); }
  auto stage(int k) const { return data_.segment(stage_offset(k), dims_.ny()); }

  auto sigma(int k) { return data_.segment(stage_offset(k), dims_.nsigma); }
  auto sigma(int k) const { return data_.segment(stage_offset(k), dims_.nsigma); }
  auto eta(int k) { return data_.segment(stage_offset(k) + off_eta(), dims_.neta); }
  auto eta(int k) const { return data_.segment(stage_offset(k) + off_eta(), dims_.neta); }
  auto lambda(int k) { return data_.segment(stage_offset(k) + off_lambda(), dims_.nx); }
  auto lambda(int k) const { return data_.segment(stage_offset(k) + off_lambda(), dims_.nx); }
  auto gamma(int k) { return data_.segment(stage_offset(k) + off_gamma(), dims_.ngamma); }
  auto gamma(int k) const { return data_.segment(stage_offset(k) + off_gamma(), dims_.ngamma); }
  /// Equality-type duals (eta, lambda), contiguous.
  auto eq_duals(int k) { return data_.segment(stage_offset(k) + off_eta(), dims_.neta + dims_.nx); }
  auto eq_duals(int k) const {
    return data_.segment(stage_offset(k) + off_eta(), dims_.neta + dims_.nx);
  }
  auto duals(int k) { return data_.segment(stage_offset(k), dims_.ndual()); }
  auto duals(int k) const { return data_.segment(stage_offset(k), dims_.ndual()); }

  auto z(int k) { return data_.segment(stage_offset(k) + off_z(), dims_.nz()); }
  auto z(int k) const { return data_.segment(stage_offset(k) + off_z(), dims_.nz()); }
  auto x(int k) { return data_.segment(stage_offset(k) + off_z(), dims_.nx); }
  auto x(int k) const { return data_.segment(stage_offset(k) + off_z(), dims_.nx); }
  auto tau(int k) { return data_.segment(stage_offset(k) + off_z() + dims_.nx, dims_.ntau); }
  auto tau(int k) const {
    return data_.segment(stage_offset(k) + off_z() + dims_.nx, dims_.ntau);
  }
  auto p(int k) { return data_.segment(stage_offset(k) + off_p(), dims_.np); }
  auto p(int k) const { return data_.segment(stage_offset(k) + off_p(), dims_.np); }
  auto w(int k) { return data_.segment(stage_offset(k) + off_p() + dims_.np, dims_.nw); }
  auto w(int k) const { return data_.segment(stage_offset(k) + off_p() + dims_.np, dims_.nw); }

  // offsets inside one stage block
  int off_eta() const { return dims_.nsigma; }
  int off_lambda() const { return dims_.nsigma + dims_.neta; }
  int off_gamma() const { return dims_.nsigma + dims_.neta + dims_.nx; }
  int off_z() const { return dims_.ndual(); }
  int off_p() const { return dims_.ndual() + dims_.nx + dims_.ntau; }

  double inf_norm() const { return data_.size() ? data_.lpNorm<Eigen::Infinity>() : 0.0; }

  StageVector& operator+=(const StageVector& other);
  friend StageVector operator+(StageVector a, const StageVector& b) { return a += b; }
  friend StageVector operator*(double alpha, StageVector v) {
    v.data_ *= alpha;
    return v;
  }

 private:
  Dimensions dims_;
  Vec data_;
};

using Iterate = StageVector;
using KKTResidual = StageVector;

/// Y + alpha * dY.
Iterate step(const Iterate& y, const StageVector& direction, double alpha);

}  // namespace nipocpec
