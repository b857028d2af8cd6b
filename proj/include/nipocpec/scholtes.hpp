#pragma once

#include "nipocpec/types.hpp"

namespace nipocpec {

/// Number of relaxed-equilibrium rows produced for the box [l, u]: four per
/// component with both bounds finite, three with exactly one, none otherwise.
int scholtes_row_count(const BoundData& bounds);

/// Scholtes-relaxed equilibrium constraints Phi(p, w, s) >= 0.
///
/// Rows are emitted in ascending component order. For component i:
///   both bounds:  [p - l, u - p, s - (p - l) w, s + (u - p) w]
///   lower only:   [p - l, w, s - (p - l) w]
///   upper only:   [u - p, -w, s + (u - p) w]
///   neither:      (nothing)
Vec build_scholtes_phi(const Vec& p, const Vec& w, double s, const BoundData& bounds);

/// d Phi / d(p, w), an ngamma x 2np matrix. Independent of s.
Mat build_scholtes_jacobian(const Vec& p, const Vec& w, const BoundData& bounds);

/// Second derivative of multipliers^T Phi with respect to (p, w); constant
/// because every row is at most bilinear.
Mat build_scholtes_weighted_hessian(const Vec& multipliers, const BoundData& bounds);

}  // namespace nipocpec
