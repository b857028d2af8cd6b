#pragma once

#include "nipocpec/types.hpp"

namespace nipocpec {

/// Smooth Fischer-Burmeister function sqrt(a^2 + b^2 + z^2) - a - b.
/// Zero exactly when a >= 0, b >= 0 and a b = z^2 / 2.
double fb(double a, double b, double z);

struct FBGradient {
  double da;
  double db;
};

/// Partial derivatives of fb. At the nonsmooth point (0, 0, 0) returns
/// (-1, -1), the center of the generalized gradient.
FBGradient fb_grad(double a, double b, double z);

/// Regularized d fb / d b used to scale the complementarity rows:
/// (b - r - nu) / r with r = sqrt(a^2 + b^2 + z^2). Returns -inf at r = 0.
double fb_row_scaling(double a, double b, double z, double nu);

/// Scaled complementarity residual -fb / fb_row_scaling. Throws
/// std::domain_error when the scaling vanishes (z = nu = 0 and a = 0 <= b).
double fb_scaled_residual(double a, double b, double z, double nu);

/// Diagonal entry -(a - r - nu) / (b - r - nu) of the Newton matrix; -1 at the
/// nonsmooth origin with nu = 0.
double fb_diagonal(double a, double b, double z, double nu);

Vec fb(const Vec& a, const Vec& b, double z);

}  // namespace nipocpec
