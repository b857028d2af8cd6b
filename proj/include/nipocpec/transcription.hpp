#pragma once

#include <functional>

#include "nipocpec/problem.hpp"

namespace nipocpec {

/// Smooth vector function of y = (x, tau, p). An empty weighted_hessian means
/// the map is affine.
struct SmoothMap {
  int rows = 0;
  std::function<Vec(const Vec& y)> value;
  std::function<Mat(const Vec& y)> jacobian;
  std::function<Mat(const Vec& y, const Vec& weights)> weighted_hessian;
};

/// Smooth scalar function of (t, y). Unset members mean "identically zero".
struct SmoothCost {
  std::function<double(double t, const Vec& y)> value;
  std::function<Vec(double t, const Vec& y)> gradient;
  std::function<Mat(double t, const Vec& y)> hessian;
};

/// The continuous-time pieces of an OCPEC:
///   min L_T(x(T), p(T)) + int L_S dt
///   s.t. G >= 0, C = 0, xdot = f, p in SOL([l, u], K).
struct ContinuousOCPEC {
  int nx = 0;
  int ntau = 0;
  int np = 0;
  SmoothMap f;
  SmoothMap K;
  SmoothMap G;
  SmoothMap C;
  SmoothCost stage_cost;
  SmoothCost terminal_cost;
  BoundData bounds;
  Vec x0;
  int N = 1;
  double dt = 0.01;
};

/// Implicit-Euler transcription. Per stage k (time t = (k + 1) dt):
///   L_k = L_S(t, y) dt  (+ L_T(y) on the last stage)
///   F_k = f(y) dt - x
///   C_k = [C(y); w - K(y)]
///   G_k = G(y)
DiscretizedOCPEC make_discretized(ContinuousOCPEC pieces);

}  // namespace nipocpec
