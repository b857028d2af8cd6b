#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "nipocpec/benchmarks.hpp"
#include "nipocpec/kkt.hpp"
#include "nipocpec/problem.hpp"
#include "nipocpec/transcription.hpp"

namespace testing {

using namespace nipocpec;


inline SmoothMap affine_map(Mat A, Vec c) {
  SmoothMap m;
  m.rows = static_cast<int>(A.rows());
  m.value = [A, c](const Vec& y) -> Vec { return A * y + c; };
  m.jacobian = [A](const Vec&) -> Mat { return A; };
  return m;
}

inline Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

/// nx = ntau = np = 1 with nonlinear dynamics, inequality and K, bounds
/// [0, +inf). y = (x, tau, p).
inline ContinuousOCPEC tiny_pieces(int N = 2, double dt = 0.1) {
  ContinuousOCPEC o;
  o.nx = 1;
  o.ntau = 1;
  o.np = 1;
  o.f.rows = 1;
  o.f.value = [](const Vec& y) { return vec({std::sin(y(0)) + y(1) + y(2)}); };
  o.f.jacobian = [](const Vec& y) {
    Mat j(1, 3);
    j << std::cos(y(0)), 1.0, 1.0;
    return j;
  };
  o.f.weighted_hessian = [](const Vec& y, const Vec& w) {
    Mat h = Mat::Zero(3, 3);
    h(0, 0) = -std::sin(y(0)) * w(0);
    return h;
  };
  o.K.rows = 1;
  o.K.value = [](const Vec& y) { return vec({y(0) + y(2) + 0.5 * y(2) * y(2) - 0.2}); };
  o.K.jacobian = [](const Vec& y) {
    Mat j(1, 3);
    j << 1.0, 0.0, 1.0 + y(2);
    return j;
  };
  o.K.weighted_hessian = [](const Vec&, const Vec& w) {
    Mat h = Mat::Zero(3, 3);
    h(2, 2) = w(0);
    return h;
  };
  o.G.rows = 1;
  o.G.value = [](const Vec& y) { return vec({4.0 - y(1) * y(1)}); };
  o.G.jacobian = [](const Vec& y) {
    Mat j(1, 3);
    j << 0.0, -2.0 * y(1), 0.0;
    return j;
  };
  o.G.weighted_hessian = [](const Vec&, const Vec& w) {
    Mat h = Mat::Zero(3, 3);
    h(1, 1) = -2.0 * w(0);
    return h;
  };
  o.stage_cost.value = [](double, const Vec& y) { return y.squaredNorm() + 0.1 * std::pow(y(0), 4); };
  o.stage_cost.gradient = [](double, const Vec& y) -> Vec {
    Vec g = 2.0 * y;
    g(0) += 0.4 * std::pow(y(0), 3);
    return g;
  };
  o.stage_cost.hessian = [](double, const Vec& y) -> Mat {
    Mat h = 2.0 * Mat::Identity(3, 3);
    h(0, 0) += 1.2 * y(0) * y(0);
    return h;
  };
  o.terminal_cost.value = [](double, const Vec& y) { return 5.0 * y(0) * y(0); };
  o.terminal_cost.gradient = [](double, const Vec& y) { return vec({10.0 * y(0), 0.0, 0.0}); };
  o.terminal_cost.hessian = [](double, const Vec&) -> Mat {
    Mat h = Mat::Zero(3, 3);
    h(0, 0) = 10.0;
    return h;
  };
  o.bounds = {vec({0.0}), vec({kInf})};
  o.x0 = vec({0.5});
  o.N = N;
  o.dt = dt;
  return o;
}

inline DiscretizedOCPEC tiny_problem(int N = 2, double dt = 0.1) {
  return make_discretized(tiny_pieces(N, dt));
}

inline Iterate random_point(const DiscretizedOCPEC& problem, unsigned seed, double range = 1.0) {
  Iterate y(problem.dims());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-range, range);
  for (long i = 0; i < y.data().size(); ++i) y.data()(i) = u(rng);
  return y;
}

/// Forwards to a base problem but adds `offset` to one entry of the
/// inequality Jacobian.
class CorruptedConstraints final : public StageConstraints {
 public:
  CorruptedConstraints(std::shared_ptr<const StageConstraints> base, int row, int col, double offset)
      : base_(std::move(base)), row_(row), col_(col), offset_(offset) {}

  Vec inequality(int k, const Vec& z) const override { return base_->inequality(k, z); }
  Mat inequality_jacobian(int k, const Vec& z) const override {
    Mat j = base_->inequality_jacobian(k, z);
    j(row_, col_) += offset_;
    return j;
  }
  Vec equality(int k, const Vec& z) const override { return base_->equality(k, z); }
  Mat equality_jacobian(int k, const Vec& z) const override { return base_->equality_jacobian(k, z); }
  Vec dynamics(int k, const Vec& z) const override { return base_->dynamics(k, z); }
  Mat dynamics_jacobian(int k, const Vec& z) const override { return base_->dynamics_jacobian(k, z); }
  Mat weighted_hessian(int k, const Vec& z, const Vec& sigma, const Vec& eta,
                       const Vec& lambda) const override {
    return base_->weighted_hessian(k, z, sigma, eta, lambda);
  }

 private:
  std::shared_ptr<const StageConstraints> base_;
  int row_, col_;
  double offset_;
};

class ForwardingCost final : public StageCost {
 public:
  explicit ForwardingCost(DiscretizedOCPEC base) : base_(std::move(base)) {}
  double value(int k, const Vec& z) const override { return base_.cost().value(k, z); }
  Vec gradient(int k, const Vec& z) const override { return base_.cost().gradient(k, z); }
  Mat hessian(int k, const Vec& z) const override { return base_.cost().hessian(k, z); }

 private:
  DiscretizedOCPEC base_;
};

inline DiscretizedOCPEC corrupt_inequality_jacobian(const DiscretizedOCPEC& p, int row, int col,
                                                    double offset = 1.0) {
  return DiscretizedOCPEC(p.dims(), p.bounds(), p.x0(), std::make_shared<ForwardingCost>(p),
                          std::make_shared<CorruptedConstraints>(p.shared_constraints(), row, col, offset));
}

}  // namespace testing

namespace testing {

/// One stage, x fixed by x' = 0, minimize -tau_1 on the unit circle. From a
/// feasible point the Newton step is tangent, so a full step lowers the cost
/// and raises the violation.
inline DiscretizedOCPEC circle_problem() {
  ContinuousOCPEC o;
  o.nx = 1;
  o.ntau = 2;
  o.np = 0;
  o.f = affine_map(Mat::Zero(1, 3), Vec::Zero(1));
  o.K = affine_map(Mat::Zero(0, 3), Vec::Zero(0));
  o.C.rows = 1;
  o.C.value = [](const Vec& y) { return vec({y(1) * y(1) + y(2) * y(2) - 1.0}); };
  o.C.jacobian = [](const Vec& y) {
    Mat j(1, 3);
    j << 0.0, 2.0 * y(1), 2.0 * y(2);
    return j;
  };
  o.C.weighted_hessian = [](const Vec&, const Vec& w) {
    Mat h = Mat::Zero(3, 3);
    h(1, 1) = h(2, 2) = 2.0 * w(0);
    return h;
  };
  o.stage_cost.value = [](double, const Vec& y) { return -y(1); };
  o.stage_cost.gradient = [](double, const Vec&) { return vec({0.0, -1.0, 0.0}); };
  o.stage_cost.hessian = [](double, const Vec&) -> Mat { return Mat::Zero(3, 3); };
  o.bounds = {Vec(0), Vec(0)};
  o.x0 = vec({0.0});
  o.N = 1;
  o.dt = 1.0;
  return make_discretized(o);
}

/// On the circle at `angle` with the optimal multiplier.
inline Iterate circle_start(const DiscretizedOCPEC& problem, double angle = 0.5) {
  Iterate y(problem.dims());
  y.tau(0) = vec({std::cos(angle), std::sin(angle)});
  y.eta(0)(0) = 0.5;
  return y;
}

}  // namespace testing
