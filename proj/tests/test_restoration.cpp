#include <doctest.h>

#include "nipocpec/solver.hpp"
#include "support.hpp"

using namespace nipocpec;
using testing::vec;

namespace {

// x' = 0.5 x with explicit Euler, dt = 1, stage cost x^2: [C_z^T F_z^T] is
// the square 1x1 matrix F_x = -0.5.
DiscretizedOCPEC scalar_chain() {
  ContinuousOCPEC o;
  o.nx = 1;
  o.ntau = 0;
  o.np = 0;
  o.f = testing::affine_map(Mat::Constant(1, 1, 0.5), Vec::Zero(1));
  o.K = testing::affine_map(Mat::Zero(0, 1), Vec::Zero(0));
  o.stage_cost.value = [](double, const Vec& y) { return y(0) * y(0); };
  o.stage_cost.gradient = [](double, const Vec& y) -> Vec { return 2.0 * y; };
  o.stage_cost.hessian = [](double, const Vec&) -> Mat { return Mat::Constant(1, 1, 2.0); };
  o.bounds = {Vec(0), Vec(0)};
  o.x0 = vec({1.0});
  o.N = 2;
  o.dt = 1.0;
  return make_discretized(o);
}

// C = [tau; tau] makes the least-squares system rank deficient.
DiscretizedOCPEC duplicated_rows() {
  ContinuousOCPEC o;
  o.nx = 1;
  o.ntau = 1;
  o.np = 0;
  o.f = testing::affine_map((Mat(1, 2) << -1.0, 1.0).finished(), Vec::Zero(1));
  o.K = testing::affine_map(Mat::Zero(0, 2), Vec::Zero(0));
  o.C = testing::affine_map((Mat(2, 2) << 0, 1, 0, 1).finished(), Vec::Zero(2));
  o.stage_cost.value = [](double, const Vec& y) { return y.squaredNorm() + y(1); };
  o.stage_cost.gradient = [](double, const Vec& y) -> Vec { return 2.0 * y + vec({0.0, 1.0}); };
  o.stage_cost.hessian = [](double, const Vec&) -> Mat { return 2.0 * Mat::Identity(2, 2); };
  o.bounds = {Vec(0), Vec(0)};
  o.x0 = vec({0.3});
  o.N = 3;
  o.dt = 0.1;
  return make_discretized(o);
}

Iterate perturbed_dynamics_start(const DiscretizedOCPEC& problem) {
  Iterate y = cold_start(problem);
  for (int k = 0; k < problem.dims().N; ++k) y.x(k).array() += 0.1;
  return y;
}

}  // namespace

TEST_SUITE("restoration") {
  TEST_CASE("proximity scaling") {
    const auto problem = affine_dvi(3, 0.01);
    Iterate start(problem.dims());
    start.z(0).setConstant(0.5);
    start.z(1).setConstant(4.0);
    start.z(2).setConstant(-0.01);
    const auto r = build_restoration(problem, start, 1e-6);
    CHECK((r.scaling[0].array() == 1e-6).all());
    CHECK((r.scaling[1].array() - 0.25e-6).abs().maxCoeff() < 1e-21);
    CHECK((r.scaling[2].array() == 1e-6).all());
    for (const Vec& s : r.scaling) CHECK(((s.array() > 0.0) && (s.array() <= 1e-6)).all());
  }

  TEST_CASE("proximity objective is exact") {
    const auto problem = testing::tiny_problem(3);
    const Iterate start = testing::random_point(problem, 2, 3.0);
    const auto r = build_restoration(problem, start);
    const StageCost& c = r.problem.cost();
    for (int k = 0; k < 3; ++k) {
      CHECK(c.value(k, start.z(k)) == 0.0);
      CHECK(c.gradient(k, start.z(k)).norm() == 0.0);
      const Vec z = start.z(k) + Vec::Ones(start.z(k).size());
      const Vec dz = z - r.reference[k];
      CHECK(c.value(k, z) == doctest::Approx(0.5 * dz.dot(r.scaling[k].asDiagonal() * dz)));
      CHECK((c.gradient(k, z) - r.scaling[k].asDiagonal() * dz).norm() < 1e-18);
      CHECK((c.hessian(k, z) - Mat(r.scaling[k].asDiagonal())).norm() == 0.0);
    }
    CHECK(r.problem.shared_constraints() == problem.shared_constraints());
  }

  TEST_CASE("feasible start is restored before any step") {
    const auto problem = testing::circle_problem();
    const auto out = run_restoration(problem, testing::circle_start(problem), 0.1, 0.1, {});
    CHECK(out.status == RestorationStatus::kRestored);
    CHECK(out.inner_iterations == 0);
    CHECK(out.violation_start == 0.0);
  }

  TEST_CASE("dynamics defect is reduced by at least ten percent") {
    const auto problem = affine_dvi();
    const Iterate start = perturbed_dynamics_start(problem);
    const double s = 0.1, z = 0.1;
    RestorationOptions o;
    RiccatiSolver solver;
    const auto out = run_restoration(problem, start, s, z, o, &solver);
    REQUIRE(out.status == RestorationStatus::kRestored);
    CHECK(out.inner_iterations >= 1);
    CHECK(out.inner_iterations <= o.j_max);
    const double before = constraint_violation(problem, start, s, z).total;
    const double after = constraint_violation(problem, out.y, s, z).total;
    CHECK(out.violation_start == doctest::Approx(before));
    CHECK(out.violation_end == doctest::Approx(after));
    CHECK(after <= o.nu_m * before);
    // frozen perturbations, no correction steps
    CHECK(out.perturbations.size() == static_cast<std::size_t>(out.inner_iterations));
    for (const auto& [ps, pz] : out.perturbations) {
      CHECK(ps == s);
      CHECK(pz == z);
    }
    for (StepKind k : out.steps) CHECK(k != StepKind::kSocStep);
    CHECK(solver.resolves() == 0);
  }

  TEST_CASE("no inner iterations means failure") {
    const auto problem = affine_dvi();
    const Iterate start = perturbed_dynamics_start(problem);
    RestorationOptions o;
    o.j_max = 0;
    const auto out = run_restoration(problem, start, 0.1, 0.1, o);
    CHECK(out.status == RestorationStatus::kFailed);
    CHECK(out.y.data() == start.data());
  }

  TEST_CASE("equality duals of a square chain are exact") {
    const auto problem = scalar_chain();
    Iterate y(problem.dims());
    y.x(0)(0) = 0.3;
    y.x(1)(0) = -0.2;
    // -0.5 lambda_1 = -2 x_1,  -0.5 lambda_0 = -(2 x_0 + lambda_1)
    const auto d = recover_equality_duals(problem, y, 0.0);
    CHECK(d.lambda[1](0) == doctest::Approx(-0.8));
    CHECK(d.lambda[0](0) == doctest::Approx(-0.4));
    CHECK_FALSE(d.reset);
  }

  TEST_CASE("zero gradients give zero duals") {
    const auto problem = scalar_chain();
    const Iterate y(problem.dims());
    const auto d = recover_equality_duals(problem, y, 0.0);
    for (int k = 0; k < 2; ++k) CHECK(d.lambda[k].norm() == 0.0);
  }

  TEST_CASE("large duals are reset") {
    const auto problem = scalar_chain();
    Iterate y(problem.dims());
    y.x(1)(0) = 500.0;  // lambda_1 = 2000
    const auto d = recover_equality_duals(problem, y, 0.0, 1000.0);
    CHECK(d.reset);
    for (int k = 0; k < 2; ++k) CHECK(d.lambda[k].norm() == 0.0);
    const auto kept = recover_equality_duals(problem, y, 0.0, 1e4);
    CHECK_FALSE(kept.reset);
    CHECK(kept.lambda[1](0) == doctest::Approx(2000.0));
  }

  TEST_CASE("full-rank stages match the normal equations") {
    const auto problem = testing::tiny_problem(4);
    const Dimensions& dm = problem.dims();
    for (unsigned seed = 0; seed < 5; ++seed) {
      const Iterate y = testing::random_point(problem, seed);
      const double s = 0.02;
      const auto d = recover_equality_duals(problem, y, s, 1e12);
      const auto ev = evaluate_stages(problem, y, s, true);
      Vec next = Vec::Zero(dm.nx);
      for (int k = dm.N - 1; k >= 0; --k) {
        Mat A(dm.nz(), dm.neta + dm.nx);
        A << ev[k].C_z.transpose(), ev[k].F_z.transpose();
        Vec b = ev[k].cost_gradient - ev[k].G_z.transpose() * y.sigma(k) - ev[k].Phi_z.transpose() * y.gamma(k);
        b.head(dm.nx) += next;
        const Vec sol = (A.transpose() * A).ldlt().solve(-A.transpose() * b);
        CHECK((d.eta[k] - sol.head(dm.neta)).norm() < 1e-8 * std::max(1.0, sol.norm()));
        CHECK((d.lambda[k] - sol.tail(dm.nx)).norm() < 1e-8 * std::max(1.0, sol.norm()));
        next = d.lambda[k];
      }
    }
  }

  TEST_CASE("rank-deficient stages return the minimum-norm solution") {
    const auto problem = duplicated_rows();
    const Dimensions& dm = problem.dims();
    const Iterate y = testing::random_point(problem, 3);
    const auto d = recover_equality_duals(problem, y, 0.0, 1e12);
    const auto ev = evaluate_stages(problem, y, 0.0, true);
    Vec next = Vec::Zero(dm.nx);
    for (int k = dm.N - 1; k >= 0; --k) {
      Mat A(dm.nz(), dm.neta + dm.nx);
      A << ev[k].C_z.transpose(), ev[k].F_z.transpose();
      Vec b = ev[k].cost_gradient;
      b.head(dm.nx) += next;
      Vec sol(dm.neta + dm.nx);
      sol << d.eta[k], d.lambda[k];
      const double res = (A * sol + b).norm();
      // the null space is (1, -1, 0)
      const Vec null = vec({1.0, -1.0, 0.0});
      CHECK((A * null).norm() < 1e-15);
      for (double t : {-1.0, -0.1, -1e-3, 1e-3, 0.1, 1.0}) {
        const Vec other = sol + t * null;
        CHECK((A * other + b).norm() == doctest::Approx(res));
        CHECK(other.norm() > sol.norm());
      }
      next = d.lambda[k];
    }
  }
}
