#include <doctest.h>

#include "nipocpec/fischer_burmeister.hpp"
#include "nipocpec/line_search.hpp"
#include "nipocpec/solver.hpp"
#include "support.hpp"

using namespace nipocpec;
using testing::vec;

namespace {

// nx = 1 fixed by x' = 0, one control, no equilibrium pair; cost (tau - 1)^2
// plus `extra` constant equality rows.
DiscretizedOCPEC parabola(Vec constant_rows = Vec(0)) {
  ContinuousOCPEC o;
  o.nx = 1;
  o.ntau = 1;
  o.np = 0;
  o.f = testing::affine_map(Mat::Zero(1, 2), Vec::Zero(1));
  o.K = testing::affine_map(Mat::Zero(0, 2), Vec::Zero(0));
  o.C = testing::affine_map(Mat::Zero(constant_rows.size(), 2), constant_rows);
  o.stage_cost.value = [](double, const Vec& y) { return (y(1) - 1.0) * (y(1) - 1.0); };
  o.stage_cost.gradient = [](double, const Vec& y) { return vec({0.0, 2.0 * (y(1) - 1.0)}); };
  o.stage_cost.hessian = [](double, const Vec&) -> Mat { return (Mat(2, 2) << 0, 0, 0, 2).finished(); };
  o.bounds = {Vec(0), Vec(0)};
  o.x0 = vec({0.0});
  o.N = 1;
  o.dt = 1.0;
  return make_discretized(o);
}

struct Search {
  const DiscretizedOCPEC& problem;
  Iterate y;
  double s = 0.05, z = 0.05;
  std::vector<StageEval> evals;
  KKTResidual T;
  double M = 0.0;
  RiccatiSolution newton;
  RiccatiSolver solver;
  MeritState state;

  Search(const DiscretizedOCPEC& p, Iterate y0, double s_ = 0.05, double z_ = 0.05)
      : problem(p), y(std::move(y0)), s(s_), z(z_) {
    evals = evaluate_stages(problem, y, s, true);
    T = kkt_residual(problem, y, evals, z, 1e-7);
    M = constraint_violation(problem, y, evals, z).total;
    newton = solver.factor_and_solve(kkt_matrix(problem, y, evals, z, 1e-7, 1e-7), T);
    state.beta = update_penalty(1.0, cost_slope(evals, newton.direction), M, 0.1);
  }

  LineSearchOutcome run(const StageVector& dir, LineSearchOptions o = {}) {
    return line_search_with_soc(problem, {y, evals, T, M, s, z}, dir, newton.factorization, solver, state, o);
  }
  LineSearchOutcome run(LineSearchOptions o = {}) { return run(newton.direction, o); }
};

// Problem where every term of M can be made zero by hand: G = tau, K = 0.02,
// bounds [0, inf).
DiscretizedOCPEC feasible_pair_problem() {
  ContinuousOCPEC o;
  o.nx = 1;
  o.ntau = 1;
  o.np = 1;
  o.f = testing::affine_map(Mat::Zero(1, 3), Vec::Zero(1));
  o.K = testing::affine_map(Mat::Zero(1, 3), vec({0.02}));
  o.G = testing::affine_map((Mat(1, 3) << 0, 1, 0).finished(), Vec::Zero(1));
  o.bounds = {vec({0.0}), vec({kInf})};
  o.x0 = vec({0.0});
  o.N = 3;
  o.dt = 0.1;
  return make_discretized(o);
}

}  // namespace

TEST_SUITE("globalization") {
  TEST_CASE("violation vanishes with pairs on the smoothed curve") {
    const auto problem = feasible_pair_problem();
    const double s = 0.05, z = 0.2, h = z * z / 2;
    Iterate y(problem.dims());
    for (int k = 0; k < 3; ++k) {
      y.tau(k)(0) = 2.0;
      y.sigma(k)(0) = h / 2.0;
      y.p(k)(0) = 1.0;
      y.w(k)(0) = 0.02;
      // Phi = (p, w, s - p w)
      y.gamma(k) = vec({h / 1.0, h / 0.02, h / (s - 0.02)});
    }
    const auto v = constraint_violation(problem, y, s, z);
    CHECK(v.total < 1e-15);
    CHECK(v.per_stage.size() == 3);
  }

  TEST_CASE("constant equality rows give their l1 norm") {
    const auto problem = parabola(vec({1.0, -1.0}));
    Iterate y(problem.dims());
    y.tau(0)(0) = 1.0;
    const auto v = constraint_violation(problem, y, 0.1, 0.1);
    CHECK(v.per_stage[0] == doctest::Approx(2.0));
    CHECK(v.total == doctest::Approx(2.0));
  }

  TEST_CASE("violation matches a direct recomputation") {
    const auto problem = testing::tiny_problem(4, 0.1);
    for (unsigned seed = 0; seed < 5; ++seed) {
      const Iterate y = testing::random_point(problem, seed);
      const double s = 0.03, z = 0.07;
      const auto ev = evaluate_stages(problem, y, s, false);
      double total = 0.0;
      for (int k = 0; k < 4; ++k) {
        const Vec prev = k == 0 ? problem.x0() : Vec(y.x(k - 1));
        // F_k = dt f - x_k
        const Vec defect = prev + problem.constraints().dynamics(k, y.z(k));
        CHECK(defect(0) == doctest::Approx(prev(0) + 0.1 * (std::sin(y.x(k)(0)) + y.tau(k)(0) + y.p(k)(0)) - y.x(k)(0)));
        total += fb(y.sigma(k), ev[k].G, z).lpNorm<1>() + ev[k].C.lpNorm<1>() + defect.lpNorm<1>() +
                 fb(y.gamma(k), ev[k].Phi, z).lpNorm<1>();
      }
      CHECK(constraint_violation(problem, y, s, z).total == doctest::Approx(total).epsilon(1e-13));
    }
  }

  TEST_CASE("merit is cost plus weighted violation") {
    const auto problem = parabola(vec({1.0, -1.0}));
    Iterate y(problem.dims());
    y.tau(0)(0) = 1.0;  // zero cost
    CHECK(merit(problem, y, 0.1, 0.1, 1.0) == doctest::Approx(2.0));
    CHECK(merit(problem, y, 0.1, 0.1, 2.0) == doctest::Approx(4.0));
    y.tau(0)(0) = 3.0;  // cost 4
    CHECK(merit(problem, y, 0.1, 0.1, 2.0) - 4.0 == doctest::Approx(2.0 * (merit(problem, y, 0.1, 0.1, 1.0) - 4.0)));

    const auto feasible = parabola();
    Iterate f(feasible.dims());
    f.tau(0)(0) = 3.0;
    CHECK(merit(feasible, f, 0.1, 0.1, 1.0) == doctest::Approx(4.0));
    CHECK(merit(feasible, f, 0.1, 0.1, 1e6) == doctest::Approx(4.0));
  }

  TEST_CASE("penalty update") {
    CHECK(update_penalty(1e-3, 1.0, 1.0, 0.1) >= 1.0 / 0.9);
    CHECK(update_penalty(1e-3, 1.0, 1.0, 0.1) == doctest::Approx(1.0 / 0.9 + kPenaltyPad));
    CHECK(update_penalty(50.0, -3.0, 1.0, 0.1) == 50.0);
    CHECK(update_penalty(2.0, 5.0, 0.0, 0.1) == 2.0);
    CHECK(update_penalty(2.0, 5.0, 1e-13, 0.1) == 2.0);
  }

  TEST_CASE("directional derivative") {
    CHECK(directional_derivative(1.0, 1.0, 2.0) == -1.0);
    CHECK(directional_derivative(0.3, 0.0, 7.0) == 0.3);
  }

  TEST_CASE("penalty update makes the derivative sufficiently negative") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-10.0, 10.0), um(1e-10, 5.0), ub(1e-3, 20.0);
    for (int i = 0; i < 5000; ++i) {
      const double slope = u(rng), M = um(rng), rho = 0.1;
      const double beta = update_penalty(ub(rng), slope, M, rho);
      CHECK(directional_derivative(slope, M, beta) + rho * beta * M <= 1e-10);
    }
  }

  TEST_CASE("newton step on a convex quadratic is accepted in full") {
    const auto problem = parabola();
    Iterate y(problem.dims());
    y.tau(0)(0) = -2.0;
    Search s(problem, y);
    const auto out = s.run();
    CHECK(out.kind == StepKind::kFullStep);
    CHECK(out.alpha == 1.0);
    CHECK(out.trials == 1);
    CHECK_FALSE(out.soc_attempted);
    CHECK(out.y.tau(0)(0) == doctest::Approx(1.0));
  }

  TEST_CASE("overshooting direction backtracks on the geometric grid") {
    const auto problem = parabola();
    Iterate y(problem.dims());
    y.tau(0)(0) = 0.0;
    Search s(problem, y);
    const StageVector dir = 4.0 * s.newton.direction;
    const auto out = s.run(dir);
    CHECK(out.kind == StepKind::kBacktracked);
    CHECK(out.alpha == doctest::Approx(0.49));
    REQUIRE(out.trial_alphas.size() == 3);
    CHECK(out.trial_alphas[1] == 0.7 * out.trial_alphas[0]);
    CHECK(out.trial_alphas[2] == 0.7 * out.trial_alphas[1]);
    CHECK_FALSE(out.soc_attempted);
    CHECK(out.merit_start - out.merit_accepted >= 1e-4 * out.alpha * std::abs(s.state.directional_derivative));
    // brute-force merit along the line
    for (double a : {1.0, 0.7}) {
      const double m = merit(problem, step(y, dir, a), s.s, s.z, s.state.beta);
      CHECK(m > out.merit_start + 1e-4 * a * s.state.directional_derivative);
    }
  }

  TEST_CASE("ascent direction fails after trying alpha_min once") {
    const auto problem = parabola();
    Iterate y(problem.dims());
    y.tau(0)(0) = 0.0;
    Search s(problem, y);
    const StageVector dir = -1.0 * s.newton.direction;
    const auto out = s.run(dir);
    CHECK(out.kind == StepKind::kFailure);
    CHECK(out.y.data() == y.data());
    CHECK(out.trial_alphas.back() == 0.01);
    CHECK(std::count(out.trial_alphas.begin(), out.trial_alphas.end(), 0.01) == 1);
    for (std::size_t j = 1; j < out.trial_alphas.size(); ++j)
      CHECK(out.trial_alphas[j] == std::max(0.7 * out.trial_alphas[j - 1], 0.01));
  }

  TEST_CASE("curved constraint triggers a second-order correction") {
    const auto problem = testing::circle_problem();
    const Iterate y = testing::circle_start(problem);
    Search s(problem, y, 0.1, 0.1);
    const Iterate full = step(y, s.newton.direction, 1.0);
    // full step: lower cost, higher violation, Armijo fails
    CHECK(total_cost(evaluate_stages(problem, full, 0.1, false)) < total_cost(s.evals));
    CHECK(constraint_violation(problem, full, 0.1, 0.1).total > s.M);

    const long before = s.solver.factorizations();
    const auto out = s.run();
    CHECK(out.kind == StepKind::kSocStep);
    CHECK(out.soc_attempted);
    CHECK(out.merit_accepted <= out.merit_start);
    CHECK(merit(problem, out.y, 0.1, 0.1, s.state.beta) == doctest::Approx(out.merit_accepted));
    CHECK(s.solver.factorizations() == before);
    CHECK(s.solver.resolves() == 1);
  }

  TEST_CASE("correction is not attempted when disabled") {
    const auto problem = testing::circle_problem();
    Search s(problem, testing::circle_start(problem), 0.1, 0.1);
    LineSearchOptions o;
    o.soc_enabled = false;
    const auto out = s.run(o);
    CHECK_FALSE(out.soc_attempted);
    CHECK(out.kind != StepKind::kSocStep);
    CHECK(s.solver.resolves() == 0);
  }

  TEST_CASE("line search invariants along a run") {
    const auto problem = affine_dvi();
    Iterate y = cold_start(problem);
    double beta = 1.0;
    for (int it = 0; it < 25; ++it) {
      Search s(problem, y, 0.05, 0.05);
      s.state.beta = update_penalty(beta, cost_slope(s.evals, s.newton.direction), s.M, 0.1);
      CHECK(s.state.beta >= beta);
      beta = s.state.beta;
      const auto out = s.run();
      if (s.M > kViolationFloor) CHECK(s.state.directional_derivative + 0.1 * beta * s.M <= 1e-10);
      CHECK((out.kind == StepKind::kFailure) == (out.y.data() == y.data()));
      if (out.kind == StepKind::kSocStep) CHECK(out.soc_attempted);
      if (out.kind == StepKind::kFullStep || out.kind == StepKind::kBacktracked) {
        const double m = merit(problem, out.y, 0.05, 0.05, beta);
        CHECK(m <= out.merit_start + 1e-4 * out.alpha * s.state.directional_derivative);
        if (out.kind == StepKind::kFullStep) CHECK_FALSE(out.soc_attempted);
      }
      if (out.kind == StepKind::kSocStep) CHECK(merit(problem, out.y, 0.05, 0.05, beta) <= out.merit_start);
      CHECK(s.solver.factorizations() == 1 + s.solver.inertia_trials());
      if (out.kind == StepKind::kFailure) break;
      y = out.y;
    }
  }
}
