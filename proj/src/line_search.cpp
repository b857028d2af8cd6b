#include "nipocpec/line_search.hpp"

#include <algorithm>
#include <cmath>

#include "nipocpec/fischer_burmeister.hpp"

namespace nipocpec {

std::string_view to_string(StepKind kind) {
  switch (kind) {
    case StepKind::kFullStep:
      return "full-step";
    case StepKind::kSocStep:
      return "soc-step";
    case StepKind::kBacktracked:
      return "backtracked";
    case StepKind::kFailure:
      return "failure";
  }
  return "unknown";
}

namespace {

struct TrialValue {
  bool ok = false;
  double merit = 0.0;
  double cost = 0.0;
  std::vector<StageEval> evals;
};

TrialValue evaluate_trial(const DiscretizedOCPEC& problem, const Iterate& y, double s, double z,
                          double beta) {
  TrialValue t;
  try {
    t.evals = evaluate_stages(problem, y, s, false);
  } catch (const EvaluationError&) {
    return t;
  }
  t.cost = total_cost(t.evals);
  t.merit = t.cost + beta * constraint_violation(problem, y, t.evals, z).total;
  t.ok = std::isfinite(t.merit);
  return t;
}

double scaled_row(double a_fs, double b_fs, double a, double b, double z, double nu) {
  const double g = fb_row_scaling(a, b, z, nu);
  if (std::isinf(g)) return 0.0;
  if (g == 0.0) throw EvaluationError("soc: singular complementarity scaling");
  return -fb(a_fs, b_fs, z) / g;
}

}  // namespace

KKTResidual soc_correction(const DiscretizedOCPEC& problem, const SearchPoint& point,
                           const Iterate& full_step, const std::vector<StageEval>& full_evals,
                           double nu_g) {
  const Dimensions& d = problem.dims();
  KKTResidual t(d);
  for (int k = 0; k < d.N; ++k) {
    const StageEval& cur = point.evals[k];
    const StageEval& fs = full_evals[k];
    for (int i = 0; i < d.nsigma; ++i) {
      t.sigma(k)(i) = scaled_row(full_step.sigma(k)(i), fs.G(i), point.y.sigma(k)(i), cur.G(i),
                                 point.z, nu_g);
    }
    t.eta(k) = fs.C;
    t.lambda(k) = dynamics_defect(problem, full_step, k, fs);
    for (int i = 0; i < d.ngamma; ++i) {
      t.gamma(k)(i) = scaled_row(full_step.gamma(k)(i), fs.Phi(i), point.y.gamma(k)(i),
                                 cur.Phi(i), point.z, nu_g);
    }
  }
  return t;
}

LineSearchOutcome line_search_with_soc(const DiscretizedOCPEC& problem, const SearchPoint& point,
                                       const StageVector& direction,
                                       const StageFactorization& fact, RiccatiSolver& solver,
                                       MeritState& state, const LineSearchOptions& options) {
  const double beta = state.beta;
  const double cost0 = total_cost(point.evals);
  const double merit0 = cost0 + beta * point.violation;
  state.slope = cost_slope(point.evals, direction);
  state.directional_derivative = directional_derivative(state.slope, point.violation, beta);
  const double dtheta = state.directional_derivative;

  LineSearchOutcome out;
  out.merit_start = merit0;

  auto fail = [&]() {
    out.y = point.y;
    out.kind = StepKind::kFailure;
    out.alpha = 0.0;
    out.merit_accepted = merit0;
    state.last_alpha = 0.0;
    return out;
  };

  double alpha = 1.0;
  while (true) {
    ++out.trials;
    out.trial_alphas.push_back(alpha);
    Iterate trial = step(point.y, direction, alpha);
    TrialValue tv = evaluate_trial(problem, trial, point.s, point.z, beta);
    if (!tv.ok) return fail();

    if (tv.merit <= merit0 + options.nu_d * alpha * dtheta) {
      out.y = std::move(trial);
      out.alpha = alpha;
      out.kind = alpha == 1.0 ? StepKind::kFullStep : StepKind::kBacktracked;
      out.merit_accepted = tv.merit;
      state.last_alpha = alpha;
      return out;
    }

    if (alpha == 1.0 && options.soc_enabled && tv.cost <= cost0) {
      out.soc_attempted = true;
      KKTResidual rhs = point.residual;
      rhs += soc_correction(problem, point, trial, tv.evals, options.nu_g);
      StageVector corrected = solver.resolve(fact, rhs);
      Iterate soc = step(point.y, corrected, 1.0);
      TrialValue sv = evaluate_trial(problem, soc, point.s, point.z, beta);
      if (sv.ok && sv.merit <= merit0) {
        out.y = std::move(soc);
        out.alpha = 1.0;
        out.kind = StepKind::kSocStep;
        out.merit_accepted = sv.merit;
        state.last_alpha = 1.0;
        return out;
      }
    }

    if (alpha <= options.alpha_min) return fail();
    alpha = std::max(options.nu_alpha * alpha, options.alpha_min);
  }
}

}  // namespace nipocpec
