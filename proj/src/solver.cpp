#include "nipocpec/solver.hpp"

#include <chrono>
#include <cmath>

#include <fmt/format.h>

namespace nipocpec {

namespace {

void require(bool ok, const char* field, const char* rule) {
  if (!ok) throw std::invalid_argument(fmt::format("options: {} must satisfy {}", field, rule));
}

}  // namespace

void SolverOptions::validate() const {
  require(k_max >= 0, "k_max", ">= 0");
  require(tol_primal > 0, "tol_primal", "> 0");
  require(tol_dual > 0, "tol_dual", "> 0");
  require(tol_max > 0, "tol_max", "> 0");
  require(s_final >= 0, "s_final", ">= 0");
  require(z_final > 0, "z_final", "> 0");
  require(s_init >= s_final, "s_init", ">= s_final");
  require(z_init >= z_final, "z_init", ">= z_final");
  require(kappa_st > 0 && kappa_st < 1, "kappa_st", "0 < kappa_st < 1");
  require(kappa_zt > 0 && kappa_zt < 1, "kappa_zt", "0 < kappa_zt < 1");
  require(kappa_se > 1, "kappa_se", "> 1");
  require(kappa_ze > 1, "kappa_ze", "> 1");
  require(nu_j >= 0, "nu_j", ">= 0");
  require(nu_g >= 0, "nu_g", ">= 0");
  require(rho > 0 && rho < 1, "rho", "0 < rho < 1");
  require(beta0 > 0, "beta0", "> 0");
  require(alpha_min > 0 && alpha_min <= 1, "alpha_min", "0 < alpha_min <= 1");
  require(nu_alpha > 0 && nu_alpha < 1, "nu_alpha", "0 < nu_alpha < 1");
  require(nu_d > 0 && nu_d < 1, "nu_d", "0 < nu_d < 1");
  require(nu_sc > 0, "nu_sc", "> 0");
  require(nu_m > 0 && nu_m < 1, "nu_m", "0 < nu_m < 1");
  require(lambda_max > 0, "lambda_max", "> 0");
  require(j_max >= 0, "j_max", ">= 0");
  require(riccati.max_condition > 1, "max_condition", "> 1");
}

RestorationOptions SolverOptions::restoration() const {
  RestorationOptions r;
  r.nu_sc = nu_sc;
  r.nu_m = nu_m;
  r.lambda_max = lambda_max;
  r.j_max = j_max;
  r.nu_j = nu_j;
  r.nu_g = nu_g;
  r.rho = rho;
  r.beta0 = 1.0;
  r.nu_alpha = nu_alpha;
  r.alpha_min = alpha_min;
  r.nu_d = nu_d;
  r.riccati = riccati;
  return r;
}

LineSearchOptions SolverOptions::line_search() const {
  LineSearchOptions l;
  l.nu_alpha = nu_alpha;
  l.alpha_min = alpha_min;
  l.nu_d = nu_d;
  l.nu_g = nu_g;
  l.soc_enabled = soc_enabled;
  return l;
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kMaxIterations:
      return "max_iterations";
    case SolveStatus::kRestorationFailed:
      return "restoration_failed";
    case SolveStatus::kEvaluatorError:
      return "evaluator_error";
  }
  return "unknown";
}

TerminationDecision check_termination(double s, double z, double primal_inf, double dual_inf,
                                      const SolverOptions& options) {
  TerminationDecision d;
  if (!(s <= options.s_final && z <= options.z_final)) return d;
  d.primal = primal_inf <= options.tol_primal;
  d.dual = dual_inf <= options.tol_dual;
  d.max = std::max(primal_inf, dual_inf) <= options.tol_max;
  d.stop = d.primal || d.dual || d.max;
  return d;
}

std::pair<double, double> update_perturbation(double s, double z, double primal_inf,
                                              const SolverOptions& options) {
  if (!(primal_inf <= 10.0 * options.tol_primal)) return {s, z};
  const double s_next =
      std::max(std::min(options.kappa_st * s, std::pow(s, options.kappa_se)), options.s_final);
  const double z_next =
      std::max(std::min(options.kappa_zt * z, std::pow(z, options.kappa_ze)), options.z_final);
  // the floor never pushes a parameter back up
  return {std::min(s, s_next), std::min(z, z_next)};
}

Iterate cold_start(const DiscretizedOCPEC& problem) {
  Iterate y(problem.dims());
  for (int k = 0; k < problem.dims().N; ++k) {
    y.sigma(k).setOnes();
    y.gamma(k).setOnes();
  }
  return y;
}

SolveReport solve(const DiscretizedOCPEC& problem, const Iterate& y0,
                  const SolverOptions& options) {
  options.validate();
  if (y0.data().size() != problem.dims().total()) {
    throw DimensionError("solve: initial iterate does not match the problem");
  }
  const auto t_start = std::chrono::steady_clock::now();

  SolveReport report;
  Iterate y = y0;
  double s = options.s_init;
  double z = options.z_init;
  RiccatiSolver linear(options.riccati);
  MeritState state;
  state.beta = options.beta0;
  state.rho = options.rho;
  const LineSearchOptions ls_opts = options.line_search();
  const RestorationOptions frp_opts = options.restoration();

  bool finished = false;
  int k = 0;
  try {
    for (k = 1; k <= options.k_max; ++k) {
      const auto evals = evaluate_stages(problem, y, s, true);
      const Infeasibility inf = infeasibilities(problem, y, evals, z);
      const TerminationDecision term = check_termination(s, z, inf.primal, inf.dual, options);
      if (term.stop) {
        report.status = SolveStatus::kOptimal;
        report.termination = term;
        finished = true;
        break;
      }

      IterationRecord rec;
      rec.iteration = k;
      rec.s = s;
      rec.z = z;
      rec.primal_inf = inf.primal;
      rec.dual_inf = inf.dual;
      rec.cost = total_cost(evals);
      const double violation = constraint_violation(problem, y, evals, z).total;
      rec.violation = violation;

      const KKTResidual t = kkt_residual(problem, y, evals, z, options.nu_g);
      rec.kkt_norm = t.inf_norm();
      const KKTMatrix kkt = kkt_matrix(problem, y, evals, z, options.nu_j, options.nu_g);

      LineSearchOutcome ls;
      bool have_step = false;
      try {
        RiccatiSolution sol = linear.factor_and_solve(kkt, t);
        state.beta =
            update_penalty(state.beta, cost_slope(evals, sol.direction), violation, state.rho);
        const SearchPoint point{y, evals, t, violation, s, z};
        ls = line_search_with_soc(problem, point, sol.direction, sol.factorization, linear, state,
                                  ls_opts);
        have_step = true;
      } catch (const SingularStageBlock&) {
        ls.kind = StepKind::kFailure;
        ls.y = y;
      }
      rec.merit = rec.cost + state.beta * violation;
      rec.merit_accepted = have_step ? ls.merit_accepted : rec.merit;
      rec.beta = state.beta;
      rec.directional_derivative = have_step ? state.directional_derivative : 0.0;
      rec.alpha = ls.alpha;
      rec.kind = ls.kind;
      rec.trials = ls.trials;
      rec.soc_attempted = ls.soc_attempted;

      if (ls.kind == StepKind::kFailure) {
        rec.frp = true;
        RestorationOutcome frp = run_restoration(problem, y, s, z, frp_opts, &linear);
        RestorationEvent ev;
        ev.iteration = k;
        ev.status = frp.status;
        ev.inner_iterations = frp.inner_iterations;
        ev.violation_before = frp.violation_start;
        ev.violation_after = frp.violation_end;
        for (StepKind sk : frp.steps) ev.soc_used = ev.soc_used || sk == StepKind::kSocStep;
        report.restorations.push_back(ev);
        report.history.push_back(rec);
        if (frp.status == RestorationStatus::kFailed) {
          report.status = SolveStatus::kRestorationFailed;
          report.message = fmt::format("feasibility restoration failed at iteration {}", k);
          finished = true;
          break;
        }
        y = std::move(frp.y);
      } else {
        report.history.push_back(rec);
        y = std::move(ls.y);
        ++report.accepted_steps;
      }

      const Infeasibility post = eval_infeasibilities(problem, y, s, z);
      std::tie(s, z) = update_perturbation(s, z, post.primal, options);
    }
    if (!finished) {
      const Infeasibility inf = eval_infeasibilities(problem, y, s, z);
      const TerminationDecision term = check_termination(s, z, inf.primal, inf.dual, options);
      report.termination = term;
      report.status = term.stop ? SolveStatus::kOptimal : SolveStatus::kMaxIterations;
    }
  } catch (const EvaluationError& e) {
    report.status = SolveStatus::kEvaluatorError;
    report.message = fmt::format("evaluator failure at iteration {}, stage {}: {}", k, e.stage(),
                                 e.what());
  }

  report.y = y;
  report.s = s;
  report.z = z;
  report.iterations = static_cast<int>(report.history.size());
  report.factorizations = linear.factorizations();
  report.resolves = linear.resolves();
  if (report.status != SolveStatus::kEvaluatorError) {
    try {
      const auto evals = evaluate_stages(problem, y, s, true);
      const Infeasibility inf = infeasibilities(problem, y, evals, z);
      report.final_cost = total_cost(evals);
      report.final_primal_inf = inf.primal;
      report.final_dual_inf = inf.dual;
    } catch (const EvaluationError&) {
    }
  }
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

}  // namespace nipocpec
