#include "nipocpec/restoration.hpp"

#include <cmath>

#include <Eigen/QR>

namespace nipocpec {

namespace {

class ProximityCost final : public StageCost {
 public:
  ProximityCost(std::vector<Vec> reference, std::vector<Vec> scaling)
      : reference_(std::move(reference)), scaling_(std::move(scaling)) {}

  double value(int k, const Vec& z) const override {
    const Vec dz = z - reference_[k];
    return 0.5 * dz.dot(scaling_[k].cwiseProduct(dz));
  }
  Vec gradient(int k, const Vec& z) const override {
    return scaling_[k].cwiseProduct(z - reference_[k]);
  }
  Mat hessian(int k, const Vec&) const override { return scaling_[k].asDiagonal(); }

 private:
  std::vector<Vec> reference_;
  std::vector<Vec> scaling_;
};

}  // namespace

RestorationProblem build_restoration(const DiscretizedOCPEC& problem, const Iterate& start,
                                     double nu_sc) {
  const Dimensions& d = problem.dims();
  std::vector<Vec> reference(d.N), scaling(d.N);
  for (int k = 0; k < d.N; ++k) {
    reference[k] = start.z(k);
    scaling[k].resize(d.nz());
    for (int i = 0; i < d.nz(); ++i) {
      const double a = std::abs(reference[k](i));
      scaling[k](i) = nu_sc * (a > 1.0 ? 1.0 / a : 1.0);
    }
  }
  auto cost = std::make_shared<ProximityCost>(reference, scaling);
  return RestorationProblem{problem.with_cost(std::move(cost)), std::move(reference),
                            std::move(scaling)};
}

EqualityDuals recover_equality_duals(const DiscretizedOCPEC& problem, const Iterate& y, double s,
                                     double lambda_max) {
  const Dimensions& d = problem.dims();
  EqualityDuals out;
  out.eta.resize(d.N);
  out.lambda.resize(d.N);
  double largest = 0.0;
  Vec lambda_next = Vec::Zero(d.nx);
  for (int k = d.N - 1; k >= 0; --k) {
    const StageEval ev = problem.evaluate(k, y.z(k), s, true);
    Vec rhs = ev.cost_gradient;
    rhs.noalias() -= ev.G_z.transpose() * y.sigma(k);
    rhs.noalias() -= ev.Phi_z.transpose() * y.gamma(k);
    rhs.head(d.nx) += lambda_next;
    Mat a(d.nz(), d.neta + d.nx);
    a.leftCols(d.neta) = ev.C_z.transpose();
    a.rightCols(d.nx) = ev.F_z.transpose();
    Vec sol = Vec::Zero(d.neta + d.nx);
    if (a.size() > 0) {
      Eigen::CompleteOrthogonalDecomposition<Mat> cod(a);
      sol = cod.solve(-rhs);
    }
    out.eta[k] = sol.head(d.neta);
    out.lambda[k] = sol.tail(d.nx);
    lambda_next = out.lambda[k];
    if (sol.size() > 0) largest = std::max(largest, sol.lpNorm<Eigen::Infinity>());
  }
  if (!(largest < lambda_max)) {
    out.reset = true;
    for (int k = 0; k < d.N; ++k) {
      out.eta[k].setZero();
      out.lambda[k].setZero();
    }
  }
  return out;
}

RestorationOutcome run_restoration(const DiscretizedOCPEC& problem, const Iterate& start, double s,
                                   double z, const RestorationOptions& options,
                                   RiccatiSolver* solver) {
  RiccatiSolver local(options.riccati);
  RiccatiSolver& linear = solver ? *solver : local;
  const Dimensions& d = problem.dims();

  RestorationOutcome out;
  out.y = start;
  const RestorationProblem frp = build_restoration(problem, start, options.nu_sc);

  Iterate ybar = start;
  for (int k = 0; k < d.N; ++k) ybar.eq_duals(k).setZero();

  out.violation_start = constraint_violation(problem, start, s, z).total;
  const double target = options.nu_m * out.violation_start;

  LineSearchOptions ls_opts;
  ls_opts.nu_alpha = options.nu_alpha;
  ls_opts.alpha_min = options.alpha_min;
  ls_opts.nu_d = options.nu_d;
  ls_opts.nu_g = options.nu_g;
  ls_opts.soc_enabled = false;

  MeritState state;
  state.beta = options.beta0;
  state.rho = options.rho;

  bool restored = false;
  bool failed = false;
  double violation = 0.0;
  for (int j = 0; j < options.j_max; ++j) {
    const auto evals = evaluate_stages(frp.problem, ybar, s, true);
    violation = constraint_violation(frp.problem, ybar, evals, z).total;
    if (violation <= target) {
      restored = true;
      break;
    }
    const KKTResidual t = kkt_residual(frp.problem, ybar, evals, z, options.nu_g);
    const KKTMatrix kkt = kkt_matrix(frp.problem, ybar, evals, z, options.nu_j, options.nu_g);
    RiccatiSolution sol;
    try {
      sol = linear.factor_and_solve(kkt, t);
    } catch (const SingularStageBlock&) {
      failed = true;
      break;
    }
    state.beta = update_penalty(state.beta, cost_slope(evals, sol.direction), violation, state.rho);
    const SearchPoint point{ybar, evals, t, violation, s, z};
    LineSearchOutcome ls =
        line_search_with_soc(frp.problem, point, sol.direction, sol.factorization, linear, state,
                             ls_opts);
    ++out.inner_iterations;
    out.perturbations.emplace_back(s, z);
    out.steps.push_back(ls.kind);
    if (ls.kind == StepKind::kFailure) {
      failed = true;
      break;
    }
    ybar = std::move(ls.y);
  }
  if (!restored && !failed) {
    violation = constraint_violation(problem, ybar, s, z).total;
    restored = violation <= target;
  }
  if (!restored) {
    out.status = RestorationStatus::kFailed;
    out.violation_end = out.violation_start;
    return out;
  }

  const EqualityDuals duals = recover_equality_duals(problem, ybar, s, options.lambda_max);
  for (int k = 0; k < d.N; ++k) {
    ybar.eta(k) = duals.eta[k];
    ybar.lambda(k) = duals.lambda[k];
  }
  out.duals_reset = duals.reset;
  out.y = std::move(ybar);
  out.status = RestorationStatus::kRestored;
  out.violation_end = violation;
  return out;
}

}  // namespace nipocpec
