#include "nipocpec/derivative_check.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <random>

namespace nipocpec {

namespace {

class Checker {
 public:
  Checker(DerivativeReport& report, double tol) : report_(report), tol_(tol) {}

  void compare(const std::string& name, int stage, const Mat& supplied, const Mat& fd) {
    if (supplied.rows() != fd.rows() || supplied.cols() != fd.cols())
      throw DimensionError("check_derivatives: " + name + " has the wrong shape at stage " +
                           std::to_string(stage));
    double& worst = report_.max_error[name];
    for (int c = 0; c < fd.cols(); ++c) {
      for (int r = 0; r < fd.rows(); ++r) {
        const double err = std::abs(supplied(r, c) - fd(r, c)) / std::max(1.0, std::abs(fd(r, c)));
        const double e = std::isfinite(err) ? err : HUGE_VAL;
        worst = std::max(worst, e);
        if (e > tol_) report_.flagged.push_back({name, stage, r, c, supplied(r, c), fd(r, c), e});
      }
    }
  }

 private:
  DerivativeReport& report_;
  double tol_;
};

// Columns j of the result hold (f(z + h e_j) - f(z - h e_j)) / 2h.
Mat central_difference(const std::function<Vec(const Vec&)>& f, const Vec& z, double h) {
  Mat out;
  Vec zp = z;
  for (int j = 0; j < z.size(); ++j) {
    zp(j) = z(j) + h;
    const Vec fp = f(zp);
    zp(j) = z(j) - h;
    const Vec fm = f(zp);
    zp(j) = z(j);
    if (j == 0) out.resize(fp.size(), z.size());
    out.col(j) = (fp - fm) / (2.0 * h);
  }
  return out;
}

template <class F>
auto tagged(int stage, F&& f) {
  try {
    return f();
  } catch (const EvaluationError&) {
    throw;
  } catch (const std::exception& e) {
    throw EvaluationError(e.what(), stage);
  }
}

Vec random_vector(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

}  // namespace

DerivativeReport check_derivatives(const DiscretizedOCPEC& problem, const Iterate& z,
                                   const DerivativeCheckOptions& options) {
  if (!(options.step > 0.0) || !(options.tol > 0.0))
    throw std::invalid_argument("check_derivatives: step and tol must be positive");
  const Dimensions& d = problem.dims();
  if (z.dims().N != d.N || z.dims().nz() != d.nz())
    throw DimensionError("check_derivatives: point has the wrong dimensions");

  DerivativeReport report;
  report.tol = options.tol;
  for (const char* name :
       {"cost_gradient", "G_z", "C_z", "F_z", "Phi_z", "cost_hessian", "constraint_hessian"})
    report.max_error[name] = 0.0;
  if (!options.hessians) {
    report.max_error.erase("cost_hessian");
    report.max_error.erase("constraint_hessian");
  }
  Checker check(report, options.tol);
  std::mt19937_64 rng(options.seed);
  const double h = options.step;
  const double s = options.s;

  for (int k = 0; k < d.N; ++k) {
    const Vec zk = z.z(k);
    const StageEval ev = problem.evaluate(k, zk, s, true);
    auto value = [&](const Vec& v) { return problem.evaluate(k, v, s, false); };

    check.compare("cost_gradient", k, ev.cost_gradient.transpose(),
                  central_difference([&](const Vec& v) { return Vec::Constant(1, value(v).cost); }, zk, h));
    check.compare("G_z", k, ev.G_z, central_difference([&](const Vec& v) { return value(v).G; }, zk, h));
    check.compare("C_z", k, ev.C_z, central_difference([&](const Vec& v) { return value(v).C; }, zk, h));
    check.compare("F_z", k, ev.F_z, central_difference([&](const Vec& v) { return value(v).F; }, zk, h));
    check.compare("Phi_z", k, ev.Phi_z, central_difference([&](const Vec& v) { return value(v).Phi; }, zk, h));

    if (!options.hessians) continue;
    const Mat cost_h = tagged(k, [&] { return problem.cost().hessian(k, zk); });
    check.compare("cost_hessian", k, cost_h,
                  central_difference([&](const Vec& v) { return problem.evaluate(k, v, s, true).cost_gradient; }, zk, h));

    const Vec sigma = random_vector(rng, d.nsigma);
    const Vec eta = random_vector(rng, d.neta);
    const Vec lambda = random_vector(rng, d.nx);
    const Mat weighted =
        tagged(k, [&] { return problem.constraints().weighted_hessian(k, zk, sigma, eta, lambda); });
    auto weighted_gradient = [&](const Vec& v) -> Vec {
      const StageEval e = problem.evaluate(k, v, s, true);
      Vec g = Vec::Zero(d.nz());
      if (d.nsigma > 0) g -= e.G_z.transpose() * sigma;
      if (d.neta > 0) g += e.C_z.transpose() * eta;
      if (d.nx > 0) g += e.F_z.transpose() * lambda;
      return g;
    };
    check.compare("constraint_hessian", k, weighted, central_difference(weighted_gradient, zk, h));
  }
  return report;
}

DerivativeReport check_derivatives(const DiscretizedOCPEC& problem, const Iterate& z, double tol) {
  DerivativeCheckOptions options;
  options.tol = tol;
  return check_derivatives(problem, z, options);
}

}  // namespace nipocpec
