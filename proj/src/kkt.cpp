#include "nipocpec/kkt.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "nipocpec/fischer_burmeister.hpp"

namespace nipocpec {

namespace {

void check_iterate(const DiscretizedOCPEC& problem, const Iterate& y) {
  if (y.data().size() != problem.dims().total()) {
    throw DimensionError("iterate does not match problem dimensions");
  }
}

}  // namespace

std::vector<StageEval> evaluate_stages(const DiscretizedOCPEC& problem, const Iterate& y,
                                       double s, bool derivatives) {
  check_iterate(problem, y);
  std::vector<StageEval> evals;
  evals.reserve(problem.dims().N);
  for (int k = 0; k < problem.dims().N; ++k) {
    evals.push_back(problem.evaluate(k, y.z(k), s, derivatives));
  }
  return evals;
}

Vec dynamics_defect(const DiscretizedOCPEC& problem, const Iterate& y, int stage,
                    const StageEval& ev) {
  if (stage == 0) return problem.x0() + ev.F;
  return y.x(stage - 1) + ev.F;
}

Vec hamiltonian_gradient(const Iterate& y, int stage, const StageEval& ev) {
  Vec g = ev.cost_gradient;
  g.noalias() -= ev.G_z.transpose() * y.sigma(stage);
  g.noalias() += ev.C_z.transpose() * y.eta(stage);
  g.noalias() += ev.F_z.transpose() * y.lambda(stage);
  g.noalias() -= ev.Phi_z.transpose() * y.gamma(stage);
  if (stage + 1 < y.stages()) g.head(y.dims().nx) += y.lambda(stage + 1);
  return g;
}

KKTResidual kkt_residual(const DiscretizedOCPEC& problem, const Iterate& y,
                         const std::vector<StageEval>& evals, double z, double nu_g) {
  const Dimensions& d = problem.dims();
  KKTResidual t(d);
  for (int k = 0; k < d.N; ++k) {
    const StageEval& ev = evals[k];
    if (!ev.has_derivatives) throw std::logic_error("kkt_residual needs derivatives");
    try {
      for (int i = 0; i < d.nsigma; ++i) {
        t.sigma(k)(i) = fb_scaled_residual(y.sigma(k)(i), ev.G(i), z, nu_g);
      }
      for (int i = 0; i < d.ngamma; ++i) {
        t.gamma(k)(i) = fb_scaled_residual(y.gamma(k)(i), ev.Phi(i), z, nu_g);
      }
    } catch (const std::domain_error& e) {
      throw EvaluationError(e.what(), k);
    }
    t.eta(k) = ev.C;
    t.lambda(k) = dynamics_defect(problem, y, k, ev);
    t.z(k) = hamiltonian_gradient(y, k, ev);
  }
  return t;
}

KKTResidual eval_kkt_residual(const DiscretizedOCPEC& problem, const Iterate& y, double s,
                              double z, double nu_g) {
  return kkt_residual(problem, y, evaluate_stages(problem, y, s, true), z, nu_g);
}

KKTMatrix kkt_matrix(const DiscretizedOCPEC& problem, const Iterate& y,
                     const std::vector<StageEval>& evals, double z, double nu_j, double nu_g) {
  const Dimensions& d = problem.dims();
  KKTMatrix kkt{d, {}};
  kkt.blocks.reserve(d.N);
  const int o_eta = d.nsigma;
  const int o_gam = d.nsigma + d.neta + d.nx;
  const int o_z = d.ndual();
  const int neq = d.neta + d.nx;
  for (int k = 0; k < d.N; ++k) {
    const StageEval& ev = evals[k];
    Mat j = Mat::Zero(d.ny(), d.ny());
    try {
      for (int i = 0; i < d.nsigma; ++i) {
        j(i, i) = fb_diagonal(y.sigma(k)(i), ev.G(i), z, nu_g);
      }
      for (int i = 0; i < d.ngamma; ++i) {
        j(o_gam + i, o_gam + i) = fb_diagonal(y.gamma(k)(i), ev.Phi(i), z, nu_g);
      }
    } catch (const std::domain_error& e) {
      throw EvaluationError(e.what(), k);
    }
    j.block(o_eta, o_eta, neq, neq).diagonal().setConstant(-nu_j);

    j.block(0, o_z, d.nsigma, d.nz()) = -ev.G_z;
    j.block(o_eta, o_z, d.neta, d.nz()) = ev.C_z;
    j.block(o_eta + d.neta, o_z, d.nx, d.nz()) = ev.F_z;
    j.block(o_gam, o_z, d.ngamma, d.nz()) = -ev.Phi_z;
    j.block(o_z, 0, d.nz(), o_z) = j.block(0, o_z, o_z, d.nz()).transpose();
    j.block(o_z, o_z, d.nz(), d.nz()) = problem.hamiltonian_hessian(
        k, y.z(k), y.sigma(k), y.eta(k), y.lambda(k), y.gamma(k));
    kkt.blocks.push_back(std::move(j));
  }
  return kkt;
}

KKTMatrix assemble_kkt_blocks(const DiscretizedOCPEC& problem, const Iterate& y, double s,
                              double z, double nu_j, double nu_g) {
  return kkt_matrix(problem, y, evaluate_stages(problem, y, s, true), z, nu_j, nu_g);
}

StageVector raw_kkt_map(const DiscretizedOCPEC& problem, const Iterate& y, double s, double z) {
  const auto evals = evaluate_stages(problem, y, s, true);
  StageVector r(problem.dims());
  for (int k = 0; k < problem.dims().N; ++k) {
    const StageEval& ev = evals[k];
    r.sigma(k) = fb(Vec(y.sigma(k)), ev.G, z);
    r.eta(k) = ev.C;
    r.lambda(k) = dynamics_defect(problem, y, k, ev);
    r.gamma(k) = fb(Vec(y.gamma(k)), ev.Phi, z);
    r.z(k) = hamiltonian_gradient(y, k, ev);
  }
  return r;
}

double dual_scaling(const Iterate& y, double s_max) {
  const Dimensions& d = y.dims();
  const long count = static_cast<long>(d.N) * d.ndual();
  if (count == 0) return 1.0;
  double sum = 0.0;
  for (int k = 0; k < d.N; ++k) sum += y.duals(k).lpNorm<1>();
  return std::max(s_max, sum / static_cast<double>(count)) / s_max;
}

Infeasibility infeasibilities(const DiscretizedOCPEC& problem, const Iterate& y,
                              const std::vector<StageEval>& evals, double z) {
  const Dimensions& d = problem.dims();
  Infeasibility inf;
  double dual_raw = 0.0;
  auto upd = [](double& acc, const Vec& v) {
    if (v.size() > 0) acc = std::max(acc, v.lpNorm<Eigen::Infinity>());
  };
  for (int k = 0; k < d.N; ++k) {
    const StageEval& ev = evals[k];
    upd(inf.primal, fb(Vec(y.sigma(k)), ev.G, z));
    upd(inf.primal, ev.C);
    upd(inf.primal, dynamics_defect(problem, y, k, ev));
    upd(inf.primal, fb(Vec(y.gamma(k)), ev.Phi, z));
    if (ev.has_derivatives) upd(dual_raw, hamiltonian_gradient(y, k, ev));
  }
  inf.dual = dual_raw / dual_scaling(y);
  return inf;
}

Infeasibility eval_infeasibilities(const DiscretizedOCPEC& problem, const Iterate& y, double s,
                                   double z) {
  return infeasibilities(problem, y, evaluate_stages(problem, y, s, true), z);
}

Mat assemble_dense(const KKTMatrix& kkt) {
  const Dimensions& d = kkt.dims;
  const int ny = d.ny();
  Mat dense = Mat::Zero(static_cast<Eigen::Index>(d.N) * ny, static_cast<Eigen::Index>(d.N) * ny);
  const int row_lambda = d.nsigma + d.neta;
  const int col_x = d.ndual();
  for (int k = 0; k < d.N; ++k) {
    dense.block(k * ny, k * ny, ny, ny) = kkt.blocks[k];
    if (k > 0) {
      // B_L: dynamics row of stage k depends on x_{k-1}
      dense.block(k * ny + row_lambda, (k - 1) * ny + col_x, d.nx, d.nx).setIdentity();
      // B_U: x-gradient row of stage k-1 depends on lambda_k
      dense.block((k - 1) * ny + col_x, k * ny + row_lambda, d.nx, d.nx).setIdentity();
    }
  }
  return dense;
}

StageVector multiply(const KKTMatrix& kkt, const StageVector& v) {
  const Dimensions& d = kkt.dims;
  StageVector out(d);
  for (int k = 0; k < d.N; ++k) {
    out.stage(k).noalias() = kkt.blocks[k] * v.stage(k);
    if (k > 0) out.lambda(k) += v.x(k - 1);
    if (k + 1 < d.N) out.x(k) += v.lambda(k + 1);
  }
  return out;
}

void write_kkt_dump(std::ostream& out, const KKTMatrix& kkt, const KKTResidual& residual) {
  const Dimensions& d = kkt.dims;
  fmt::print(out, "# kkt N={} ny={} nsigma={} neta={} nx={} ngamma={} nz={}\n", d.N, d.ny(),
             d.nsigma, d.neta, d.nx, d.ngamma, d.nz());
  for (int k = 0; k < d.N; ++k) {
    fmt::print(out, "stage {}\nT", k);
    for (Eigen::Index i = 0; i < residual.stage(k).size(); ++i) {
      fmt::print(out, " {:.17g}", residual.stage(k)(i));
    }
    out << '\n';
    const Mat& j = kkt.blocks[k];
    for (Eigen::Index r = 0; r < j.rows(); ++r) {
      out << 'J';
      for (Eigen::Index c = 0; c < j.cols(); ++c) fmt::print(out, " {:.17g}", j(r, c));
      out << '\n';
    }
  }
}

}  // namespace nipocpec
