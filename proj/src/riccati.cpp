#include "nipocpec/riccati.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace nipocpec {

namespace {

// Backward reduction of a right-hand side followed by the forward sweep.
StageVector backward_forward(const StageFactorization& fact, const KKTResidual& rhs) {
  const Dimensions& d = fact.dims();
  if (rhs.data().size() != d.total()) throw DimensionError("riccati: rhs size mismatch");
  const int N = d.N;
  std::vector<Vec> reduced(N);
  reduced[N - 1] = rhs.stage(N - 1);
  const int lam = d.nsigma + d.neta;
  const int xo = d.ndual();
  for (int k = N - 2; k >= 0; --k) {
    reduced[k] = rhs.stage(k);
    if (d.nx > 0) {
      // b_k = T_k - B_U A_{k+1}^{-1} b_{k+1}
      const Vec tmp = fact.solve_stage(k + 1, reduced[k + 1]);
      reduced[k].segment(xo, d.nx) -= tmp.segment(lam, d.nx);
    }
  }
  StageVector dy(d);
  for (int k = 0; k < N; ++k) {
    // dY_k = -A_k^{-1} (b_k + B_L dY_{k-1}); dY_{-1} = 0
    Vec b = reduced[k];
    if (k > 0 && d.nx > 0) b.segment(lam, d.nx) += dy.x(k - 1);
    dy.stage(k) = -fact.solve_stage(k, b);
  }
  return dy;
}

// One refinement step against the factored system; kept only if it helps.
StageVector refined_solve(const StageFactorization& fact, const KKTResidual& rhs) {
  StageVector dy = backward_forward(fact, rhs);
  StageVector res = multiply(fact.system(), dy);
  res += rhs;
  const double before = res.data().lpNorm<Eigen::Infinity>();
  if (!(before > 0.0)) return dy;
  StageVector better = dy;
  better += backward_forward(fact, res);
  StageVector res2 = multiply(fact.system(), better);
  res2 += rhs;
  return res2.data().lpNorm<Eigen::Infinity>() < before ? better : dy;
}

int positive_eigenvalues(const Mat& a) {
  const Mat sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(sym, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) return -1;
  return static_cast<int>((eig.eigenvalues().array() > 0.0).count());
}

}  // namespace

Vec StageFactorization::solve_stage(int k, const Vec& rhs) const {
  if (!valid_) throw std::logic_error("riccati: invalidated factorization");
  return lu_[k].solve(row_scale_[k].asDiagonal() * rhs);
}

// Backward recursion with delta added to every primal diagonal. Returns false
// on a non-finite or ill-conditioned block; *positives collects the number of
// positive eigenvalues of the reduced blocks when requested.
bool RiccatiSolver::factor_blocks(const KKTMatrix& kkt, double delta, StageFactorization& fact,
                                  int* positives, int* failed_stage) const {
  const Dimensions& d = kkt.dims;
  const int N = d.N;
  const int ny = d.ny();
  const int lam = d.nsigma + d.neta;
  const int xo = d.ndual();

  fact.dims_ = d;
  fact.system_ = kkt;
  if (delta > 0.0)
    for (Mat& b : fact.system_.blocks) b.bottomRightCorner(d.nz(), d.nz()).diagonal().array() += delta;
  fact.lu_.assign(N, {});
  fact.row_scale_.assign(N, {});
  fact.delta_ = delta;
  fact.valid_ = true;
  if (positives) *positives = 0;

  for (int k = N - 1; k >= 0; --k) {
    Mat a = kkt.blocks[k];
    if (delta > 0.0) a.bottomRightCorner(d.nz(), d.nz()).diagonal().array() += delta;
    if (k < N - 1 && d.nx > 0) {
      if (options_.structural_shortcut) {
        // (B_U A^{-1} B_L)_{xx} = (A^{-1})_{lambda lambda}
        Mat unit = Mat::Zero(ny, d.nx);
        unit.block(lam, 0, d.nx, d.nx).setIdentity();
        Mat cols(ny, d.nx);
        for (int c = 0; c < d.nx; ++c) cols.col(c) = fact.solve_stage(k + 1, unit.col(c));
        a.block(xo, xo, d.nx, d.nx) -= cols.block(lam, 0, d.nx, d.nx);
      } else {
        Mat bl = Mat::Zero(ny, ny);
        bl.block(lam, xo, d.nx, d.nx).setIdentity();
        Mat ainv_bl(ny, ny);
        for (int c = 0; c < ny; ++c) ainv_bl.col(c) = fact.solve_stage(k + 1, bl.col(c));
        a -= bl.transpose() * ainv_bl;
      }
    }
    if (!a.allFinite()) {
      fact.valid_ = false;
      *failed_stage = k;
      return false;
    }
    if (positives) {
      const int p = positive_eigenvalues(a);
      *positives = p < 0 || *positives < 0 ? -1 : *positives + p;
    }
    Vec scale(ny);
    for (int r = 0; r < ny; ++r) {
      const double m = a.row(r).lpNorm<Eigen::Infinity>();
      scale(r) = m > 0.0 ? 1.0 / m : 1.0;
    }
    a = scale.asDiagonal() * a;
    fact.lu_[k].compute(a);
    fact.row_scale_[k] = std::move(scale);
    const double rcond = fact.lu_[k].rcond();
    if (!(rcond > 1.0 / options_.max_condition)) {
      fact.valid_ = false;
      *failed_stage = k;
      return false;
    }
  }
  return true;
}

RiccatiSolution RiccatiSolver::factor_and_solve(const KKTMatrix& kkt, const KKTResidual& rhs) {
  const Dimensions& d = kkt.dims;
  if (static_cast<int>(kkt.blocks.size()) != d.N) throw DimensionError("riccati: block count");
  const bool correct = options_.inertia_correction && d.nz() > 0;
  const int target = d.N * d.nz();

  StageFactorization fact;
  int positives = 0;
  int failed = 0;
  bool ok = factor_blocks(kkt, 0.0, fact, correct ? &positives : nullptr, &failed);
  ++factorizations_;
  if (correct && !(ok && positives == target)) {
    // Uniform primal shift, warm-started from the last one that worked.
    double delta = last_delta_ > 0.0 ? std::max(options_.delta_init, last_delta_ / options_.delta_decrease)
                                     : options_.delta_init;
    while (true) {
      ok = factor_blocks(kkt, delta, fact, &positives, &failed);
      ++factorizations_;
      ++inertia_trials_;
      if (ok && positives == target) break;
      delta *= options_.delta_growth;
      if (delta > options_.delta_max) throw SingularStageBlock(failed);
    }
    last_delta_ = delta;
  } else if (!ok) {
    throw SingularStageBlock(failed);
  }
  RiccatiSolution sol{refined_solve(fact, rhs), std::move(fact)};
  return sol;
}

StageVector RiccatiSolver::resolve(const StageFactorization& fact, const KKTResidual& rhs) {
  ++resolves_;
  return refined_solve(fact, rhs);
}

RiccatiSolution factor_and_solve(const KKTMatrix& kkt, const KKTResidual& rhs,
                                 const RiccatiOptions& options) {
  RiccatiSolver solver(options);
  return solver.factor_and_solve(kkt, rhs);
}

StageVector resolve(const StageFactorization& fact, const KKTResidual& rhs) {
  return refined_solve(fact, rhs);
}

}  // namespace nipocpec
