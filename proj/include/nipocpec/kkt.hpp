#pragma once

#include <iosfwd>
#include <vector>

#include "nipocpec/iterate.hpp"
#include "nipocpec/problem.hpp"

namespace nipocpec {

/// Block-tridiagonal Newton matrix. Only the symmetric diagonal blocks J_k are
/// stored; the off-diagonal couplers are the fixed identity linking x_{k-1}
/// into the dynamics row of stage k (B_L) and its transpose (B_U).
struct KKTMatrix {
  Dimensions dims;
  std::vector<Mat> blocks;
};

/// Every stage function evaluated at one iterate.
std::vector<StageEval> evaluate_stages(const DiscretizedOCPEC& problem, const Iterate& y,
                                       double s, bool derivatives);

/// x_{k-1} + F_k, with x_{-1} the fixed initial state.
Vec dynamics_defect(const DiscretizedOCPEC& problem, const Iterate& y, int stage,
                    const StageEval& ev);

/// Hamiltonian gradient of stage k with the lambda_{k+1} coupling added to the
/// x rows (lambda_N = 0).
Vec hamiltonian_gradient(const Iterate& y, int stage, const StageEval& ev);

/// Newton right-hand side T (scaled FB rows, C, defect, scaled FB rows,
/// Hamiltonian gradient), stage-wise.
KKTResidual kkt_residual(const DiscretizedOCPEC& problem, const Iterate& y,
                         const std::vector<StageEval>& evals, double z, double nu_g);
KKTResidual eval_kkt_residual(const DiscretizedOCPEC& problem, const Iterate& y, double s,
                              double z, double nu_g);

KKTMatrix kkt_matrix(const DiscretizedOCPEC& problem, const Iterate& y,
                     const std::vector<StageEval>& evals, double z, double nu_j, double nu_g);
KKTMatrix assemble_kkt_blocks(const DiscretizedOCPEC& problem, const Iterate& y, double s,
                              double z, double nu_j, double nu_g);

/// Unscaled KKT map [Psi_G; C; defect; Psi_Phi; grad H]: the residual of the
/// original (unmapped) optimality system.
StageVector raw_kkt_map(const DiscretizedOCPEC& problem, const Iterate& y, double s, double z);

struct Infeasibility {
  double primal = 0.0;
  double dual = 0.0;
};

/// Divisor applied to the dual residual: max(s_max, mean |dual|) / s_max.
double dual_scaling(const Iterate& y, double s_max = 100.0);

Infeasibility infeasibilities(const DiscretizedOCPEC& problem, const Iterate& y,
                              const std::vector<StageEval>& evals, double z);
Infeasibility eval_infeasibilities(const DiscretizedOCPEC& problem, const Iterate& y, double s,
                                   double z);

/// Dense copy of the full matrix (tests, dumps).
Mat assemble_dense(const KKTMatrix& kkt);

/// K * v using the block structure.
StageVector multiply(const KKTMatrix& kkt, const StageVector& v);

/// Text dump: one record per stage with the residual block and J_k row-major.
void write_kkt_dump(std::ostream& out, const KKTMatrix& kkt, const KKTResidual& residual);

}  // namespace nipocpec
