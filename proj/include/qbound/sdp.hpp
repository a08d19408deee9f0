#pragma once

#include <Eigen/Dense>

#include "qbound/relaxation.hpp"

namespace qbound {

enum class SolveStatus { Optimal, MaxIter, Infeasible, NumericalFailure };

const char* to_string(SolveStatus s);

struct SolveOptions {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iter = 200;
};

struct SdpSolution {
  std::vector<Eigen::MatrixXcd> primal;      // X blocks, Hermitian PSD
  std::vector<double> dual_y;                // one multiplier per constraint
  std::vector<Eigen::MatrixXcd> dual_slack;  // sum_k y_k A_k - C, blockwise
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double gap = 0.0;               // |primal_obj - dual_obj|
  double primal_residual = 0.0;   // max_k |<A_k, X> - b_k|
  double dual_residual = 0.0;     // max-norm distance of the slack iterate from
                                  // the reconstruction above
  int iterations = 0;
  SolveStatus status = SolveStatus::NumericalFailure;
};

// Standard 2n x 2n symmetric embedding [[Re H, -Im H], [Im H, Re H]] of a
// Hermitian matrix; <embed(A), embed(B)> = 2 Re<A, B>.
Eigen::MatrixXd real_embed(const Eigen::MatrixXcd& H, double herm_tol = 1e-12);
Eigen::MatrixXcd real_unembed(const Eigen::MatrixXd& M);

// Dense Nesterov-Todd-scaled predictor-corrector path following on the real
// symmetric embedding.  Deterministic: identical inputs and options produce
// identical iterate sequences.
SdpSolution solve(const SdpProblem& p, const SolveOptions& opts = {});

}  // namespace qbound
