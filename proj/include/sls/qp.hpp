#pragma once

#include <Eigen/Core>
#include <vector>

namespace sls {

// Convex quadratic program
//   min 1/2 x' M x   s.t.  H1 x <= h1,  H2 x = h2
// with M symmetric positive semidefinite.
struct QpProblem {
  Eigen::MatrixXd M;
  Eigen::MatrixXd H1;
  Eigen::VectorXd h1;
  Eigen::MatrixXd H2;
  Eigen::VectorXd h2;

  int dim() const { return static_cast<int>(M.rows()); }
};

enum class QpStatus { Optimal, Infeasible, MaxIterations };

struct QpSolution {
  Eigen::VectorXd x;
  double objective = 0.0;
  QpStatus status = QpStatus::MaxIterations;
  int iterations = 0;
  double primalResidual = 0.0;  // max equality/inequality violation
  double dualResidual = 0.0;    // stationarity residual, inf norm
  double dualityGap = 0.0;      // s' z
  // Inequality multipliers and slacks for diagnostics (empty when mI = 0).
  Eigen::VectorXd z;
  Eigen::VectorXd s;
};

// Primal-dual interior point (Mehrotra predictor-corrector).  Deterministic:
// fixed pivoting, no randomized steps.  Throws std::invalid_argument on
// inconsistent dimensions, non-symmetric M (beyond 1e-10) or indefinite M
// (eigenvalue below -1e-8).
QpSolution solve_qp(const QpProblem& p, double feasTol = 1e-8,
                    double gapTol = 1e-8, int maxIter = 200);

// Equality-constrained strictly convex QP: min 1/2 x' M x s.t. H x = h,
// solved through the KKT system.  M must be positive definite.  Dependent
// rows of H are removed (rank-revealing QR); their indices are reported.
struct EqQpResult {
  Eigen::VectorXd x;
  std::vector<int> droppedRows;
  bool consistent = true;  // false if a dropped row is violated at x
};

EqQpResult solve_strictly_convex_eq_qp(const Eigen::MatrixXd& M,
                                       const Eigen::MatrixXd& H,
                                       const Eigen::VectorXd& h);

}  // namespace sls
