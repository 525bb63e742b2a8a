#pragma once

#include <Eigen/Core>
#include <vector>

#include "sls/pattern.hpp"
#include "sls/plant.hpp"

namespace sls {

struct LassoEstimate {
  Eigen::MatrixXd Ahat;
  Eigen::MatrixXd Bhat;
  double lambda = 0.0;
  SparsityPattern support;  // of [Ahat Bhat], n x (n+m)
  std::vector<int> iterations;     // per output row
  std::vector<bool> converged;     // per output row
  std::vector<double> kktResidual; // per output row
  std::vector<int> degenerateColumns;  // zero-variance regressors, coeff forced 0

  bool allConverged() const {
    for (bool c : converged)
      if (!c) return false;
    return true;
  }
};

// Soft-threshold S(c, t) = sign(c) * max(|c| - t, 0).
double soft_threshold(double c, double t);

// l1-regularized regression of x_i(t+1) on [x(t); u(t)] over the pairs
// t = 1..T-1, one independent problem per output row:
//   min 1/(2 N) sum_t ||x(t+1) - A x(t) - B u(t)||^2 + lambda (|A|_1 + |B|_1)
// with N = max(1, T-2) and elementwise l1 penalties.  Cyclic coordinate
// descent on a shared Gram matrix; entries below 1e-10 are zeroed after
// convergence.
LassoEstimate lasso_fit(const Trajectory& traj, double lambda,
                        double tol = 1e-8, int maxIter = 10000);

// lambda = cLambda * sqrt(log((n+m)/delta) / T).
double choose_lambda(int T, int n, int m, double delta, double cLambda);

struct SupportReport {
  bool exactRecovery = false;
  int falsePositives = 0;
  int falseNegatives = 0;
};

SupportReport support_report(const LassoEstimate& est,
                             const SparsityPattern& truth);

// Objective of the lasso problem at a given (A, B); exposed for the sanity
// checks that bracket the solver.
double lasso_objective(const Trajectory& traj, const Eigen::MatrixXd& A,
                       const Eigen::MatrixXd& B, double lambda);

}  // namespace sls
