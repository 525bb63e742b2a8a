#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

namespace sls {

struct BootstrapConfig {
  double etaW = 1.0;   // synthetic disturbance std
  double etaV = 1.0;   // synthetic probe std
  double delta = 0.05; // confidence parameter
  int rounds = 500;    // N
  int T = 200;         // synthetic trajectory length
  double lambda = 0.0; // lasso regularization for re-estimation
  uint64_t seed = 0;
  double lassoTol = 1e-8;
  int lassoMaxIter = 10000;
  int workers = 0;  // 0 = library default
  // Test hook: deterministic probe v(t) replacing the Gaussian draws; when
  // set, x(0) = 0 and w(t) = 0 so the noiseless exact-recovery path can be
  // exercised end to end.
  std::function<Eigen::VectorXd(int)> probe;
};

struct BootstrapResult {
  double epsBar = 0.0;
  std::vector<double> samples;        // per-round errors, sorted ascending
  double delta = 0.0;
  int rounds = 0;
  uint64_t seed = 0;
  int excludedRounds = 0;             // non-converged lasso rounds
  bool exclusionWarning = false;      // more than 5% excluded
};

// Nearest-rank percentile: element ceil(q * N) of the ascending sort
// (1-indexed).
double percentile_nearest_rank(std::vector<double> samples, double q);

// Algorithm-2 style estimate of an upper bound on the identification error:
// simulate N synthetic trajectories from (Ahat, Bhat) under u = K0 x + v,
// re-estimate each with the lasso, and return the 100(1-delta) percentile of
// max(||Ahat_i - Ahat||_2, ||Bhat_i - Bhat||_2).  The initial state is drawn
// from N(0, M); M is computed once by the caller (typically the stationary
// covariance of the estimated plant).
BootstrapResult bootstrap_eps(const Eigen::MatrixXd& Ahat,
                              const Eigen::MatrixXd& Bhat,
                              const Eigen::MatrixXd& K0,
                              const Eigen::MatrixXd& M,
                              const BootstrapConfig& cfg);

}  // namespace sls
