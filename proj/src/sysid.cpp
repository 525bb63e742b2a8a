#include "sls/sysid.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace sls {

double soft_threshold(double c, double t) {
  if (c > t) return c - t;
  if (c < -t) return c + t;
  return 0.0;
}

namespace {

constexpr double kHardZero = 1e-10;

// Regressor matrix Z with columns [x(t); u(t)] for t = 1..T-1 and targets
// Y with columns x(t+1).
void regressionData(const Trajectory& traj, Eigen::MatrixXd& Z,
                    Eigen::MatrixXd& Y, double& invN) {
  const int T = traj.T();
  if (T < 2) throw std::invalid_argument("lasso_fit: need T >= 2");
  const int n = traj.n();
  const int m = traj.m();
  const int pairs = T - 1;  // t = 1..T-1
  Z.resize(n + m, pairs);
  Y.resize(n, pairs);
  for (int t = 1; t <= T - 1; ++t) {
    Z.col(t - 1).head(n) = traj.states[t];
    Z.col(t - 1).tail(m) = traj.inputs[t];
    Y.col(t - 1) = traj.states[t + 1];
  }
  invN = 1.0 / std::max(1, T - 2);
}

}  // namespace

double lasso_objective(const Trajectory& traj, const Eigen::MatrixXd& A,
                       const Eigen::MatrixXd& B, double lambda) {
  Eigen::MatrixXd Z, Y;
  double invN = 0.0;
  regressionData(traj, Z, Y, invN);
  Eigen::MatrixXd Psi(A.rows(), A.cols() + B.cols());
  Psi << A, B;
  const double fit = (Y - Psi * Z).squaredNorm();
  return 0.5 * invN * fit + lambda * Psi.cwiseAbs().sum();
}

LassoEstimate lasso_fit(const Trajectory& traj, double lambda, double tol,
                        int maxIter) {
  if (lambda < 0.0) throw std::invalid_argument("lasso_fit: lambda < 0");
  Eigen::MatrixXd Z, Y;
  double invN = 0.0;
  regressionData(traj, Z, Y, invN);
  const int n = traj.n();
  const int m = traj.m();
  const int p = n + m;

  // Shared Gram matrix and per-row correlations, pre-scaled by 1/N.
  const Eigen::MatrixXd G = (Z * Z.transpose()) * invN;
  const Eigen::MatrixXd Bcorr = (Z * Y.transpose()) * invN;  // p x n

  LassoEstimate est;
  est.lambda = lambda;
  est.Ahat = Eigen::MatrixXd::Zero(n, n);
  est.Bhat = Eigen::MatrixXd::Zero(n, m);
  est.iterations.assign(n, 0);
  est.converged.assign(n, false);
  est.kktResidual.assign(n, 0.0);

  std::vector<bool> degenerate(p, false);
  for (int q = 0; q < p; ++q) {
    if (G(q, q) <= 0.0) {
      degenerate[q] = true;
      est.degenerateColumns.push_back(q);
    }
  }

  Eigen::MatrixXd Psi = Eigen::MatrixXd::Zero(n, p);
  for (int row = 0; row < n; ++row) {
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(p);
    // Running gradient of the smooth part: grad = G psi - b.
    Eigen::VectorXd grad = -Bcorr.col(row);
    int iter = 0;
    for (; iter < maxIter; ++iter) {
      double maxChange = 0.0;
      for (int q = 0; q < p; ++q) {
        if (degenerate[q]) continue;
        const double old = psi(q);
        const double c = old * G(q, q) - grad(q);
        const double next = soft_threshold(c, lambda) / G(q, q);
        if (next != old) {
          grad += (next - old) * G.col(q);
          psi(q) = next;
          maxChange = std::max(maxChange, std::abs(next - old));
        }
      }
      if (maxChange <= tol) {
        est.converged[row] = true;
        ++iter;
        break;
      }
    }
    est.iterations[row] = iter;

    // Subgradient residual at the returned point.
    double kkt = 0.0;
    for (int q = 0; q < p; ++q) {
      if (degenerate[q]) continue;
      if (psi(q) != 0.0) {
        kkt = std::max(kkt, std::abs(grad(q) + lambda * (psi(q) > 0 ? 1.0 : -1.0)));
      } else {
        kkt = std::max(kkt, std::max(0.0, std::abs(grad(q)) - lambda));
      }
    }
    est.kktResidual[row] = kkt;

    for (int q = 0; q < p; ++q) {
      if (std::abs(psi(q)) < kHardZero) psi(q) = 0.0;
    }
    Psi.row(row) = psi.transpose();
  }

  est.Ahat = Psi.leftCols(n);
  est.Bhat = Psi.rightCols(m);

  std::vector<SparsityPattern::Entry> entries;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < p; ++c)
      if (Psi(r, c) != 0.0) entries.emplace_back(r, c);
  est.support = SparsityPattern(n, p, std::move(entries));
  return est;
}

double choose_lambda(int T, int n, int m, double delta, double cLambda) {
  if (T < 1) throw std::invalid_argument("choose_lambda: T < 1");
  if (delta <= 0.0 || delta >= 1.0) {
    throw std::invalid_argument("choose_lambda: delta must be in (0,1)");
  }
  if (cLambda < 0.0) throw std::invalid_argument("choose_lambda: cLambda < 0");
  return cLambda * std::sqrt(std::log((n + m) / delta) / T);
}

SupportReport support_report(const LassoEstimate& est,
                             const SparsityPattern& truth) {
  if (est.support.rows() != truth.rows() || est.support.cols() != truth.cols()) {
    throw std::invalid_argument("support_report: shape mismatch");
  }
  SupportReport rep;
  for (const auto& e : est.support.entries()) {
    if (!truth.contains(e.first, e.second)) ++rep.falsePositives;
  }
  for (const auto& e : truth.entries()) {
    if (!est.support.contains(e.first, e.second)) ++rep.falseNegatives;
  }
  rep.exactRecovery = rep.falsePositives == 0 && rep.falseNegatives == 0;
  return rep;
}

}  // namespace sls
