#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "sls/pattern.hpp"

namespace sls {

// Discrete-time LTI plant x(t+1) = A x(t) + B u(t) + w(t) with quadratic cost
// weights, probing noise levels and an optional initial static controller.
struct PlantModel {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
  double sigmaW = 1.0;
  double sigmaV = 1.0;
  Eigen::MatrixXd K0;  // m x n, may be zero

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }

  SparsityPattern suppA(double tol = 0.0) const;
  SparsityPattern suppB(double tol = 0.0) const;

  // Throws unless Q, R are symmetric positive definite and dimensions agree.
  void validate() const;
};

struct Trajectory {
  std::vector<Eigen::VectorXd> states;  // x(0..T)
  std::vector<Eigen::VectorXd> inputs;  // u(0..T-1)
  uint64_t seed = 0;
  uint64_t modelId = 0;

  int T() const { return static_cast<int>(inputs.size()); }
  int n() const { return states.empty() ? 0 : static_cast<int>(states[0].size()); }
  int m() const { return inputs.empty() ? 0 : static_cast<int>(inputs[0].size()); }
};

// Chain graph-Laplacian family:
//   interior:  x_i' = (D_i + 1 - 2 a_i) x_i + a_i (x_{i-1} + x_{i+1}) + b_i u_i
//   endpoints: x_i' = (D_i + 1 - a_i) x_i + a_i x_neighbor + b_i u_i
// A is scaled by `scale` afterwards; B collects the unit columns of actuated
// nodes; Q = I, R = I.
PlantModel make_chain(int n, const Eigen::VectorXd& a, const Eigen::VectorXd& D,
                      const std::vector<bool>& actuated, double scale = 1.0);
PlantModel make_chain(int n, double a, double D, double scale = 1.0);

// Simulates u(t) = K0 x(t) + v(t), v ~ N(0, sigmaV^2 I),
// x(t+1) = A x(t) + B u(t) + w(t), w ~ N(0, sigmaW^2 I).
// If initFromStationary, x(0) ~ N(0, P) with P the stationary state
// covariance (requires a stable closed loop); otherwise x(0) = 0.
Trajectory simulate(const PlantModel& model, int T, uint64_t seed,
                    bool initFromStationary);

// Largest |eigenvalue|; Hessenberg-QR for sizes up to 512, power iteration
// beyond.
double spectral_radius(const Eigen::MatrixXd& F);

// Induced 2-norm via power iteration on F'F, relative tolerance 1e-10.
double spectral_norm(const Eigen::MatrixXd& F);

// Unique solution of F P F' - P + W = 0 for stable F (doubling iteration).
// Throws if spectral_radius(F) >= 1.
Eigen::MatrixXd dlyap(const Eigen::MatrixXd& F, const Eigen::MatrixXd& W);

// Stationary covariance M* of [x; u] under u = K0 x + v:
//   M* = [P, P K0'; K0 P, K0 P K0' + sigmaV^2 I]
// with P solving (A+BK0) P (A+BK0)' - P + sigmaW^2 I + sigmaV^2 B B' = 0.
Eigen::MatrixXd stationary_cov(const PlantModel& model);

// Stationary state covariance P alone (the top-left block above).
Eigen::MatrixXd stationary_state_cov(const PlantModel& model);

struct DareResult {
  Eigen::MatrixXd P;
  Eigen::MatrixXd K;  // u = K x, closed loop A + B K
  int iterations = 0;
  double residual = 0.0;
};

// Fixed-point Riccati iteration; K = -(R + B'PB)^{-1} B'PA.  Throws when the
// iteration fails to converge.
DareResult dare_gain(const PlantModel& model, double tol = 1e-12,
                     int maxIter = 100000);

// Mutual-incoherence and conditioning diagnostics of the stationary
// covariance, evaluated per column of Psi* = [A B]'.
struct Assumption1Report {
  double incoherenceMargin = 0.0;  // r: 1 - max_j max_{i not in Aj} |.|_1
  double cMin = 0.0;               // min_j lambda_min(M*_{Aj,Aj})
  double dMax = 0.0;               // max_j max-abs-entry of (M*_{Aj,Aj})^{-1}
  double psiMin = 0.0;             // smallest nonzero magnitude of Psi*
  bool singularBlock = false;      // some principal submatrix was singular
};

Assumption1Report assumption1_diagnostics(const Eigen::MatrixXd& Mstar,
                                          const Eigen::MatrixXd& truePsi,
                                          const SparsityPattern& supports);

}  // namespace sls
