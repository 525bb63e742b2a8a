#pragma once

#include <Eigen/Core>
#include <deque>
#include <vector>

#include "sls/fir.hpp"
#include "sls/plant.hpp"
#include "sls/synthesis.hpp"

namespace sls {

// Causal realization of the dynamic controller K = PhiU PhiX^{-1}.  Keeps a
// ring buffer of the last L disturbance estimates zeta(t):
//   zeta(t) = PhiX(1)^{-1} (x(t) - sum_{tau=2..L} PhiX(tau) zeta(t-tau+1))
//   u(t)    = sum_{tau=1..L} PhiU(tau) zeta(t-tau+1)
class SlsController {
 public:
  SlsController(const FirResponse& phiX, const FirResponse& phiU);

  int n() const { return n_; }
  int m() const { return m_; }
  int L() const { return L_; }
  const FirResponse& phiX() const { return phi_x_; }
  const FirResponse& phiU() const { return phi_u_; }

  // Processes one measurement, returns the control action, updates memory.
  Eigen::VectorXd step(const Eigen::VectorXd& x);
  void reset();

 private:
  FirResponse phi_x_;
  FirResponse phi_u_;
  Eigen::MatrixXd phiX1_inv_;
  int n_, m_, L_;
  std::deque<Eigen::VectorXd> memory_;  // zeta(t-1), ..., zeta(t-L+1)
};

// Builds the controller from a Feasible synthesis result.
SlsController realize(const SynthesisSolution& solution);

// Augmented closed-loop matrix over [x(t); zeta(t-1); ...; zeta(t-L+1)];
// its spectral radius decides internal stability.  Size n * L.
Eigen::MatrixXd closed_loop_matrix(const PlantModel& plant,
                                   const SlsController& ctrl);

// Static-gain closed loop A + B K.
Eigen::MatrixXd closed_loop_matrix(const PlantModel& plant,
                                   const Eigen::MatrixXd& K);

enum class CostMethod { Lyapunov, MonteCarlo };

struct ClosedLoopReport {
  double spectralRadius = 0.0;
  bool stable = false;
  double cost = 0.0;  // J, the H2 value
  CostMethod costMethod = CostMethod::Lyapunov;
};

// J = sqrt(trace(Q Pxx) + trace(R Puu)) with P the stationary covariance of
// the augmented closed loop driven by w ~ N(0, sigmaW^2 I).  Throws when the
// loop is unstable.
double lqr_cost(const PlantModel& plant, const SlsController& ctrl,
                double sigmaW = 1.0);
double lqr_cost(const PlantModel& plant, const Eigen::MatrixXd& K,
                double sigmaW = 1.0);

// Monte-Carlo cross-check of the cost: time average of x'Qx + u'Ru after a
// burn-in of 20 mixing times.
double lqr_cost_monte_carlo(const PlantModel& plant, const SlsController& ctrl,
                            double sigmaW, long steps, uint64_t seed);

ClosedLoopReport closed_loop_report(const PlantModel& plant,
                                    const SlsController& ctrl,
                                    double sigmaW = 1.0);

struct RobustCertificate {
  double bound = 0.0;   // k_phi^{1/2} eps max-response-budget + k_v^{1/2} max-V-budget
  bool certified = false;  // bound < 1; sufficient only
};

// Small-gain certificate from the returned budgets, evaluated at epsUsed.
// When epsUsed dominates the true estimation error and the bound is < 1, the
// controller provably stabilizes the true plant.
RobustCertificate robust_certificate(const SynthesisSolution& solution,
                                     double epsUsed);

struct SubOptimalityBound {
  double uncertaintyErr = 0.0;
  double truncationErr = 0.0;
  bool preconditionsHold = false;
};

// Diagnostic relative sub-optimality bound
//   uncertainty = 16/min(alpha,1-alpha) * C* rho*/(1-rho*) * k^2 * epsBar
//   truncation  = 2 sqrt(2)/(1-alpha) * (|A*|_inf + |B*|_inf) * C* k^2 rho*^L
// with the feasibility precondition flag
//   epsBar < (1-rho*) min(alpha,1-alpha) / (32 C* rho*) * k^{-2}  and the
//   matching lower bound on L.
SubOptimalityBound theorem3_bound(double epsBar, int L, int k, double cStar,
                                  double rhoStar, double alpha, double aInf,
                                  double bInf);

struct DecayEnvelope {
  double cStar = 1.0;
  double rhoStar = 0.5;
  bool clipped = false;  // non-decaying input, rho clipped below 1
};

// Tightest envelope max(|PhiX(t)|_inf, |PhiU(t)|_inf) <= C* rho*^t with
// C* >= 1: log-least-squares fit for the rate, then a local grid refinement
// minimizing the squared log gap subject to the envelope constraint.
DecayEnvelope estimate_decay(const FirResponse& phiX, const FirResponse& phiU);

}  // namespace sls
