#include "sls/evaluate.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "sls/rng.hpp"

namespace sls {

SlsController::SlsController(const FirResponse& phiX, const FirResponse& phiU)
    : phi_x_(phiX), phi_u_(phiU) {
  if (phiX.startLag() != 1 || phiU.startLag() != 1 ||
      phiX.length() != phiU.length() || phiX.cols() != phiX.rows() ||
      phiU.cols() != phiX.rows()) {
    throw std::invalid_argument("SlsController: malformed responses");
  }
  n_ = phiX.rows();
  m_ = phiU.rows();
  L_ = phiX.length();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(phiX.tap(1));
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n_, n_);
  phiX1_inv_ = lu.solve(I);
  if (!phiX1_inv_.allFinite() ||
      (phiX.tap(1) * phiX1_inv_ - I).cwiseAbs().maxCoeff() > 1e-6) {
    throw std::invalid_argument("SlsController: PhiX(1) is singular");
  }
  reset();
}

void SlsController::reset() {
  memory_.assign(std::max(0, L_ - 1), Eigen::VectorXd::Zero(n_));
}

Eigen::VectorXd SlsController::step(const Eigen::VectorXd& x) {
  if (x.size() != n_) throw std::invalid_argument("SlsController: state size");
  Eigen::VectorXd acc = x;
  for (int b = 1; b <= L_ - 1; ++b) {
    acc -= phi_x_.tap(b + 1) * memory_[b - 1];
  }
  const Eigen::VectorXd zeta = phiX1_inv_ * acc;
  Eigen::VectorXd u = phi_u_.tap(1) * zeta;
  for (int b = 1; b <= L_ - 1; ++b) {
    u += phi_u_.tap(b + 1) * memory_[b - 1];
  }
  if (L_ > 1) {
    memory_.push_front(zeta);
    memory_.pop_back();
  }
  return u;
}

SlsController realize(const SynthesisSolution& solution) {
  if (solution.status != SynthesisStatus::Feasible) {
    throw std::invalid_argument("realize: solution is not feasible");
  }
  return SlsController(solution.phiX, solution.phiU);
}

Eigen::MatrixXd closed_loop_matrix(const PlantModel& plant,
                                   const SlsController& ctrl) {
  const int n = ctrl.n();
  const int m = ctrl.m();
  const int L = ctrl.L();
  if (plant.n() != n || plant.m() != m) {
    throw std::invalid_argument("closed_loop_matrix: dimension mismatch");
  }

  // zeta(t) = Zx x(t) + sum_b Zb[b] mem_b with mem_b = zeta(t-b).
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(ctrl.phiX().tap(1));
  const Eigen::MatrixXd Zx = lu.solve(Eigen::MatrixXd::Identity(n, n));
  std::vector<Eigen::MatrixXd> Zb;
  for (int b = 1; b <= L - 1; ++b) {
    Zb.push_back(-lu.solve(ctrl.phiX().tap(b + 1)));
  }

  // u(t) = Ux x(t) + sum_b Ub[b] mem_b.
  const Eigen::MatrixXd Ux = ctrl.phiU().tap(1) * Zx;
  std::vector<Eigen::MatrixXd> Ub;
  for (int b = 1; b <= L - 1; ++b) {
    Ub.push_back(ctrl.phiU().tap(1) * Zb[b - 1] + ctrl.phiU().tap(b + 1));
  }

  const int dim = n * L;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(dim, dim);
  T.topLeftCorner(n, n) = plant.A + plant.B * Ux;
  for (int b = 1; b <= L - 1; ++b) {
    T.block(0, n * b, n, n) = plant.B * Ub[b - 1];
  }
  if (L > 1) {
    T.block(n, 0, n, n) = Zx;  // mem'_1 = zeta(t)
    for (int b = 1; b <= L - 1; ++b) {
      T.block(n, n * b, n, n) = Zb[b - 1];
    }
    for (int k = 2; k <= L - 1; ++k) {  // mem'_k = mem_{k-1}
      T.block(n * k, n * (k - 1), n, n) = Eigen::MatrixXd::Identity(n, n);
    }
  }
  return T;
}

Eigen::MatrixXd closed_loop_matrix(const PlantModel& plant,
                                   const Eigen::MatrixXd& K) {
  if (K.rows() != plant.m() || K.cols() != plant.n()) {
    throw std::invalid_argument("closed_loop_matrix: gain dimension mismatch");
  }
  return plant.A + plant.B * K;
}

namespace {

// Input map u = [Ux, Ub...] over the augmented state of closed_loop_matrix.
Eigen::MatrixXd inputMap(const SlsController& ctrl) {
  const int n = ctrl.n();
  const int m = ctrl.m();
  const int L = ctrl.L();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(ctrl.phiX().tap(1));
  const Eigen::MatrixXd Zx = lu.solve(Eigen::MatrixXd::Identity(n, n));
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(m, n * L);
  U.leftCols(n) = ctrl.phiU().tap(1) * Zx;
  for (int b = 1; b <= L - 1; ++b) {
    const Eigen::MatrixXd Zb = -lu.solve(ctrl.phiX().tap(b + 1));
    U.middleCols(n * b, n) = ctrl.phiU().tap(1) * Zb + ctrl.phiU().tap(b + 1);
  }
  return U;
}

}  // namespace

double lqr_cost(const PlantModel& plant, const SlsController& ctrl,
                double sigmaW) {
  const int n = plant.n();
  const Eigen::MatrixXd T = closed_loop_matrix(plant, ctrl);
  if (spectral_radius(T) >= 1.0) {
    throw std::runtime_error("lqr_cost: closed loop unstable");
  }
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(T.rows(), T.cols());
  W.topLeftCorner(n, n) = sigmaW * sigmaW * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd P = dlyap(T, W);
  const Eigen::MatrixXd U = inputMap(ctrl);
  const double j2 = (plant.Q * P.topLeftCorner(n, n)).trace() +
                    (plant.R * U * P * U.transpose()).trace();
  return std::sqrt(std::max(j2, 0.0));
}

double lqr_cost(const PlantModel& plant, const Eigen::MatrixXd& K,
                double sigmaW) {
  const Eigen::MatrixXd F = closed_loop_matrix(plant, K);
  if (spectral_radius(F) >= 1.0) {
    throw std::runtime_error("lqr_cost: closed loop unstable");
  }
  const int n = plant.n();
  const Eigen::MatrixXd P =
      dlyap(F, sigmaW * sigmaW * Eigen::MatrixXd::Identity(n, n));
  const double j2 =
      (plant.Q * P).trace() + (plant.R * K * P * K.transpose()).trace();
  return std::sqrt(std::max(j2, 0.0));
}

double lqr_cost_monte_carlo(const PlantModel& plant, const SlsController& ctrl,
                            double sigmaW, long steps, uint64_t seed) {
  const Eigen::MatrixXd T = closed_loop_matrix(plant, ctrl);
  const double rho = spectral_radius(T);
  if (rho >= 1.0) {
    throw std::runtime_error("lqr_cost_monte_carlo: closed loop unstable");
  }
  const long burnIn =
      20 * static_cast<long>(std::ceil(1.0 / std::max(1e-3, 1.0 - rho)));

  SlsController c = ctrl;
  c.reset();
  CounterRng rng(seed, 3);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(plant.n());
  double acc = 0.0;
  for (long t = 0; t < burnIn + steps; ++t) {
    const Eigen::VectorXd u = c.step(x);
    if (t >= burnIn) {
      acc += x.dot(plant.Q * x) + u.dot(plant.R * u);
    }
    x = plant.A * x + plant.B * u + rng.normalVector(plant.n(), sigmaW);
  }
  return std::sqrt(acc / static_cast<double>(steps));
}

ClosedLoopReport closed_loop_report(const PlantModel& plant,
                                    const SlsController& ctrl, double sigmaW) {
  ClosedLoopReport rep;
  const Eigen::MatrixXd T = closed_loop_matrix(plant, ctrl);
  rep.spectralRadius = spectral_radius(T);
  rep.stable = rep.spectralRadius < 1.0 - 1e-9;
  if (rep.stable) {
    rep.cost = lqr_cost(plant, ctrl, sigmaW);
  }
  return rep;
}

RobustCertificate robust_certificate(const SynthesisSolution& solution,
                                     double epsUsed) {
  if (solution.status != SynthesisStatus::Feasible) {
    throw std::invalid_argument("robust_certificate: solution not feasible");
  }
  RobustCertificate cert;
  cert.bound = std::sqrt(static_cast<double>(solution.kPhi)) * epsUsed *
                   solution.maxResponseColumnSum +
               std::sqrt(static_cast<double>(solution.kV)) *
                   solution.maxVColumnSum;
  cert.certified = cert.bound < 1.0;
  return cert;
}

SubOptimalityBound theorem3_bound(double epsBar, int L, int k, double cStar,
                                  double rhoStar, double alpha, double aInf,
                                  double bInf) {
  if (!(rhoStar > 0.0 && rhoStar < 1.0)) {
    throw std::invalid_argument("theorem3_bound: rhoStar must be in (0,1)");
  }
  if (cStar < 1.0) {
    throw std::invalid_argument("theorem3_bound: cStar must be >= 1");
  }
  const double minAlpha = std::min(alpha, 1.0 - alpha);
  const double k2 = static_cast<double>(k) * k;

  SubOptimalityBound out;
  out.uncertaintyErr =
      16.0 / minAlpha * (cStar * rhoStar / (1.0 - rhoStar)) * k2 * epsBar;
  out.truncationErr = 2.0 * std::sqrt(2.0) / (1.0 - alpha) * (aInf + bInf) *
                      cStar * k2 * std::pow(rhoStar, L);

  const double epsGate =
      (1.0 - rhoStar) * minAlpha / (32.0 * cStar * rhoStar) / k2;
  const double lGate =
      (2.0 * std::log(static_cast<double>(k)) +
       std::log(4.0 * std::sqrt(2.0) * (aInf + bInf) / (1.0 - alpha))) /
      (1.0 - rhoStar);
  out.preconditionsHold = epsBar < epsGate && static_cast<double>(L) > lGate;
  return out;
}

DecayEnvelope estimate_decay(const FirResponse& phiX, const FirResponse& phiU) {
  if (phiX.startLag() != 1 || phiU.startLag() != 1 ||
      phiX.length() != phiU.length()) {
    throw std::invalid_argument("estimate_decay: malformed responses");
  }
  const int L = phiX.length();
  std::vector<std::pair<int, double>> points;
  for (int t = 1; t <= L; ++t) {
    const double mt = std::max(phiX.tap(t).cwiseAbs().maxCoeff(),
                               phiU.tap(t).cwiseAbs().maxCoeff());
    if (mt > 0.0) points.emplace_back(t, mt);
  }

  DecayEnvelope env;
  if (points.empty()) return env;

  auto envelopeC = [&](double rho) {
    double c = 1.0;
    for (const auto& [t, mt] : points) c = std::max(c, mt / std::pow(rho, t));
    return c;
  };
  auto logLoss = [&](double rho) {
    const double c = envelopeC(rho);
    double loss = 0.0;
    for (const auto& [t, mt] : points) {
      const double d = std::log(c) + t * std::log(rho) - std::log(mt);
      loss += d * d;
    }
    return loss;
  };

  if (points.size() == 1) {
    env.rhoStar = 0.5;
    env.cStar = envelopeC(env.rhoStar);
    return env;
  }

  // Least-squares rate of log m(t) = log C + t log rho.
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (const auto& [t, mt] : points) {
    st += t;
    sy += std::log(mt);
    stt += static_cast<double>(t) * t;
    sty += t * std::log(mt);
  }
  const double np = static_cast<double>(points.size());
  const double slope = (np * sty - st * sy) / (np * stt - st * st);
  double rho0 = std::exp(slope);

  constexpr double kRhoCap = 1.0 - 1e-6;
  if (rho0 >= kRhoCap) {
    env.clipped = true;
    env.rhoStar = kRhoCap;
    env.cStar = envelopeC(env.rhoStar);
    return env;
  }
  rho0 = std::max(rho0, 1e-4);

  // Local refinement of the envelope around the fitted rate.
  double bestRho = rho0;
  double bestLoss = logLoss(rho0);
  const double lo = std::max(1e-4, 0.8 * rho0);
  const double hi = std::min(kRhoCap, 1.25 * rho0);
  const int grid = 2000;
  for (int i = 0; i <= grid; ++i) {
    const double rho = lo + (hi - lo) * i / grid;
    const double loss = logLoss(rho);
    if (loss < bestLoss - 1e-15 ||
        (std::abs(loss - bestLoss) <= 1e-15 && rho < bestRho)) {
      bestLoss = loss;
      bestRho = rho;
    }
  }
  env.rhoStar = bestRho;
  env.cStar = envelopeC(bestRho);
  return env;
}

}  // namespace sls
