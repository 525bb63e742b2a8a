#include "sls/plant.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sls/rng.hpp"

namespace sls {

namespace {

SparsityPattern supportOf(const Eigen::MatrixXd& M, double tol) {
  std::vector<SparsityPattern::Entry> entries;
  for (int c = 0; c < M.cols(); ++c)
    for (int r = 0; r < M.rows(); ++r)
      if (std::abs(M(r, c)) > tol) entries.emplace_back(r, c);
  return SparsityPattern(static_cast<int>(M.rows()),
                         static_cast<int>(M.cols()), std::move(entries));
}

void requirePd(const Eigen::MatrixXd& M, const char* name) {
  if (M.rows() != M.cols()) throw std::invalid_argument(std::string(name) + " not square");
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument(std::string(name) + " not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument(std::string(name) + " not positive definite");
  }
}

// Factor of a PSD covariance for sampling, eigenvalues clipped at zero.
Eigen::MatrixXd covarianceFactor(const Eigen::MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  return es.eigenvectors() *
         es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

}  // namespace

SparsityPattern PlantModel::suppA(double tol) const { return supportOf(A, tol); }
SparsityPattern PlantModel::suppB(double tol) const { return supportOf(B, tol); }

void PlantModel::validate() const {
  if (A.rows() != A.cols()) throw std::invalid_argument("PlantModel: A not square");
  if (B.rows() != A.rows()) throw std::invalid_argument("PlantModel: B row mismatch");
  requirePd(Q, "PlantModel: Q");
  requirePd(R, "PlantModel: R");
  if (Q.rows() != n() || R.rows() != m()) {
    throw std::invalid_argument("PlantModel: weight dimensions inconsistent");
  }
  if (K0.size() > 0 && (K0.rows() != m() || K0.cols() != n())) {
    throw std::invalid_argument("PlantModel: K0 dimensions inconsistent");
  }
}

PlantModel make_chain(int n, const Eigen::VectorXd& a, const Eigen::VectorXd& D,
                      const std::vector<bool>& actuated, double scale) {
  if (n < 2) throw std::invalid_argument("make_chain: n must be >= 2");
  if (a.size() != n || D.size() != n || static_cast<int>(actuated.size()) != n) {
    throw std::invalid_argument("make_chain: parameter length mismatch");
  }
  int m = 0;
  for (bool b : actuated) m += b ? 1 : 0;
  if (m == 0) throw std::invalid_argument("make_chain: no actuated node");

  PlantModel plant;
  plant.A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const bool interior = i > 0 && i < n - 1;
    plant.A(i, i) = D(i) + 1.0 - (interior ? 2.0 : 1.0) * a(i);
    if (i > 0) plant.A(i, i - 1) = a(i);
    if (i < n - 1) plant.A(i, i + 1) = a(i);
  }
  plant.A *= scale;

  plant.B = Eigen::MatrixXd::Zero(n, m);
  int col = 0;
  for (int i = 0; i < n; ++i) {
    if (actuated[i]) plant.B(i, col++) = 1.0;
  }
  plant.Q = Eigen::MatrixXd::Identity(n, n);
  plant.R = Eigen::MatrixXd::Identity(m, m);
  plant.K0 = Eigen::MatrixXd::Zero(m, n);
  return plant;
}

PlantModel make_chain(int n, double a, double D, double scale) {
  return make_chain(n, Eigen::VectorXd::Constant(n, a),
                    Eigen::VectorXd::Constant(n, D),
                    std::vector<bool>(n, true), scale);
}

Trajectory simulate(const PlantModel& model, int T, uint64_t seed,
                    bool initFromStationary) {
  model.validate();
  const int n = model.n();
  const int m = model.m();
  const Eigen::MatrixXd K0 =
      model.K0.size() > 0 ? model.K0 : Eigen::MatrixXd::Zero(m, n);

  Trajectory traj;
  traj.seed = seed;
  traj.states.reserve(T + 1);
  traj.inputs.reserve(T);

  CounterRng rng(seed, /*stream=*/1);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  if (initFromStationary) {
    const Eigen::MatrixXd P = stationary_state_cov(model);  // throws if unstable
    x = covarianceFactor(P) * rng.normalVector(n);
  }
  traj.states.push_back(x);
  for (int t = 0; t < T; ++t) {
    const Eigen::VectorXd v = rng.normalVector(m, model.sigmaV);
    const Eigen::VectorXd u = K0 * x + v;
    const Eigen::VectorXd w = rng.normalVector(n, model.sigmaW);
    x = model.A * x + model.B * u + w;
    traj.inputs.push_back(u);
    traj.states.push_back(x);
  }
  return traj;
}

double spectral_radius(const Eigen::MatrixXd& F) {
  if (F.rows() != F.cols()) {
    throw std::invalid_argument("spectral_radius: matrix not square");
  }
  if (F.rows() == 0) return 0.0;
  if (F.rows() <= 512) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(F, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  // Power iteration estimate for very large matrices.
  CounterRng rng(0x5157u, 7);
  Eigen::VectorXd v = rng.normalVector(static_cast<int>(F.rows()));
  v.normalize();
  double lambda = 0.0;
  for (int i = 0; i < 2000; ++i) {
    Eigen::VectorXd fv = F * v;
    const double norm = fv.norm();
    if (norm == 0.0) return 0.0;
    fv /= norm;
    const double next = std::abs(v.dot(F * v));
    if (i > 10 && std::abs(next - lambda) <= 1e-12 * std::max(1.0, next)) {
      return next;
    }
    lambda = next;
    v = fv;
  }
  return lambda;
}

double spectral_norm(const Eigen::MatrixXd& F) {
  if (F.size() == 0) return 0.0;
  const Eigen::MatrixXd G = F.transpose() * F;
  CounterRng rng(0x5157u, 11);
  Eigen::VectorXd v = rng.normalVector(static_cast<int>(G.rows()));
  const double fallback = std::sqrt(G.cwiseAbs().maxCoeff());
  if (v.norm() == 0.0) return fallback;
  v.normalize();
  double lambda = 0.0;
  for (int i = 0; i < 5000; ++i) {
    Eigen::VectorXd gv = G * v;
    const double next = v.dot(gv);
    const double norm = gv.norm();
    if (norm == 0.0) return 0.0;
    v = gv / norm;
    if (i > 3 && std::abs(next - lambda) <= 1e-10 * std::max(next, 1e-300)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

Eigen::MatrixXd dlyap(const Eigen::MatrixXd& F, const Eigen::MatrixXd& W) {
  if (F.rows() != F.cols() || W.rows() != W.cols() || F.rows() != W.rows()) {
    throw std::invalid_argument("dlyap: dimension mismatch");
  }
  const double rho = spectral_radius(F);
  if (rho >= 1.0) {
    throw std::invalid_argument("dlyap: spectral radius must be < 1");
  }
  // Doubling iteration: P_{k+1} = P_k + F_k P_k F_k', F_{k+1} = F_k^2.
  Eigen::MatrixXd P = W;
  Eigen::MatrixXd Fk = F;
  const double wScale = 1.0 + W.norm();
  for (int i = 0; i < 128; ++i) {
    const Eigen::MatrixXd incr = Fk * P * Fk.transpose();
    P += incr;
    if (incr.norm() <= 1e-16 * wScale) break;
    Fk = Fk * Fk;
  }
  return 0.5 * (P + P.transpose());
}

Eigen::MatrixXd stationary_state_cov(const PlantModel& model) {
  const Eigen::MatrixXd K0 = model.K0.size() > 0
                                 ? model.K0
                                 : Eigen::MatrixXd::Zero(model.m(), model.n());
  const Eigen::MatrixXd F = model.A + model.B * K0;
  if (spectral_radius(F) >= 1.0) {
    throw std::invalid_argument("stationary covariance: closed loop unstable");
  }
  const Eigen::MatrixXd W =
      model.sigmaW * model.sigmaW *
          Eigen::MatrixXd::Identity(model.n(), model.n()) +
      model.sigmaV * model.sigmaV * model.B * model.B.transpose();
  return dlyap(F, W);
}

Eigen::MatrixXd stationary_cov(const PlantModel& model) {
  const int n = model.n();
  const int m = model.m();
  const Eigen::MatrixXd K0 =
      model.K0.size() > 0 ? model.K0 : Eigen::MatrixXd::Zero(m, n);
  const Eigen::MatrixXd P = stationary_state_cov(model);
  Eigen::MatrixXd M(n + m, n + m);
  M.topLeftCorner(n, n) = P;
  M.topRightCorner(n, m) = P * K0.transpose();
  M.bottomLeftCorner(m, n) = K0 * P;
  M.bottomRightCorner(m, m) =
      K0 * P * K0.transpose() +
      model.sigmaV * model.sigmaV * Eigen::MatrixXd::Identity(m, m);
  return M;
}

DareResult dare_gain(const PlantModel& model, double tol, int maxIter) {
  model.validate();
  const Eigen::MatrixXd& A = model.A;
  const Eigen::MatrixXd& B = model.B;
  DareResult res;
  Eigen::MatrixXd P = model.Q;
  for (int iter = 0; iter < maxIter; ++iter) {
    const Eigen::MatrixXd BtP = B.transpose() * P;
    const Eigen::MatrixXd G = model.R + BtP * B;
    const Eigen::MatrixXd Knext =
        -Eigen::LLT<Eigen::MatrixXd>(G).solve(BtP * A);
    const Eigen::MatrixXd Pnext =
        model.Q + A.transpose() * P * A +
        A.transpose() * BtP.transpose() * Knext;
    const double change = (Pnext - P).cwiseAbs().maxCoeff();
    P = 0.5 * (Pnext + Pnext.transpose());
    res.iterations = iter + 1;
    if (change <= tol * (1.0 + P.cwiseAbs().maxCoeff())) {
      res.P = P;
      const Eigen::MatrixXd G2 = model.R + B.transpose() * P * B;
      res.K = -Eigen::LLT<Eigen::MatrixXd>(G2).solve(B.transpose() * P * A);
      const Eigen::MatrixXd resid =
          A.transpose() * P * A - P -
          (A.transpose() * P * B) *
              Eigen::LLT<Eigen::MatrixXd>(G2).solve(B.transpose() * P * A) +
          model.Q;
      res.residual = resid.cwiseAbs().maxCoeff();
      if (spectral_radius(A + B * res.K) >= 1.0) {
        throw std::runtime_error("dare_gain: converged gain is not stabilizing");
      }
      return res;
    }
  }
  throw std::runtime_error("dare_gain: fixed-point iteration did not converge");
}

Assumption1Report assumption1_diagnostics(const Eigen::MatrixXd& Mstar,
                                          const Eigen::MatrixXd& truePsi,
                                          const SparsityPattern& supports) {
  const int p = static_cast<int>(Mstar.rows());
  if (Mstar.cols() != p) {
    throw std::invalid_argument("assumption1_diagnostics: M* not square");
  }
  if (truePsi.rows() != p || supports.rows() != p ||
      supports.cols() != truePsi.cols()) {
    throw std::invalid_argument("assumption1_diagnostics: shape mismatch");
  }

  Assumption1Report rep;
  double worstIncoherence = 0.0;
  double cMin = std::numeric_limits<double>::infinity();
  double dMax = 0.0;
  double psiMin = std::numeric_limits<double>::infinity();

  for (int j = 0; j < truePsi.cols(); ++j) {
    const std::vector<int> Aj = supports.columnSupport(j);
    if (Aj.empty()) continue;
    const int s = static_cast<int>(Aj.size());

    Eigen::MatrixXd Maa(s, s);
    for (int a = 0; a < s; ++a)
      for (int b = 0; b < s; ++b) Maa(a, b) = Mstar(Aj[a], Aj[b]);

    for (int i : Aj) psiMin = std::min(psiMin, std::abs(truePsi(i, j)));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Maa);
    const double lmin = es.eigenvalues().minCoeff();
    cMin = std::min(cMin, std::max(lmin, 0.0));
    if (lmin <= 1e-12) {
      rep.singularBlock = true;
      continue;
    }
    const Eigen::MatrixXd Minv = Maa.inverse();
    dMax = std::max(dMax, Minv.cwiseAbs().maxCoeff());

    for (int i = 0; i < p; ++i) {
      if (std::binary_search(Aj.begin(), Aj.end(), i)) continue;
      Eigen::RowVectorXd mia(s);
      for (int a = 0; a < s; ++a) mia(a) = Mstar(i, Aj[a]);
      worstIncoherence =
          std::max(worstIncoherence, (mia * Minv).cwiseAbs().sum());
    }
  }

  rep.incoherenceMargin = 1.0 - worstIncoherence;
  if (!std::isfinite(cMin)) cMin = 0.0;
  rep.cMin = rep.singularBlock ? 0.0 : cMin;
  rep.dMax = dMax;
  rep.psiMin = std::isfinite(psiMin) ? psiMin : 0.0;
  return rep;
}

}  // namespace sls
