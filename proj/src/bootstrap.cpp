#include "sls/bootstrap.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sls/plant.hpp"
#include "sls/rng.hpp"
#include "sls/sysid.hpp"
#include "sls/threading.hpp"

namespace sls {

double percentile_nearest_rank(std::vector<double> samples, double q) {
  if (samples.empty()) {
    throw std::invalid_argument("percentile_nearest_rank: empty sample set");
  }
  std::sort(samples.begin(), samples.end());
  const int N = static_cast<int>(samples.size());
  // Epsilon guard so that exactly-integral q*N does not round up.
  int rank = static_cast<int>(std::ceil(q * N - 1e-9));
  rank = std::clamp(rank, 1, N);
  return samples[rank - 1];
}

BootstrapResult bootstrap_eps(const Eigen::MatrixXd& Ahat,
                              const Eigen::MatrixXd& Bhat,
                              const Eigen::MatrixXd& K0,
                              const Eigen::MatrixXd& M,
                              const BootstrapConfig& cfg) {
  const int n = static_cast<int>(Ahat.rows());
  const int m = static_cast<int>(Bhat.cols());
  if (Ahat.cols() != n || Bhat.rows() != n || K0.rows() != m || K0.cols() != n) {
    throw std::invalid_argument("bootstrap_eps: dimension mismatch");
  }
  if (cfg.rounds < 1) throw std::invalid_argument("bootstrap_eps: N >= 1 required");
  if (cfg.delta <= 0.0 || cfg.delta >= 1.0) {
    throw std::invalid_argument("bootstrap_eps: delta must be in (0,1)");
  }
  const Eigen::MatrixXd closed = Ahat + Bhat * K0;
  if (spectral_radius(closed) >= 1.0) {
    throw std::invalid_argument("bootstrap_eps: Ahat + Bhat K0 must be stable");
  }
  if (M.rows() != n || M.cols() != n) {
    throw std::invalid_argument("bootstrap_eps: M must be n x n");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  const Eigen::MatrixXd mFactor =
      es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  std::vector<double> errors(cfg.rounds, 0.0);
  std::vector<uint8_t> ok(cfg.rounds, 0);

  parallel_for(
      cfg.rounds,
      [&](int i) {
        CounterRng rng = CounterRng(cfg.seed, 2).derive(static_cast<uint64_t>(i));
        Trajectory traj;
        traj.seed = cfg.seed;
        Eigen::VectorXd x = cfg.probe ? Eigen::VectorXd::Zero(n).eval()
                                      : (mFactor * rng.normalVector(n)).eval();
        traj.states.push_back(x);
        for (int t = 0; t < cfg.T; ++t) {
          const Eigen::VectorXd v =
              cfg.probe ? cfg.probe(t) : rng.normalVector(m, cfg.etaV).eval();
          const Eigen::VectorXd u = K0 * x + v;
          const Eigen::VectorXd w = cfg.probe
                                        ? Eigen::VectorXd::Zero(n).eval()
                                        : rng.normalVector(n, cfg.etaW).eval();
          x = Ahat * x + Bhat * u + w;
          traj.inputs.push_back(u);
          traj.states.push_back(x);
        }
        const LassoEstimate est =
            lasso_fit(traj, cfg.lambda, cfg.lassoTol, cfg.lassoMaxIter);
        if (!est.allConverged()) return;  // round flagged and excluded
        errors[i] = std::max(spectral_norm(est.Ahat - Ahat),
                             spectral_norm(est.Bhat - Bhat));
        ok[i] = 1;
      },
      cfg.workers);

  BootstrapResult res;
  res.delta = cfg.delta;
  res.rounds = cfg.rounds;
  res.seed = cfg.seed;
  for (int i = 0; i < cfg.rounds; ++i) {
    if (ok[i]) {
      res.samples.push_back(errors[i]);
    } else {
      ++res.excludedRounds;
    }
  }
  if (res.samples.empty()) {
    throw std::runtime_error("bootstrap_eps: every round failed to converge");
  }
  res.exclusionWarning =
      res.excludedRounds > 0.05 * static_cast<double>(cfg.rounds);
  std::sort(res.samples.begin(), res.samples.end());
  res.epsBar = percentile_nearest_rank(res.samples, 1.0 - cfg.delta);
  return res;
}

}  // namespace sls
