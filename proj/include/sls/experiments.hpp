#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sls/plant.hpp"
#include "sls/rng.hpp"
#include "sls/synthesis.hpp"

namespace sls {

// n=8 marginally unstable chain used by the stability study: a_i = 1/3,
// D_i = 0.05 in the interior and 0.05 - 1/3 at the endpoints, with the given
// nodes actuated.
PlantModel make_stability_chain(const std::vector<bool>& actuated);

// Stable chain used by the larger studies: a = 0.2, D = 0, every node
// actuated, A scaled by 0.99.
PlantModel make_stable_chain(int n);

// Elementwise multiplicative perturbation: each entry drawn uniformly from
// [x - p|x|, x + p|x|].
Eigen::MatrixXd perturb_elementwise(const Eigen::MatrixXd& M, double p,
                                    CounterRng& rng);

struct StabilityStudyConfig {
  int n = 8;
  std::vector<int> mList = {5, 6, 7, 8};
  int instances = 100;
  double perturbation = 0.1;
  int L = 10;
  int d = 3;
  int c = 2;
  double alpha = -1.0;  // default_alpha(L)
  double eta1 = 1e-3;
  double eta2 = 1e-6;
  uint64_t seed = 1;
  int workers = 0;
};

struct StabilityStudyRow {
  int m = 0;
  double robustRatio = 0.0;
  double nominalDistRatio = 0.0;
  double centralizedRatio = 0.0;
  int robustInfeasible = 0;
  int nominalInfeasible = 0;
  int errors = 0;
};

// For each m: 100 perturbed instances, three designs (robust with the true
// estimation error, nominal distributed, centralized Riccati on the
// estimates), stability judged by the spectral radius on the true plant.
// Infeasibility counts as failure; per-instance errors are tallied, never
// fatal.
std::vector<StabilityStudyRow> run_stability_study(
    const StabilityStudyConfig& cfg);

struct EndToEndConfig {
  int n = 40;
  std::vector<int> Ts = {150, 300, 600};
  std::vector<int> Ls = {4, 8, 12};
  int seeds = 10;
  double cLambda = -1.0;  // < 0 picks by cross-validation on a suffix
  double delta = 0.05;
  int bootstrapRounds = 500;
  int d = 3;
  int c = 2;
  double alpha = -1.0;
  double eta1 = 1e-3;
  double eta2 = 1e-6;
  int oracleL = 100;
  std::string cacheDir;  // empty disables the oracle cache
  uint64_t seed = 1;
  int workers = 0;
  bool runBootstrap = true;  // false: epsBar = true error (oracle source)
};

struct EndToEndRow {
  int T = 0;
  int L = 0;
  int seedIndex = 0;
  double lambda = 0.0;
  double epsTrue = 0.0;
  double epsBootstrap = 0.0;
  bool supportExact = false;
  bool feasible = false;
  double cost = 0.0;        // J of the learned controller on the true plant
  double oracleCost = 0.0;  // J of the eps=0 design at oracleL on (A*, B*)
  double costRatio = 0.0;   // cost / oracleCost
};

struct EndToEndResult {
  std::vector<EndToEndRow> rows;
  double oracleCost = 0.0;
};

EndToEndResult run_end_to_end(const EndToEndConfig& cfg);

// Cross-validated lambda scale: candidate cLambda values are scored by
// one-step prediction error on the held-out last fifth of the trajectory.
double auto_c_lambda(const Trajectory& traj, double delta);

struct RuntimeScalingConfig {
  std::vector<int> nList = {20, 40, 80, 150};
  int d = 3;
  int c = 2;
  int L = 8;
  double epsBar = 0.005;
  double alpha = -1.0;
  double eta1 = 1e-3;
  double eta2 = 1e-6;
  uint64_t seed = 1;
};

struct RuntimeScalingRow {
  int n = 0;
  double seconds = 0.0;
  bool feasible = false;
};

struct RuntimeScalingResult {
  std::vector<RuntimeScalingRow> rows;
  // Log-log least-squares slope of time vs n; absent with fewer than two
  // usable points.
  std::optional<double> slope;
};

// Serial synthesis wall time per dimension with fixed (d, c, L).
RuntimeScalingResult run_runtime_scaling(const RuntimeScalingConfig& cfg);

// Oracle reference: the eps = 0 program on the true plant at FIR length
// oracleL, evaluated on the same plant.  Cached on disk keyed by the config
// hash when cacheDir is set.
double oracle_cost(const PlantModel& plant, int d, int c, int oracleL,
                   double alpha, const std::string& cacheDir);

}  // namespace sls
