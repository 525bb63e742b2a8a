#include "sls/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>

#include "sls/bootstrap.hpp"
#include "sls/evaluate.hpp"
#include "sls/serialize.hpp"
#include "sls/sysid.hpp"
#include "sls/threading.hpp"

namespace sls {

PlantModel make_stability_chain(const std::vector<bool>& actuated) {
  const int n = static_cast<int>(actuated.size());
  Eigen::VectorXd a = Eigen::VectorXd::Constant(n, 1.0 / 3.0);
  Eigen::VectorXd D = Eigen::VectorXd::Constant(n, 0.05);
  D(0) = 0.05 - 1.0 / 3.0;
  D(n - 1) = 0.05 - 1.0 / 3.0;
  return make_chain(n, a, D, actuated, 1.0);
}

PlantModel make_stable_chain(int n) {
  PlantModel p = make_chain(n, 0.2, 0.0, 0.99);
  p.sigmaW = 1.0;
  p.sigmaV = std::sqrt(0.1);
  return p;
}

Eigen::MatrixXd perturb_elementwise(const Eigen::MatrixXd& M, double p,
                                    CounterRng& rng) {
  Eigen::MatrixXd out = M;
  for (int r = 0; r < M.rows(); ++r) {
    for (int c = 0; c < M.cols(); ++c) {
      const double mag = p * std::abs(M(r, c));
      out(r, c) += rng.nextUniform(-mag, mag);
    }
  }
  return out;
}

std::vector<StabilityStudyRow> run_stability_study(
    const StabilityStudyConfig& cfg) {
  std::vector<StabilityStudyRow> table;
  for (std::size_t mi = 0; mi < cfg.mList.size(); ++mi) {
    const int m = cfg.mList[mi];
    StabilityStudyRow row;
    row.m = m;
    std::vector<int> robustOk(cfg.instances, 0), nomOk(cfg.instances, 0),
        centOk(cfg.instances, 0), robustInf(cfg.instances, 0),
        nomInf(cfg.instances, 0), errs(cfg.instances, 0);

    parallel_for(
        cfg.instances,
        [&](int inst) {
          CounterRng rng =
              CounterRng(cfg.seed, 10).derive(mi * 1000003ull + inst);
          // Random actuated subset of size m (partial Fisher-Yates).
          std::vector<int> order(cfg.n);
          for (int i = 0; i < cfg.n; ++i) order[i] = i;
          for (int i = 0; i < m; ++i) {
            const int k = i + rng.nextInt(cfg.n - i);
            std::swap(order[i], order[k]);
          }
          std::vector<bool> actuated(cfg.n, false);
          for (int i = 0; i < m; ++i) actuated[order[i]] = true;

          const PlantModel truth = make_stability_chain(actuated);
          const Eigen::MatrixXd Ahat =
              perturb_elementwise(truth.A, cfg.perturbation, rng);
          const Eigen::MatrixXd Bhat =
              perturb_elementwise(truth.B, cfg.perturbation, rng);
          const double eps = std::max(spectral_norm(Ahat - truth.A),
                                      spectral_norm(Bhat - truth.B));

          try {
            SynthesisProblem prob = make_synthesis_problem(
                Ahat, Bhat, truth.Q, truth.R, eps, cfg.L, cfg.d, cfg.c,
                cfg.alpha);
            prob.eta1 = cfg.eta1;
            prob.eta2 = cfg.eta2;
            prob.workers = 1;  // instances already run in parallel

            const SynthesisSolution robust = golden_section_synthesize(prob);
            if (robust.status == SynthesisStatus::Feasible) {
              const Eigen::MatrixXd T =
                  closed_loop_matrix(truth, realize(robust));
              if (spectral_radius(T) < 1.0) robustOk[inst] = 1;
            } else {
              robustInf[inst] = 1;
            }

            const SynthesisSolution nominal =
                nominal_distributed_synthesize(prob);
            if (nominal.status == SynthesisStatus::Feasible) {
              const Eigen::MatrixXd T =
                  closed_loop_matrix(truth, realize(nominal));
              if (spectral_radius(T) < 1.0) nomOk[inst] = 1;
            } else {
              nomInf[inst] = 1;
            }
          } catch (const std::exception&) {
            errs[inst]++;
          }

          try {
            PlantModel est = truth;
            est.A = Ahat;
            est.B = Bhat;
            const DareResult dare = dare_gain(est);
            if (spectral_radius(truth.A + truth.B * dare.K) < 1.0) {
              centOk[inst] = 1;
            }
          } catch (const std::exception&) {
            // divergence or non-stabilizing gain counts as failure
          }
        },
        cfg.workers);

    for (int i = 0; i < cfg.instances; ++i) {
      row.robustRatio += robustOk[i];
      row.nominalDistRatio += nomOk[i];
      row.centralizedRatio += centOk[i];
      row.robustInfeasible += robustInf[i];
      row.nominalInfeasible += nomInf[i];
      row.errors += errs[i];
    }
    row.robustRatio /= cfg.instances;
    row.nominalDistRatio /= cfg.instances;
    row.centralizedRatio /= cfg.instances;
    table.push_back(row);
  }
  return table;
}

double auto_c_lambda(const Trajectory& traj, double delta) {
  const int T = traj.T();
  const int holdout = std::max(2, T / 5);
  const int trainT = T - holdout;
  if (trainT < 3) return 0.1;

  Trajectory train;
  train.seed = traj.seed;
  train.states.assign(traj.states.begin(), traj.states.begin() + trainT + 1);
  train.inputs.assign(traj.inputs.begin(), traj.inputs.begin() + trainT);

  const double candidates[5] = {0.02, 0.05, 0.1, 0.2, 0.5};
  double bestC = candidates[0];
  double bestErr = std::numeric_limits<double>::infinity();
  for (double c : candidates) {
    const double lambda =
        choose_lambda(trainT, traj.n(), traj.m(), delta, c);
    const LassoEstimate est = lasso_fit(train, lambda);
    double err = 0.0;
    for (int t = trainT; t < T; ++t) {
      err += (traj.states[t + 1] - est.Ahat * traj.states[t] -
              est.Bhat * traj.inputs[t])
                 .squaredNorm();
    }
    if (err < bestErr) {
      bestErr = err;
      bestC = c;
    }
  }
  return bestC;
}

double oracle_cost(const PlantModel& plant, int d, int c, int oracleL,
                   double alpha, const std::string& cacheDir) {
  Json key{{"A", to_json(plant.A)}, {"B", to_json(plant.B)},
           {"Q", to_json(plant.Q)}, {"R", to_json(plant.R)},
           {"d", d},                {"c", c},
           {"L", oracleL},          {"alpha", alpha}};
  const uint64_t hash = config_hash(key);
  std::string cacheFile;
  if (!cacheDir.empty()) {
    std::filesystem::create_directories(cacheDir);
    char name[64];
    std::snprintf(name, sizeof(name), "oracle_%016llx.json",
                  static_cast<unsigned long long>(hash));
    cacheFile = cacheDir + "/" + name;
    if (std::filesystem::exists(cacheFile)) {
      return load_json(cacheFile).at("cost").get<double>();
    }
  }

  SynthesisProblem prob = make_synthesis_problem(
      plant.A, plant.B, plant.Q, plant.R, /*epsBar=*/0.0, oracleL, d, c, alpha);
  const SynthesisSolution sol = golden_section_synthesize(prob);
  if (sol.status != SynthesisStatus::Feasible) {
    throw std::runtime_error("oracle_cost: oracle program infeasible");
  }
  const double cost = lqr_cost(plant, realize(sol), plant.sigmaW);
  if (!cacheFile.empty()) {
    save_json(cacheFile, Json{{"cost", cost}, {"hash", hash}});
  }
  return cost;
}

EndToEndResult run_end_to_end(const EndToEndConfig& cfg) {
  const PlantModel truth = make_stable_chain(cfg.n);
  EndToEndResult result;

  struct Task {
    int T, L, seedIndex;
  };
  std::vector<Task> tasks;
  for (int T : cfg.Ts)
    for (int L : cfg.Ls)
      for (int s = 0; s < cfg.seeds; ++s) tasks.push_back({T, L, s});
  result.rows.resize(tasks.size());

  // Oracle references per L... the oracle uses a long FIR, shared across rows.
  const double oracleJ =
      oracle_cost(truth, cfg.d, cfg.c, cfg.oracleL, cfg.alpha, cfg.cacheDir);
  result.oracleCost = oracleJ;

  parallel_for(
      static_cast<int>(tasks.size()),
      [&](int ti) {
        const Task& task = tasks[ti];
        EndToEndRow& row = result.rows[ti];
        row.T = task.T;
        row.L = task.L;
        row.seedIndex = task.seedIndex;
        row.oracleCost = oracleJ;
        try {
          const uint64_t seed =
              CounterRng(cfg.seed, 20)
                  .derive(task.seedIndex * 7919ull + task.T)
                  .nextU64();
          const Trajectory traj =
              simulate(truth, task.T, seed, /*initFromStationary=*/true);

          const double cL = cfg.cLambda > 0.0 ? cfg.cLambda
                                              : auto_c_lambda(traj, cfg.delta);
          row.lambda =
              choose_lambda(task.T, cfg.n, truth.m(), cfg.delta, cL);
          const LassoEstimate est = lasso_fit(traj, row.lambda);

          row.supportExact =
              support_report(est, pattern_hcat(truth.suppA(), truth.suppB()))
                  .exactRecovery;
          row.epsTrue = std::max(spectral_norm(est.Ahat - truth.A),
                                 spectral_norm(est.Bhat - truth.B));

          double epsBar = row.epsTrue;
          if (cfg.runBootstrap) {
            BootstrapConfig bc;
            bc.etaW = truth.sigmaW;
            bc.etaV = truth.sigmaV;
            bc.delta = cfg.delta;
            bc.rounds = cfg.bootstrapRounds;
            bc.T = task.T;
            bc.lambda = row.lambda;
            bc.seed = seed ^ 0xb005eedull;
            bc.workers = 1;
            PlantModel estPlant = truth;
            estPlant.A = est.Ahat;
            estPlant.B = est.Bhat;
            const Eigen::MatrixXd M = stationary_state_cov(estPlant);
            const BootstrapResult boot = bootstrap_eps(
                est.Ahat, est.Bhat, truth.K0, M, bc);
            epsBar = boot.epsBar;
          }
          row.epsBootstrap = epsBar;

          SynthesisProblem prob =
              make_synthesis_problem(est.Ahat, est.Bhat, truth.Q, truth.R,
                                     epsBar, task.L, cfg.d, cfg.c, cfg.alpha);
          prob.eta1 = cfg.eta1;
          prob.eta2 = cfg.eta2;
          prob.workers = 1;
          const SynthesisSolution sol = golden_section_synthesize(prob);
          if (sol.status != SynthesisStatus::Feasible) return;
          row.feasible = true;
          row.cost = lqr_cost(truth, realize(sol), truth.sigmaW);
          row.costRatio = row.cost / oracleJ;
        } catch (const std::exception&) {
          row.feasible = false;
        }
      },
      cfg.workers);
  return result;
}

RuntimeScalingResult run_runtime_scaling(const RuntimeScalingConfig& cfg) {
  RuntimeScalingResult result;
  for (int n : cfg.nList) {
    const PlantModel plant = make_stable_chain(n);
    SynthesisProblem prob =
        make_synthesis_problem(plant.A, plant.B, plant.Q, plant.R, cfg.epsBar,
                               cfg.L, cfg.d, cfg.c, cfg.alpha);
    prob.eta1 = cfg.eta1;
    prob.eta2 = cfg.eta2;
    prob.workers = 1;  // serial timing

    const auto start = std::chrono::steady_clock::now();
    const SynthesisSolution sol = golden_section_synthesize(prob);
    const auto stop = std::chrono::steady_clock::now();
    RuntimeScalingRow row;
    row.n = n;
    row.seconds = std::chrono::duration<double>(stop - start).count();
    row.feasible = sol.status == SynthesisStatus::Feasible;
    result.rows.push_back(row);
  }

  std::vector<std::pair<double, double>> pts;
  for (const auto& row : result.rows) {
    if (row.seconds > 0.0) pts.emplace_back(std::log(row.n), std::log(row.seconds));
  }
  if (pts.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double np = static_cast<double>(pts.size());
    result.slope = (np * sxy - sx * sy) / (np * sxx - sx * sx);
  }
  return result;
}

}  // namespace sls
