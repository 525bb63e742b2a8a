// Command-line front end: every pipeline stage as a subcommand plus the
// three study drivers.  Exit codes: 0 success, 2 infeasible, 1 error.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "sls/bootstrap.hpp"
#include "sls/evaluate.hpp"
#include "sls/experiments.hpp"
#include "sls/serialize.hpp"
#include "sls/sysid.hpp"
#include "sls/threading.hpp"

namespace {

using sls::Json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

Json loadConfig(const std::string& path) {
  return path.empty() ? Json::object() : sls::load_json(path);
}

template <typename T>
T cfgOr(const Json& cfg, const std::string& key, T fallback) {
  return cfg.contains(key) ? cfg.at(key).get<T>() : fallback;
}

int cmdSimulate(const std::string& configPath, const std::string& plantPath,
                const std::string& outPath, int T, uint64_t seed,
                bool fromStationary, const std::string& csvPath) {
  const Json cfg = loadConfig(configPath);
  sls::PlantModel plant;
  if (!plantPath.empty()) {
    plant = sls::plant_from_json(sls::load_json(plantPath));
  } else if (cfg.contains("plant")) {
    plant = sls::plant_from_json(cfg.at("plant"));
  } else {
    plant = sls::make_stable_chain(cfgOr<int>(cfg, "n", 40));
  }
  T = T > 0 ? T : cfgOr<int>(cfg, "T", 200);
  const sls::Trajectory traj = sls::simulate(plant, T, seed, fromStationary);
  Json out = sls::to_json(traj);
  out["header"]["model_hash"] = sls::config_hash(sls::to_json(plant));
  sls::save_json(outPath, out);
  if (!csvPath.empty()) {
    std::ofstream csv(csvPath);
    csv << sls::trajectory_to_csv(traj);
  }
  std::cout << "wrote " << outPath << " (T=" << T << ")\n";
  return kExitOk;
}

int cmdIdentify(const std::string& trajPath, const std::string& outPath,
                double lambda, double cLambda, double delta) {
  const sls::Trajectory traj =
      sls::trajectory_from_json(sls::load_json(trajPath));
  if (lambda < 0.0) {
    const double c =
        cLambda > 0.0 ? cLambda : sls::auto_c_lambda(traj, delta);
    lambda = sls::choose_lambda(traj.T(), traj.n(), traj.m(), delta, c);
  }
  const sls::LassoEstimate est = sls::lasso_fit(traj, lambda);
  sls::save_json(outPath, sls::to_json(est));
  std::cout << "lambda=" << lambda << " support_nnz=" << est.support.nnz()
            << (est.allConverged() ? "" : " (warning: non-converged rows)")
            << "\n";
  return kExitOk;
}

int cmdBootstrap(const std::string& estPath, const std::string& outPath,
                 const std::string& samplesCsv, int N, int T, double delta,
                 double etaW, double etaV, uint64_t seed) {
  const sls::LassoEstimate est =
      sls::estimate_from_json(sls::load_json(estPath));
  const int n = static_cast<int>(est.Ahat.rows());
  const int m = static_cast<int>(est.Bhat.cols());

  sls::PlantModel plant;
  plant.A = est.Ahat;
  plant.B = est.Bhat;
  plant.Q = Eigen::MatrixXd::Identity(n, n);
  plant.R = Eigen::MatrixXd::Identity(m, m);
  plant.sigmaW = etaW;
  plant.sigmaV = etaV;
  plant.K0 = Eigen::MatrixXd::Zero(m, n);

  sls::BootstrapConfig bc;
  bc.etaW = etaW;
  bc.etaV = etaV;
  bc.delta = delta;
  bc.rounds = N;
  bc.T = T;
  bc.lambda = est.lambda;
  bc.seed = seed;
  const Eigen::MatrixXd M = sls::stationary_state_cov(plant);
  const sls::BootstrapResult res =
      sls::bootstrap_eps(est.Ahat, est.Bhat, plant.K0, M, bc);
  sls::save_json(outPath, sls::to_json(res));
  if (!samplesCsv.empty()) {
    std::vector<std::vector<double>> rows;
    for (double s : res.samples) rows.push_back({s});
    sls::write_csv(samplesCsv, sls::config_hash(sls::to_json(res)), {"eps"},
                   rows);
  }
  if (res.exclusionWarning) {
    std::cerr << "warning: " << res.excludedRounds
              << " rounds excluded (lasso non-convergence)\n";
  }
  std::cout << "eps_bar=" << res.epsBar << "\n";
  return kExitOk;
}

int cmdSynthesize(const std::string& configPath, const std::string& estPath,
                  const std::string& outPath, double epsBar, int L, int d,
                  int c, double alpha, const std::string& tracePath) {
  const Json cfg = loadConfig(configPath);
  Eigen::MatrixXd Ahat, Bhat;
  if (!estPath.empty()) {
    const sls::LassoEstimate est =
        sls::estimate_from_json(sls::load_json(estPath));
    Ahat = est.Ahat;
    Bhat = est.Bhat;
  } else if (cfg.contains("plant")) {
    const sls::PlantModel plant = sls::plant_from_json(cfg.at("plant"));
    Ahat = plant.A;
    Bhat = plant.B;
  } else {
    std::cerr << "synthesize: need --estimate or a plant in --config\n";
    return kExitError;
  }
  const int n = static_cast<int>(Ahat.rows());
  const int m = static_cast<int>(Bhat.cols());

  sls::SynthesisProblem prob = sls::make_synthesis_problem(
      Ahat, Bhat, Eigen::MatrixXd::Identity(n, n),
      Eigen::MatrixXd::Identity(m, m), epsBar, L, d, c, alpha);
  prob.eta1 = cfgOr<double>(cfg, "eta1", 1e-3);
  prob.eta2 = cfgOr<double>(cfg, "eta2", 1e-6);

  const sls::SynthesisSolution sol = sls::golden_section_synthesize(prob);
  sls::save_json(outPath, sls::to_json(sol));
  if (!tracePath.empty()) {
    std::vector<std::vector<double>> rows;
    for (const auto& tr : sol.trace) {
      rows.push_back({tr.gammaA, tr.gammaB, tr.gammaC, tr.gammaD, tr.gC, tr.gD});
    }
    sls::write_csv(tracePath, sls::config_hash(sls::to_json(prob)),
                   {"gamma_a", "gamma_b", "gamma_c", "gamma_d", "g_c", "g_d"},
                   rows);
  }
  if (sol.status != sls::SynthesisStatus::Feasible) {
    std::cout << "Infeasible\n";
    return kExitInfeasible;
  }
  std::cout << "gamma_bar=" << sol.gammaBar << " g=" << sol.g
            << " objective=" << sol.scaledObjective << "\n";
  return kExitOk;
}

int cmdEvaluate(const std::string& solPath, const std::string& plantPath,
                const std::string& outCsv, bool monteCarlo, long mcSteps,
                uint64_t seed) {
  const sls::SynthesisSolution sol =
      sls::synthesis_solution_from_json(sls::load_json(solPath));
  if (sol.status != sls::SynthesisStatus::Feasible) {
    std::cout << "Infeasible\n";
    return kExitInfeasible;
  }
  const sls::PlantModel plant =
      sls::plant_from_json(sls::load_json(plantPath));
  const sls::SlsController ctrl = sls::realize(sol);
  const sls::ClosedLoopReport rep =
      sls::closed_loop_report(plant, ctrl, plant.sigmaW);
  const sls::RobustCertificate cert =
      sls::robust_certificate(sol, sol.epsBarUsed);

  std::cout << "rho=" << rep.spectralRadius << " stable=" << rep.stable
            << " J=" << rep.cost << " certificate_bound=" << cert.bound
            << " certified=" << cert.certified << "\n";
  double mcCost = 0.0;
  if (monteCarlo && rep.stable) {
    mcCost = sls::lqr_cost_monte_carlo(plant, ctrl, plant.sigmaW, mcSteps, seed);
    std::cout << "J_monte_carlo=" << mcCost << "\n";
  }
  if (!outCsv.empty()) {
    sls::write_csv(
        outCsv, sls::config_hash(sls::to_json(sol)),
        {"stable", "rho", "J", "J_mc", "bound", "gamma_bar"},
        {{rep.stable ? 1.0 : 0.0, rep.spectralRadius, rep.cost, mcCost,
          cert.bound, sol.gammaBar}});
  }
  return rep.stable ? kExitOk : kExitInfeasible;
}

int cmdStabilityStudy(const std::string& configPath, const std::string& outCsv,
                      uint64_t seed) {
  const Json cfg = loadConfig(configPath);
  sls::StabilityStudyConfig sc;
  sc.instances = cfgOr<int>(cfg, "instances", 100);
  sc.mList = cfgOr<std::vector<int>>(cfg, "m_list", {5, 6, 7, 8});
  sc.L = cfgOr<int>(cfg, "L", 10);
  sc.d = cfgOr<int>(cfg, "d", 3);
  sc.c = cfgOr<int>(cfg, "c", 2);
  sc.alpha = cfgOr<double>(cfg, "alpha", -1.0);
  sc.perturbation = cfgOr<double>(cfg, "perturbation", 0.1);
  sc.seed = seed;

  const auto table = sls::run_stability_study(sc);
  std::vector<std::vector<double>> rows;
  for (const auto& r : table) {
    rows.push_back({static_cast<double>(r.m), r.robustRatio, r.nominalDistRatio,
                    r.centralizedRatio, static_cast<double>(r.robustInfeasible),
                    static_cast<double>(r.nominalInfeasible),
                    static_cast<double>(r.errors)});
    std::cout << "m=" << r.m << " robust=" << r.robustRatio
              << " nominal_distributed=" << r.nominalDistRatio
              << " centralized=" << r.centralizedRatio << "\n";
  }
  sls::write_csv(outCsv, sls::config_hash(cfg),
                 {"m", "robust", "nominal_distributed", "centralized",
                  "robust_infeasible", "nominal_infeasible", "errors"},
                 rows);
  return kExitOk;
}

int cmdEndToEnd(const std::string& configPath, const std::string& outCsv,
                uint64_t seed) {
  const Json cfg = loadConfig(configPath);
  sls::EndToEndConfig ec;
  ec.n = cfgOr<int>(cfg, "n", 40);
  ec.Ts = cfgOr<std::vector<int>>(cfg, "T_list", {150, 300, 600});
  ec.Ls = cfgOr<std::vector<int>>(cfg, "L_list", {4, 8, 12});
  ec.seeds = cfgOr<int>(cfg, "seeds", 10);
  ec.cLambda = cfgOr<double>(cfg, "c_lambda", -1.0);
  ec.delta = cfgOr<double>(cfg, "delta", 0.05);
  ec.bootstrapRounds = cfgOr<int>(cfg, "bootstrap_rounds", 500);
  ec.runBootstrap = cfgOr<bool>(cfg, "run_bootstrap", true);
  ec.d = cfgOr<int>(cfg, "d", 3);
  ec.c = cfgOr<int>(cfg, "c", 2);
  ec.alpha = cfgOr<double>(cfg, "alpha", -1.0);
  ec.oracleL = cfgOr<int>(cfg, "oracle_L", 100);
  ec.cacheDir = cfgOr<std::string>(cfg, "cache_dir", "");
  ec.seed = seed;

  const sls::EndToEndResult res = sls::run_end_to_end(ec);
  std::vector<std::vector<double>> rows;
  for (const auto& r : res.rows) {
    rows.push_back({static_cast<double>(r.T), static_cast<double>(r.L),
                    static_cast<double>(r.seedIndex), r.lambda, r.epsTrue,
                    r.epsBootstrap, r.supportExact ? 1.0 : 0.0,
                    r.feasible ? 1.0 : 0.0, r.cost, r.oracleCost, r.costRatio});
  }
  sls::write_csv(outCsv, sls::config_hash(cfg),
                 {"T", "L", "seed", "lambda", "eps_true", "eps_bootstrap",
                  "support_exact", "feasible", "J", "J_oracle", "ratio"},
                 rows);
  std::cout << "oracle_cost=" << res.oracleCost << " rows=" << rows.size()
            << "\n";
  return kExitOk;
}

int cmdRuntimeScaling(const std::string& configPath, const std::string& outCsv,
                      uint64_t seed) {
  const Json cfg = loadConfig(configPath);
  sls::RuntimeScalingConfig rc;
  rc.nList = cfgOr<std::vector<int>>(cfg, "n_list", {20, 40, 80, 150});
  rc.d = cfgOr<int>(cfg, "d", 3);
  rc.c = cfgOr<int>(cfg, "c", 2);
  rc.L = cfgOr<int>(cfg, "L", 8);
  rc.epsBar = cfgOr<double>(cfg, "eps_bar", 0.005);
  rc.alpha = cfgOr<double>(cfg, "alpha", -1.0);
  rc.seed = seed;

  const sls::RuntimeScalingResult res = sls::run_runtime_scaling(rc);
  std::vector<std::vector<double>> rows;
  for (const auto& r : res.rows) {
    rows.push_back({static_cast<double>(r.n), r.seconds,
                    r.feasible ? 1.0 : 0.0});
    std::cout << "n=" << r.n << " seconds=" << r.seconds << "\n";
  }
  sls::write_csv(outCsv, sls::config_hash(cfg), {"n", "seconds", "feasible"},
                 rows);
  if (res.slope) {
    std::cout << "loglog_slope=" << *res.slope << "\n";
  } else {
    std::cout << "loglog_slope=undefined (need >= 2 points)\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse-plant learning and robust distributed LQR synthesis"};
  app.require_subcommand(1);

  std::string configPath, plantPath, trajPath, estPath, solPath, outPath,
      csvPath, tracePath, samplesCsv;
  uint64_t seed = 1;
  int T = 0, N = 500, L = 8, d = 3, c = 2;
  double lambda = -1.0, cLambda = -1.0, delta = 0.05;
  double epsBar = 0.0, alpha = -1.0, etaW = 1.0, etaV = std::sqrt(0.1);
  bool fromStationary = true, monteCarlo = false;
  long mcSteps = 1000000;
  int workers = 0;

  app.add_option("--workers", workers, "worker pool size (overrides SLS_WORKERS)");

  auto* sim = app.add_subcommand("simulate", "generate a trajectory");
  sim->add_option("--config", configPath);
  sim->add_option("--plant", plantPath, "plant JSON file");
  sim->add_option("-T,--horizon", T);
  sim->add_option("--seed", seed);
  sim->add_option("--init-stationary", fromStationary);
  sim->add_option("-o,--out", outPath)->required();
  sim->add_option("--csv", csvPath);

  auto* ident = app.add_subcommand("identify", "sparse estimate from a trajectory");
  ident->add_option("--trajectory", trajPath)->required();
  ident->add_option("-o,--out", outPath)->required();
  ident->add_option("--lambda", lambda, "fixed lambda (else rule/CV)");
  ident->add_option("--c-lambda", cLambda);
  ident->add_option("--delta", delta);

  auto* boot = app.add_subcommand("bootstrap", "estimation-error upper bound");
  boot->add_option("--estimate", estPath)->required();
  boot->add_option("-o,--out", outPath)->required();
  boot->add_option("--samples-csv", samplesCsv);
  boot->add_option("-N,--rounds", N);
  boot->add_option("-T,--horizon", T)->required();
  boot->add_option("--delta", delta);
  boot->add_option("--eta-w", etaW);
  boot->add_option("--eta-v", etaV);
  boot->add_option("--seed", seed);

  auto* synth = app.add_subcommand("synthesize", "robust distributed design");
  synth->add_option("--config", configPath);
  synth->add_option("--estimate", estPath);
  synth->add_option("-o,--out", outPath)->required();
  synth->add_option("--eps-bar", epsBar);
  synth->add_option("-L,--fir-length", L);
  synth->add_option("-d,--locality", d);
  synth->add_option("-c,--comm-speed", c);
  synth->add_option("--alpha", alpha);
  synth->add_option("--trace-csv", tracePath);

  auto* eval = app.add_subcommand("evaluate", "closed-loop report on a plant");
  eval->add_option("--solution", solPath)->required();
  eval->add_option("--plant", plantPath)->required();
  eval->add_option("--csv", csvPath);
  eval->add_flag("--monte-carlo", monteCarlo);
  eval->add_option("--mc-steps", mcSteps);
  eval->add_option("--seed", seed);

  auto* stab = app.add_subcommand("stability-study", "success ratios per m");
  stab->add_option("--config", configPath);
  stab->add_option("-o,--out", outPath)->required();
  stab->add_option("--seed", seed);

  auto* e2e = app.add_subcommand("end-to-end", "learn/bound/design/evaluate grid");
  e2e->add_option("--config", configPath);
  e2e->add_option("-o,--out", outPath)->required();
  e2e->add_option("--seed", seed);

  auto* rt = app.add_subcommand("runtime-scaling", "synthesis wall time vs n");
  rt->add_option("--config", configPath);
  rt->add_option("-o,--out", outPath)->required();
  rt->add_option("--seed", seed);

  CLI11_PARSE(app, argc, argv);

  if (workers > 0) sls::set_worker_count(workers);

  try {
    if (sim->parsed()) {
      return cmdSimulate(configPath, plantPath, outPath, T, seed,
                         fromStationary, csvPath);
    }
    if (ident->parsed()) {
      return cmdIdentify(trajPath, outPath, lambda, cLambda, delta);
    }
    if (boot->parsed()) {
      return cmdBootstrap(estPath, outPath, samplesCsv, N, T, delta, etaW,
                          etaV, seed);
    }
    if (synth->parsed()) {
      return cmdSynthesize(configPath, estPath, outPath, epsBar, L, d, c,
                           alpha, tracePath);
    }
    if (eval->parsed()) {
      return cmdEvaluate(solPath, plantPath, csvPath, monteCarlo, mcSteps, seed);
    }
    if (stab->parsed()) return cmdStabilityStudy(configPath, outPath, seed);
    if (e2e->parsed()) return cmdEndToEnd(configPath, outPath, seed);
    if (rt->parsed()) return cmdRuntimeScaling(configPath, outPath, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
