// Acceptance suite: runs the end-of-project checks and prints one line per
// criterion.  Exit code = number of failed criteria.  Optional argv selects a
// subset, e.g. `acceptance 5 7`.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sls/bootstrap.hpp"
#include "sls/evaluate.hpp"
#include "sls/experiments.hpp"
#include "sls/plant.hpp"
#include "sls/qp.hpp"
#include "sls/rng.hpp"
#include "sls/synthesis.hpp"
#include "sls/sysid.hpp"
#include "sls/threading.hpp"

using namespace sls;

namespace {

// Lambda scale for the n = 40 chain identification experiments; tuned on the
// benchmark (see README on reproducing the studies).
constexpr double kChainCLambda = 0.05;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

SynthesisProblem randomChainProblem(CounterRng& rng, int maxN, int maxL,
                                    double epsScale) {
  const int n = 5 + rng.nextInt(maxN - 4);
  const int L = 3 + rng.nextInt(maxL - 2);
  const int d = 2 + rng.nextInt(2);
  const int c = 1 + rng.nextInt(2);
  const PlantModel p = make_chain(n, 0.2, 0.0, 0.85 + 0.1 * rng.nextUniform());
  return make_synthesis_problem(p.A, p.B, p.Q, p.R,
                                epsScale * (0.5 + rng.nextUniform()), L, d, c);
}

// --- 1. achievability residuals on 50 random feasible instances ------------
Outcome criterion1() {
  CounterRng rng(1001);
  int feasible = 0, attempts = 0;
  double worstResid = 0.0, worstBudget = 0.0;
  while (feasible < 50 && attempts < 200) {
    ++attempts;
    const SynthesisProblem prob = randomChainProblem(rng, 20, 10, 0.02);
    const SynthesisSolution sol = golden_section_synthesize(prob);
    if (sol.status != SynthesisStatus::Feasible) continue;
    ++feasible;
    const SolutionCheck check = validate_solution(prob, sol);
    worstResid = std::max(worstResid, check.maxAchievabilityResidual);
    worstBudget = std::max({worstBudget, check.maxResponseBudgetViolation,
                            check.maxVBudgetViolation});
    if (!check.supportsRespected) {
      return {false, "support containment violated"};
    }
  }
  std::ostringstream os;
  os << feasible << " feasible instances, max residual " << worstResid
     << ", max budget violation " << worstBudget;
  return {feasible == 50 && worstResid <= 1e-6 && worstBudget <= 1e-6,
          os.str()};
}

// --- 2. decomposition identity ---------------------------------------------
Outcome criterion2() {
  CounterRng rng(1002);
  double worst = 0.0;
  int done = 0;
  while (done < 20) {
    const int n = 4 + rng.nextInt(3);
    const PlantModel p = make_chain(n, 0.2, 0.0, 0.9);
    const SynthesisProblem prob = make_synthesis_problem(
        p.A, p.B, p.Q, p.R, 0.01 + 0.02 * rng.nextUniform(), 3, 2, 2);
    const double gamma = 0.5 + 0.5 * rng.nextUniform();
    const EvalResult cols = eval_g(prob, gamma, prob.eta2);
    const FullQpResult full = solve_full_qp(prob, gamma);
    if (!cols.feasible || !full.feasible) continue;
    worst = std::max(worst, std::abs(cols.g - full.g));
    ++done;
  }
  std::ostringstream os;
  os << "max |g_full - g_decomposed| = " << worst << " over 20 instances";
  return {worst <= 1e-6, os.str()};
}

// --- 3. reduced-QP equivalence and variable count --------------------------
Outcome criterion3() {
  CounterRng rng(1003);
  double worstGap = 0.0, worstC = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const SynthesisProblem prob = randomChainProblem(rng, 12, 6, 0.02);
    const double gamma = 0.9;
    for (int j = 0; j < prob.n(); ++j) {
      const ColumnSubproblem red = build_subproblem(prob, j, gamma);
      const ColumnSubproblem unred =
          build_subproblem(prob, j, gamma, {.reduceRows = false});
      const QpSolution a = solve_qp(red.at(gamma), 1e-8, 1e-10);
      const QpSolution b = solve_qp(unred.at(gamma), 1e-8, 1e-10);
      if (a.status != b.status) {
        return {false, "status mismatch between reduced and unreduced"};
      }
      if (a.status == QpStatus::Optimal) {
        worstGap = std::max(worstGap, std::abs(a.objective - b.objective));
      }
      const double k2 = static_cast<double>(prob.counts.k) * prob.counts.k;
      worstC = std::max(worstC, red.totalVars() / (prob.L * k2));
    }
  }
  std::ostringstream os;
  os << "max objective gap " << worstGap << ", measured vars <= " << worstC
     << " * L k^2";
  return {worstGap <= 1e-6 && worstC <= 8.0, os.str()};
}

// --- 4. golden-section correctness ------------------------------------------
Outcome criterion4() {
  CounterRng rng(1004);
  // (a) search result vs a 200-point grid on feasible instances.
  int done = 0;
  double worstExcess = 0.0;
  while (done < 20) {
    const int n = 4 + rng.nextInt(2);
    const PlantModel p = make_chain(n, 0.2, 0.0, 0.9);
    const SynthesisProblem prob = make_synthesis_problem(
        p.A, p.B, p.Q, p.R, 0.01 + 0.02 * rng.nextUniform(), 4, 2, 2);
    const SynthesisSolution sol = golden_section_synthesize(prob);
    if (sol.status != SynthesisStatus::Feasible) continue;
    ++done;
    double gridMin = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 200; ++i) {
      const double gamma = static_cast<double>(i) / 201.0;
      const EvalResult r = eval_g(prob, gamma, prob.eta2);
      if (r.feasible) gridMin = std::min(gridMin, r.g / (1.0 - gamma));
    }
    worstExcess = std::max(
        worstExcess, sol.scaledObjective - gridMin - 1e-3 * (1.0 + gridMin));
  }

  // (b) analytic surrogate accuracy.
  double worstGammaErr = 0.0;
  for (double a : {1.3, 2.0, 3.5, 6.0}) {
    const double eta1 = 1e-3;
    const GoldenSectionResult res = golden_section_minimize(
        [a](double g) { return std::exp(-a * g); }, eta1);
    worstGammaErr =
        std::max(worstGammaErr, std::abs(res.gammaBar - (1.0 - 1.0 / a)));
  }
  std::ostringstream os;
  os << "grid excess " << worstExcess << ", surrogate |gammaBar - gamma*| "
     << worstGammaErr;
  return {worstExcess <= 0.0 && worstGammaErr <= 0.5e-3, os.str()};
}

// --- 5. robust stability certificates ---------------------------------------
Outcome criterion5() {
  CounterRng rng(1005);
  int feasible = 0, attempts = 0, stable = 0, certified = 0;
  while (feasible < 100 && attempts < 500) {
    ++attempts;
    const PlantModel truth =
        make_stability_chain(std::vector<bool>(8, true));
    CounterRng sub = rng.derive(attempts);
    const Eigen::MatrixXd Ahat = perturb_elementwise(truth.A, 0.1, sub);
    const Eigen::MatrixXd Bhat = perturb_elementwise(truth.B, 0.1, sub);
    const double eps = std::max(spectral_norm(Ahat - truth.A),
                                spectral_norm(Bhat - truth.B));
    const SynthesisProblem prob = make_synthesis_problem(
        Ahat, Bhat, truth.Q, truth.R, eps, 10, 3, 2);
    const SynthesisSolution sol = golden_section_synthesize(prob);
    if (sol.status != SynthesisStatus::Feasible) continue;
    ++feasible;

    const RobustCertificate cert = robust_certificate(sol, eps);
    if (cert.bound <= sol.gammaBar + 1e-6 && sol.gammaBar < 1.0) ++certified;
    const double rho =
        spectral_radius(closed_loop_matrix(truth, realize(sol)));
    if (rho < 1.0) ++stable;
  }
  std::ostringstream os;
  os << stable << "/" << feasible << " stable, " << certified << "/"
     << feasible << " certificates within gammaBar (" << attempts
     << " attempts)";
  return {feasible == 100 && stable == 100 && certified == 100, os.str()};
}

// --- 6. truncation decay ----------------------------------------------------
Outcome criterion6() {
  const PlantModel p = make_chain(20, 0.2, 0.0, 0.99);
  auto costAt = [&](int L) {
    const SynthesisProblem prob =
        make_synthesis_problem(p.A, p.B, p.Q, p.R, 0.0, L, 3, 2);
    const SynthesisSolution sol = golden_section_synthesize(prob);
    if (sol.status != SynthesisStatus::Feasible) {
      throw std::runtime_error("truncation study: infeasible at L=" +
                               std::to_string(L));
    }
    return lqr_cost(p, realize(sol), 1.0);
  };
  const double jRef = costAt(30);
  const double gap4 = (costAt(4) - jRef) / jRef;
  const double gap8 = (costAt(8) - jRef) / jRef;
  const double gap12 = (costAt(12) - jRef) / jRef;

  std::ostringstream os;
  os << "relative gaps: L=4 " << gap4 << ", L=8 " << gap8 << ", L=12 "
     << gap12;
  const bool monotone = gap4 >= gap8 - 1e-9 && gap8 >= gap12 - 1e-9;
  const bool marginal = (gap8 - gap12) < (gap4 - gap8);
  return {monotone && marginal, os.str()};
}

// --- 7. identification trend -------------------------------------------------
Outcome criterion7() {
  const PlantModel truth = make_stable_chain(40);
  const SparsityPattern truthSupp =
      pattern_hcat(truth.suppA(), truth.suppB());
  const int seeds = 50;

  std::vector<double> err600(seeds), err2400(seeds);
  std::vector<uint8_t> exact(seeds, 0);
  parallel_for(seeds, [&](int s) {
    for (const int T : {600, 2400}) {
      const Trajectory traj =
          simulate(truth, T, 40000 + 31 * s + T, true);
      const double lambda =
          choose_lambda(T, 40, 40, 0.05, kChainCLambda);
      const LassoEstimate est = lasso_fit(traj, lambda);
      Eigen::MatrixXd truePsi(40, 80);
      truePsi << truth.A, truth.B;
      Eigen::MatrixXd estPsi(40, 80);
      estPsi << est.Ahat, est.Bhat;
      const double err = (estPsi - truePsi).cwiseAbs().maxCoeff();
      if (T == 600) {
        err600[s] = err;
        exact[s] = support_report(est, truthSupp).exactRecovery ? 1 : 0;
      } else {
        err2400[s] = err;
      }
    }
  });

  int recovered = 0;
  std::vector<double> ratios;
  for (int s = 0; s < seeds; ++s) {
    recovered += exact[s];
    ratios.push_back(err600[s] / err2400[s]);
  }
  const double medRatio = median(ratios);
  std::ostringstream os;
  os << recovered << "/" << seeds << " exact recoveries at T=600, median "
     << "error ratio T vs 4T = " << medRatio;
  return {recovered >= 45 && medRatio >= 1.4 && medRatio <= 2.9, os.str()};
}

// --- 8. bootstrap coverage ---------------------------------------------------
Outcome criterion8() {
  const PlantModel truth = make_stable_chain(40);
  const int repeats = 50;
  const int T = 600;
  const double lambda = choose_lambda(T, 40, 40, 0.05, kChainCLambda);

  std::vector<uint8_t> covered(repeats, 0), failed(repeats, 0);
  parallel_for(repeats, [&](int r) {
    try {
      const Trajectory traj = simulate(truth, T, 80000 + 17 * r, true);
      const LassoEstimate est = lasso_fit(traj, lambda);
      const double epsTrue =
          std::max(spectral_norm(est.Ahat - truth.A),
                   spectral_norm(est.Bhat - truth.B));

      PlantModel estPlant = truth;
      estPlant.A = est.Ahat;
      estPlant.B = est.Bhat;
      BootstrapConfig bc;
      bc.etaW = truth.sigmaW;
      bc.etaV = truth.sigmaV;
      bc.delta = 0.05;
      bc.rounds = 500;
      bc.T = T;
      bc.lambda = lambda;
      bc.seed = 90000 + r;
      bc.workers = 1;
      const BootstrapResult boot =
          bootstrap_eps(est.Ahat, est.Bhat, truth.K0,
                        stationary_state_cov(estPlant), bc);
      covered[r] = boot.epsBar >= epsTrue ? 1 : 0;
    } catch (const std::exception&) {
      failed[r] = 1;
    }
  });

  int ok = 0, errors = 0;
  for (int r = 0; r < repeats; ++r) {
    ok += covered[r];
    errors += failed[r];
  }
  std::ostringstream os;
  os << ok << "/" << repeats << " repeats covered the true error (" << errors
     << " errors)";
  return {ok >= 45, os.str()};
}

// --- 9. stability study -------------------------------------------------------
Outcome criterion9() {
  StabilityStudyConfig cfg;
  cfg.instances = 100;
  cfg.seed = 99;
  const auto table = run_stability_study(cfg);

  double robust5 = -1.0, cent = -1.0;
  bool dominance = true;
  std::ostringstream os;
  for (const auto& row : table) {
    os << "m=" << row.m << " robust=" << row.robustRatio
       << " nominal=" << row.nominalDistRatio
       << " centralized=" << row.centralizedRatio << "; ";
    if (row.m == 5) robust5 = row.robustRatio;
    if (row.m >= 6 && row.robustRatio < row.nominalDistRatio) {
      dominance = false;
    }
    cent = std::max(cent, row.centralizedRatio);
  }
  const bool centralizedBand = cent >= 0.5 && cent <= 0.9;
  return {dominance && robust5 <= 0.1 && centralizedBand, os.str()};
}

// --- 10. runtime scaling -------------------------------------------------------
Outcome criterion10() {
  RuntimeScalingConfig cfg;
  const RuntimeScalingResult res = run_runtime_scaling(cfg);
  std::ostringstream os;
  for (const auto& row : res.rows) {
    os << "n=" << row.n << " t=" << row.seconds << "s"
       << (row.feasible ? "" : " (infeasible)") << "; ";
  }
  if (!res.slope) return {false, os.str() + "slope undefined"};
  os << "slope=" << *res.slope;
  bool allFeasible = true;
  for (const auto& row : res.rows) allFeasible = allFeasible && row.feasible;
  return {allFeasible && *res.slope >= 0.8 && *res.slope <= 1.4, os.str()};
}

// --- 11. numerical oracles ------------------------------------------------------
Outcome criterion11() {
  std::ostringstream os;
  // Scalar Lyapunov and Riccati closed forms.
  Eigen::MatrixXd F(1, 1), W(1, 1);
  F << 0.5;
  W << 1.0;
  const double lyapErr = std::abs(dlyap(F, W)(0, 0) - 4.0 / 3.0);

  PlantModel scalar;
  scalar.A = Eigen::MatrixXd::Ones(1, 1);
  scalar.B = Eigen::MatrixXd::Ones(1, 1);
  scalar.Q = Eigen::MatrixXd::Ones(1, 1);
  scalar.R = Eigen::MatrixXd::Ones(1, 1);
  const double dareErr =
      std::abs(dare_gain(scalar).P(0, 0) - (1.0 + std::sqrt(5.0)) / 2.0);

  // Lyapunov vs Monte-Carlo cost on a synthesized controller.
  const PlantModel p = make_chain(8, 0.2, 0.0, 0.9);
  const SynthesisProblem prob =
      make_synthesis_problem(p.A, p.B, p.Q, p.R, 0.02, 5, 3, 2);
  const SynthesisSolution sol = golden_section_synthesize(prob);
  if (sol.status != SynthesisStatus::Feasible) {
    return {false, "cost cross-check instance infeasible"};
  }
  const SlsController ctrl = realize(sol);
  const double jLyap = lqr_cost(p, ctrl, 1.0);
  const double jMc = lqr_cost_monte_carlo(p, ctrl, 1.0, 1000000, 4242);
  const double mcGap = std::abs(jLyap - jMc) / jLyap;

  // Interior-point solver vs active-set enumeration.
  CounterRng rng(1011);
  double worstQp = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 3 + rng.nextInt(4);
    const int mI = 2 + rng.nextInt(6);
    QpProblem qp;
    Eigen::MatrixXd G(dim, dim);
    for (int c = 0; c < dim; ++c)
      for (int r = 0; r < dim; ++r) G(r, c) = rng.nextNormal();
    qp.M = G.transpose() * G + 0.3 * Eigen::MatrixXd::Identity(dim, dim);
    Eigen::VectorXd xFeas = rng.normalVector(dim);
    qp.H1.resize(mI, dim);
    qp.h1.resize(mI);
    for (int r = 0; r < mI; ++r) {
      for (int c = 0; c < dim; ++c) qp.H1(r, c) = rng.nextNormal();
      qp.h1(r) = qp.H1.row(r).dot(xFeas) + rng.nextUniform(0.0, 1.0);
    }
    qp.H2.resize(0, dim);
    qp.h2.resize(0);

    // Enumeration oracle over active subsets.
    double best = std::numeric_limits<double>::infinity();
    for (int mask = 0; mask < (1 << mI); ++mask) {
      std::vector<int> act;
      for (int i = 0; i < mI; ++i)
        if (mask & (1 << i)) act.push_back(i);
      const int na = static_cast<int>(act.size());
      Eigen::MatrixXd KKT = Eigen::MatrixXd::Zero(dim + na, dim + na);
      KKT.topLeftCorner(dim, dim) = qp.M;
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim + na);
      for (int i = 0; i < na; ++i) {
        KKT.block(dim + i, 0, 1, dim) = qp.H1.row(act[i]);
        KKT.block(0, dim + i, dim, 1) = qp.H1.row(act[i]).transpose();
        rhs(dim + i) = qp.h1(act[i]);
      }
      const Eigen::VectorXd sv =
          Eigen::FullPivLU<Eigen::MatrixXd>(KKT).solve(rhs);
      if ((KKT * sv - rhs).cwiseAbs().maxCoeff() > 1e-8) continue;
      const Eigen::VectorXd x = sv.head(dim);
      if ((qp.H1 * x - qp.h1).maxCoeff() > 1e-8) continue;
      best = std::min(best, 0.5 * x.dot(qp.M * x));
    }

    const QpSolution s = solve_qp(qp, 1e-8, 1e-9);
    if (s.status != QpStatus::Optimal) {
      return {false, "QP solver failed on a feasible oracle instance"};
    }
    worstQp = std::max(worstQp, std::abs(s.objective - best));
  }

  os << "lyap err " << lyapErr << ", dare err " << dareErr << ", MC gap "
     << mcGap << ", QP-vs-oracle " << worstQp;
  return {lyapErr <= 1e-9 && dareErr <= 1e-9 && mcGap <= 0.02 &&
              worstQp <= 1e-6,
          os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, criterion1},  {2, criterion2}, {3, criterion3}, {4, criterion4},
      {5, criterion5},  {6, criterion6}, {7, criterion7}, {8, criterion8},
      {9, criterion9},  {10, criterion10}, {11, criterion11},
  };

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& [id, fn] : criteria) {
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    std::printf("[%s] criterion %2d (%.1fs): %s\n", out.pass ? "PASS" : "FAIL",
                id, secs, out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  return failures;
}
