#pragma once

#include <Eigen/Core>
#include <functional>
#include <limits>
#include <vector>

#include "sls/fir.hpp"
#include "sls/pattern.hpp"
#include "sls/qp.hpp"

namespace sls {

// Per-lag structural constraint sets for the responses and the truncation
// slacks, from the locality parameter d and communication speed c:
//   Cx(t) = S(supp(A)^e(t)),  Cu(t) = S(supp(B)' supp(A)^e(t)),
//   e(t) = min(d-1, max(0, c(t-1)))
// and Cv(0) = S(I), Cv(t) = S(supp(A) Cx(t) + supp(B) Cu(t)).
struct ConstraintSet {
  std::vector<SparsityPattern> Cx;  // lags 1..L
  std::vector<SparsityPattern> Cu;  // lags 1..L
  std::vector<SparsityPattern> Cv;  // lags 0..L
  StructureCounts counts;
};

ConstraintSet build_constraints(const SparsityPattern& suppA,
                                const SparsityPattern& suppB, int d, int c,
                                int L);

// Default budget-splitting parameter for FIR length L; the truncation share
// 1 - alpha decays geometrically with L.
double default_alpha(int L);

// Full input to the truncated robust synthesis program.
struct SynthesisProblem {
  Eigen::MatrixXd Ahat;
  Eigen::MatrixXd Bhat;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
  double epsBar = 0.0;
  double alpha = 0.5;
  int L = 1;
  std::vector<SparsityPattern> Cx;
  std::vector<SparsityPattern> Cu;
  std::vector<SparsityPattern> Cv;
  StructureCounts counts;

  double eta1 = 1e-3;           // golden-section bracket tolerance
  double eta2 = 1e-6;           // inner accuracy; effective value <= eta1^2
  double vBudgetExponent = -1.0;  // V budget scales as k_v^exponent
  double feasTol = 1e-8;
  int qpMaxIter = 200;
  int workers = 0;

  int n() const { return static_cast<int>(Ahat.rows()); }
  int m() const { return static_cast<int>(Bhat.cols()); }

  void validate() const;  // throws on any violated structural invariant
};

// Assembles problem data with constraints derived from (d, c) and the
// supports of (Ahat, Bhat).  alpha < 0 selects default_alpha(L).
SynthesisProblem make_synthesis_problem(const Eigen::MatrixXd& Ahat,
                                        const Eigen::MatrixXd& Bhat,
                                        const Eigen::MatrixXd& Q,
                                        const Eigen::MatrixXd& R,
                                        double epsBar, int L, int d, int c,
                                        double alpha = -1.0);

struct SubproblemOptions {
  bool reduceRows = true;      // keep only the nonzero equality rows
  bool includeBudgets = true;  // emit the l1 budget machinery
};

// Column-j reduced QP.  Variables are the nonzero entries of column j of
// (PhiX(t), PhiU(t), V(t)) across lags plus one l1 slack per budgeted entry;
// h1 depends on gamma as h1Base + gamma * h1Gamma.
struct ColumnSubproblem {
  int column = 0;
  QpProblem qp;                 // qp.h1 is set per gamma before solving
  Eigen::VectorXd h1Base;
  Eigen::VectorXd h1Gamma;
  // Structural variable layout: kind 0 = PhiX, 1 = PhiU, 2 = V.
  struct VarRef {
    int kind;
    int lag;
    int row;
  };
  std::vector<VarRef> vars;     // structural variables, then slacks
  int structuralVars = 0;
  int slackVars = 0;
  int equalityRows = 0;
  int distinctEqRows = 0;       // |union of used row indices| (Lemma-4 count)
  bool infeasibleAtBuild = false;  // a forced row lost all its variables

  int totalVars() const { return structuralVars + slackVars; }
  QpProblem at(double gamma) const;
};

ColumnSubproblem build_subproblem(const SynthesisProblem& problem, int j,
                                  double gamma,
                                  const SubproblemOptions& opts = {});

struct ColumnSolve {
  double gSquared = 0.0;        // QP objective (g_j^2 up to regularization)
  Eigen::VectorXd x;
  QpStatus status = QpStatus::Infeasible;
};

struct EvalResult {
  double g = std::numeric_limits<double>::infinity();
  bool feasible = false;
  int maxIterColumns = 0;  // columns that hit the iteration cap (treated
                           // infeasible, reported separately)
  std::vector<ColumnSolve> columns;
};

// Solves the n column subproblems at the given gamma, each to eta2/n
// accuracy (floored at 1e-10), and combines g = sqrt(sum_j g_j^2).
// Infeasibility of any column makes g = +inf.  Pass a prebuilt cache to
// reuse QP structure across gamma values.
EvalResult eval_g(const SynthesisProblem& problem, double gamma, double eta2,
                  std::vector<ColumnSubproblem>* cache = nullptr);

struct GoldenTraceRow {
  double gammaA, gammaB, gammaC, gammaD;
  double gC, gD;  // inner objectives at the probes (inf when infeasible)
};

struct GoldenSectionResult {
  bool feasible = false;
  double gammaBar = 0.0;
  double g = std::numeric_limits<double>::infinity();  // g_ap(gammaBar)
  int iterations = 0;
  std::vector<GoldenTraceRow> trace;
};

// Golden-section search over the ratio g(gamma)/(1-gamma) on [0,1): probes
// gamma = 1 first, shrinks the bracket by 2/(1+sqrt(5)) per iteration while
// |gamma_b - gamma_a| > eta1, then evaluates the midpoint.  `g` must return
// +inf for infeasible gamma.
GoldenSectionResult golden_section_minimize(
    const std::function<double(double)>& g, double eta1);

enum class SynthesisStatus { Feasible, Infeasible };

struct SynthesisSolution {
  SynthesisStatus status = SynthesisStatus::Infeasible;
  double gammaBar = 0.0;
  FirResponse phiX;  // lags 1..L
  FirResponse phiU;  // lags 1..L
  FirResponse v;     // lags 0..L
  double g = std::numeric_limits<double>::infinity();
  double scaledObjective = std::numeric_limits<double>::infinity();
  std::vector<double> perColumnObjectives;

  // Certificate data: column budgets as computed from the returned responses.
  double maxResponseColumnSum = 0.0;  // max_j sum_t ||[PhiX;PhiU]_{:,j}(t)||_1
  double maxVColumnSum = 0.0;         // max_j sum_t ||V_{:,j}(t)||_1
  double epsBarUsed = 0.0;
  int kPhi = 0;
  int kV = 0;

  int gammaIterations = 0;
  int maxIterColumns = 0;
  std::vector<GoldenTraceRow> trace;
};

// Algorithm-1 driver: feasibility probe at gamma = 1, golden-section search,
// final solve at the bracket midpoint.
SynthesisSolution golden_section_synthesize(const SynthesisProblem& problem);

// Same program with epsBar forced to zero (certainty-equivalent design).
SynthesisSolution nominal_distributed_synthesize(const SynthesisProblem& problem);

// The undecomposed OPT(gamma) over all columns at once; used to check the
// decomposition identity g = sqrt(sum_j g_j^2).
struct FullQpResult {
  double g = std::numeric_limits<double>::infinity();
  bool feasible = false;
};
FullQpResult solve_full_qp(const SynthesisProblem& problem, double gamma,
                           const SubproblemOptions& opts = {});

// Residuals of the solution against every program constraint.
struct SolutionCheck {
  double maxAchievabilityResidual = 0.0;  // constraints 14a-14c, inf norm
  double maxResponseBudgetViolation = 0.0;
  double maxVBudgetViolation = 0.0;
  bool supportsRespected = true;
  double gConsistency = 0.0;  // |g - sqrt(sum g_j^2)|
};

SolutionCheck validate_solution(const SynthesisProblem& problem,
                                const SynthesisSolution& sol);

}  // namespace sls
