#include "sls/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "sls/threading.hpp"

namespace sls {

namespace {

constexpr double kGoldenRatioStep = 0.61803398874989484820;  // 2/(1+sqrt(5))
constexpr double kSlackReg = 1e-12;  // keeps the KKT system nonsingular on
                                     // slack and V coordinates

int exponentAt(int d, int c, int t) {
  return std::min(d - 1, std::max(0, c * (t - 1)));
}

}  // namespace

double default_alpha(int L) {
  // Truncation share (1 - alpha) shrinks with L like the truncation error
  // itself; see the ratio test in the synthesis experiments.
  return 1.0 - std::pow(1.2, -L);
}

ConstraintSet build_constraints(const SparsityPattern& suppA,
                                const SparsityPattern& suppB, int d, int c,
                                int L) {
  if (d < 1 || c < 1 || L < 1) {
    throw std::invalid_argument("build_constraints: need d,c,L >= 1");
  }
  if (suppA.rows() != suppA.cols() || suppB.rows() != suppA.rows()) {
    throw std::invalid_argument("build_constraints: support shape mismatch");
  }
  const int n = suppA.rows();
  ConstraintSet cs;
  const SparsityPattern suppBt = suppB.transpose();

  // Powers are reused across lags; exponents repeat once they cap at d-1.
  std::map<int, SparsityPattern> powers;
  auto powerOf = [&](int e) -> const SparsityPattern& {
    auto it = powers.find(e);
    if (it == powers.end()) {
      it = powers.emplace(e, pattern_power(suppA, e)).first;
    }
    return it->second;
  };

  for (int t = 1; t <= L; ++t) {
    const SparsityPattern& Ae = powerOf(exponentAt(d, c, t));
    cs.Cx.push_back(Ae);
    cs.Cu.push_back(pattern_compose(suppBt, Ae));
  }
  cs.Cv.push_back(SparsityPattern::identity(n));
  for (int t = 1; t <= L; ++t) {
    cs.Cv.push_back(pattern_union(pattern_compose(suppA, cs.Cx[t - 1]),
                                  pattern_compose(suppB, cs.Cu[t - 1])));
  }

  std::vector<SparsityPattern> stacked;
  for (int t = 0; t < L; ++t) {
    stacked.push_back(pattern_vcat(cs.Cx[t], cs.Cu[t]));
  }
  cs.counts =
      structure_counts(pattern_hcat(suppA, suppB), stacked, cs.Cv);
  return cs;
}

void SynthesisProblem::validate() const {
  const int nn = n();
  const int mm = m();
  if (Ahat.cols() != nn || Bhat.rows() != nn) {
    throw std::invalid_argument("SynthesisProblem: system matrix shapes");
  }
  if (Q.rows() != nn || Q.cols() != nn || R.rows() != mm || R.cols() != mm) {
    throw std::invalid_argument("SynthesisProblem: weight shapes");
  }
  if (L < 1 || static_cast<int>(Cx.size()) != L ||
      static_cast<int>(Cu.size()) != L || static_cast<int>(Cv.size()) != L + 1) {
    throw std::invalid_argument("SynthesisProblem: pattern lists must cover lags");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("SynthesisProblem: alpha must be in (0,1)");
  }
  if (epsBar < 0.0) {
    throw std::invalid_argument("SynthesisProblem: epsBar must be >= 0");
  }
  if (!(Cv[0] == SparsityPattern::identity(nn))) {
    throw std::invalid_argument("SynthesisProblem: Cv(0) must be S(I)");
  }
  const SparsityPattern sa = [&] {
    std::vector<SparsityPattern::Entry> e;
    for (int c = 0; c < nn; ++c)
      for (int r = 0; r < nn; ++r)
        if (Ahat(r, c) != 0.0) e.emplace_back(r, c);
    return SparsityPattern(nn, nn, std::move(e));
  }();
  const SparsityPattern sb = [&] {
    std::vector<SparsityPattern::Entry> e;
    for (int c = 0; c < mm; ++c)
      for (int r = 0; r < nn; ++r)
        if (Bhat(r, c) != 0.0) e.emplace_back(r, c);
    return SparsityPattern(nn, mm, std::move(e));
  }();
  for (int t = 1; t <= L; ++t) {
    const SparsityPattern expect = pattern_union(
        pattern_compose(sa, Cx[t - 1]), pattern_compose(sb, Cu[t - 1]));
    if (!(Cv[t] == expect)) {
      throw std::invalid_argument("SynthesisProblem: Cv(t) structure violated");
    }
  }
}

SynthesisProblem make_synthesis_problem(const Eigen::MatrixXd& Ahat,
                                        const Eigen::MatrixXd& Bhat,
                                        const Eigen::MatrixXd& Q,
                                        const Eigen::MatrixXd& R,
                                        double epsBar, int L, int d, int c,
                                        double alpha) {
  SynthesisProblem p;
  p.Ahat = Ahat;
  p.Bhat = Bhat;
  p.Q = Q;
  p.R = R;
  p.epsBar = epsBar;
  p.L = L;
  p.alpha = alpha > 0.0 ? alpha : default_alpha(L);

  std::vector<SparsityPattern::Entry> ea, eb;
  for (int col = 0; col < Ahat.cols(); ++col)
    for (int r = 0; r < Ahat.rows(); ++r)
      if (Ahat(r, col) != 0.0) ea.emplace_back(r, col);
  for (int col = 0; col < Bhat.cols(); ++col)
    for (int r = 0; r < Bhat.rows(); ++r)
      if (Bhat(r, col) != 0.0) eb.emplace_back(r, col);
  const SparsityPattern sa(static_cast<int>(Ahat.rows()),
                           static_cast<int>(Ahat.cols()), std::move(ea));
  const SparsityPattern sb(static_cast<int>(Bhat.rows()),
                           static_cast<int>(Bhat.cols()), std::move(eb));

  ConstraintSet cs = build_constraints(sa, sb, d, c, L);
  p.Cx = std::move(cs.Cx);
  p.Cu = std::move(cs.Cu);
  p.Cv = std::move(cs.Cv);
  p.counts = cs.counts;
  p.validate();
  return p;
}

QpProblem ColumnSubproblem::at(double gamma) const {
  QpProblem out = qp;
  out.h1 = h1Base + gamma * h1Gamma;
  return out;
}

ColumnSubproblem build_subproblem(const SynthesisProblem& problem, int j,
                                  double gamma, const SubproblemOptions& opts) {
  const int n = problem.n();
  if (j < 0 || j >= n) throw std::invalid_argument("build_subproblem: bad column");
  if (gamma < 0.0) throw std::invalid_argument("build_subproblem: gamma < 0");
  const int L = problem.L;

  ColumnSubproblem sp;
  sp.column = j;

  // Structural variables: nonzero entries of column j per lag.
  // varIndex[kind][lag][row] lookups go through flat maps.
  std::map<std::tuple<int, int, int>, int> index;
  auto addVars = [&](int kind, int lag, const SparsityPattern& pat) {
    for (int r : pat.columnSupport(j)) {
      index[{kind, lag, r}] = static_cast<int>(sp.vars.size());
      sp.vars.push_back({kind, lag, r});
    }
  };
  for (int t = 1; t <= L; ++t) addVars(0, t, problem.Cx[t - 1]);
  for (int t = 1; t <= L; ++t) addVars(1, t, problem.Cu[t - 1]);
  for (int t = 0; t <= L; ++t) addVars(2, t, problem.Cv[t]);
  sp.structuralVars = static_cast<int>(sp.vars.size());

  auto lookup = [&](int kind, int lag, int r) -> int {
    const auto it = index.find({kind, lag, r});
    return it == index.end() ? -1 : it->second;
  };

  // Budgeted entries get one slack each; with epsBar = 0 the response budget
  // is vacuous and its machinery is dropped.
  const bool responseBudget = opts.includeBudgets && problem.epsBar > 0.0;
  const bool vBudget = opts.includeBudgets;
  std::vector<int> respSlackOf(sp.structuralVars, -1);
  int slack = sp.structuralVars;
  for (int vi = 0; vi < sp.structuralVars; ++vi) {
    const bool isResponse = sp.vars[vi].kind != 2;
    if ((isResponse && responseBudget) || (!isResponse && vBudget)) {
      respSlackOf[vi] = slack++;
    }
  }
  sp.slackVars = slack - sp.structuralVars;
  const int nv = slack;

  // Objective: response coordinates carry the quadratic cost restricted to
  // their support; V and slack coordinates carry the tiny regularizer.
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nv, nv);
  M.diagonal().setConstant(kSlackReg);
  for (int t = 1; t <= L; ++t) {
    for (int kind = 0; kind <= 1; ++kind) {
      const Eigen::MatrixXd& W = kind == 0 ? problem.Q : problem.R;
      std::vector<int> rows;
      std::vector<int> vidx;
      const auto& pat = kind == 0 ? problem.Cx[t - 1] : problem.Cu[t - 1];
      for (int r : pat.columnSupport(j)) {
        rows.push_back(r);
        vidx.push_back(lookup(kind, t, r));
      }
      for (std::size_t a = 0; a < rows.size(); ++a) {
        for (std::size_t b = 0; b < rows.size(); ++b) {
          M(vidx[a], vidx[b]) += 2.0 * W(rows[a], rows[b]);
        }
      }
    }
  }

  // Equality blocks.  Row r at block t reads:
  //   t = 0:      PhiX(1)_{rj} - V(0)_{rj} = [r == j]
  //   1..L-1:     PhiX(t+1)_{rj} - (A PhiX(t))_{rj} - (B PhiU(t))_{rj} - V(t)_{rj} = 0
  //   t = L:      (A PhiX(L))_{rj} + (B PhiU(L))_{rj} + V(L)_{rj} = 0
  struct EqRow {
    std::vector<std::pair<int, double>> coeffs;
    double rhs = 0.0;
  };
  std::vector<EqRow> eqRows;
  std::set<int> usedRows;

  auto addTerm = [&](EqRow& row, int kind, int lag, int r, double coeff) {
    const int vi = lookup(kind, lag, r);
    if (vi >= 0) row.coeffs.emplace_back(vi, coeff);
  };
  auto pushRow = [&](EqRow&& row, int r) {
    if (row.coeffs.empty()) {
      if (row.rhs != 0.0) sp.infeasibleAtBuild = true;
      if (!opts.reduceRows || row.rhs != 0.0) {
        usedRows.insert(r);
        eqRows.push_back(std::move(row));
      }
      return;
    }
    usedRows.insert(r);
    eqRows.push_back(std::move(row));
  };

  auto rowIsCandidate = [&](int t, int r) {
    // Build every row when unreduced; otherwise only rows that can carry a
    // nonzero coefficient or a nonzero right-hand side.
    if (!opts.reduceRows) return true;
    if (t == 0) {
      return r == j || problem.Cx[0].contains(r, j) || problem.Cv[0].contains(r, j);
    }
    if (t < L && problem.Cx[t].contains(r, j)) return true;  // PhiX(t+1)
    if (problem.Cv[t].contains(r, j)) return true;
    for (int k : problem.Cx[t - 1].columnSupport(j)) {
      if (problem.Ahat(r, k) != 0.0) return true;
    }
    for (int k : problem.Cu[t - 1].columnSupport(j)) {
      if (problem.Bhat(r, k) != 0.0) return true;
    }
    return false;
  };

  for (int t = 0; t <= L; ++t) {
    for (int r = 0; r < n; ++r) {
      if (!rowIsCandidate(t, r)) continue;
      EqRow row;
      if (t == 0) {
        row.rhs = r == j ? 1.0 : 0.0;
        addTerm(row, 0, 1, r, 1.0);
        addTerm(row, 2, 0, r, -1.0);
      } else {
        if (t < L) addTerm(row, 0, t + 1, r, 1.0);
        const double sign = t < L ? -1.0 : 1.0;
        for (int k : problem.Cx[t - 1].columnSupport(j)) {
          if (problem.Ahat(r, k) != 0.0) {
            addTerm(row, 0, t, k, sign * problem.Ahat(r, k));
          }
        }
        for (int k : problem.Cu[t - 1].columnSupport(j)) {
          if (problem.Bhat(r, k) != 0.0) {
            addTerm(row, 1, t, k, sign * problem.Bhat(r, k));
          }
        }
        addTerm(row, 2, t, r, sign);
      }
      pushRow(std::move(row), r);
    }
  }
  sp.equalityRows = static_cast<int>(eqRows.size());
  sp.distinctEqRows = static_cast<int>(usedRows.size());

  // Inequalities: two sign rows per budgeted entry plus the budget rows.
  int numIneq = 0;
  for (int vi = 0; vi < sp.structuralVars; ++vi) {
    if (respSlackOf[vi] >= 0) numIneq += 2;
  }
  int respBudgetRow = -1, vBudgetRow = -1;
  if (responseBudget) respBudgetRow = numIneq++;
  if (vBudget) vBudgetRow = numIneq++;

  Eigen::MatrixXd H1 = Eigen::MatrixXd::Zero(numIneq, nv);
  sp.h1Base = Eigen::VectorXd::Zero(numIneq);
  sp.h1Gamma = Eigen::VectorXd::Zero(numIneq);
  int ineq = 0;
  for (int vi = 0; vi < sp.structuralVars; ++vi) {
    const int sv = respSlackOf[vi];
    if (sv < 0) continue;
    H1(ineq, vi) = 1.0;
    H1(ineq, sv) = -1.0;
    ++ineq;
    H1(ineq, vi) = -1.0;
    H1(ineq, sv) = -1.0;
    ++ineq;
    const bool isResponse = sp.vars[vi].kind != 2;
    if (isResponse && respBudgetRow >= 0) {
      H1(respBudgetRow, sv) = problem.epsBar;
    } else if (!isResponse && vBudgetRow >= 0) {
      H1(vBudgetRow, sv) = 1.0;
    }
  }
  if (respBudgetRow >= 0) {
    sp.h1Gamma(respBudgetRow) =
        problem.alpha / std::sqrt(static_cast<double>(problem.counts.kPhi));
  }
  if (vBudgetRow >= 0) {
    sp.h1Gamma(vBudgetRow) =
        (1.0 - problem.alpha) *
        std::pow(static_cast<double>(problem.counts.kV),
                 problem.vBudgetExponent);
  }

  Eigen::MatrixXd H2 = Eigen::MatrixXd::Zero(eqRows.size(), nv);
  Eigen::VectorXd h2(eqRows.size());
  for (std::size_t r = 0; r < eqRows.size(); ++r) {
    h2(static_cast<int>(r)) = eqRows[r].rhs;
    for (const auto& [vi, coeff] : eqRows[r].coeffs) {
      H2(static_cast<int>(r), vi) += coeff;
    }
  }

  sp.qp.M = std::move(M);
  sp.qp.H1 = std::move(H1);
  sp.qp.H2 = std::move(H2);
  sp.qp.h2 = std::move(h2);
  sp.qp.h1 = sp.h1Base + gamma * sp.h1Gamma;
  return sp;
}

EvalResult eval_g(const SynthesisProblem& problem, double gamma, double eta2,
                  std::vector<ColumnSubproblem>* cache) {
  const int n = problem.n();
  std::vector<ColumnSubproblem> local;
  std::vector<ColumnSubproblem>* subs = cache ? cache : &local;
  if (subs->empty()) {
    subs->reserve(n);
    for (int j = 0; j < n; ++j) {
      subs->push_back(build_subproblem(problem, j, gamma));
    }
  }

  const double gapTol = std::max(eta2 / n, 1e-10);
  EvalResult res;
  res.columns.resize(n);
  std::vector<uint8_t> feasible(n, 1);
  std::vector<uint8_t> hitCap(n, 0);

  parallel_for(
      n,
      [&](int j) {
        ColumnSolve& cs = res.columns[j];
        const ColumnSubproblem& sp = (*subs)[j];
        if (sp.infeasibleAtBuild) {
          feasible[j] = 0;
          return;
        }
        const QpSolution qs =
            solve_qp(sp.at(gamma), problem.feasTol, gapTol, problem.qpMaxIter);
        cs.status = qs.status;
        cs.x = qs.x;
        cs.gSquared = std::max(qs.objective, 0.0);
        if (qs.status == QpStatus::MaxIterations) hitCap[j] = 1;
        if (qs.status != QpStatus::Optimal) feasible[j] = 0;
      },
      problem.workers);

  res.feasible = true;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    res.feasible = res.feasible && feasible[j];
    res.maxIterColumns += hitCap[j];
    sum += res.columns[j].gSquared;
  }
  res.g = res.feasible ? std::sqrt(sum)
                       : std::numeric_limits<double>::infinity();
  return res;
}

GoldenSectionResult golden_section_minimize(
    const std::function<double(double)>& g, double eta1) {
  if (eta1 <= 0.0) throw std::invalid_argument("golden_section: eta1 <= 0");
  GoldenSectionResult res;

  const auto ratio = [&](double gv, double gamma) {
    return std::isfinite(gv) ? gv / (1.0 - gamma)
                             : std::numeric_limits<double>::infinity();
  };

  if (!std::isfinite(g(1.0))) {
    res.feasible = false;
    return res;
  }

  double a = 0.0, b = 1.0;
  double c = 1.0 - kGoldenRatioStep;
  double d = kGoldenRatioStep;
  while (std::abs(b - a) > eta1) {
    const double gc = g(c);
    const double gd = g(d);
    res.trace.push_back({a, b, c, d, gc, gd});
    if (ratio(gc, c) < ratio(gd, d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - kGoldenRatioStep * (b - a);
    d = a + kGoldenRatioStep * (b - a);
    ++res.iterations;
  }

  res.gammaBar = 0.5 * (a + b);
  res.g = g(res.gammaBar);
  res.feasible = std::isfinite(res.g);
  return res;
}

namespace {

SynthesisSolution assemble(const SynthesisProblem& problem,
                           const GoldenSectionResult& gs,
                           const EvalResult& finalEval,
                           const std::vector<ColumnSubproblem>& subs,
                           int maxIterColumns) {
  SynthesisSolution sol;
  sol.gammaIterations = gs.iterations;
  sol.trace = gs.trace;
  sol.maxIterColumns = maxIterColumns;
  if (!gs.feasible) {
    sol.status = SynthesisStatus::Infeasible;
    return sol;
  }
  const int n = problem.n();
  const int m = problem.m();
  const int L = problem.L;
  sol.status = SynthesisStatus::Feasible;
  sol.gammaBar = gs.gammaBar;
  sol.g = gs.g;
  sol.scaledObjective = gs.g / (1.0 - gs.gammaBar);
  sol.epsBarUsed = problem.epsBar;
  sol.kPhi = problem.counts.kPhi;
  sol.kV = problem.counts.kV;

  std::vector<Eigen::MatrixXd> px(L, Eigen::MatrixXd::Zero(n, n));
  std::vector<Eigen::MatrixXd> pu(L, Eigen::MatrixXd::Zero(m, n));
  std::vector<Eigen::MatrixXd> pv(L + 1, Eigen::MatrixXd::Zero(n, n));
  sol.perColumnObjectives.resize(n, 0.0);
  for (int j = 0; j < n; ++j) {
    const ColumnSolve& cs = finalEval.columns[j];
    sol.perColumnObjectives[j] = std::sqrt(std::max(cs.gSquared, 0.0));
    const ColumnSubproblem& sp = subs[j];
    for (int vi = 0; vi < sp.structuralVars; ++vi) {
      const auto& ref = sp.vars[vi];
      const double val = cs.x(vi);
      if (ref.kind == 0) {
        px[ref.lag - 1](ref.row, j) = val;
      } else if (ref.kind == 1) {
        pu[ref.lag - 1](ref.row, j) = val;
      } else {
        pv[ref.lag](ref.row, j) = val;
      }
    }
  }
  sol.phiX = FirResponse(1, std::move(px));
  sol.phiU = FirResponse(1, std::move(pu));
  sol.v = FirResponse(0, std::move(pv));

  const Eigen::VectorXd respSum =
      column_l1_budget(sol.phiX) + column_l1_budget(sol.phiU);
  sol.maxResponseColumnSum = respSum.maxCoeff();
  sol.maxVColumnSum = column_l1_budget(sol.v).maxCoeff();
  return sol;
}

}  // namespace

SynthesisSolution golden_section_synthesize(const SynthesisProblem& problem) {
  problem.validate();
  const double eta2 = std::min(problem.eta2, problem.eta1 * problem.eta1);

  std::vector<ColumnSubproblem> cache;
  std::map<double, EvalResult> evals;
  int maxIterColumns = 0;
  const auto gFun = [&](double gamma) {
    auto it = evals.find(gamma);
    if (it == evals.end()) {
      it = evals.emplace(gamma, eval_g(problem, gamma, eta2, &cache)).first;
      maxIterColumns += it->second.maxIterColumns;
    }
    return it->second.g;
  };

  const GoldenSectionResult gs = golden_section_minimize(gFun, problem.eta1);
  if (!gs.feasible) {
    SynthesisSolution sol;
    sol.status = SynthesisStatus::Infeasible;
    sol.gammaIterations = gs.iterations;
    sol.trace = gs.trace;
    sol.maxIterColumns = maxIterColumns;
    return sol;
  }
  return assemble(problem, gs, evals.at(gs.gammaBar), cache, maxIterColumns);
}

SynthesisSolution nominal_distributed_synthesize(
    const SynthesisProblem& problem) {
  SynthesisProblem nominal = problem;
  nominal.epsBar = 0.0;
  return golden_section_synthesize(nominal);
}

FullQpResult solve_full_qp(const SynthesisProblem& problem, double gamma,
                           const SubproblemOptions& opts) {
  problem.validate();
  const int n = problem.n();
  std::vector<ColumnSubproblem> subs;
  subs.reserve(n);
  int vars = 0, ineq = 0, eq = 0;
  for (int j = 0; j < n; ++j) {
    subs.push_back(build_subproblem(problem, j, gamma, opts));
    vars += subs.back().totalVars();
    ineq += static_cast<int>(subs.back().qp.H1.rows());
    eq += static_cast<int>(subs.back().qp.H2.rows());
  }

  QpProblem full;
  full.M = Eigen::MatrixXd::Zero(vars, vars);
  full.H1 = Eigen::MatrixXd::Zero(ineq, vars);
  full.h1 = Eigen::VectorXd::Zero(ineq);
  full.H2 = Eigen::MatrixXd::Zero(eq, vars);
  full.h2 = Eigen::VectorXd::Zero(eq);
  int vo = 0, io = 0, eo = 0;
  for (const auto& sp : subs) {
    if (sp.infeasibleAtBuild) return {};
    const int nv = sp.totalVars();
    const QpProblem q = sp.at(gamma);
    full.M.block(vo, vo, nv, nv) = q.M;
    full.H1.block(io, vo, q.H1.rows(), nv) = q.H1;
    full.h1.segment(io, q.h1.size()) = q.h1;
    full.H2.block(eo, vo, q.H2.rows(), nv) = q.H2;
    full.h2.segment(eo, q.h2.size()) = q.h2;
    vo += nv;
    io += static_cast<int>(q.H1.rows());
    eo += static_cast<int>(q.H2.rows());
  }

  const double gapTol = std::max(
      std::min(problem.eta2, problem.eta1 * problem.eta1) / n, 1e-10);
  const QpSolution qs =
      solve_qp(full, problem.feasTol, gapTol, problem.qpMaxIter);
  FullQpResult res;
  if (qs.status == QpStatus::Optimal) {
    res.feasible = true;
    res.g = std::sqrt(std::max(qs.objective, 0.0));
  }
  return res;
}

SolutionCheck validate_solution(const SynthesisProblem& problem,
                                const SynthesisSolution& sol) {
  if (sol.status != SynthesisStatus::Feasible) {
    throw std::invalid_argument("validate_solution: solution not feasible");
  }
  const int n = problem.n();
  const int L = problem.L;
  SolutionCheck check;

  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  double resid = (sol.phiX.tap(1) - I - sol.v.tap(0)).cwiseAbs().maxCoeff();
  for (int t = 1; t < L; ++t) {
    const Eigen::MatrixXd r = sol.phiX.tap(t + 1) - problem.Ahat * sol.phiX.tap(t) -
                              problem.Bhat * sol.phiU.tap(t) - sol.v.tap(t);
    resid = std::max(resid, r.cwiseAbs().maxCoeff());
  }
  const Eigen::MatrixXd rL = problem.Ahat * sol.phiX.tap(L) +
                             problem.Bhat * sol.phiU.tap(L) + sol.v.tap(L);
  resid = std::max(resid, rL.cwiseAbs().maxCoeff());
  check.maxAchievabilityResidual = resid;

  const Eigen::VectorXd respSum =
      column_l1_budget(sol.phiX) + column_l1_budget(sol.phiU);
  const Eigen::VectorXd vSum = column_l1_budget(sol.v);
  const double respRhs = problem.alpha * sol.gammaBar /
                         std::sqrt(static_cast<double>(problem.counts.kPhi));
  const double vRhs = (1.0 - problem.alpha) * sol.gammaBar *
                      std::pow(static_cast<double>(problem.counts.kV),
                               problem.vBudgetExponent);
  check.maxResponseBudgetViolation =
      std::max(0.0, (problem.epsBar * respSum).maxCoeff() - respRhs);
  check.maxVBudgetViolation = std::max(0.0, vSum.maxCoeff() - vRhs);

  check.supportsRespected =
      sol.phiX.supportsContainedIn(problem.Cx) &&
      sol.phiU.supportsContainedIn(problem.Cu) &&
      sol.v.supportsContainedIn(problem.Cv);

  double sum = 0.0;
  for (double gj : sol.perColumnObjectives) sum += gj * gj;
  check.gConsistency = std::abs(sol.g - std::sqrt(sum));
  return check;
}

}  // namespace sls
