#include "sls/qp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sls {

namespace {

constexpr double kPrimalReg = 1e-10;  // Newton-matrix regularization only;
constexpr double kDualReg = 1e-10;    // residual checks use the exact KKT.

struct SparseRow {
  std::vector<int> idx;
  std::vector<double> val;
};

std::vector<SparseRow> toSparseRows(const Eigen::MatrixXd& H) {
  std::vector<SparseRow> rows(H.rows());
  for (int r = 0; r < H.rows(); ++r) {
    for (int c = 0; c < H.cols(); ++c) {
      if (H(r, c) != 0.0) {
        rows[r].idx.push_back(c);
        rows[r].val.push_back(H(r, c));
      }
    }
  }
  return rows;
}

void validate(const QpProblem& p) {
  const int d = p.dim();
  if (p.M.cols() != d) throw std::invalid_argument("solve_qp: M not square");
  if (p.H1.rows() != p.h1.size() || (p.H1.rows() > 0 && p.H1.cols() != d)) {
    throw std::invalid_argument("solve_qp: inequality dimensions inconsistent");
  }
  if (p.H2.rows() != p.h2.size() || (p.H2.rows() > 0 && p.H2.cols() != d)) {
    throw std::invalid_argument("solve_qp: equality dimensions inconsistent");
  }
  const double asym = (p.M - p.M.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) {
    throw std::invalid_argument("solve_qp: M not symmetric");
  }
  // Sylvester check through LDL'; cheaper than an eigensolve and exact enough
  // for the -1e-8 gate.
  Eigen::LDLT<Eigen::MatrixXd> ldlt(p.M);
  if (ldlt.info() == Eigen::Success) {
    const double minD = ldlt.vectorD().minCoeff();
    if (minD < -1e-8 * std::max(1.0, p.M.cwiseAbs().maxCoeff())) {
      throw std::invalid_argument("solve_qp: M is not positive semidefinite");
    }
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.M,
                                                      Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8) {
      throw std::invalid_argument("solve_qp: M is not positive semidefinite");
    }
  }
}

double maxViolation(const QpProblem& p, const Eigen::VectorXd& x) {
  double v = 0.0;
  if (p.H2.rows() > 0) v = (p.H2 * x - p.h2).cwiseAbs().maxCoeff();
  if (p.H1.rows() > 0) {
    v = std::max(v, (p.H1 * x - p.h1).maxCoeff());
  }
  return std::max(v, 0.0);
}

}  // namespace

QpSolution solve_qp(const QpProblem& p, double feasTol, double gapTol,
                    int maxIter) {
  validate(p);
  const int d = p.dim();
  QpSolution sol;

  // Drop equality rows that are identically zero; an inconsistent zero row is
  // an infeasibility certificate in itself.
  std::vector<int> eqKeep;
  for (int r = 0; r < p.H2.rows(); ++r) {
    if (p.H2.row(r).cwiseAbs().maxCoeff() == 0.0) {
      if (std::abs(p.h2(r)) > 1e-12) {
        sol.status = QpStatus::Infeasible;
        sol.x = Eigen::VectorXd::Zero(d);
        sol.primalResidual = std::abs(p.h2(r));
        return sol;
      }
    } else {
      eqKeep.push_back(r);
    }
  }
  Eigen::MatrixXd H2(eqKeep.size(), d);
  Eigen::VectorXd h2(eqKeep.size());
  for (std::size_t i = 0; i < eqKeep.size(); ++i) {
    H2.row(i) = p.H2.row(eqKeep[i]);
    h2(i) = p.h2(eqKeep[i]);
  }
  const int mE = static_cast<int>(H2.rows());
  const int mI = static_cast<int>(p.H1.rows());

  if (mI == 0 && mE == 0) {
    sol.x = Eigen::VectorXd::Zero(d);
    sol.objective = 0.0;
    sol.status = QpStatus::Optimal;
    return sol;
  }

  const auto h1rows = toSparseRows(p.H1);

  // Newton matrix K = [M + H1' W H1 + dp I, H2'; H2, -dd I], assembled with
  // the sparse inequality rows.
  const int kn = d + mE;
  Eigen::MatrixXd K(kn, kn);
  Eigen::VectorXd rhs(kn), sol_vec(kn);

  auto assembleK = [&](const Eigen::VectorXd& w) {
    K.setZero();
    K.topLeftCorner(d, d) = p.M;
    K.topLeftCorner(d, d).diagonal().array() += kPrimalReg;
    for (int r = 0; r < mI; ++r) {
      const auto& row = h1rows[r];
      const double wr = w(r);
      for (std::size_t a = 0; a < row.idx.size(); ++a) {
        for (std::size_t b = 0; b < row.idx.size(); ++b) {
          K(row.idx[a], row.idx[b]) += wr * row.val[a] * row.val[b];
        }
      }
    }
    if (mE > 0) {
      K.topRightCorner(d, mE) = H2.transpose();
      K.bottomLeftCorner(mE, d) = H2;
      K.bottomRightCorner(mE, mE) =
          -kDualReg * Eigen::MatrixXd::Identity(mE, mE);
    }
  };

  // Pure equality case: one KKT solve.
  if (mI == 0) {
    assembleK(Eigen::VectorXd::Zero(0));
    rhs.head(d).setZero();
    rhs.tail(mE) = h2;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
    sol_vec = lu.solve(rhs);
    sol.x = sol_vec.head(d);
    sol.objective = 0.5 * sol.x.dot(p.M * sol.x);
    sol.primalResidual = maxViolation(p, sol.x);
    const Eigen::VectorXd y = sol_vec.tail(mE);
    sol.dualResidual = (p.M * sol.x + H2.transpose() * y).cwiseAbs().maxCoeff();
    sol.status = sol.primalResidual <= std::max(feasTol, 1e-6)
                     ? QpStatus::Optimal
                     : QpStatus::Infeasible;
    sol.iterations = 1;
    return sol;
  }

  // Starting point: rough equality-consistent x, unit slacks/multipliers
  // pushed into the cone.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(mE);
  if (mE > 0) {
    Eigen::MatrixXd K0(kn, kn);
    K0.setZero();
    K0.topLeftCorner(d, d) = p.M;
    K0.topLeftCorner(d, d).diagonal().array() += 1.0;
    K0.topRightCorner(d, mE) = H2.transpose();
    K0.bottomLeftCorner(mE, d) = H2;
    K0.bottomRightCorner(mE, mE) =
        -kDualReg * Eigen::MatrixXd::Identity(mE, mE);
    rhs.head(d).setZero();
    rhs.tail(mE) = h2;
    sol_vec = Eigen::PartialPivLU<Eigen::MatrixXd>(K0).solve(rhs);
    x = sol_vec.head(d);
  }
  Eigen::VectorXd s = (p.h1 - p.H1 * x).cwiseMax(1.0);
  Eigen::VectorXd z = Eigen::VectorXd::Ones(mI);

  Eigen::VectorXd rd(d), rp1(mI), rp2(mE), w(mI), rc(mI);
  Eigen::VectorXd dx(d), ds(mI), dz(mI), dy(mE);
  Eigen::VectorXd dx_aff(d), ds_aff(mI), dz_aff(mI);

  double bestViol = std::numeric_limits<double>::infinity();
  Eigen::VectorXd bestX = x;
  double stallRef = std::numeric_limits<double>::infinity();
  int stallIter = 0;

  const double hScale = 1.0 + std::max(p.h1.cwiseAbs().maxCoeff(),
                                       mE > 0 ? h2.cwiseAbs().maxCoeff() : 0.0);

  for (int iter = 0; iter < maxIter; ++iter) {
    rd = p.M * x + p.H1.transpose() * z;
    if (mE > 0) rd += H2.transpose() * y;
    rp1 = p.H1 * x + s - p.h1;
    rp2 = mE > 0 ? (H2 * x - h2).eval() : Eigen::VectorXd();
    const double mu = s.dot(z) / mI;

    const double viol = maxViolation(p, x);
    const double dualScale = 1.0 + std::max(z.cwiseAbs().maxCoeff(),
                                            mE > 0 ? y.cwiseAbs().maxCoeff() : 0.0);
    const double dualRes = rd.cwiseAbs().maxCoeff();
    const double gap = std::abs(s.dot(z));
    const double obj = 0.5 * x.dot(p.M * x);

    if (viol < bestViol) {
      bestViol = viol;
      bestX = x;
    }

    sol.iterations = iter;
    if (viol <= feasTol && dualRes <= gapTol * dualScale &&
        gap <= gapTol * (1.0 + std::abs(obj))) {
      sol.x = x;
      sol.objective = obj;
      sol.status = QpStatus::Optimal;
      sol.primalResidual = viol;
      sol.dualResidual = dualRes;
      sol.dualityGap = gap;
      sol.z = z;
      sol.s = s;
      return sol;
    }

    // Infeasibility: primal violation stalls well above tolerance while the
    // dual iterates diverge or complementarity has collapsed.
    const double infeasGate = 1e3 * feasTol * hScale;
    if (viol > infeasGate) {
      if (dualScale > 1e8 || mu < 1e-10 * (1.0 + viol)) {
        sol.x = x;
        sol.objective = obj;
        sol.status = QpStatus::Infeasible;
        sol.primalResidual = viol;
        sol.dualResidual = dualRes;
        sol.dualityGap = gap;
        return sol;
      }
      if (viol > 0.99 * stallRef) {
        if (++stallIter >= 20) {
          sol.x = x;
          sol.objective = obj;
          sol.status = QpStatus::Infeasible;
          sol.primalResidual = viol;
          sol.dualityGap = gap;
          return sol;
        }
      } else {
        stallIter = 0;
        stallRef = viol;
      }
    }

    w = z.cwiseQuotient(s);
    assembleK(w);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);

    auto newtonSolve = [&](const Eigen::VectorXd& rcVec) {
      rhs.head(d) = -rd + p.H1.transpose() *
                              (rcVec.cwiseQuotient(s) - w.cwiseProduct(rp1));
      if (mE > 0) rhs.tail(mE) = -rp2;
      sol_vec = lu.solve(rhs);
      dx = sol_vec.head(d);
      if (mE > 0) dy = sol_vec.tail(mE);
      ds = -rp1 - p.H1 * dx;
      dz = -(rcVec + z.cwiseProduct(ds)).cwiseQuotient(s);
    };

    auto stepLimit = [](const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
      double a = 1.0;
      for (int i = 0; i < v.size(); ++i) {
        if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
      }
      return a;
    };

    // Predictor.
    rc = s.cwiseProduct(z);
    newtonSolve(rc);
    dx_aff = dx;
    ds_aff = ds;
    dz_aff = dz;
    const double apAff = stepLimit(s, ds_aff);
    const double adAff = stepLimit(z, dz_aff);
    const double muAff =
        (s + apAff * ds_aff).dot(z + adAff * dz_aff) / mI;
    double sigma = std::pow(muAff / std::max(mu, 1e-300), 3.0);
    sigma = std::clamp(sigma, 0.0, 1.0);

    // Corrector.
    rc = s.cwiseProduct(z) + ds_aff.cwiseProduct(dz_aff) -
         Eigen::VectorXd::Constant(mI, sigma * mu);
    newtonSolve(rc);

    const double tau = mu < 1e-4 ? 0.9995 : 0.995;
    const double ap = std::min(1.0, tau * stepLimit(s, ds));
    const double ad = std::min(1.0, tau * stepLimit(z, dz));

    x += ap * dx;
    s += ap * ds;
    z += ad * dz;
    if (mE > 0) y += ad * dy;
  }

  sol.x = bestX;
  sol.objective = 0.5 * bestX.dot(p.M * bestX);
  sol.status = QpStatus::MaxIterations;
  sol.primalResidual = bestViol;
  sol.iterations = maxIter;
  return sol;
}

EqQpResult solve_strictly_convex_eq_qp(const Eigen::MatrixXd& M,
                                       const Eigen::MatrixXd& H,
                                       const Eigen::VectorXd& h) {
  const int d = static_cast<int>(M.rows());
  if (M.cols() != d) {
    throw std::invalid_argument("solve_strictly_convex_eq_qp: M not square");
  }
  if (H.cols() != d || H.rows() != h.size()) {
    throw std::invalid_argument(
        "solve_strictly_convex_eq_qp: dimension mismatch");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument(
        "solve_strictly_convex_eq_qp: M must be positive definite");
  }

  EqQpResult res;
  if (H.rows() == 0) {
    res.x = Eigen::VectorXd::Zero(d);
    return res;
  }

  // Rank-revealing QR of H' picks an independent row subset deterministically.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(H.transpose());
  qr.setThreshold(1e-12);
  const int rank = static_cast<int>(qr.rank());
  std::vector<int> keep;
  keep.reserve(rank);
  const auto& perm = qr.colsPermutation().indices();
  for (int i = 0; i < rank; ++i) keep.push_back(perm(i));
  std::sort(keep.begin(), keep.end());

  Eigen::MatrixXd Hr(rank, d);
  Eigen::VectorXd hr(rank);
  for (int i = 0; i < rank; ++i) {
    Hr.row(i) = H.row(keep[i]);
    hr(i) = h(keep[i]);
  }
  for (int r = 0; r < H.rows(); ++r) {
    if (!std::binary_search(keep.begin(), keep.end(), r)) {
      res.droppedRows.push_back(r);
    }
  }

  // KKT closed form: x = M^{-1} H' (H M^{-1} H')^{-1} h.
  const Eigen::MatrixXd MinvHt = llt.solve(Hr.transpose());
  const Eigen::MatrixXd S = Hr * MinvHt;
  const Eigen::VectorXd nu = Eigen::PartialPivLU<Eigen::MatrixXd>(S).solve(hr);
  res.x = MinvHt * nu;

  const double resid = (H * res.x - h).cwiseAbs().maxCoeff();
  res.consistent = resid <= 1e-8 * (1.0 + h.cwiseAbs().maxCoeff());
  return res;
}

}  // namespace sls
