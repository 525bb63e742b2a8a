#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "sls/plant.hpp"
#include "sls/rng.hpp"

using namespace sls;

namespace {

Eigen::MatrixXd randomStable(int n, double targetRho, CounterRng& rng) {
  Eigen::MatrixXd F(n, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) F(r, c) = rng.nextNormal();
  return F * (targetRho / spectral_radius(F));
}

}  // namespace

TEST_CASE("make_chain reproduces the displayed matrices") {
  const PlantModel p = make_chain(3, 0.2, 0.0, 1.0);
  Eigen::MatrixXd want(3, 3);
  want << 0.8, 0.2, 0.0, 0.2, 0.6, 0.2, 0.0, 0.2, 0.8;
  CHECK((p.A - want).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK(p.B.isIdentity(0.0));
  CHECK(p.Q.isIdentity(0.0));

  // Marginally unstable 8-node configuration: interior row sums 1.05.
  Eigen::VectorXd a = Eigen::VectorXd::Constant(8, 1.0 / 3.0);
  Eigen::VectorXd D = Eigen::VectorXd::Constant(8, 0.05);
  D(0) = D(7) = 0.05 - 1.0 / 3.0;
  const PlantModel q = make_chain(8, a, D, std::vector<bool>(8, true), 1.0);
  for (int i = 1; i < 7; ++i) {
    CHECK(q.A.row(i).sum() == doctest::Approx(1.05));
  }
  CHECK(spectral_radius(q.A) > 1.0);

  // Scaled large chain is strictly stable.
  const PlantModel r = make_chain(40, 0.2, 0.0, 0.99);
  CHECK(spectral_radius(r.A) < 1.0);

  CHECK_THROWS_AS(make_chain(1, 0.2, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("simulate: zero noise and determinism") {
  PlantModel p = make_chain(4, 0.2, 0.0, 1.0);
  p.sigmaW = 0.0;
  p.sigmaV = 0.0;
  const Trajectory t = simulate(p, 20, 7, false);
  for (const auto& x : t.states) CHECK(x.cwiseAbs().maxCoeff() == 0.0);
  for (const auto& u : t.inputs) CHECK(u.cwiseAbs().maxCoeff() == 0.0);

  PlantModel q = make_chain(4, 0.2, 0.0, 0.95);
  const Trajectory t1 = simulate(q, 50, 99, true);
  const Trajectory t2 = simulate(q, 50, 99, true);
  for (int k = 0; k <= 50; ++k) {
    CHECK((t1.states[k] - t2.states[k]).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("dlyap: closed forms and series oracle") {
  // F = 0 -> P = W.
  const Eigen::MatrixXd W = Eigen::MatrixXd::Identity(3, 3) * 2.0;
  CHECK(dlyap(Eigen::MatrixXd::Zero(3, 3), W).isApprox(W));

  // Scalar 0.25 P - P + 1 = 0 -> P = 4/3.
  Eigen::MatrixXd F(1, 1), Ws(1, 1);
  F << 0.5;
  Ws << 1.0;
  CHECK(std::abs(dlyap(F, Ws)(0, 0) - 4.0 / 3.0) <= 1e-9);

  CounterRng rng(3);
  const Eigen::MatrixXd F4 = randomStable(4, 0.8, rng);
  Eigen::MatrixXd W4(4, 4);
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < 4; ++r) W4(r, c) = rng.nextNormal();
  W4 = (W4 * W4.transpose()).eval();

  Eigen::MatrixXd series = Eigen::MatrixXd::Zero(4, 4);
  Eigen::MatrixXd Fp = Eigen::MatrixXd::Identity(4, 4);
  for (int k = 0; k < 500; ++k) {
    series += Fp * W4 * Fp.transpose();
    Fp = (F4 * Fp).eval();
  }
  CHECK((dlyap(F4, W4) - series).cwiseAbs().maxCoeff() <= 1e-8);

  Eigen::MatrixXd unstable(1, 1);
  unstable << 1.0;
  CHECK_THROWS_AS(dlyap(unstable, Ws), std::invalid_argument);
}

TEST_CASE("dlyap residual bound over random stable instances") {
  CounterRng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + rng.nextInt(5);
    const double rho = 0.95 * rng.nextUniform();
    const Eigen::MatrixXd F = randomStable(n, std::max(rho, 0.05), rng);
    Eigen::MatrixXd W(n, n);
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r) W(r, c) = rng.nextNormal();
    W = (W * W.transpose()).eval();

    const Eigen::MatrixXd P = dlyap(F, W);
    CHECK((P - P.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
    CHECK(es.eigenvalues().minCoeff() >= -1e-9);
    const double resid = (F * P * F.transpose() - P + W).norm();
    CHECK(resid <= 1e-9 * (1.0 + W.norm()));
  }
}

TEST_CASE("dare_gain: scalar golden ratio and trivial cases") {
  PlantModel p;
  p.A = Eigen::MatrixXd::Ones(1, 1);
  p.B = Eigen::MatrixXd::Ones(1, 1);
  p.Q = Eigen::MatrixXd::Ones(1, 1);
  p.R = Eigen::MatrixXd::Ones(1, 1);
  const DareResult r = dare_gain(p);
  CHECK(std::abs(r.P(0, 0) - (1.0 + std::sqrt(5.0)) / 2.0) <= 1e-9);
  CHECK(spectral_radius(p.A + p.B * r.K) < 1.0);

  PlantModel z = p;
  z.A.setZero();
  const DareResult rz = dare_gain(z);
  CHECK(rz.P.isApprox(z.Q));
  CHECK(rz.K.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("dare_gain residual on a random stable plant") {
  CounterRng rng(41);
  PlantModel p;
  p.A = randomStable(4, 0.9, rng);
  p.B = Eigen::MatrixXd::Identity(4, 2).eval();
  p.Q = Eigen::MatrixXd::Identity(4, 4);
  p.R = Eigen::MatrixXd::Identity(2, 2);
  const DareResult r = dare_gain(p);
  CHECK(r.residual <= 1e-9);
  CHECK(spectral_radius(p.A + p.B * r.K) < 1.0);
}

TEST_CASE("stationary covariance block structure") {
  PlantModel p = make_chain(3, 0.2, 0.0, 0.9);
  p.sigmaW = 1.0;
  p.sigmaV = 0.5;
  // K0 = 0: M* = blockdiag(P, sigmaV^2 I).
  const Eigen::MatrixXd M = stationary_cov(p);
  const Eigen::MatrixXd P = stationary_state_cov(p);
  CHECK(M.topLeftCorner(3, 3).isApprox(P));
  CHECK(M.topRightCorner(3, 3).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK(M.bottomRightCorner(3, 3).isApprox(0.25 *
                                           Eigen::MatrixXd::Identity(3, 3)));

  PlantModel q = p;
  q.A.setZero();
  q.sigmaV = 0.0;
  q.sigmaW = 1.3;
  CHECK(stationary_state_cov(q).isApprox(1.69 *
                                         Eigen::MatrixXd::Identity(3, 3)));
}

TEST_CASE("stationary covariance matches a long simulation") {
  PlantModel p = make_chain(3, 0.2, 0.0, 0.9);
  p.sigmaW = 1.0;
  p.sigmaV = 0.7;
  const Eigen::MatrixXd M = stationary_cov(p);

  const int T = 100000;
  const Trajectory t = simulate(p, T, 2024, true);
  Eigen::MatrixXd emp = Eigen::MatrixXd::Zero(6, 6);
  for (int k = 0; k < T; ++k) {
    Eigen::VectorXd zu(6);
    zu << t.states[k], t.inputs[k];
    emp += zu * zu.transpose();
  }
  emp /= T;
  CHECK((emp - M).norm() <= 0.05 * M.norm());
}

TEST_CASE("simulate initFromStationary centers at zero") {
  PlantModel p = make_chain(3, 0.2, 0.0, 0.9);
  const Eigen::MatrixXd P = stationary_state_cov(p);
  const int reps = 10000;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
  for (int s = 0; s < reps; ++s) {
    mean += simulate(p, 0, 1000 + s, true).states[0];
  }
  mean /= reps;
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(mean(i)) <= 5.0 * std::sqrt(P(i, i)) / 100.0);
  }
}

TEST_CASE("assumption1 diagnostics") {
  // M* = I: no incoherence, perfectly conditioned.
  const int n = 3, m = 1;
  Eigen::MatrixXd Psi = Eigen::MatrixXd::Zero(n + m, n);
  Psi(0, 0) = 0.9;
  Psi(1, 1) = -0.2;
  Psi(3, 2) = 0.5;
  std::vector<SparsityPattern::Entry> e{{0, 0}, {1, 1}, {3, 2}};
  const SparsityPattern supp(n + m, n, e);
  const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n + m, n + m);

  const Assumption1Report rep = assumption1_diagnostics(M, Psi, supp);
  CHECK(rep.incoherenceMargin == doctest::Approx(1.0));
  CHECK(rep.cMin == doctest::Approx(1.0));
  CHECK(rep.dMax == doctest::Approx(1.0));
  CHECK(rep.psiMin == doctest::Approx(0.2));
  CHECK_FALSE(rep.singularBlock);
}

TEST_CASE("assumption1 diagnostics agree with direct per-column evaluation") {
  PlantModel p = make_chain(8, 0.2, 0.0, 0.95);
  p.sigmaV = 0.6;
  const Eigen::MatrixXd M = stationary_cov(p);
  Eigen::MatrixXd Psi(16, 8);
  Psi << p.A.transpose(), p.B.transpose();
  const SparsityPattern supp =
      pattern_hcat(p.suppA(), p.suppB()).transpose();

  const Assumption1Report rep = assumption1_diagnostics(M, Psi, supp);

  // Brute force per column.
  double worst = 0.0, cMin = 1e300, dMax = 0.0, psiMin = 1e300;
  for (int j = 0; j < 8; ++j) {
    const std::vector<int> Aj = supp.columnSupport(j);
    Eigen::MatrixXd Maa(Aj.size(), Aj.size());
    for (std::size_t a = 0; a < Aj.size(); ++a)
      for (std::size_t b = 0; b < Aj.size(); ++b)
        Maa(a, b) = M(Aj[a], Aj[b]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Maa);
    cMin = std::min(cMin, es.eigenvalues().minCoeff());
    const Eigen::MatrixXd Minv = Maa.inverse();
    dMax = std::max(dMax, Minv.cwiseAbs().maxCoeff());
    for (int row : Aj) psiMin = std::min(psiMin, std::abs(Psi(row, j)));
    for (int i = 0; i < 16; ++i) {
      if (std::binary_search(Aj.begin(), Aj.end(), i)) continue;
      Eigen::RowVectorXd mia(Aj.size());
      for (std::size_t a = 0; a < Aj.size(); ++a) mia(a) = M(i, Aj[a]);
      worst = std::max(worst, (mia * Minv).cwiseAbs().sum());
    }
  }
  CHECK(rep.incoherenceMargin == doctest::Approx(1.0 - worst));
  CHECK(rep.cMin == doctest::Approx(cMin));
  CHECK(rep.dMax == doctest::Approx(dMax));
  CHECK(rep.psiMin == doctest::Approx(psiMin));
}
