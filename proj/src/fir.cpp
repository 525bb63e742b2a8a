#include "sls/fir.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace sls {

FirResponse::FirResponse(int startLag, std::vector<Eigen::MatrixXd> taps)
    : start_lag_(startLag), taps_(std::move(taps)) {
  if (start_lag_ < 0) {
    throw std::invalid_argument("FirResponse: startLag must be >= 0");
  }
  if (taps_.empty()) {
    throw std::invalid_argument("FirResponse: needs at least one tap");
  }
  for (const auto& m : taps_) {
    if (m.rows() != taps_[0].rows() || m.cols() != taps_[0].cols()) {
      throw std::invalid_argument("FirResponse: taps must share dimensions");
    }
  }
}

const Eigen::MatrixXd& FirResponse::tap(int t) const {
  if (t < start_lag_ || t > length()) {
    throw std::out_of_range("FirResponse::tap: lag out of range");
  }
  return taps_[t - start_lag_];
}

SparsityPattern FirResponse::unionSupport(double tol) const {
  std::vector<SparsityPattern::Entry> entries;
  for (const auto& m : taps_) {
    for (int c = 0; c < m.cols(); ++c)
      for (int r = 0; r < m.rows(); ++r)
        if (std::abs(m(r, c)) > tol) entries.emplace_back(r, c);
  }
  return SparsityPattern(rows(), cols(), std::move(entries));
}

bool FirResponse::supportsContainedIn(
    const std::vector<SparsityPattern>& patterns, double tol) const {
  if (patterns.size() != taps_.size()) return false;
  for (std::size_t i = 0; i < taps_.size(); ++i) {
    const auto& m = taps_[i];
    for (int c = 0; c < m.cols(); ++c)
      for (int r = 0; r < m.rows(); ++r)
        if (std::abs(m(r, c)) > tol && !patterns[i].contains(r, c))
          return false;
  }
  return true;
}

Eigen::VectorXd column_l1_budget(const FirResponse& fir) {
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(fir.cols());
  for (const auto& m : fir.taps()) {
    sums += m.cwiseAbs().colwise().sum().transpose();
  }
  return sums;
}

double e1_norm_bound(const FirResponse& fir) {
  double total = 0.0;
  for (const auto& m : fir.taps()) {
    total += m.cwiseAbs().colwise().sum().maxCoeff();
  }
  return total;
}

double hinf_bound(const FirResponse& fir, int rowNnzMax) {
  if (rowNnzMax < 0) {
    throw std::invalid_argument("hinf_bound: rowNnzMax must be >= 0");
  }
  return std::sqrt(static_cast<double>(rowNnzMax)) * e1_norm_bound(fir);
}

double hinf_grid_estimate(const FirResponse& fir, int gridPoints) {
  // Lower estimate only: samples the unit circle, never exceeds the true norm.
  double best = 0.0;
  for (int g = 0; g < gridPoints; ++g) {
    const double w = 2.0 * M_PI * g / gridPoints;
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(fir.rows(), fir.cols());
    for (int t = fir.startLag(); t <= fir.length(); ++t) {
      sum += fir.tap(t) * std::exp(std::complex<double>(0.0, -w * t));
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sum);
    best = std::max(best, svd.singularValues()(0));
  }
  return best;
}

namespace {

int maxRowColNnz(const SparsityPattern& p) {
  return std::max(p.maxRowNnz(), p.maxColNnz());
}

SparsityPattern unionOverLags(const std::vector<SparsityPattern>& patterns) {
  SparsityPattern u = patterns.front();
  for (std::size_t i = 1; i < patterns.size(); ++i) {
    u = pattern_union(u, patterns[i]);
  }
  return u;
}

}  // namespace

StructureCounts structure_counts(
    const SparsityPattern& suppAB,
    const std::vector<SparsityPattern>& responsePatterns,
    const std::vector<SparsityPattern>& vPatterns) {
  if (responsePatterns.empty() || vPatterns.empty()) {
    throw std::invalid_argument("structure_counts: empty pattern list");
  }
  const int n = suppAB.rows();
  for (const auto& p : responsePatterns) {
    if (p.cols() != n) {
      throw std::invalid_argument(
          "structure_counts: response pattern shape mismatch");
    }
  }
  for (const auto& p : vPatterns) {
    if (p.rows() != n || p.cols() != n) {
      throw std::invalid_argument("structure_counts: V pattern shape mismatch");
    }
  }

  StructureCounts out;
  const int kAB = maxRowColNnz(suppAB);
  out.kPhi = maxRowColNnz(unionOverLags(responsePatterns));
  out.kV = maxRowColNnz(unionOverLags(vPatterns));
  out.k = std::max(kAB, out.kPhi);
  out.kFromResponses = out.kPhi > kAB;
  if (out.kV > 2 * out.k * out.k) {
    throw std::logic_error("structure_counts: k_v exceeds 2 k^2");
  }
  return out;
}

}  // namespace sls
