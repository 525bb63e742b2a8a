#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "sls/pattern.hpp"

namespace sls {

// Finite sequence of spectral components M(t), t = startLag..length, of a
// transfer matrix restricted to FIR length L.  State responses use
// startLag = 1, truncation slacks use startLag = 0.  Immutable after
// construction.
class FirResponse {
 public:
  FirResponse() = default;
  FirResponse(int startLag, std::vector<Eigen::MatrixXd> taps);

  int startLag() const { return start_lag_; }
  int length() const { return start_lag_ + static_cast<int>(taps_.size()) - 1; }
  int tapCount() const { return static_cast<int>(taps_.size()); }
  int rows() const { return taps_.empty() ? 0 : static_cast<int>(taps_[0].rows()); }
  int cols() const { return taps_.empty() ? 0 : static_cast<int>(taps_[0].cols()); }

  // Spectral component at absolute lag t (startLag <= t <= length).
  const Eigen::MatrixXd& tap(int t) const;
  const std::vector<Eigen::MatrixXd>& taps() const { return taps_; }

  // Support of the union of all taps.
  SparsityPattern unionSupport(double tol = 0.0) const;

  // True if every tap's support is contained in the per-lag pattern list
  // (patterns[i] goes with lag startLag + i).
  bool supportsContainedIn(const std::vector<SparsityPattern>& patterns,
                           double tol = 0.0) const;

 private:
  int start_lag_ = 0;
  std::vector<Eigen::MatrixXd> taps_;
};

// Per-column sums sum_t || M(t)_{:,j} ||_1; length-cols() vector.
Eigen::VectorXd column_l1_budget(const FirResponse& fir);

// sum_t ||M(t)||_1 with ||.||_1 the induced norm (max column abs sum).
// Upper bound on the E1 norm sup_z ||G(z)||_1.
double e1_norm_bound(const FirResponse& fir);

// sqrt(rowNnzMax) * e1_norm_bound: certified upper bound on ||G||_Hinf for a
// transfer matrix with at most rowNnzMax nonzeros per row.
double hinf_bound(const FirResponse& fir, int rowNnzMax);

// Diagnostic lower estimate of ||G||_Hinf: max spectral norm of
// sum_t M(t) e^{-i w t} over a uniform grid on the unit circle.
double hinf_grid_estimate(const FirResponse& fir, int gridPoints = 512);

// Maximum nonzero counts over rows/columns of [A B], the stacked responses,
// and the slack responses.  k is the max of the [A B] count and k_phi, since
// the two roles are computed separately (flagged in kFromResponses).
struct StructureCounts {
  int k = 0;
  int kPhi = 0;
  int kV = 0;
  bool kFromResponses = false;  // true when k_phi exceeded the [A B] count
};

// suppAB: support of [A B] (n x (n+m)); responsePatterns: per-lag supports of
// the stacked response ((n+m) x n); vPatterns: per-lag supports of V (n x n).
// Counts are taken on the union over lags (the transfer-matrix support).
// Checks the bound k_v <= 2 k^2 and throws if violated.
StructureCounts structure_counts(
    const SparsityPattern& suppAB,
    const std::vector<SparsityPattern>& responsePatterns,
    const std::vector<SparsityPattern>& vPatterns);

}  // namespace sls
