#include <doctest.h>

#include <Eigen/Core>

#include "sls/pattern.hpp"
#include "sls/rng.hpp"

using namespace sls;

namespace {

// Dense boolean oracle used to cross-check the coordinate-list algebra.
Eigen::MatrixXi toDense(const SparsityPattern& p) {
  Eigen::MatrixXi d = Eigen::MatrixXi::Zero(p.rows(), p.cols());
  for (const auto& [r, c] : p.entries()) d(r, c) = 1;
  return d;
}

SparsityPattern fromDense(const Eigen::MatrixXi& d) {
  std::vector<SparsityPattern::Entry> e;
  for (int r = 0; r < d.rows(); ++r)
    for (int c = 0; c < d.cols(); ++c)
      if (d(r, c) != 0) e.emplace_back(r, c);
  return SparsityPattern(static_cast<int>(d.rows()),
                         static_cast<int>(d.cols()), std::move(e));
}

Eigen::MatrixXi boolMul(const Eigen::MatrixXi& a, const Eigen::MatrixXi& b) {
  Eigen::MatrixXi p = a * b;
  return (p.array() > 0).cast<int>();
}

SparsityPattern chain(int n) {
  std::vector<SparsityPattern::Entry> e;
  for (int i = 0; i < n; ++i) {
    e.emplace_back(i, i);
    if (i > 0) e.emplace_back(i, i - 1);
    if (i < n - 1) e.emplace_back(i, i + 1);
  }
  return SparsityPattern(n, n, std::move(e));
}

SparsityPattern randomPattern(int rows, int cols, double density,
                              CounterRng& rng) {
  std::vector<SparsityPattern::Entry> e;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (rng.nextUniform() < density) e.emplace_back(r, c);
  return SparsityPattern(rows, cols, std::move(e));
}

}  // namespace

TEST_CASE("pattern_power identity and chain cases") {
  const SparsityPattern p = chain(5);
  CHECK(pattern_power(p, 0) == SparsityPattern::identity(5));
  CHECK(pattern_power(p, 1) == p);

  // Chain gains one bandwidth per power; after 4 steps a 5-chain is dense.
  SparsityPattern expect = p;
  Eigen::MatrixXi dense = toDense(p);
  for (int i = 1; i < 4; ++i) dense = boolMul(dense, toDense(p));
  CHECK(pattern_power(p, 4) == fromDense(dense));
  CHECK(pattern_power(p, 4) == SparsityPattern::dense(5, 5));
}

TEST_CASE("pattern_power rejects non-square input") {
  const SparsityPattern p(2, 3, {{0, 0}});
  CHECK_THROWS_AS(pattern_power(p, 2), std::invalid_argument);
}

TEST_CASE("compose and union basics") {
  CounterRng rng(42);
  const SparsityPattern p = randomPattern(6, 6, 0.3, rng);
  CHECK(pattern_compose(SparsityPattern::identity(6), p) == p);
  CHECK(pattern_union(p, p) == p);

  CHECK_THROWS_AS(pattern_compose(p, SparsityPattern::identity(5)),
                  std::invalid_argument);
  CHECK_THROWS_AS(pattern_union(p, SparsityPattern::identity(5)),
                  std::invalid_argument);
}

TEST_CASE("compose matches dense boolean multiply") {
  const SparsityPattern a = chain(8);
  // C_x style factor: a power of the chain capped by locality.
  const SparsityPattern cx = pattern_power(a, 2);
  const SparsityPattern got = pattern_compose(a, cx);
  CHECK(got == fromDense(boolMul(toDense(a), toDense(cx))));

  CounterRng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const SparsityPattern p1 = randomPattern(7, 5, 0.25, rng);
    const SparsityPattern p2 = randomPattern(5, 9, 0.25, rng);
    CHECK(pattern_compose(p1, p2) ==
          fromDense(boolMul(toDense(p1), toDense(p2))));
  }
}

TEST_CASE("power additivity: P^(a+b) = P^a P^b") {
  CounterRng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const SparsityPattern p = randomPattern(6, 6, 0.3, rng);
    for (int a = 0; a <= 3; ++a) {
      for (int b = 0; b <= 3; ++b) {
        CHECK(pattern_power(p, a + b) ==
              pattern_compose(pattern_power(p, a), pattern_power(p, b)));
      }
    }
  }
}

TEST_CASE("entries validated and deduplicated") {
  CHECK_THROWS_AS(SparsityPattern(2, 2, {{2, 0}}), std::invalid_argument);
  const SparsityPattern p(2, 2, {{0, 1}, {0, 1}, {1, 0}});
  CHECK(p.nnz() == 2);
  CHECK(p.contains(0, 1));
  CHECK_FALSE(p.contains(0, 0));
}

TEST_CASE("transpose, hcat, vcat, row/col counts") {
  const SparsityPattern p(2, 3, {{0, 2}, {1, 0}, {1, 1}});
  CHECK(p.transpose() == SparsityPattern(3, 2, {{2, 0}, {0, 1}, {1, 1}}));
  CHECK(p.maxRowNnz() == 2);
  CHECK(p.maxColNnz() == 1);

  const SparsityPattern h = pattern_hcat(p, p);
  CHECK(h.cols() == 6);
  CHECK(h.nnz() == 6);
  CHECK(h.contains(0, 5));

  const SparsityPattern v = pattern_vcat(p, p);
  CHECK(v.rows() == 4);
  CHECK(v.contains(3, 0));

  CHECK(p.columnSupport(1) == std::vector<int>{1});
  CHECK(p.isSubsetOf(SparsityPattern::dense(2, 3)));
  CHECK_FALSE(SparsityPattern::dense(2, 3).isSubsetOf(p));
}
