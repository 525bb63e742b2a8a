#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace sls {

// Binary support pattern of a matrix, stored as a sorted coordinate list
// (row-major).  Immutable after construction.
class SparsityPattern {
 public:
  using Entry = std::pair<int, int>;  // (row, col)

  SparsityPattern() = default;
  SparsityPattern(int rows, int cols, std::vector<Entry> entries);

  static SparsityPattern identity(int n);
  static SparsityPattern dense(int rows, int cols);
  static SparsityPattern empty(int rows, int cols) {
    return SparsityPattern(rows, cols, {});
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }

  bool contains(int r, int c) const;
  // True if every entry of this pattern is also an entry of `other`.
  bool isSubsetOf(const SparsityPattern& other) const;
  bool operator==(const SparsityPattern& other) const;

  SparsityPattern transpose() const;

  // Row indices of the nonzeros in column j, ascending.
  std::vector<int> columnSupport(int j) const;

  int maxRowNnz() const;
  int maxColNnz() const;

  std::string toString() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Entry> entries_;  // sorted, deduplicated
};

// Support of the boolean product P1 * P2.
SparsityPattern pattern_compose(const SparsityPattern& p1,
                                const SparsityPattern& p2);

// Entrywise union (boolean sum).
SparsityPattern pattern_union(const SparsityPattern& p1,
                              const SparsityPattern& p2);

// Boolean e-th power of a square pattern; e = 0 yields the identity pattern.
SparsityPattern pattern_power(const SparsityPattern& p, int e);

// Horizontal concatenation [P1 P2] (same row count).
SparsityPattern pattern_hcat(const SparsityPattern& p1,
                             const SparsityPattern& p2);

// Vertical concatenation [P1; P2] (same column count).
SparsityPattern pattern_vcat(const SparsityPattern& p1,
                             const SparsityPattern& p2);

}  // namespace sls
