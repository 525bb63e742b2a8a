#include "sls/pattern.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace sls {

namespace {

void sortAndDedup(std::vector<SparsityPattern::Entry>& entries) {
  std::sort(entries.begin(), entries.end());
  entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
}

// Dense boolean grids are faster than merge-based products for the sizes this
// project works at; switch over once a dense grid would exceed 64x64 cells
// per the coordinate-list storage decision.
constexpr std::size_t kDenseCellLimit = 64 * 64;

}  // namespace

SparsityPattern::SparsityPattern(int rows, int cols, std::vector<Entry> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows_ < 0 || cols_ < 0) {
    throw std::invalid_argument("SparsityPattern: negative dimension");
  }
  for (const auto& [r, c] : entries_) {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_) {
      throw std::invalid_argument("SparsityPattern: entry out of range");
    }
  }
  sortAndDedup(entries_);
}

SparsityPattern SparsityPattern::identity(int n) {
  std::vector<Entry> e;
  e.reserve(n);
  for (int i = 0; i < n; ++i) e.emplace_back(i, i);
  return SparsityPattern(n, n, std::move(e));
}

SparsityPattern SparsityPattern::dense(int rows, int cols) {
  std::vector<Entry> e;
  e.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) e.emplace_back(r, c);
  return SparsityPattern(rows, cols, std::move(e));
}

bool SparsityPattern::contains(int r, int c) const {
  return std::binary_search(entries_.begin(), entries_.end(), Entry{r, c});
}

bool SparsityPattern::isSubsetOf(const SparsityPattern& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) return false;
  return std::includes(other.entries_.begin(), other.entries_.end(),
                       entries_.begin(), entries_.end());
}

bool SparsityPattern::operator==(const SparsityPattern& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ &&
         entries_ == other.entries_;
}

SparsityPattern SparsityPattern::transpose() const {
  std::vector<Entry> e;
  e.reserve(entries_.size());
  for (const auto& [r, c] : entries_) e.emplace_back(c, r);
  return SparsityPattern(cols_, rows_, std::move(e));
}

std::vector<int> SparsityPattern::columnSupport(int j) const {
  std::vector<int> rows;
  for (const auto& [r, c] : entries_) {
    if (c == j) rows.push_back(r);
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

int SparsityPattern::maxRowNnz() const {
  std::vector<int> counts(rows_, 0);
  for (const auto& [r, c] : entries_) ++counts[r];
  return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
}

int SparsityPattern::maxColNnz() const {
  std::vector<int> counts(cols_, 0);
  for (const auto& [r, c] : entries_) ++counts[c];
  return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
}

std::string SparsityPattern::toString() const {
  std::ostringstream os;
  os << rows_ << "x" << cols_ << " pattern, nnz=" << entries_.size();
  return os.str();
}

SparsityPattern pattern_compose(const SparsityPattern& p1,
                                const SparsityPattern& p2) {
  if (p1.cols() != p2.rows()) {
    throw std::invalid_argument("pattern_compose: shape mismatch");
  }
  const int rows = p1.rows();
  const int cols = p2.cols();

  // Row adjacency of p2 for the merge.
  std::vector<std::vector<int>> p2rows(p2.rows());
  for (const auto& [r, c] : p2.entries()) p2rows[r].push_back(c);

  std::vector<SparsityPattern::Entry> out;
  if (static_cast<std::size_t>(rows) * cols <= kDenseCellLimit) {
    std::vector<uint8_t> grid(static_cast<std::size_t>(rows) * cols, 0);
    for (const auto& [r, k] : p1.entries()) {
      for (int c : p2rows[k]) grid[static_cast<std::size_t>(r) * cols + c] = 1;
    }
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        if (grid[static_cast<std::size_t>(r) * cols + c]) out.emplace_back(r, c);
  } else {
    std::vector<std::vector<int>> p1rows(rows);
    for (const auto& [r, k] : p1.entries()) p1rows[r].push_back(k);
    std::vector<uint8_t> mark(cols, 0);
    std::vector<int> touched;
    for (int r = 0; r < rows; ++r) {
      touched.clear();
      for (int k : p1rows[r]) {
        for (int c : p2rows[k]) {
          if (!mark[c]) {
            mark[c] = 1;
            touched.push_back(c);
          }
        }
      }
      std::sort(touched.begin(), touched.end());
      for (int c : touched) {
        out.emplace_back(r, c);
        mark[c] = 0;
      }
    }
  }
  return SparsityPattern(rows, cols, std::move(out));
}

SparsityPattern pattern_union(const SparsityPattern& p1,
                              const SparsityPattern& p2) {
  if (p1.rows() != p2.rows() || p1.cols() != p2.cols()) {
    throw std::invalid_argument("pattern_union: shape mismatch");
  }
  std::vector<SparsityPattern::Entry> out;
  out.reserve(p1.nnz() + p2.nnz());
  std::set_union(p1.entries().begin(), p1.entries().end(),
                 p2.entries().begin(), p2.entries().end(),
                 std::back_inserter(out));
  return SparsityPattern(p1.rows(), p1.cols(), std::move(out));
}

SparsityPattern pattern_power(const SparsityPattern& p, int e) {
  if (p.rows() != p.cols()) {
    throw std::invalid_argument("pattern_power: pattern must be square");
  }
  if (e < 0) {
    throw std::invalid_argument("pattern_power: negative exponent");
  }
  SparsityPattern result = SparsityPattern::identity(p.rows());
  SparsityPattern base = p;
  // Binary exponentiation over the boolean semiring.
  while (e > 0) {
    if (e & 1) result = pattern_compose(result, base);
    e >>= 1;
    if (e > 0) base = pattern_compose(base, base);
  }
  return result;
}

SparsityPattern pattern_hcat(const SparsityPattern& p1,
                             const SparsityPattern& p2) {
  if (p1.rows() != p2.rows()) {
    throw std::invalid_argument("pattern_hcat: row count mismatch");
  }
  std::vector<SparsityPattern::Entry> out(p1.entries());
  for (const auto& [r, c] : p2.entries()) out.emplace_back(r, c + p1.cols());
  return SparsityPattern(p1.rows(), p1.cols() + p2.cols(), std::move(out));
}

SparsityPattern pattern_vcat(const SparsityPattern& p1,
                             const SparsityPattern& p2) {
  if (p1.cols() != p2.cols()) {
    throw std::invalid_argument("pattern_vcat: column count mismatch");
  }
  std::vector<SparsityPattern::Entry> out(p1.entries());
  for (const auto& [r, c] : p2.entries()) out.emplace_back(r + p1.rows(), c);
  return SparsityPattern(p1.rows() + p2.rows(), p1.cols(), std::move(out));
}

}  // namespace sls
