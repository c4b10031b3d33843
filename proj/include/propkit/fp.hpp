#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace propkit::fp {

// Dense linear algebra over F_p for tiny systems (layer solves, echelon
// bookkeeping).  Vectors are std::vector<uint32_t> with entries in [0, p).

using Vec = std::vector<uint32_t>;

inline uint32_t add(uint32_t a, uint32_t b, uint64_t p) {
  uint64_t r = uint64_t(a) + b;
  return uint32_t(r >= p ? r - p : r);
}
inline uint32_t sub(uint32_t a, uint32_t b, uint64_t p) {
  return uint32_t(a >= b ? a - b : a + p - b);
}
inline uint32_t mul(uint32_t a, uint32_t b, uint64_t p) {
  return uint32_t(uint64_t(a) * b % p);
}
uint32_t inv(uint32_t a, uint64_t p);

// Fixed spanning-set solver: columns are basis vectors in F_p^rows; solve()
// answers "express y in the column span", built once per model.
class Solver {
 public:
  Solver() = default;
  Solver(uint64_t p, std::vector<Vec> columns);

  size_t rank() const { return rank_; }
  size_t cols() const { return cols_; }
  // Coefficients x with sum x_j col_j = y, or nullopt if y is outside the
  // span.  Unique when the columns are independent (rank == cols).
  std::optional<Vec> solve(const Vec& y) const;

 private:
  uint64_t p_ = 0;
  size_t rows_ = 0, cols_ = 0, rank_ = 0;
  // Row-reduced augmented system [A | I]: reduced_ holds RREF(A) rows,
  // transform_ the matching row operations applied to I.
  std::vector<Vec> reduced_, transform_;
  std::vector<size_t> pivot_col_of_row_;
};

// Incremental row space with reduced echelon maintenance; used for layer
// spans where rows arrive one at a time.
class RowSpace {
 public:
  explicit RowSpace(uint64_t p, size_t width) : p_(p), width_(width) {}

  size_t dim() const { return rows_.size(); }
  // Reduce v against the current rows; returns the residual (zero vector if
  // v is in the span).
  Vec reduce(Vec v) const;
  // Reduce and, if a nonzero residual remains, insert it (unit-normalized
  // at its leading position).  Returns true when the dimension grew.
  bool insert(Vec v);
  bool contains(const Vec& v) const;
  const std::vector<Vec>& rows() const { return rows_; }
  const std::vector<size_t>& pivots() const { return pivots_; }

 private:
  uint64_t p_;
  size_t width_;
  std::vector<Vec> rows_;       // echelon rows, leading coefficient 1
  std::vector<size_t> pivots_;  // leading position of each row
};

}  // namespace propkit::fp
