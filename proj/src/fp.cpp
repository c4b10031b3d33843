#include "propkit/fp.hpp"

#include "propkit/padic.hpp"

namespace propkit::fp {

uint32_t inv(uint32_t a, uint64_t p) {
  return uint32_t(invmod(a, p));
}

Solver::Solver(uint64_t p, std::vector<Vec> columns) : p_(p) {
  cols_ = columns.size();
  rows_ = cols_ ? columns[0].size() : 0;
  // Row i of the working matrix is (column-major transposed): we eliminate
  // on rows of A directly, A being rows_ x cols_.
  std::vector<Vec> a(rows_, Vec(cols_, 0));
  for (size_t j = 0; j < cols_; ++j)
    for (size_t i = 0; i < rows_; ++i) a[i][j] = columns[j][i];
  transform_.assign(rows_, Vec(rows_, 0));
  for (size_t i = 0; i < rows_; ++i) transform_[i][i] = 1;

  size_t r = 0;
  for (size_t c = 0; c < cols_ && r < rows_; ++c) {
    size_t piv = r;
    while (piv < rows_ && a[piv][c] == 0) ++piv;
    if (piv == rows_) continue;
    std::swap(a[piv], a[r]);
    std::swap(transform_[piv], transform_[r]);
    uint32_t s = inv(a[r][c], p_);
    for (size_t j = 0; j < cols_; ++j) a[r][j] = mul(a[r][j], s, p_);
    for (size_t j = 0; j < rows_; ++j)
      transform_[r][j] = mul(transform_[r][j], s, p_);
    for (size_t i = 0; i < rows_; ++i) {
      if (i == r || a[i][c] == 0) continue;
      uint32_t f = a[i][c];
      for (size_t j = 0; j < cols_; ++j)
        a[i][j] = sub(a[i][j], mul(f, a[r][j], p_), p_);
      for (size_t j = 0; j < rows_; ++j)
        transform_[i][j] =
            sub(transform_[i][j], mul(f, transform_[r][j], p_), p_);
    }
    pivot_col_of_row_.push_back(c);
    ++r;
  }
  rank_ = r;
  reduced_ = std::move(a);
}

std::optional<Vec> Solver::solve(const Vec& y) const {
  // Apply the recorded row operations to y, then read coefficients off the
  // pivot rows; consistency requires the transformed y to vanish on the
  // zero rows.
  Vec ty(rows_, 0);
  for (size_t i = 0; i < rows_; ++i) {
    uint64_t acc = 0;
    for (size_t j = 0; j < rows_; ++j)
      acc += uint64_t(transform_[i][j]) * y[j] % p_;
    ty[i] = uint32_t(acc % p_);
  }
  Vec x(cols_, 0);
  for (size_t i = 0; i < rank_; ++i) x[pivot_col_of_row_[i]] = ty[i];
  for (size_t i = rank_; i < rows_; ++i)
    if (ty[i] != 0) return std::nullopt;
  // Check the non-pivot columns do not disturb the solution (they would
  // only matter for rank-deficient systems; reject those as ambiguous).
  if (rank_ < cols_) {
    // Verify by substitution.
    for (size_t i = 0; i < rows_; ++i) {
      uint64_t acc = 0;
      for (size_t j = 0; j < cols_; ++j)
        acc += uint64_t(reduced_[i][j]) * x[j] % p_;
      // reduced_ rows correspond to transformed coordinates; compare there.
      if (uint32_t(acc % p_) != ty[i]) return std::nullopt;
    }
  }
  return x;
}

Vec RowSpace::reduce(Vec v) const {
  for (size_t i = 0; i < rows_.size(); ++i) {
    uint32_t c = v[pivots_[i]];
    if (c == 0) continue;
    for (size_t j = 0; j < width_; ++j)
      v[j] = sub(v[j], mul(c, rows_[i][j], p_), p_);
  }
  return v;
}

bool RowSpace::insert(Vec v) {
  v = reduce(std::move(v));
  size_t lead = width_;
  for (size_t j = 0; j < width_; ++j)
    if (v[j] != 0) {
      lead = j;
      break;
    }
  if (lead == width_) return false;
  uint32_t s = inv(v[lead], p_);
  for (size_t j = 0; j < width_; ++j) v[j] = mul(v[j], s, p_);
  // Keep earlier rows reduced against the new one for a clean echelon.
  for (size_t i = 0; i < rows_.size(); ++i) {
    uint32_t c = rows_[i][lead];
    if (c == 0) continue;
    for (size_t j = 0; j < width_; ++j)
      rows_[i][j] = sub(rows_[i][j], mul(c, v[j], p_), p_);
  }
  size_t at = rows_.size();
  for (size_t i = 0; i < pivots_.size(); ++i)
    if (pivots_[i] > lead) {
      at = i;
      break;
    }
  rows_.insert(rows_.begin() + at, std::move(v));
  pivots_.insert(pivots_.begin() + at, lead);
  return true;
}

bool RowSpace::contains(const Vec& v) const {
  Vec r = reduce(v);
  for (uint32_t x : r)
    if (x != 0) return false;
  return true;
}

}  // namespace propkit::fp
