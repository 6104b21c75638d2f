#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "scan2sim/core.hpp"
#include "scan2sim/parallel.hpp"

namespace scan2sim::fea {

// Compressed sparse row matrix, full (not triangular) storage of a symmetric
// pattern. The pattern is fixed at construction; assembly adds into it.
class CsrMatrix {
 public:
  CsrMatrix() = default;

  // pattern: for each row, a sorted unique list of column indices
  explicit CsrMatrix(const std::vector<std::vector<int>>& pattern) {
    n_ = static_cast<int>(pattern.size());
    row_ptr_.resize(n_ + 1, 0);
    for (int r = 0; r < n_; ++r) row_ptr_[r + 1] = row_ptr_[r] + static_cast<int64_t>(pattern[r].size());
    col_.reserve(row_ptr_[n_]);
    for (const auto& row : pattern) col_.insert(col_.end(), row.begin(), row.end());
    val_.assign(col_.size(), 0.0);
  }

  int rows() const { return n_; }
  int64_t nonzeros() const { return static_cast<int64_t>(col_.size()); }

  void add(int r, int c, double v) {
    auto begin = col_.begin() + row_ptr_[r], end = col_.begin() + row_ptr_[r + 1];
    auto it = std::lower_bound(begin, end, c);
    if (it == end || *it != c) throw std::logic_error("CsrMatrix::add outside pattern");
    val_[it - col_.begin()] += v;
  }

  double get(int r, int c) const {
    auto begin = col_.begin() + row_ptr_[r], end = col_.begin() + row_ptr_[r + 1];
    auto it = std::lower_bound(begin, end, c);
    return (it == end || *it != c) ? 0.0 : val_[it - col_.begin()];
  }

  void multiply(const std::vector<double>& x, std::vector<double>& y) const {
    y.resize(n_);
    parallel_for(0, n_, [&](int64_t r) {
      double acc = 0.0;
      for (int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) acc += val_[k] * x[col_[k]];
      y[r] = acc;
    }, 512);
  }

  std::vector<double> diagonal() const {
    std::vector<double> d(n_);
    for (int r = 0; r < n_; ++r) d[r] = get(r, r);
    return d;
  }

  // Extracts the square submatrix over `keep` (true entries), for the
  // eliminated-constraint reduced system.
  CsrMatrix restricted(const std::vector<uint8_t>& keep, std::vector<int>& full_to_reduced) const {
    full_to_reduced.assign(n_, -1);
    int m = 0;
    for (int r = 0; r < n_; ++r)
      if (keep[r]) full_to_reduced[r] = m++;
    CsrMatrix out;
    out.n_ = m;
    out.row_ptr_.resize(m + 1, 0);
    int mr = 0;
    for (int r = 0; r < n_; ++r) {
      if (!keep[r]) continue;
      int64_t count = 0;
      for (int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        if (keep[col_[k]]) ++count;
      out.row_ptr_[mr + 1] = out.row_ptr_[mr] + count;
      ++mr;
    }
    out.col_.resize(out.row_ptr_[m]);
    out.val_.resize(out.row_ptr_[m]);
    mr = 0;
    for (int r = 0; r < n_; ++r) {
      if (!keep[r]) continue;
      int64_t w = out.row_ptr_[mr];
      for (int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
        if (!keep[col_[k]]) continue;
        out.col_[w] = full_to_reduced[col_[k]];
        out.val_[w] = val_[k];
        ++w;
      }
      ++mr;
    }
    return out;
  }

  const std::vector<int64_t>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col() const { return col_; }
  const std::vector<double>& values() const { return val_; }

 private:
  int n_ = 0;
  std::vector<int64_t> row_ptr_;
  std::vector<int> col_;
  std::vector<double> val_;
};

namespace detail {

// Fixed-chunk reduction: partials summed in chunk order, so dot products do not
// depend on the thread count.
inline double dot_fixed_order(const std::vector<double>& a, const std::vector<double>& b) {
  constexpr int64_t kChunk = 4096;
  int64_t n = static_cast<int64_t>(a.size());
  int64_t nchunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(nchunks, 0.0);
  parallel_for(0, nchunks, [&](int64_t c) {
    double acc = 0.0;
    int64_t lo = c * kChunk, hi = std::min(n, lo + kChunk);
    for (int64_t i = lo; i < hi; ++i) acc += a[i] * b[i];
    partial[c] = acc;
  }, 1);
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

}  // namespace detail

struct CgResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

// Jacobi-preconditioned conjugate gradient for SPD systems.
inline CgResult conjugate_gradient(const CsrMatrix& A, const std::vector<double>& b,
                                   std::vector<double>& x, double tolerance = 1e-10,
                                   int max_iterations = 0) {
  int n = A.rows();
  if (max_iterations <= 0) max_iterations = std::max(1000, 20 * n);
  x.assign(n, 0.0);
  double norm_b = std::sqrt(detail::dot_fixed_order(b, b));
  CgResult result;
  if (norm_b == 0.0) {
    result.converged = true;
    return result;
  }

  std::vector<double> diag = A.diagonal();
  for (double& d : diag) {
    if (d <= 0.0) throw MeshError("system is not positive definite (rigid-body mode?)");
    d = 1.0 / d;
  }

  std::vector<double> r = b, z(n), p(n), Ap(n);
  for (int i = 0; i < n; ++i) z[i] = diag[i] * r[i];
  p = z;
  double rz = detail::dot_fixed_order(r, z);
  for (int it = 1; it <= max_iterations; ++it) {
    A.multiply(p, Ap);
    double pAp = detail::dot_fixed_order(p, Ap);
    if (pAp <= 0.0) throw MeshError("system is not positive definite (rigid-body mode?)");
    double alpha = rz / pAp;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    double norm_r = std::sqrt(detail::dot_fixed_order(r, r));
    result.iterations = it;
    result.relative_residual = norm_r / norm_b;
    if (result.relative_residual <= tolerance) {
      result.converged = true;
      return result;
    }
    for (int i = 0; i < n; ++i) z[i] = diag[i] * r[i];
    double rz_next = detail::dot_fixed_order(r, z);
    double beta = rz_next / rz;
    rz = rz_next;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return result;
}

// Dense Cholesky for the small-system direct path. Throws on non-SPD input.
class DenseCholesky {
 public:
  explicit DenseCholesky(const CsrMatrix& A) : n_(A.rows()), l_(static_cast<size_t>(n_) * n_, 0.0) {
    for (int r = 0; r < n_; ++r)
      for (int64_t k = A.row_ptr()[r]; k < A.row_ptr()[r + 1]; ++k)
        l_[static_cast<size_t>(r) * n_ + A.col()[k]] = A.values()[k];
    for (int j = 0; j < n_; ++j) {
      double d = l_[static_cast<size_t>(j) * n_ + j];
      for (int k = 0; k < j; ++k) d -= l_[static_cast<size_t>(j) * n_ + k] * l_[static_cast<size_t>(j) * n_ + k];
      if (d <= 0.0) throw MeshError("system is not positive definite (rigid-body mode?)");
      double s = std::sqrt(d);
      l_[static_cast<size_t>(j) * n_ + j] = s;
      for (int i = j + 1; i < n_; ++i) {
        double v = l_[static_cast<size_t>(i) * n_ + j];
        for (int k = 0; k < j; ++k)
          v -= l_[static_cast<size_t>(i) * n_ + k] * l_[static_cast<size_t>(j) * n_ + k];
        l_[static_cast<size_t>(i) * n_ + j] = v / s;
      }
    }
  }

  std::vector<double> solve(const std::vector<double>& b) const {
    std::vector<double> y(n_);
    for (int i = 0; i < n_; ++i) {
      double v = b[i];
      for (int k = 0; k < i; ++k) v -= l_[static_cast<size_t>(i) * n_ + k] * y[k];
      y[i] = v / l_[static_cast<size_t>(i) * n_ + i];
    }
    for (int i = n_ - 1; i >= 0; --i) {
      double v = y[i];
      for (int k = i + 1; k < n_; ++k) v -= l_[static_cast<size_t>(k) * n_ + i] * y[k];
      y[i] = v / l_[static_cast<size_t>(i) * n_ + i];
    }
    return y;
  }

 private:
  int n_;
  std::vector<double> l_;
};

}  // namespace scan2sim::fea
