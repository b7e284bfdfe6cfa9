#include "ocprec/sparse.hpp"

#include <algorithm>
#include <numeric>

namespace ocprec {

SparseMatrix::SparseMatrix(Index rows, Index cols, std::vector<Index> row_offsets, std::vector<Index> col_indices,
                           std::vector<double> values)
    : rows_(rows), cols_(cols), offsets_(std::move(row_offsets)), cols_idx_(std::move(col_indices)),
      values_(std::move(values)) {
  if (rows_ < 0 || cols_ < 0) throw DimensionError("negative matrix dimension");
  if (static_cast<Index>(offsets_.size()) != rows_ + 1 || offsets_.front() != 0)
    throw std::invalid_argument("row offsets must have rows+1 entries starting at 0");
  if (cols_idx_.size() != values_.size() || offsets_.back() != static_cast<Index>(values_.size()))
    throw std::invalid_argument("row offsets inconsistent with stored entries");
  for (Index i = 0; i < rows_; ++i) {
    if (offsets_[i + 1] < offsets_[i]) throw std::invalid_argument("row offsets not monotone");
    for (Index k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      Index c = cols_idx_[k];
      if (c < 0 || c >= cols_) throw std::invalid_argument("column index out of range");
      if (k > offsets_[i] && cols_idx_[k - 1] >= c)
        throw std::invalid_argument("column indices must be strictly increasing within a row");
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols, std::vector<Triplet> t) {
  for (const auto& e : t)
    if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
      throw std::invalid_argument("triplet index out of range");
  std::sort(t.begin(), t.end(), [](const Triplet& x, const Triplet& y) {
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });
  std::vector<Index> offsets(rows + 1, 0);
  std::vector<Index> ci;
  std::vector<double> v;
  ci.reserve(t.size());
  v.reserve(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!ci.empty() && k > 0 && t[k].row == t[k - 1].row && t[k].col == t[k - 1].col) {
      v.back() += t[k].value;
      continue;
    }
    ci.push_back(t[k].col);
    v.push_back(t[k].value);
    ++offsets[t[k].row + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  return SparseMatrix(rows, cols, std::move(offsets), std::move(ci), std::move(v));
}

SparseMatrix SparseMatrix::identity(Index n) { return diagonal(Vector::Ones(n)); }

SparseMatrix SparseMatrix::diagonal(const Vector& d) {
  Index n = d.size();
  std::vector<Index> offsets(n + 1);
  std::vector<Index> ci(n);
  std::vector<double> v(n);
  for (Index i = 0; i < n; ++i) {
    offsets[i] = i;
    ci[i] = i;
    v[i] = d[i];
  }
  offsets[n] = n;
  return SparseMatrix(n, n, std::move(offsets), std::move(ci), std::move(v));
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& a, double drop_tol) {
  std::vector<Triplet> t;
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      if (std::abs(a(i, j)) > drop_tol) t.push_back({i, j, a(i, j)});
  return from_triplets(a.rows(), a.cols(), std::move(t));
}

double SparseMatrix::coeff(Index i, Index j) const {
  auto first = cols_idx_.begin() + offsets_[i];
  auto last = cols_idx_.begin() + offsets_[i + 1];
  auto it = std::lower_bound(first, last, j);
  if (it != last && *it == j) return values_[it - cols_idx_.begin()];
  return 0.0;
}

Vector SparseMatrix::diagonal() const {
  Index n = std::min(rows_, cols_);
  Vector d(n);
  for (Index i = 0; i < n; ++i) d[i] = coeff(i, i);
  return d;
}

Vector SparseMatrix::multiply(const Vector& x) const {
  Vector y = Vector::Zero(rows_);
  multiply_add(x, y, 1.0);
  return y;
}

void SparseMatrix::multiply_add(const Vector& x, Vector& y, double alpha) const {
  if (x.size() != cols_ || y.size() != rows_) throw DimensionError("spmv dimension mismatch");
  const Index* off = offsets_.data();
  const Index* ci = cols_idx_.data();
  const double* v = values_.data();
  for (Index i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (Index k = off[i]; k < off[i + 1]; ++k) s += v[k] * x[ci[k]];
    y[i] += alpha * s;
  }
}

Vector SparseMatrix::multiply_transpose(const Vector& x) const {
  if (x.size() != rows_) throw DimensionError("transpose spmv dimension mismatch");
  Vector y = Vector::Zero(cols_);
  for (Index i = 0; i < rows_; ++i) {
    double xi = x[i];
    for (Index k = offsets_[i]; k < offsets_[i + 1]; ++k) y[cols_idx_[k]] += values_[k] * xi;
  }
  return y;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Index> offsets(cols_ + 1, 0);
  for (Index c : cols_idx_) ++offsets[c + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<Index> next(offsets.begin(), offsets.end() - 1);
  std::vector<Index> ci(values_.size());
  std::vector<double> v(values_.size());
  // Row-major sweep keeps the transposed column indices sorted.
  for (Index i = 0; i < rows_; ++i) {
    for (Index k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      Index dst = next[cols_idx_[k]]++;
      ci[dst] = i;
      v[dst] = values_[k];
    }
  }
  return SparseMatrix(cols_, rows_, std::move(offsets), std::move(ci), std::move(v));
}

SparseMatrix SparseMatrix::scale_rows(const Vector& d) const {
  if (d.size() != rows_) throw DimensionError("row scaling length mismatch");
  SparseMatrix out = *this;
  for (Index i = 0; i < rows_; ++i)
    for (Index k = offsets_[i]; k < offsets_[i + 1]; ++k) out.values_[k] *= d[i];
  return out;
}

SparseMatrix SparseMatrix::scale_columns(const Vector& d) const {
  if (d.size() != cols_) throw DimensionError("column scaling length mismatch");
  SparseMatrix out = *this;
  for (std::size_t k = 0; k < values_.size(); ++k) out.values_[k] *= d[cols_idx_[k]];
  return out;
}

SparseMatrix SparseMatrix::scaled(double s) const {
  SparseMatrix out = *this;
  for (double& v : out.values_) v *= s;
  return out;
}

SparseMatrix SparseMatrix::add_diagonal(const Vector& d) const {
  if (rows_ != cols_ || d.size() != rows_) throw DimensionError("add_diagonal needs a square matrix");
  return add(*this, SparseMatrix::diagonal(d));
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix a = DenseMatrix::Zero(rows_, cols_);
  for (Index i = 0; i < rows_; ++i)
    for (Index k = offsets_[i]; k < offsets_[i + 1]; ++k) a(i, cols_idx_[k]) = values_[k];
  return a;
}

Eigen::SparseMatrix<double, Eigen::ColMajor, Index> SparseMatrix::to_eigen() const {
  std::vector<Eigen::Triplet<double, Index>> t;
  t.reserve(values_.size());
  for (Index i = 0; i < rows_; ++i)
    for (Index k = offsets_[i]; k < offsets_[i + 1]; ++k) t.emplace_back(i, cols_idx_[k], values_[k]);
  Eigen::SparseMatrix<double, Eigen::ColMajor, Index> out(rows_, cols_);
  out.setFromTriplets(t.begin(), t.end());
  out.makeCompressed();
  return out;
}

Vector spmv(const SparseMatrix& a, const Vector& x) { return a.multiply(x); }

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha, double beta) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("matrix sum dimension mismatch");
  const auto& ao = a.row_offsets();
  const auto& ac = a.col_indices();
  const auto& av = a.values();
  const auto& bo = b.row_offsets();
  const auto& bc = b.col_indices();
  const auto& bv = b.values();
  std::vector<Index> offsets(a.rows() + 1, 0);
  std::vector<Index> ci;
  std::vector<double> v;
  ci.reserve(a.nnz() + b.nnz());
  v.reserve(a.nnz() + b.nnz());
  for (Index i = 0; i < a.rows(); ++i) {
    Index p = ao[i], q = bo[i];
    while (p < ao[i + 1] || q < bo[i + 1]) {
      if (q >= bo[i + 1] || (p < ao[i + 1] && ac[p] < bc[q])) {
        ci.push_back(ac[p]);
        v.push_back(alpha * av[p++]);
      } else if (p >= ao[i + 1] || bc[q] < ac[p]) {
        ci.push_back(bc[q]);
        v.push_back(beta * bv[q++]);
      } else {
        ci.push_back(ac[p]);
        v.push_back(alpha * av[p++] + beta * bv[q++]);
      }
    }
    offsets[i + 1] = static_cast<Index>(ci.size());
  }
  return SparseMatrix(a.rows(), a.cols(), std::move(offsets), std::move(ci), std::move(v));
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matrix product dimension mismatch");
  const auto& ao = a.row_offsets();
  const auto& ac = a.col_indices();
  const auto& av = a.values();
  const auto& bo = b.row_offsets();
  const auto& bc = b.col_indices();
  const auto& bv = b.values();
  std::vector<Index> offsets(a.rows() + 1, 0);
  std::vector<Index> ci;
  std::vector<double> v;
  std::vector<double> acc(b.cols(), 0.0);
  std::vector<Index> marker(b.cols(), -1);
  std::vector<Index> row_cols;
  for (Index i = 0; i < a.rows(); ++i) {
    row_cols.clear();
    for (Index p = ao[i]; p < ao[i + 1]; ++p) {
      Index k = ac[p];
      for (Index q = bo[k]; q < bo[k + 1]; ++q) {
        Index j = bc[q];
        if (marker[j] != i) {
          marker[j] = i;
          acc[j] = 0.0;
          row_cols.push_back(j);
        }
        acc[j] += av[p] * bv[q];
      }
    }
    std::sort(row_cols.begin(), row_cols.end());
    for (Index j : row_cols) {
      ci.push_back(j);
      v.push_back(acc[j]);
    }
    offsets[i + 1] = static_cast<Index>(ci.size());
  }
  return SparseMatrix(a.rows(), b.cols(), std::move(offsets), std::move(ci), std::move(v));
}

}  // namespace ocprec
