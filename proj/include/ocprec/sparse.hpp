#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace ocprec {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Triplet {
  Index row;
  Index col;
  double value;
};

// Compressed row storage with sorted, duplicate-free column indices.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(Index rows, Index cols, std::vector<Index> row_offsets, std::vector<Index> col_indices,
               std::vector<double> values);

  // Duplicates are summed; explicit zeros are kept so sparsity patterns stay stable.
  static SparseMatrix from_triplets(Index rows, Index cols, std::vector<Triplet> triplets);
  static SparseMatrix identity(Index n);
  static SparseMatrix diagonal(const Vector& d);
  static SparseMatrix from_dense(const DenseMatrix& a, double drop_tol = 0.0);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(values_.size()); }
  const std::vector<Index>& row_offsets() const { return offsets_; }
  const std::vector<Index>& col_indices() const { return cols_idx_; }
  const std::vector<double>& values() const { return values_; }

  double coeff(Index i, Index j) const;
  Vector diagonal() const;

  Vector multiply(const Vector& x) const;
  Vector multiply_transpose(const Vector& x) const;
  // y += alpha * A x
  void multiply_add(const Vector& x, Vector& y, double alpha = 1.0) const;

  SparseMatrix transpose() const;
  SparseMatrix scale_rows(const Vector& d) const;     // diag(d) * A
  SparseMatrix scale_columns(const Vector& d) const;  // A * diag(d)
  SparseMatrix scaled(double s) const;
  SparseMatrix add_diagonal(const Vector& d) const;   // A + diag(d), square only

  DenseMatrix to_dense() const;
  Eigen::SparseMatrix<double, Eigen::ColMajor, Index> to_eigen() const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> offsets_{0};
  std::vector<Index> cols_idx_;
  std::vector<double> values_;
};

Vector spmv(const SparseMatrix& a, const Vector& x);

// alpha*A + beta*B
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha = 1.0, double beta = 1.0);
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);

// Matrix Market coordinate real general.
void write_matrix_market(std::ostream& out, const SparseMatrix& a);
void write_matrix_market(const std::string& path, const SparseMatrix& a);
SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market(const std::string& path);

}  // namespace ocprec
