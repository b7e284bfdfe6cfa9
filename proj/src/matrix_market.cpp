#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "ocprec/sparse.hpp"

namespace ocprec {

void write_matrix_market(std::ostream& out, const SparseMatrix& a) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  const auto& off = a.row_offsets();
  for (Index i = 0; i < a.rows(); ++i)
    for (Index k = off[i]; k < off[i + 1]; ++k)
      out << i + 1 << ' ' << a.col_indices()[k] + 1 << ' ' << a.values()[k] << '\n';
}

void write_matrix_market(const std::string& path, const SparseMatrix& a) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  write_matrix_market(f, a);
  if (!f) throw std::runtime_error("write failed for " + path);
}

SparseMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty Matrix Market stream");
  std::string banner, object, format, field, symmetry;
  {
    std::istringstream hs(line);
    hs >> banner >> object >> format >> field >> symmetry;
  }
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
  };
  if (banner != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "coordinate")
    throw std::runtime_error("only Matrix Market coordinate matrices are supported");
  field = lower(field);
  symmetry = lower(symmetry);
  if (field != "real" && field != "integer" && field != "pattern")
    throw std::runtime_error("unsupported Matrix Market field: " + field);
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric")
    throw std::runtime_error("unsupported Matrix Market symmetry: " + symmetry);

  while (std::getline(in, line))
    if (!line.empty() && line[0] != '%') break;
  Index rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> rows >> cols >> nnz)) throw std::runtime_error("bad Matrix Market size line");
  }
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(nnz) * (symmetry == "general" ? 1 : 2));
  for (Index e = 0; e < nnz; ++e) {
    Index i, j;
    double v = 1.0;
    if (!(in >> i >> j)) throw std::runtime_error("truncated Matrix Market entries");
    if (field != "pattern" && !(in >> v)) throw std::runtime_error("truncated Matrix Market entries");
    t.push_back({i - 1, j - 1, v});
    if (symmetry != "general" && i != j) t.push_back({j - 1, i - 1, symmetry == "symmetric" ? v : -v});
  }
  return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

SparseMatrix read_matrix_market(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return read_matrix_market(f);
}

}  // namespace ocprec
