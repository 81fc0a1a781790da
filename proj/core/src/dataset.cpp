#include "relaxlearn/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace relaxlearn {

Matrix DataSet::as_matrix() const {
  Matrix m(dim, size());
  for (int j = 0; j < size(); ++j) m.col(j) = samples[j];
  return m;
}

DataSet DataSet::from_matrix(const Matrix& columns, std::uint64_t seed,
                             const std::string& provenance) {
  DataSet d;
  d.dim = static_cast<int>(columns.rows());
  d.seed = seed;
  d.provenance = provenance;
  d.samples.reserve(columns.cols());
  for (Eigen::Index j = 0; j < columns.cols(); ++j) d.samples.push_back(columns.col(j));
  return d;
}

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_matrix_rows(std::ostream& os, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << format_g17(m(i, j));
    }
    os << '\n';
  }
}

Matrix read_matrix_rows(std::istream& is, int rows, int cols) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (!(is >> m(i, j))) throw std::runtime_error("read_matrix_rows: truncated input");
  return m;
}

void save_dataset(const DataSet& data, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_dataset: cannot open " + path);
  os << "dataset " << data.dim << ' ' << data.size() << ' ' << data.provenance
     << ' ' << data.seed << '\n';
  for (const auto& x : data.samples) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (i) os << ' ';
      os << format_g17(x[i]);
    }
    os << '\n';
  }
}

DataSet load_dataset(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_dataset: cannot open " + path);
  std::string tag;
  int d = 0, m = 0;
  DataSet out;
  if (!(is >> tag >> d >> m >> out.provenance >> out.seed) || tag != "dataset") {
    throw std::runtime_error("load_dataset: bad header in " + path);
  }
  out.dim = d;
  out.samples.resize(m, Vector(d));
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < d; ++i)
      if (!(is >> out.samples[j][i])) throw std::runtime_error("load_dataset: truncated " + path);
  return out;
}

}  // namespace relaxlearn
