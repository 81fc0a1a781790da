#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "relaxlearn/linalg.hpp"

namespace relaxlearn {

// Ordered sample collection with provenance. Samples all share `dim`.
struct DataSet {
  int dim = 0;
  std::vector<Vector> samples;
  std::uint64_t seed = 0;
  std::string provenance = "unknown";

  int size() const { return static_cast<int>(samples.size()); }
  bool empty() const { return samples.empty(); }

  // Columns are samples.
  Matrix as_matrix() const;
  static DataSet from_matrix(const Matrix& columns, std::uint64_t seed,
                             const std::string& provenance);
};

// Text format: header "dataset d m family seed", then one sample per line,
// 17 significant digits.
void save_dataset(const DataSet& data, const std::string& path);
DataSet load_dataset(const std::string& path);

// printf %.17g formatting used by every text artifact in the project.
std::string format_g17(double x);
void write_matrix_rows(std::ostream& os, const Matrix& m);
Matrix read_matrix_rows(std::istream& is, int rows, int cols);

}  // namespace relaxlearn
