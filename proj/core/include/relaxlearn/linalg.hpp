#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>

namespace relaxlearn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class no_convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class dimension_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// x^{\otimes s} stored flat; for s=2 the row-major layout identifies
// entry (i,j) with index i*d + j.
struct LiftedVec {
  Vector entries;
  int base_dim = 0;
  int power = 1;
};

struct SingularTriple {
  double sigma = 0.0;
  Vector u;  // left, unit norm
  Vector v;  // right, unit norm
};

// Default cap on d^s (number of entries a lift may produce).
inline constexpr std::uint64_t kDefaultLiftCap = 10'000'000;

LiftedVec lift(const Vector& x, int s, std::uint64_t entry_cap = kDefaultLiftCap);

// Views a power-2 lifted vector as its d x d matrix M(z).
Matrix matricize(const LiftedVec& z);

// Row-major flattening of a d1 x d2 matrix; inverse of matricize for square.
LiftedVec flatten(const Matrix& m);

// Flips the sign so the largest-magnitude entry is positive. Ties keep the
// earliest index.
Vector canonical_sign(const Vector& v);

enum class SvdPolicy { kAuto, kPowerIteration, kDense };

// Top singular triple of a dense matrix. kAuto uses a dense decomposition
// for min(rows, cols) <= 64 and two-sided power iteration above that.
// Throws no_convergence_error if power iteration fails to settle.
SingularTriple top_singular_pair(const Matrix& m, double tol = 1e-10,
                                 int max_iter = 5000,
                                 SvdPolicy policy = SvdPolicy::kAuto,
                                 std::uint64_t seed = 0x5eed);

// Top right-singular vector of M(z), sign-canonicalized. z must be nonzero.
Vector v_max(const LiftedVec& z);

// (sum_i sigma_i^p)^{1/p}; p = infinity() gives the operator norm.
double schatten_norm(const Matrix& m, double p);

// Linear minimization oracle for <G, .> over the Schatten-1 ball:
// returns weight/left/right of -radius * u1 v1^T. Zero G yields weight 0.
struct Rank1Atom {
  double weight = 0.0;
  Vector left;
  Vector right;
  Matrix to_matrix() const { return weight * left * right.transpose(); }
};

Rank1Atom nuclear_lmo(const Matrix& g, double radius, double tol = 1e-10,
                      int max_iter = 5000, std::uint64_t seed = 0x5eed);

// Projection of a symmetric matrix onto the PSD cone by eigenvalue clipping.
Matrix psd_project(const Matrix& sym);

}  // namespace relaxlearn
