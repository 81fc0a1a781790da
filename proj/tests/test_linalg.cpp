#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "relaxlearn/linalg.hpp"
#include "relaxlearn/rng.hpp"

using namespace relaxlearn;

namespace {

Matrix random_matrix(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.next_gaussian();
  return m;
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("lift basis vector and scalar cases") {
  const LiftedVec z = lift(vec({1, 0}), 2);
  CHECK(z.entries.size() == 4);
  CHECK(z.entries[0] == 1.0);
  CHECK(z.entries[1] == 0.0);
  CHECK(z.entries[2] == 0.0);
  CHECK(z.entries[3] == 0.0);

  const LiftedVec cube = lift(vec({1.5}), 3);
  CHECK(cube.entries.size() == 1);
  CHECK(cube.entries[0] == doctest::Approx(3.375).epsilon(1e-15));
}

TEST_CASE("lift matches the outer-product oracle") {
  // Oracle: s=2 lift of x is x_i * x_j at flat index i*d + j.
  const Vector x = vec({1, 2});
  const LiftedVec z = lift(x, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(z.entries[i * 2 + j] == x[i] * x[j]);

  // Higher power against a direct triple loop.
  const Vector y = vec({0.5, -1.25, 2.0});
  const LiftedVec z3 = lift(y, 3);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        CHECK(z3.entries[a * 9 + b * 3 + c] ==
              doctest::Approx(y[a] * y[b] * y[c]).epsilon(1e-15));
}

TEST_CASE("lift power 1 is the identity and caps are enforced") {
  const Vector x = vec({3, -4, 5});
  CHECK(lift(x, 1).entries == x);
  CHECK_THROWS_AS(lift(x, 20), dimension_error);
  CHECK_THROWS_AS(lift(x, 0), std::invalid_argument);
}

TEST_CASE("lift respects scaling: lift(c x) = c^s lift(x)") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Vector x(4);
    for (int i = 0; i < 4; ++i) x[i] = rng.next_gaussian();
    const double c = rng.next_uniform(-2.0, 2.0);
    for (int s : {1, 2, 3}) {
      const LiftedVec lhs = lift(c * x, s);
      const LiftedVec rhs = lift(x, s);
      const double scale = std::pow(c, s);
      for (Eigen::Index i = 0; i < lhs.entries.size(); ++i) {
        CHECK(lhs.entries[i] ==
              doctest::Approx(scale * rhs.entries[i]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("matricize views u (x) v as u v^T") {
  const Vector u = vec({1, 1});
  const Vector v = vec({1, -1});
  LiftedVec z;
  z.base_dim = 2;
  z.power = 2;
  z.entries.resize(4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) z.entries[i * 2 + j] = u[i] * v[j];
  const Matrix m = matricize(z);
  const Matrix expect = u * v.transpose();
  CHECK((m - expect).norm() == 0.0);

  CHECK(matricize(lift(vec({1, 0}), 2)) == Matrix::Identity(2, 2).col(0) * vec({1, 0}).transpose());

  LiftedVec zero;
  zero.base_dim = 2;
  zero.power = 2;
  zero.entries = Vector::Zero(4);
  CHECK(matricize(zero).norm() == 0.0);

  LiftedVec wrong;
  wrong.base_dim = 2;
  wrong.power = 3;
  wrong.entries = Vector::Zero(8);
  CHECK_THROWS_AS(matricize(wrong), dimension_error);
}

TEST_CASE("operator norm of lifted matrix is the squared vector norm") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Vector x(5);
    for (int i = 0; i < 5; ++i) x[i] = rng.next_gaussian();
    const double op = schatten_norm(matricize(lift(x, 2)),
                                    std::numeric_limits<double>::infinity());
    CHECK(op == doctest::Approx(x.squaredNorm()).epsilon(1e-9));
  }
}

TEST_CASE("top_singular_pair on fixed matrices") {
  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 2.0;
  diag(1, 1) = 1.0;
  const SingularTriple t = top_singular_pair(diag);
  CHECK(t.sigma == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(t.v[0]) == doctest::Approx(1.0).epsilon(1e-10));

  Matrix shift = Matrix::Zero(2, 2);
  shift(0, 1) = 1.0;
  const SingularTriple ts = top_singular_pair(shift);
  CHECK(ts.sigma == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(ts.u[0]) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(ts.v[1]) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("power iteration agrees with the dense decomposition oracle") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Matrix m = random_matrix(5, 5, 100 + seed);
    Eigen::JacobiSVD<Matrix> oracle(m);
    const SingularTriple t =
        top_singular_pair(m, 1e-12, 20000, SvdPolicy::kPowerIteration, seed);
    CHECK(t.sigma == doctest::Approx(oracle.singularValues()(0)).epsilon(1e-6));
    CHECK(t.u.norm() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(t.v.norm() == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("power iteration is deterministic given the seed") {
  const Matrix m = random_matrix(80, 70, 5);
  const SingularTriple a = top_singular_pair(m, 1e-10, 5000, SvdPolicy::kAuto, 42);
  const SingularTriple b = top_singular_pair(m, 1e-10, 5000, SvdPolicy::kAuto, 42);
  CHECK(a.sigma == b.sigma);
  CHECK((a.v - b.v).norm() == 0.0);
  CHECK_THROWS_AS(
      top_singular_pair(m, 1e-16, 2, SvdPolicy::kPowerIteration, 42),
      no_convergence_error);
}

TEST_CASE("v_max recovers the base vector of a rank-1 lift") {
  const Vector e2 = vec({0, 1, 0});
  CHECK((v_max(lift(e2, 2)) - e2).norm() < 1e-12);

  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    Vector x(4);
    for (int i = 0; i < 4; ++i) x[i] = rng.next_gaussian();
    x.normalize();
    const Vector v = v_max(lift(x, 2));
    CHECK(std::min((v - x).norm(), (v + x).norm()) < 1e-9);
  }

  LiftedVec zero;
  zero.base_dim = 2;
  zero.power = 2;
  zero.entries = Vector::Zero(4);
  CHECK_THROWS_AS(v_max(zero), std::invalid_argument);
}

TEST_CASE("v_max under operator-norm perturbation stays near the base vector") {
  // Wedin-style robustness: a 0.01-operator-norm perturbation moves the top
  // singular vector of a unit rank-1 matrix by O(eps).
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    Vector x(6);
    for (int i = 0; i < 6; ++i) x[i] = rng.next_gaussian();
    x.normalize();
    Matrix e = random_matrix(6, 6, 500 + trial);
    e *= 0.01 / schatten_norm(e, std::numeric_limits<double>::infinity());
    LiftedVec z = flatten(x * x.transpose() + e);
    const Vector v = v_max(z);
    CHECK(std::min((v - x).norm(), (v + x).norm()) < 0.05);
  }
}

TEST_CASE("v_max sign canonicalization is idempotent") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    Vector x(5);
    for (int i = 0; i < 5; ++i) x[i] = rng.next_gaussian();
    const Vector v1 = v_max(lift(x, 2));
    const Vector v2 = v_max(lift(v1, 2));
    CHECK((v1 - v2).norm() < 1e-9);
  }
}

TEST_CASE("schatten_norm fixed values and oracle") {
  CHECK(schatten_norm(Matrix::Identity(3, 3), 1.0) == doctest::Approx(3.0));
  Matrix d34 = Matrix::Zero(2, 2);
  d34(0, 0) = 3.0;
  d34(1, 1) = 4.0;
  CHECK(schatten_norm(d34, 2.0) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK_THROWS_AS(schatten_norm(d34, 0.5), std::invalid_argument);

  const Matrix m = random_matrix(4, 4, 23);
  Eigen::JacobiSVD<Matrix> svd(m);
  for (double p : {1.0, 1.5, 2.0, 3.0, 7.0}) {
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) acc += std::pow(svd.singularValues()(i), p);
    CHECK(schatten_norm(m, p) == doctest::Approx(std::pow(acc, 1.0 / p)).epsilon(1e-9));
  }
}

TEST_CASE("schatten_norm is nonincreasing in p") {
  const Matrix m = random_matrix(5, 3, 29);
  double prev = schatten_norm(m, 1.0);
  for (double p : {1.5, 2.0, 3.0, 5.0, 9.0}) {
    const double cur = schatten_norm(m, p);
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }
  CHECK(schatten_norm(m, std::numeric_limits<double>::infinity()) <= prev + 1e-12);
}

TEST_CASE("nuclear_lmo returns a scaled top pair") {
  Matrix g = Matrix::Zero(2, 2);
  g(0, 0) = 1.0;
  const Rank1Atom atom = nuclear_lmo(g, 1.0);
  const Matrix m = atom.to_matrix();
  CHECK(m(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(m(0, 1)) < 1e-12);
  CHECK(std::abs(m(1, 0)) < 1e-12);
  CHECK(std::abs(m(1, 1)) < 1e-12);

  const Rank1Atom zero = nuclear_lmo(Matrix::Zero(3, 3), 2.0);
  CHECK(zero.weight == 0.0);
  CHECK(zero.to_matrix().norm() == 0.0);
}

TEST_CASE("nuclear_lmo optimality against the dense oracle") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Matrix g = random_matrix(6, 6, 300 + seed);
    const double radius = 1.0 + 0.5 * seed;
    const Rank1Atom atom = nuclear_lmo(g, radius);
    Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Matrix oracle =
        -radius * svd.matrixU().col(0) * svd.matrixV().col(0).transpose();
    const double got = (g.array() * atom.to_matrix().array()).sum();
    const double want = (g.array() * oracle.array()).sum();
    CHECK(got <= want + 1e-6);
    // The atom saturates the ball.
    CHECK(schatten_norm(atom.to_matrix(), 1.0) == doctest::Approx(radius).epsilon(1e-9));
  }
}

TEST_CASE("psd projection clips negative eigenvalues and is idempotent") {
  const Matrix m = random_matrix(6, 6, 31);
  const Matrix sym = 0.5 * (m + m.transpose());
  const Matrix proj = psd_project(sym);
  Eigen::SelfAdjointEigenSolver<Matrix> es(proj, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues()(0) >= -1e-12);
  CHECK((psd_project(proj) - proj).norm() < 1e-10);
}
