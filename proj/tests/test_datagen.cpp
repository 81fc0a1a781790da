#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "relaxlearn/datagen.hpp"
#include "relaxlearn/spectral.hpp"

using namespace relaxlearn;

TEST_CASE("subspace generator: noiseless samples lie in span(U)") {
  const SubspaceData gen = gen_subspace(8, 3, 40, 0.0, 123);
  const Matrix proj = gen.basis * gen.basis.transpose();
  for (const auto& x : gen.data.samples) {
    CHECK(std::abs(x.norm() - 1.0) < 1e-12);
    CHECK((x - proj * x).norm() < 1e-9);
  }
}

TEST_CASE("subspace generator with k = d emits unit vectors") {
  const SubspaceData gen = gen_subspace(5, 5, 30, 0.0, 7);
  for (const auto& x : gen.data.samples) CHECK(std::abs(x.norm() - 1.0) < 1e-12);
}

TEST_CASE("generators are pure functions of the seed") {
  const SubspaceData a = gen_subspace(6, 2, 25, 0.3, 99);
  const SubspaceData b = gen_subspace(6, 2, 25, 0.3, 99);
  CHECK(a.data.as_matrix() == b.data.as_matrix());
  const DictionaryData da = gen_dictionary(10, 15, 3, 50, 0.1, 4);
  const DictionaryData db = gen_dictionary(10, 15, 3, 50, 0.1, 4);
  CHECK(da.data.as_matrix() == db.data.as_matrix());
  CHECK(da.spec.a_star == db.spec.a_star);
}

TEST_CASE("regular decodable: planted objective is exactly the noise level") {
  const RegularDecodableData clean = gen_regular_decodable(8, 2, 60, 0.0, 11);
  CHECK(objective_value(clean.witness, clean.data) <= 1e-10);
  for (const auto& x : clean.data.samples) CHECK(std::abs(x.norm() - 1.0) < 1e-10);

  const RegularDecodableData noisy = gen_regular_decodable(8, 2, 60, 0.05, 11);
  const double obj = objective_value(noisy.witness, noisy.data);
  CHECK(obj <= 0.05 + 1e-9);
  CHECK(obj >= 0.05 - 1e-9);  // injected with exact operator norm
}

TEST_CASE("regular decodable witness has unit atoms and valid weight sum") {
  const RegularDecodableData gen = gen_regular_decodable(6, 3, 10, 0.02, 5);
  for (const auto& atom : gen.witness.atoms) {
    CHECK(std::abs(atom.left.norm() - 1.0) < 1e-10);
    CHECK(std::abs(atom.right.norm() - 1.0) < 1e-10);
    CHECK(atom.weight >= 0.0);
  }
  CHECK(gen.witness.weight_sum() <= gen.witness.radius + 1e-8);
}

TEST_CASE("dictionary generator: entry variance matches the analytic oracle") {
  // x_i = sum of k independent +-uniform[-1,1] terms, so Var = k/3.
  const int d = 50, n = 500, k = 4;
  const DictionaryData gen = gen_dictionary(d, 60, k, n, 0.0, 77);
  const Matrix x = gen.data.as_matrix();
  double ss = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < n; ++j) ss += x(i, j) * x(i, j);
  const double std_dev = std::sqrt(ss / (d * n));
  const double expected = std::sqrt(k / 3.0);
  CHECK(std_dev == doctest::Approx(expected).epsilon(0.15));
}

TEST_CASE("dictionary generator respects the norm bounds") {
  const DictionaryData gen = gen_dictionary(6, 9, 2, 30, 0.0, 3);
  CHECK(gen.spec.a_star.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
  CHECK(gen.spec.k == 2.0);
}

TEST_CASE("manifold generator: emitted points satisfy the constraints") {
  // Constraints orthogonal to vec(e1 e1^T) keep +-e1 on the variety.
  const int d = 3, d2 = 9;
  Rng rng(21);
  Matrix constraints(2, d2);
  for (int i = 0; i < 2; ++i) {
    Vector c(d2);
    for (int j = 0; j < d2; ++j) c[j] = rng.next_gaussian();
    c[0] = 0.0;  // <c, e1 (x) e1> = 0
    constraints.row(i) = c.normalized().transpose();
  }
  const ManifoldData gen = gen_manifold_s2(d, d2 - 2, 12, 42, constraints);
  for (const auto& x : gen.data.samples) {
    CHECK(std::abs(x.norm() - 1.0) < 1e-9);
    const LiftedVec z = lift(x, 2);
    for (int i = 0; i < 2; ++i) {
      CHECK(std::abs(constraints.row(i).dot(z.entries)) <= 1e-8);
    }
  }
  // e1 is a fixed point of the projection: residual already zero.
  Vector e1 = Vector::Zero(d);
  e1[0] = 1.0;
  const LiftedVec z1 = lift(e1, 2);
  for (int i = 0; i < 2; ++i) CHECK(std::abs(constraints.row(i).dot(z1.entries)) < 1e-12);
}

TEST_CASE("manifold generator with no constraints accepts any unit vector") {
  const ManifoldData gen = gen_manifold_s2(3, 9, 8, 9);
  CHECK(gen.constraints.rows() == 0);
  CHECK(gen.data.size() == 8);
  for (const auto& x : gen.data.samples) CHECK(std::abs(x.norm() - 1.0) < 1e-12);
}

TEST_CASE("dataset file round trip preserves bytes") {
  const SubspaceData gen = gen_subspace(4, 2, 10, 0.2, 31);
  const std::string path = "test_dataset_roundtrip.txt";
  save_dataset(gen.data, path);
  const DataSet loaded = load_dataset(path);
  CHECK(loaded.dim == gen.data.dim);
  CHECK(loaded.seed == gen.data.seed);
  CHECK(loaded.provenance == gen.data.provenance);
  CHECK(loaded.as_matrix() == gen.data.as_matrix());
  const std::string path2 = "test_dataset_roundtrip2.txt";
  save_dataset(loaded, path2);
  auto slurp = [](const std::string& p) {
    FILE* f = fopen(p.c_str(), "rb");
    REQUIRE(f);
    std::string s;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, f)) > 0) s.append(buf, n);
    fclose(f);
    return s;
  };
  CHECK(slurp(path) == slurp(path2));
  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("spectral witness file round trip") {
  const RegularDecodableData gen = gen_regular_decodable(5, 2, 8, 0.03, 13);
  const std::string path = "test_witness_roundtrip.sa";
  save_spectral_model(gen.witness, path);
  const SpectralModel loaded = load_spectral_model(path);
  CHECK(loaded.dim == gen.witness.dim);
  CHECK(loaded.atoms.size() == gen.witness.atoms.size());
  CHECK(objective_value(loaded, gen.data) ==
        doctest::Approx(objective_value(gen.witness, gen.data)).epsilon(1e-12));
  std::remove(path.c_str());
}
