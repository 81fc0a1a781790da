#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "relaxlearn/datagen.hpp"
#include "relaxlearn/framework.hpp"
#include "relaxlearn/pca.hpp"
#include "relaxlearn/rng.hpp"

using namespace relaxlearn;

namespace {

Matrix random_projection(int dim, int k, Rng& rng) {
  Matrix g(dim, k);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < k; ++j) g(i, j) = rng.next_gaussian();
  const Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix q = qr.householderQ() * Matrix::Identity(dim, k);
  return q * q.transpose();
}

}  // namespace

TEST_CASE("data on a line: k=1 fit has zero loss and recovers the span") {
  Rng rng(1);
  DataSet data;
  data.dim = 4;
  Vector dir(4);
  for (int i = 0; i < 4; ++i) dir[i] = rng.next_gaussian();
  dir.normalize();
  for (int i = 0; i < 12; ++i) data.samples.push_back(rng.next_gaussian() * dir);
  const PcaModel model = fit_kernel_pca(data, 1, 1);
  CHECK(empirical_loss(pca_pair(model), data, LossKind::kSquaredEuclidean) < 1e-18);
  CHECK(std::abs(std::abs(model.a.row(0).dot(dir)) - 1.0) < 1e-10);
}

TEST_CASE("k equal to the lifted dimension gives the identity projection") {
  const DataSet data = gen_subspace(3, 3, 20, 0.0, 2).data;
  const PcaModel model = fit_kernel_pca(data, 3, 1);
  const Matrix proj = model.a.transpose() * model.a;
  CHECK((proj - Matrix::Identity(3, 3)).norm() < 1e-10);
  CHECK(empirical_loss(pca_pair(model), data, LossKind::kSquaredEuclidean) < 1e-18);
}

TEST_CASE("model rows are orthonormal and the projection is idempotent") {
  const DataSet data = gen_subspace(6, 4, 50, 0.2, 3).data;
  const PcaModel model = fit_kernel_pca(data, 3, 1);
  const Matrix gram = model.a * model.a.transpose();
  CHECK((gram - Matrix::Identity(3, 3)).norm() < 1e-8);
  const Matrix proj = model.a.transpose() * model.a;
  CHECK((proj * proj - proj).norm() < 1e-8);
}

TEST_CASE("ERM beats 200 random rank-k projections") {
  const DataSet data = gen_subspace(6, 6, 100, 0.0, 4).data;
  const PcaModel model = fit_kernel_pca(data, 2, 1);
  const double erm = empirical_loss(pca_pair(model), data, LossKind::kSquaredEuclidean);
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix proj = random_projection(6, 2, rng);
    double loss = 0.0;
    for (const auto& x : data.samples) loss += (x - proj * x).squaredNorm();
    loss /= data.size();
    CHECK(erm <= loss + 1e-9);
  }
}

TEST_CASE("fitted loss is nonincreasing in k") {
  const DataSet data = gen_subspace(7, 7, 60, 0.0, 6).data;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 7; ++k) {
    const PcaModel model = fit_kernel_pca(data, k, 1);
    const double loss = empirical_loss(pca_pair(model), data, LossKind::kSquaredEuclidean);
    CHECK(loss <= prev + 1e-12);
    prev = loss;
  }
}

TEST_CASE("encode/decode is the lifted projection, Pythagoras style") {
  const DataSet data = gen_subspace(5, 3, 30, 0.1, 7).data;
  const PcaModel model = fit_kernel_pca(data, 2, 2);
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    Vector x(5);
    for (int i = 0; i < 5; ++i) x[i] = rng.next_gaussian();
    const Vector code = pca_encode(model, x);
    const LiftedVec recon = pca_decode(model, code);
    const LiftedVec z = lift(x, 2);
    // decode(encode(x)) = A^T A z
    CHECK((recon.entries - model.a.transpose() * (model.a * z.entries)).norm() < 1e-10);
    // Loss = ||z||^2 - ||A z||^2 within 1e-9.
    const double loss = (z.entries - recon.entries).squaredNorm();
    CHECK(loss == doctest::Approx(z.entries.squaredNorm() - code.squaredNorm()).epsilon(1e-9));
  }
}

TEST_CASE("sample in the fitted subspace reconstructs exactly") {
  const SubspaceData gen = gen_subspace(6, 2, 40, 0.0, 9);
  const PcaModel model = fit_kernel_pca(gen.data, 2, 1);
  const Vector x = gen.data.samples[0];
  const LiftedVec recon = pca_decode(model, pca_encode(model, x));
  CHECK((recon.entries - x).norm() < 1e-9);
}

TEST_CASE("unit vector orthogonal to the subspace has loss one (s=1)") {
  DataSet data;
  data.dim = 4;
  Rng rng(10);
  for (int i = 0; i < 20; ++i) {
    Vector x = Vector::Zero(4);
    x[0] = rng.next_gaussian();
    x[1] = rng.next_gaussian();
    data.samples.push_back(x);
  }
  const PcaModel model = fit_kernel_pca(data, 2, 1);
  Vector e3 = Vector::Zero(4);
  e3[3] = 1.0;
  CHECK(pair_loss(pca_pair(model), e3, LossKind::kSquaredEuclidean) ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("s=2 fit equals s=1 fit on pre-lifted data") {
  const DataSet data = gen_subspace(4, 2, 40, 0.15, 11).data;
  const PcaModel lifted_fit = fit_kernel_pca(data, 3, 2);

  DataSet prelifted;
  prelifted.dim = 16;
  for (const auto& x : data.samples) prelifted.samples.push_back(lift(x, 2).entries);
  const PcaModel direct_fit = fit_kernel_pca(prelifted, 3, 1);

  const Matrix p1 = lifted_fit.a.transpose() * lifted_fit.a;
  const Matrix p2 = direct_fit.a.transpose() * direct_fit.a;
  CHECK((p1 - p2).norm() < 1e-8);
}

TEST_CASE("k out of range is rejected") {
  const DataSet data = gen_subspace(3, 2, 10, 0.0, 12).data;
  CHECK_THROWS_AS(fit_kernel_pca(data, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(fit_kernel_pca(data, 4, 1), std::invalid_argument);
  const PcaModel model = fit_kernel_pca(data, 2, 1);
  CHECK_THROWS_AS(pca_encode(model, Vector::Zero(7)), dimension_error);
  CHECK_THROWS_AS(pca_decode(model, Vector::Zero(3)), dimension_error);
}

TEST_CASE("degenerate spectra produce a deterministic model") {
  // Isotropic data: all eigenvalues tie in expectation; exact fit twice
  // must produce identical bytes.
  const DataSet data = gen_subspace(5, 5, 40, 0.0, 13).data;
  const PcaModel a = fit_kernel_pca(data, 2, 1);
  const PcaModel b = fit_kernel_pca(data, 2, 1);
  CHECK(a.a == b.a);
}

TEST_CASE("model file round trip") {
  const DataSet data = gen_subspace(4, 2, 25, 0.05, 14).data;
  const PcaModel model = fit_kernel_pca(data, 2, 2);
  const std::string path = "test_pca_roundtrip.pca";
  save_pca_model(model, path);
  const PcaModel loaded = load_pca_model(path);
  CHECK(loaded.base_dim == model.base_dim);
  CHECK(loaded.s == model.s);
  CHECK(loaded.k == model.k);
  CHECK(loaded.a == model.a);
  std::remove(path.c_str());
}
