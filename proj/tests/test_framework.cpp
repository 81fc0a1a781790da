#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "relaxlearn/datagen.hpp"
#include "relaxlearn/framework.hpp"
#include "relaxlearn/pca.hpp"
#include "relaxlearn/rng.hpp"

using namespace relaxlearn;

namespace {

DataSet unit_data(int d, int m, std::uint64_t seed) {
  return gen_subspace(d, d, m, 0.0, seed).data;
}

}  // namespace

TEST_CASE("empirical loss of the identity pair is zero") {
  const DataSet data = unit_data(5, 20, 1);
  CHECK(empirical_loss(identity_pair(5), data, LossKind::kSquaredEuclidean) == 0.0);
  CHECK(empirical_loss(identity_pair(5), data, LossKind::kL1PerCoordinate) == 0.0);
}

TEST_CASE("zero decoder on unit data gives squared loss one") {
  const DataSet data = unit_data(6, 25, 2);
  HypothesisPair zero;
  zero.encode = [](const Vector& x) { return x; };
  zero.decode = [](const Vector& y) { return Vector(Vector::Zero(y.size())); };
  zero.code_length_bits = 64 * 6;
  CHECK(empirical_loss(zero, data, LossKind::kSquaredEuclidean) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("empty dataset is rejected") {
  DataSet empty;
  empty.dim = 3;
  CHECK_THROWS_AS(empirical_loss(identity_pair(3), empty, LossKind::kSquaredEuclidean),
                  std::invalid_argument);
}

TEST_CASE("empirical loss is invariant under sample permutation") {
  DataSet data = unit_data(4, 15, 3);
  HypothesisPair half;
  half.encode = [](const Vector& x) { return x; };
  half.decode = [](const Vector& y) { return Vector(0.5 * y); };
  const double before = empirical_loss(half, data, LossKind::kL1PerCoordinate);
  std::reverse(data.samples.begin(), data.samples.end());
  const double after = empirical_loss(half, data, LossKind::kL1PerCoordinate);
  CHECK(before == doctest::Approx(after).epsilon(1e-15));
}

TEST_CASE("rademacher estimate of a constant-loss singleton is near zero") {
  const DataSet data = unit_data(4, 60, 4);
  ClassEvaluator constant = [](const std::vector<double>& signs, const DataSet&) {
    double s = 0.0;
    for (double v : signs) s += v * 0.7;  // loss identically 0.7
    return s / signs.size();
  };
  const WidthEstimate est = rademacher_estimate(constant, data, 300, 5);
  CHECK(std::abs(est.mean) <= 3.0 * est.std_error + 1e-12);
}

TEST_CASE("rademacher estimate is linear in the loss scale") {
  const DataSet data = unit_data(6, 40, 6);
  const ClassEvaluator base = pca_class_evaluator(2, 1);
  ClassEvaluator doubled = [&base](const std::vector<double>& signs, const DataSet& d) {
    return 2.0 * base(signs, d);
  };
  const WidthEstimate a = rademacher_estimate(base, data, 200, 7);
  const WidthEstimate b = rademacher_estimate(doubled, data, 200, 7);
  CHECK(b.mean == doctest::Approx(2.0 * a.mean).epsilon(1e-12));
}

TEST_CASE("rademacher estimate of a union dominates each class") {
  const DataSet data = unit_data(6, 50, 8);
  const ClassEvaluator small = pca_class_evaluator(1, 1);
  const ClassEvaluator big = pca_class_evaluator(3, 1);
  ClassEvaluator united = [&](const std::vector<double>& signs, const DataSet& d) {
    return std::max(small(signs, d), big(signs, d));
  };
  const WidthEstimate eu = rademacher_estimate(united, data, 200, 9);
  const WidthEstimate es = rademacher_estimate(small, data, 200, 9);
  const WidthEstimate eb = rademacher_estimate(big, data, 200, 9);
  const double slack = 3.0 * (eu.std_error + es.std_error + eb.std_error);
  CHECK(eu.mean >= es.mean - slack);
  CHECK(eu.mean >= eb.mean - slack);
}

TEST_CASE("pca rademacher estimate is within the paper-scale bound") {
  for (int m : {50, 200}) {
    const DataSet data = unit_data(8, m, 100 + m);
    const WidthEstimate est = rademacher_estimate(pca_class_evaluator(2, 1), data, 200, 10);
    CHECK(est.mean <= 3.0 * std::sqrt(8.0 / m));
    CHECK(est.mean >= 0.0);
  }
}

TEST_CASE("estimators are reproducible bit for bit") {
  const DataSet data = unit_data(5, 30, 11);
  const WidthEstimate a = rademacher_estimate(pca_class_evaluator(2, 1), data, 64, 12);
  const WidthEstimate b = rademacher_estimate(pca_class_evaluator(2, 1), data, 64, 12);
  CHECK(a.values == b.values);

  SetMaximizer linf = [](const Vector& xi) { return xi.lpNorm<1>(); };
  const WidthEstimate c = srw_estimate(linf, 24, 6, 64, 13);
  const WidthEstimate d = srw_estimate(linf, 24, 6, 64, 13);
  CHECK(c.values == d.values);
}

TEST_CASE("srw of the zero set is exactly zero and the linf ball exactly one") {
  SetMaximizer zero = [](const Vector&) { return 0.0; };
  const WidthEstimate ez = srw_estimate(zero, 30, 10, 50, 14);
  CHECK(ez.mean == 0.0);
  CHECK(ez.std_error == 0.0);

  SetMaximizer linf = [](const Vector& xi) { return xi.lpNorm<1>(); };
  const WidthEstimate el = srw_estimate(linf, 30, 10, 50, 15);
  CHECK(el.mean == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(el.std_error == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("srw over the Schatten ball is nonincreasing in m") {
  const int side = 8, total = side * side;
  auto schatten_max = [side](double radius) {
    return SetMaximizer([side, radius](const Vector& xi) {
      Matrix m(side, side);
      for (int i = 0; i < side; ++i)
        for (int j = 0; j < side; ++j) m(i, j) = xi[i * side + j];
      Eigen::JacobiSVD<Matrix> svd(m);
      return radius * svd.singularValues()(0);
    });
  };
  WidthEstimate prev;
  bool first = true;
  for (int m : {8, 32, 64}) {
    const WidthEstimate est = srw_estimate(schatten_max(1.0), total, m, 200, 16);
    if (!first) {
      CHECK(est.mean <= prev.mean + 3.0 * (est.std_error + prev.std_error));
    }
    prev = est;
    first = false;
  }
}

TEST_CASE("srw scales linearly with the set radius") {
  const int side = 6, total = side * side;
  auto schatten_max = [side](double radius) {
    return SetMaximizer([side, radius](const Vector& xi) {
      Matrix m(side, side);
      for (int i = 0; i < side; ++i)
        for (int j = 0; j < side; ++j) m(i, j) = xi[i * side + j];
      Eigen::JacobiSVD<Matrix> svd(m);
      return radius * svd.singularValues()(0);
    });
  };
  const WidthEstimate one = srw_estimate(schatten_max(1.0), total, 12, 100, 17);
  const WidthEstimate two = srw_estimate(schatten_max(2.0), total, 12, 100, 17);
  CHECK(two.mean == doctest::Approx(2.0 * one.mean).epsilon(1e-12));
}

TEST_CASE("generalization report: identity learner has zero gap") {
  Sampler sampler = [](int m, std::uint64_t seed) { return unit_data(4, m, seed); };
  Learner learner = [](const DataSet& data) { return identity_pair(data.dim); };
  const auto rows = generalization_report(learner, sampler, {10, 20}, 50,
                                          LossKind::kSquaredEuclidean, 18);
  for (const auto& r : rows) CHECK(r.gap == 0.0);
}

TEST_CASE("generalization report is deterministic") {
  Sampler sampler = [](int m, std::uint64_t seed) {
    return gen_subspace(6, 2, m, 0.1, seed).data;
  };
  Learner learner = [](const DataSet& data) {
    return pca_pair(fit_kernel_pca(data, 2, 1));
  };
  const auto a = generalization_report(learner, sampler, {20, 40}, 100,
                                       LossKind::kSquaredEuclidean, 19);
  const auto b = generalization_report(learner, sampler, {20, 40}, 100,
                                       LossKind::kSquaredEuclidean, 19);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].train_loss == b[i].train_loss);
    CHECK(a[i].holdout_loss == b[i].holdout_loss);
  }
}

TEST_CASE("pca generalization gap shrinks with more data") {
  // Statistical: 5 seeds, gap at m=800 below gap at m=50 in most runs.
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Sampler sampler = [seed](int m, std::uint64_t s) {
      return gen_subspace(8, 2, m, 0.25, Rng::mix(s + seed * 1000)).data;
    };
    Learner learner = [](const DataSet& data) {
      return pca_pair(fit_kernel_pca(data, 2, 1));
    };
    const auto rows = generalization_report(learner, sampler, {50, 800}, 4000,
                                            LossKind::kSquaredEuclidean, seed);
    if (std::abs(rows[1].gap) < std::abs(rows[0].gap)) ++wins;
  }
  CHECK(wins >= 4);
}

TEST_CASE("downstream check: perfect reconstruction gives equal losses") {
  const DataSet data = unit_data(5, 40, 20);
  Rng rng(21);
  Vector targets(data.size());
  for (int i = 0; i < data.size(); ++i) targets[i] = rng.next_gaussian();
  const DownstreamReport rep = downstream_check(identity_pair(5), data, targets, 2.0);
  CHECK(rep.loss_on_reconstructed == doctest::Approx(rep.loss_on_raw).epsilon(1e-9));
  CHECK(rep.mean_reconstruction_error == 0.0);
}

TEST_CASE("downstream check: zero decoder bound equals raw loss plus mean norm") {
  const DataSet data = unit_data(4, 30, 22);
  Rng rng(23);
  Vector targets(data.size());
  for (int i = 0; i < data.size(); ++i) targets[i] = rng.next_gaussian();
  HypothesisPair zero;
  zero.encode = [](const Vector& x) { return x; };
  zero.decode = [](const Vector& y) { return Vector(Vector::Zero(y.size())); };
  const DownstreamReport rep = downstream_check(zero, data, targets, 1.0);
  // Unit data: mean reconstruction error is exactly 1.
  CHECK(rep.bound == doctest::Approx(rep.loss_on_raw + 1.0).epsilon(1e-12));
  CHECK(rep.loss_on_reconstructed <= rep.bound + 1e-6);
}

TEST_CASE("downstream check: pca pair stays within the Lipschitz bound") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const DataSet data = gen_subspace(6, 2, 60, 0.1, 300 + seed).data;
    Rng rng(seed);
    Vector targets(data.size());
    for (int i = 0; i < data.size(); ++i) {
      targets[i] = data.samples[i][0] + 0.05 * rng.next_gaussian();
    }
    const PcaModel model = fit_kernel_pca(data, 2, 1);
    HypothesisPair pair = pca_pair(model);  // s=1: reconstruction in data space
    const DownstreamReport rep = downstream_check(pair, data, targets, 3.0);
    CHECK(rep.loss_on_reconstructed <= rep.bound + 1e-6);
  }
}

TEST_CASE("csv writers emit the fixed schemas") {
  std::ostringstream gen_csv;
  write_generalization_csv(gen_csv, {{10, 0.5, 0.75, 0.25}});
  CHECK(gen_csv.str().rfind("m,train_loss,holdout_loss,gap\n", 0) == 0);

  std::ostringstream width_csv;
  WidthEstimate est;
  est.values = {0.25, 0.5};
  est.trials = 2;
  write_width_csv(width_csv, est);
  CHECK(width_csv.str() == "trial,value\n0,0.25\n1,0.5\n");
}
