#include "relaxlearn/pca.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace relaxlearn {

namespace {

bool lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

}  // namespace

PcaModel fit_kernel_pca(const DataSet& data, int k, int s, std::uint64_t lift_cap) {
  if (data.empty()) throw std::invalid_argument("fit_kernel_pca: empty dataset");
  const LiftedVec probe = lift(data.samples[0], s, lift_cap);
  const int lifted_dim = static_cast<int>(probe.entries.size());
  if (k < 1 || k > lifted_dim) throw std::invalid_argument("fit_kernel_pca: k out of range");

  // One-pass covariance; chunked accumulation keeps the reduction order fixed.
  Matrix cov = Matrix::Zero(lifted_dim, lifted_dim);
  for (int i = 0; i < data.size(); ++i) {
    const LiftedVec z = lift(data.samples[i], s, lift_cap);
    cov.selfadjointView<Eigen::Lower>().rankUpdate(z.entries);
  }
  cov = cov.selfadjointView<Eigen::Lower>();

  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  std::vector<int> order(lifted_dim);
  std::iota(order.begin(), order.end(), 0);
  std::vector<Vector> canon(lifted_dim);
  for (int i = 0; i < lifted_dim; ++i) canon[i] = canonical_sign(es.eigenvectors().col(i));
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    const double lx = es.eigenvalues()[x], ly = es.eigenvalues()[y];
    if (lx != ly) return lx > ly;
    return lex_less(canon[x], canon[y]);
  });

  PcaModel model;
  model.base_dim = data.dim;
  model.s = s;
  model.k = k;
  model.a.resize(k, lifted_dim);
  for (int r = 0; r < k; ++r) model.a.row(r) = canon[order[r]].transpose();
  return model;
}

Vector pca_encode(const PcaModel& model, const Vector& x) {
  const LiftedVec z = lift(x, model.s);
  if (z.entries.size() != model.a.cols()) throw dimension_error("pca_encode: dimension mismatch");
  return model.a * z.entries;
}

LiftedVec pca_decode(const PcaModel& model, const Vector& y) {
  if (y.size() != model.k) throw dimension_error("pca_decode: dimension mismatch");
  LiftedVec out;
  out.base_dim = model.base_dim;
  out.power = model.s;
  out.entries = model.a.transpose() * y;
  return out;
}

HypothesisPair pca_pair(const PcaModel& model) {
  HypothesisPair pair;
  pair.encode = [model](const Vector& x) { return pca_encode(model, x); };
  pair.decode = [model](const Vector& y) { return pca_decode(model, y).entries; };
  pair.target = [model](const Vector& x) { return lift(x, model.s).entries; };
  pair.code_length_bits = 64 * model.k;
  return pair;
}

ClassEvaluator pca_class_evaluator(int k, int s) {
  return [k, s](const std::vector<double>& signs, const DataSet& data) {
    const int m = data.size();
    const LiftedVec probe = lift(data.samples[0], s);
    const int dim = static_cast<int>(probe.entries.size());
    Matrix weighted = Matrix::Zero(dim, dim);
    double offset = 0.0;
    for (int i = 0; i < m; ++i) {
      const LiftedVec z = lift(data.samples[i], s);
      weighted.selfadjointView<Eigen::Lower>().rankUpdate(z.entries, signs[i] / m);
      offset += signs[i] * z.entries.squaredNorm() / m;
    }
    weighted = weighted.selfadjointView<Eigen::Lower>();
    Eigen::SelfAdjointEigenSolver<Matrix> es(weighted, Eigen::EigenvaluesOnly);
    double drop = 0.0;  // sum of the k most negative eigenvalues, clipped
    for (int i = 0; i < std::min(k, dim); ++i) drop += std::min(0.0, es.eigenvalues()[i]);
    return offset - drop;
  };
}

void save_pca_model(const PcaModel& model, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_pca_model: cannot open " + path);
  os << "pca " << model.base_dim << ' ' << model.s << ' ' << model.k << '\n';
  write_matrix_rows(os, model.a);
}

PcaModel load_pca_model(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_pca_model: cannot open " + path);
  std::string tag;
  PcaModel model;
  if (!(is >> tag >> model.base_dim >> model.s >> model.k) || tag != "pca") {
    throw std::runtime_error("load_pca_model: bad header in " + path);
  }
  std::uint64_t lifted = 1;
  for (int i = 0; i < model.s; ++i) lifted *= static_cast<std::uint64_t>(model.base_dim);
  model.a = read_matrix_rows(is, model.k, static_cast<int>(lifted));
  return model;
}

}  // namespace relaxlearn
