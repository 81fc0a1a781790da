#include "relaxlearn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "relaxlearn/rng.hpp"

namespace relaxlearn {

LiftedVec lift(const Vector& x, int s, std::uint64_t entry_cap) {
  if (s < 1) throw std::invalid_argument("lift: power must be >= 1");
  const int d = static_cast<int>(x.size());
  std::uint64_t n = 1;
  for (int i = 0; i < s; ++i) {
    if (d == 0 || n > entry_cap / static_cast<std::uint64_t>(d)) {
      throw dimension_error("lift: d^s exceeds entry cap");
    }
    n *= static_cast<std::uint64_t>(d);
  }
  LiftedVec out;
  out.base_dim = d;
  out.power = s;
  out.entries.resize(static_cast<Eigen::Index>(n));
  if (s == 1) {
    out.entries = x;
    return out;
  }
  // Row-major multi-index walk: entry(i1,...,is) = prod x_{ij}.
  out.entries.setConstant(1.0);
  std::uint64_t block = n;
  for (int level = 0; level < s; ++level) {
    block /= static_cast<std::uint64_t>(d);
    for (std::uint64_t idx = 0; idx < n; ++idx) {
      const int which = static_cast<int>((idx / block) % d);
      out.entries[static_cast<Eigen::Index>(idx)] *= x[which];
    }
  }
  return out;
}

Matrix matricize(const LiftedVec& z) {
  if (z.power != 2) throw dimension_error("matricize: power must be 2");
  const int d = z.base_dim;
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = z.entries[i * d + j];
  return m;
}

LiftedVec flatten(const Matrix& m) {
  LiftedVec z;
  z.base_dim = static_cast<int>(m.rows());
  z.power = 2;
  if (m.rows() != m.cols()) throw dimension_error("flatten: matrix not square");
  z.entries.resize(m.size());
  const int d = z.base_dim;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) z.entries[i * d + j] = m(i, j);
  return z;
}

Vector canonical_sign(const Vector& v) {
  Eigen::Index best = 0;
  double mag = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > mag) {
      mag = std::abs(v[i]);
      best = i;
    }
  }
  return v[best] < 0.0 ? Vector(-v) : v;
}

namespace {

SingularTriple dense_top_pair(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SingularTriple t;
  t.sigma = svd.singularValues()(0);
  t.u = svd.matrixU().col(0);
  t.v = svd.matrixV().col(0);
  return t;
}

SingularTriple power_top_pair(const Matrix& m, double tol, int max_iter,
                              std::uint64_t seed) {
  const Eigen::Index n = m.cols();
  Rng rng(seed);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.next_gaussian();
  v.normalize();
  const double scale = m.norm();
  if (scale == 0.0) {
    SingularTriple t;
    t.sigma = 0.0;
    t.u = Vector::Zero(m.rows());
    t.v = Vector::Zero(n);
    if (m.rows() > 0) t.u[0] = 1.0;
    if (n > 0) t.v[0] = 1.0;
    return t;
  }
  double sigma = 0.0;
  Vector u;
  for (int it = 0; it < max_iter; ++it) {
    u = m * v;
    const double un = u.norm();
    if (un == 0.0) {
      // Restart from a fresh direction; v lies in the null space.
      for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.next_gaussian();
      v.normalize();
      continue;
    }
    u /= un;
    Vector w = m.transpose() * u;
    const double wn = w.norm();
    if (wn == 0.0) continue;
    v = w / wn;
    const double prev = sigma;
    sigma = wn;
    if (it > 0 && std::abs(sigma - prev) <= tol * scale) {
      SingularTriple t;
      t.sigma = sigma;
      t.u = u;
      t.v = v;
      return t;
    }
  }
  throw no_convergence_error("top_singular_pair: power iteration exceeded max_iter");
}

}  // namespace

SingularTriple top_singular_pair(const Matrix& m, double tol, int max_iter,
                                 SvdPolicy policy, std::uint64_t seed) {
  if (tol <= 0.0) throw std::invalid_argument("top_singular_pair: tol must be > 0");
  if (!m.allFinite()) throw std::invalid_argument("top_singular_pair: non-finite input");
  const bool small = std::min(m.rows(), m.cols()) <= 64;
  if (policy == SvdPolicy::kDense || (policy == SvdPolicy::kAuto && small)) {
    return dense_top_pair(m);
  }
  return power_top_pair(m, tol, max_iter, seed);
}

Vector v_max(const LiftedVec& z) {
  if (z.entries.norm() == 0.0) throw std::invalid_argument("v_max: zero input");
  SingularTriple t = top_singular_pair(matricize(z));
  return canonical_sign(t.v);
}

double schatten_norm(const Matrix& m, double p) {
  if (p < 1.0) throw std::invalid_argument("schatten_norm: p must be >= 1");
  if (!m.allFinite()) throw std::invalid_argument("schatten_norm: non-finite input");
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  if (std::isinf(p)) return sv.size() ? sv(0) : 0.0;
  if (p == 1.0) return sv.sum();
  if (p == 2.0) return sv.norm();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) acc += std::pow(sv(i), p);
  return std::pow(acc, 1.0 / p);
}

Rank1Atom nuclear_lmo(const Matrix& g, double radius, double tol, int max_iter,
                      std::uint64_t seed) {
  if (radius <= 0.0) throw std::invalid_argument("nuclear_lmo: radius must be > 0");
  Rank1Atom atom;
  if (g.norm() == 0.0) {
    atom.weight = 0.0;
    atom.left = Vector::Zero(g.rows());
    atom.right = Vector::Zero(g.cols());
    return atom;
  }
  SingularTriple t = top_singular_pair(g, tol, max_iter, SvdPolicy::kAuto, seed);
  atom.weight = radius;
  atom.left = -t.u;
  atom.right = t.v;
  return atom;
}

Matrix psd_project(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sym + sym.transpose()));
  Vector lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace relaxlearn
