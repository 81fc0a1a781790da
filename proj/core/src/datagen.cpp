#include "relaxlearn/datagen.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "relaxlearn/rng.hpp"

namespace relaxlearn {

Matrix random_orthonormal(int rows, int cols, Rng& rng) {
  if (cols > rows) throw std::invalid_argument("random_orthonormal: cols > rows");
  Matrix u(rows, cols);
  for (int c = 0; c < cols; ++c) {
    Vector v(rows);
    for (;;) {
      for (int i = 0; i < rows; ++i) v[i] = rng.next_gaussian();
      for (int prev = 0; prev < c; ++prev) v -= u.col(prev).dot(v) * u.col(prev);
      // Second Gram-Schmidt pass for orthogonality at working precision.
      for (int prev = 0; prev < c; ++prev) v -= u.col(prev).dot(v) * u.col(prev);
      const double n = v.norm();
      if (n > 1e-8) {
        u.col(c) = v / n;
        break;
      }
    }
  }
  return u;
}

SubspaceData gen_subspace(int d, int k, int m, double noise, std::uint64_t seed) {
  if (k > d || k < 1) throw std::invalid_argument("gen_subspace: need 1 <= k <= d");
  Rng rng(seed);
  Rng basis_rng = rng.fork(0);
  SubspaceData out;
  out.basis = random_orthonormal(d, k, basis_rng);
  out.data.dim = d;
  out.data.seed = seed;
  out.data.provenance = "subspace";
  out.data.samples.reserve(m);
  for (int i = 0; i < m; ++i) {
    Rng s = rng.fork(i + 1);
    Vector g(k);
    for (int j = 0; j < k; ++j) g[j] = s.next_gaussian();
    Vector x = out.basis * g;
    if (noise > 0.0) {
      for (int j = 0; j < d; ++j) x[j] += noise * s.next_gaussian();
    }
    const double n = x.norm();
    out.data.samples.push_back(n > 0 ? Vector(x / n) : Vector::Unit(d, 0));
  }
  return out;
}

RegularDecodableData gen_regular_decodable(int d, int k, int m, double eps,
                                           std::uint64_t seed, double tau) {
  if (k > d || k < 1) throw std::invalid_argument("gen_regular_decodable: need 1 <= k <= d");
  if (eps < 0.0) throw std::invalid_argument("gen_regular_decodable: eps must be >= 0");
  Rng rng(seed);
  Rng basis_rng = rng.fork(0);
  RegularDecodableData out;
  out.atoms = random_orthonormal(d, k, basis_rng);
  out.spec = {k, eps, tau};

  out.witness.dim = d;
  Rng noise_rng = rng.fork(1);
  for (int j = 0; j < k; ++j) {
    const Vector a = out.atoms.col(j);
    const Matrix outer = a * a.transpose();
    Matrix target = outer;
    if (eps > 0.0) {
      // Symmetric perturbation rescaled to operator norm exactly eps, so the
      // witness residual on every sample has operator norm eps.
      Matrix w(d, d);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) w(r, c) = noise_rng.next_gaussian();
      Matrix e = 0.5 * (w + w.transpose());
      Eigen::SelfAdjointEigenSolver<Matrix> es(e, Eigen::EigenvaluesOnly);
      const double op = std::max(std::abs(es.eigenvalues()(0)),
                                 std::abs(es.eigenvalues()(d - 1)));
      target += (eps / op) * e;
    }
    Rank1Atom atom;
    atom.right = flatten(outer).entries;  // unit: ||a a^T||_F = 1
    Vector left = flatten(target).entries;
    atom.weight = left.norm();
    atom.left = left / atom.weight;
    out.witness.atoms.push_back(std::move(atom));
  }
  out.witness.radius = std::max(tau * k, out.witness.weight_sum());

  out.data.dim = d;
  out.data.seed = seed;
  out.data.provenance = "regular_decodable";
  out.data.samples.reserve(m);
  for (int i = 0; i < m; ++i) {
    Rng s = rng.fork(i + 2);
    const int j = static_cast<int>(s.next_below(k));
    const double sign = s.next_sign();
    out.data.samples.push_back(sign * out.atoms.col(j));
  }
  return out;
}

DictionaryData gen_dictionary(int d, int r, int k, int n, double noise,
                              std::uint64_t seed) {
  if (d < 1 || r < 1 || k < 1 || n < 1) {
    throw std::invalid_argument("gen_dictionary: dimensions must be positive");
  }
  if (k > r) throw std::invalid_argument("gen_dictionary: k must be <= r");
  Rng rng(seed);
  Rng a_rng = rng.fork(0);
  DictionaryData out;
  out.spec.a_star.resize(d, r);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < r; ++j) out.spec.a_star(i, j) = a_rng.next_uniform(-1.0, 1.0);
  out.spec.k = k;
  out.spec.noise = noise;

  Matrix x(d, n);
  for (int col = 0; col < n; ++col) {
    Rng s = rng.fork(col + 1);
    // k distinct support indices via partial Fisher-Yates.
    std::vector<int> idx(r);
    for (int i = 0; i < r; ++i) idx[i] = i;
    for (int i = 0; i < k; ++i) {
      const int j = i + static_cast<int>(s.next_below(r - i));
      std::swap(idx[i], idx[j]);
    }
    Vector y = Vector::Zero(r);
    for (int i = 0; i < k; ++i) y[idx[i]] = s.next_sign();
    Vector col_x = out.spec.a_star * y;
    if (noise > 0.0) {
      for (int i = 0; i < d; ++i) col_x[i] += noise * s.next_uniform(-1.0, 1.0);
    }
    x.col(col) = col_x;
  }
  out.data = DataSet::from_matrix(x, seed, "dictionary");
  return out;
}

ManifoldData gen_manifold_s2(int d, int k, int m, std::uint64_t seed,
                             const std::optional<Matrix>& constraints,
                             int budget_per_sample) {
  const int d2 = d * d;
  if (k < 1 || k > d2) throw std::invalid_argument("gen_manifold_s2: need 1 <= k <= d^2");
  Rng rng(seed);
  ManifoldData out;
  if (constraints) {
    out.constraints = *constraints;
  } else {
    const int nc = d2 - k;
    out.constraints.resize(nc, d2);
    Rng c_rng = rng.fork(0);
    for (int i = 0; i < nc; ++i) {
      Vector c(d2);
      for (int j = 0; j < d2; ++j) c[j] = c_rng.next_gaussian();
      out.constraints.row(i) = c.normalized().transpose();
    }
  }
  const int nc = static_cast<int>(out.constraints.rows());

  // Symmetrized constraint matrices for the gradient.
  std::vector<Matrix> sym(nc);
  for (int i = 0; i < nc; ++i) {
    Matrix mi(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) mi(a, b) = out.constraints(i, a * d + b);
    sym[i] = mi + mi.transpose();
  }

  auto residuals = [&](const Vector& x) {
    Vector res(nc);
    const LiftedVec z = lift(x, 2);
    for (int i = 0; i < nc; ++i) res[i] = out.constraints.row(i).dot(z.entries);
    return res;
  };

  out.data.dim = d;
  out.data.seed = seed;
  out.data.provenance = "manifold_s2";
  for (int sample = 0; sample < m; ++sample) {
    Rng s = rng.fork(sample + 1);
    bool emitted = false;
    for (int attempt = 0; attempt < budget_per_sample && !emitted; ++attempt) {
      Vector x(d);
      for (int i = 0; i < d; ++i) x[i] = s.next_gaussian();
      x.normalize();
      double step = 0.5;
      Vector res = residuals(x);
      double phi = res.squaredNorm();
      for (int it = 0; it < 4000 && phi > 1e-20; ++it) {
        Vector g = Vector::Zero(d);
        for (int i = 0; i < nc; ++i) g += 2.0 * res[i] * (sym[i] * x);
        Vector cand = (x - step * g).normalized();
        Vector cres = residuals(cand);
        const double cphi = cres.squaredNorm();
        if (cphi < phi) {
          x = cand;
          res = cres;
          phi = cphi;
          step *= 1.2;
        } else {
          step *= 0.5;
          if (step < 1e-16) break;
        }
      }
      if (nc == 0 || res.cwiseAbs().maxCoeff() <= 1e-8) {
        out.data.samples.push_back(x);
        emitted = true;
      }
    }
    if (!emitted) {
      throw std::runtime_error("gen_manifold_s2: rejection budget exceeded at sample " +
                               std::to_string(sample));
    }
  }
  return out;
}

void save_matrix_file(const Matrix& m, const std::string& header,
                      const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_matrix_file: cannot open " + path);
  os << header << ' ' << m.rows() << ' ' << m.cols() << '\n';
  write_matrix_rows(os, m);
}

Matrix load_matrix_file(const std::string& path, std::string* header) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_matrix_file: cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("load_matrix_file: empty " + path);
  std::istringstream hs(line);
  std::string head;
  std::string token;
  std::vector<std::string> tokens;
  while (hs >> token) tokens.push_back(token);
  if (tokens.size() < 2) throw std::runtime_error("load_matrix_file: bad header " + path);
  const int cols = std::stoi(tokens.back());
  tokens.pop_back();
  const int rows = std::stoi(tokens.back());
  tokens.pop_back();
  if (header) {
    std::string h;
    for (size_t i = 0; i < tokens.size(); ++i) {
      if (i) h += ' ';
      h += tokens[i];
    }
    *header = h;
  }
  return read_matrix_rows(is, rows, cols);
}

}  // namespace relaxlearn
