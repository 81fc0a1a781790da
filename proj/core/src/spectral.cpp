#include "relaxlearn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "relaxlearn/rng.hpp"
#include "relaxlearn/util.hpp"

namespace relaxlearn {

Vector SpectralModel::apply(const Vector& lifted) const {
  Vector out = Vector::Zero(lifted.size());
  for (const auto& a : atoms) {
    if (a.weight == 0.0) continue;
    out.noalias() += (a.weight * a.right.dot(lifted)) * a.left;
  }
  return out;
}

Matrix SpectralModel::to_matrix() const {
  const int n = dim * dim;
  Matrix r = Matrix::Zero(n, n);
  for (const auto& a : atoms) r.noalias() += a.weight * a.left * a.right.transpose();
  return r;
}

double SpectralModel::weight_sum() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight;
  return s;
}

int SpectralModel::rank() const {
  int r = 0;
  for (const auto& a : atoms) r += a.weight != 0.0;
  return r;
}

namespace {

void check_normalized(const DataSet& data) {
  if (data.empty()) throw std::invalid_argument("spectral: empty dataset");
  for (const auto& x : data.samples) {
    if (std::abs(x.norm() - 1.0) > 1e-6) {
      throw std::invalid_argument("spectral: samples must be unit-normalized");
    }
  }
}

Matrix residual_matrix(const Vector& residual, int d) {
  Matrix t(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) t(i, j) = residual[i * d + j];
  return t;
}

double op_norm(const Matrix& t) {
  Eigen::JacobiSVD<Matrix> svd(t);
  return svd.singularValues()(0);
}

}  // namespace

double objective_value(const SpectralModel& model, const DataSet& data) {
  check_normalized(data);
  const int d = data.dim;
  std::vector<double> per(data.size());
  parallel_for(data.size(), [&](int i) {
    const LiftedVec z = lift(data.samples[i], 2);
    per[i] = op_norm(residual_matrix(model.apply(z.entries) - z.entries, d));
  });
  return std::accumulate(per.begin(), per.end(), 0.0) / data.size();
}

Matrix subgradient_atom(const SpectralModel& model, const Vector& x) {
  const int d = static_cast<int>(x.size());
  const LiftedVec z = lift(x, 2);
  const Vector residual = model.apply(z.entries) - z.entries;
  if (residual.norm() == 0.0) return Matrix::Zero(d * d, d * d);
  Eigen::JacobiSVD<Matrix> svd(residual_matrix(residual, d),
                               Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector u = svd.matrixU().col(0);
  const Vector v = svd.matrixV().col(0);
  Vector uv(d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) uv[i * d + j] = u[i] * v[j];
  return uv * z.entries.transpose();
}

namespace {

struct FwState {
  // Shared atom pool; each iterate is a weight vector over it.
  std::vector<Rank1Atom> atoms;       // unit-weight atoms (weight field = 1)
  std::vector<double> weights;        // current iterate
  std::vector<Vector> r_cache;        // per-sample R z_i - z_i
  std::vector<Vector> lifted;         // z_i
  int d = 0;

  void init(const DataSet& data) {
    d = data.dim;
    lifted.resize(data.size());
    r_cache.resize(data.size());
    for (int i = 0; i < data.size(); ++i) {
      lifted[i] = lift(data.samples[i], 2).entries;
      r_cache[i] = -lifted[i];
    }
  }

  double objective_from_cache() const {
    double s = 0.0;
    for (const auto& r : r_cache) s += op_norm(residual_matrix(r, d));
    return s / static_cast<double>(r_cache.size());
  }

  SpectralModel snapshot(const std::vector<double>& w, double radius) const {
    SpectralModel m;
    m.dim = d;
    m.radius = radius;
    m.atoms.reserve(atoms.size());
    for (size_t j = 0; j < atoms.size(); ++j) {
      Rank1Atom a = atoms[j];
      a.weight = w[j];
      m.atoms.push_back(std::move(a));
    }
    return m;
  }
};

double objective_of_weights(const FwState& st, const std::vector<double>& w) {
  double s = 0.0;
  for (size_t i = 0; i < st.lifted.size(); ++i) {
    Vector rz = -st.lifted[i];
    for (size_t j = 0; j < st.atoms.size(); ++j) {
      if (w[j] == 0.0) continue;
      rz.noalias() += (w[j] * st.atoms[j].right.dot(st.lifted[i])) * st.atoms[j].left;
    }
    s += op_norm(residual_matrix(rz, st.d));
  }
  return s / static_cast<double>(st.lifted.size());
}

}  // namespace

SpectralModel fw_nonsmooth(const DataSet& data, const FwOptions& options,
                           std::vector<FwTraceRow>* trace) {
  check_normalized(data);
  if (options.steps < 0) throw std::invalid_argument("fw_nonsmooth: steps must be >= 0");
  if (options.radius <= 0.0) throw std::invalid_argument("fw_nonsmooth: radius must be > 0");
  const int window = std::max(1, options.averaging_window);

  FwState st;
  st.init(data);
  const int n2 = st.d * st.d;
  const int m = data.size();

  Rng rng(options.seed);
  std::vector<std::vector<double>> recent;  // iterate weights inside the window
  std::vector<double> best_weights;
  double best_objective = st.objective_from_cache();  // zero model

  for (int t = 0; t < options.steps; ++t) {
    // Stochastic subgradient over the minibatch (full batch by default).
    std::vector<int> batch;
    if (options.minibatch > 0 && options.minibatch < m) {
      batch.resize(options.minibatch);
      for (int i = 0; i < options.minibatch; ++i)
        batch[i] = static_cast<int>(rng.next_below(m));
    } else {
      batch.resize(m);
      std::iota(batch.begin(), batch.end(), 0);
    }
    Matrix g = Matrix::Zero(n2, n2);
    for (int idx : batch) {
      const Vector& r = st.r_cache[idx];
      if (r.norm() == 0.0) continue;
      Eigen::JacobiSVD<Matrix> svd(residual_matrix(r, st.d),
                                   Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Vector u = svd.matrixU().col(0);
      const Vector v = svd.matrixV().col(0);
      Vector uv(n2);
      for (int i = 0; i < st.d; ++i)
        for (int j = 0; j < st.d; ++j) uv[i * st.d + j] = u[i] * v[j];
      g.noalias() += uv * st.lifted[idx].transpose();
    }
    g /= static_cast<double>(batch.size());

    Rank1Atom vertex = nuclear_lmo(g, options.radius);
    const double gamma = 2.0 / (t + 2.0);

    for (double& w : st.weights) w *= 1.0 - gamma;
    Rank1Atom unit = vertex;
    const double vw = unit.weight;
    unit.weight = 1.0;
    if (vw == 0.0) {
      // Zero gradient: LMO returns the zero matrix; keep a zero-weight slot.
      unit.left = Vector::Zero(n2);
      unit.right = Vector::Zero(n2);
      unit.left[0] = 1.0;
      unit.right[0] = 1.0;
    }
    st.atoms.push_back(unit);
    st.weights.push_back(gamma * vw);

    for (int i = 0; i < m; ++i) {
      Vector vz = (vw * unit.right.dot(st.lifted[i])) * unit.left;
      st.r_cache[i] = (1.0 - gamma) * (st.r_cache[i] + st.lifted[i]) + gamma * vz - st.lifted[i];
    }

    // Candidate = trailing-window average of iterate weights.
    std::vector<double> padded = st.weights;
    recent.push_back(padded);
    if (static_cast<int>(recent.size()) > window) recent.erase(recent.begin());
    std::vector<double> avg(st.weights.size(), 0.0);
    for (const auto& wv : recent) {
      for (size_t j = 0; j < wv.size(); ++j) avg[j] += wv[j];
    }
    for (double& w : avg) w /= static_cast<double>(recent.size());

    const double obj = window == 1 ? st.objective_from_cache() : objective_of_weights(st, avg);
    if (obj < best_objective) {
      best_objective = obj;
      best_weights = avg;
    }
    if (trace) {
      FwTraceRow row;
      row.step = t + 1;
      row.objective = obj;
      int rank = 0;
      for (double w : avg) rank += w != 0.0;
      row.rank = rank;
      trace->push_back(row);
    }
  }

  if (best_weights.empty()) best_weights.assign(st.weights.size(), 0.0);
  best_weights.resize(st.atoms.size(), 0.0);
  SpectralModel model = st.snapshot(best_weights, options.radius);
  return model;
}

namespace {

// d/dT of ||T||_{S_p}^2 for even p, via the SVD.
Matrix schatten_sq_grad(const Matrix& t, int p) {
  Eigen::JacobiSVD<Matrix> svd(t, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector sv = svd.singularValues();
  double norm_p = 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) norm_p += std::pow(sv[i], p);
  if (norm_p == 0.0) return Matrix::Zero(t.rows(), t.cols());
  norm_p = std::pow(norm_p, 1.0 / p);
  Vector scaled(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) scaled[i] = std::pow(sv[i], p - 1);
  return 2.0 * std::pow(norm_p, 2 - p) * svd.matrixU() * scaled.asDiagonal() *
         svd.matrixV().transpose();
}

double schatten_sq(const Matrix& t, int p) {
  Eigen::JacobiSVD<Matrix> svd(t);
  const auto& sv = svd.singularValues();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) acc += std::pow(sv[i], p);
  return std::pow(acc, 2.0 / p);
}

}  // namespace

double schatten_sq_residual(const SpectralModel& model, const Vector& x, int p) {
  const LiftedVec z = lift(x, 2);
  const int d = static_cast<int>(x.size());
  return schatten_sq(residual_matrix(model.apply(z.entries) - z.entries, d), p);
}

Matrix smooth_gradient(const SpectralModel& model, const DataSet& data, int p) {
  check_normalized(data);
  const int d = data.dim;
  const int n2 = d * d;
  Matrix g = Matrix::Zero(n2, n2);
  for (int i = 0; i < data.size(); ++i) {
    const LiftedVec z = lift(data.samples[i], 2);
    const Matrix gm = schatten_sq_grad(
        residual_matrix(model.apply(z.entries) - z.entries, d), p);
    Vector gv(n2);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) gv[a * d + b] = gm(a, b);
    g.noalias() += gv * z.entries.transpose();
  }
  return g / static_cast<double>(data.size());
}

SpectralModel fw_smooth_schatten(const DataSet& data, double radius, int p,
                                 int steps, bool line_search,
                                 std::vector<FwTraceRow>* trace) {
  check_normalized(data);
  if (p < 2 || p % 2 != 0) throw std::invalid_argument("fw_smooth_schatten: p must be even >= 2");
  if (radius <= 0.0) throw std::invalid_argument("fw_smooth_schatten: radius must be > 0");

  FwState st;
  st.init(data);
  const int m = data.size();
  const int n2 = st.d * st.d;

  auto objective = [&](const std::vector<Vector>& residuals) {
    double s = 0.0;
    for (const auto& r : residuals) s += schatten_sq(residual_matrix(r, st.d), p);
    return s / m;
  };

  double best_objective = objective(st.r_cache);
  std::vector<double> best_weights;

  for (int t = 0; t < steps; ++t) {
    Matrix g = Matrix::Zero(n2, n2);
    for (int i = 0; i < m; ++i) {
      const Matrix gm = schatten_sq_grad(residual_matrix(st.r_cache[i], st.d), p);
      Vector gv(n2);
      for (int a = 0; a < st.d; ++a)
        for (int b = 0; b < st.d; ++b) gv[a * st.d + b] = gm(a, b);
      g.noalias() += gv * st.lifted[i].transpose();
    }
    g /= static_cast<double>(m);

    Rank1Atom vertex = nuclear_lmo(g, radius);
    // gap = <g, R - V>
    double gr = 0.0;
    for (size_t j = 0; j < st.atoms.size(); ++j) {
      if (st.weights[j] == 0.0) continue;
      gr += st.weights[j] * st.atoms[j].left.dot(g * st.atoms[j].right);
    }
    const double gv_ip = vertex.weight == 0.0
                             ? 0.0
                             : vertex.weight * vertex.left.dot(g * vertex.right);
    const double gap = gr - gv_ip;

    // Direction images V z_i - R z_i.
    std::vector<Vector> delta(m);
    for (int i = 0; i < m; ++i) {
      Vector vz = Vector::Zero(n2);
      if (vertex.weight != 0.0) {
        vz = (vertex.weight * vertex.right.dot(st.lifted[i])) * vertex.left;
      }
      delta[i] = vz - (st.r_cache[i] + st.lifted[i]);
    }

    double gamma = 2.0 / (t + 2.0);
    if (line_search) {
      auto phi = [&](double s) {
        double acc = 0.0;
        for (int i = 0; i < m; ++i) {
          acc += schatten_sq(residual_matrix(st.r_cache[i] + s * delta[i], st.d), p);
        }
        return acc / m;
      };
      double lo = 0.0, hi = 1.0;
      double best_s = 0.0, best_phi = phi(0.0);
      for (int it = 0; it < 60; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        const double p1 = phi(m1), p2 = phi(m2);
        if (p1 < best_phi) { best_phi = p1; best_s = m1; }
        if (p2 < best_phi) { best_phi = p2; best_s = m2; }
        if (p1 <= p2) hi = m2; else lo = m1;
      }
      const double pend = phi(1.0);
      if (pend < best_phi) { best_phi = pend; best_s = 1.0; }
      gamma = best_s;
    }

    for (double& w : st.weights) w *= 1.0 - gamma;
    Rank1Atom unit = vertex;
    const double vw = unit.weight;
    unit.weight = 1.0;
    if (vw == 0.0) {
      unit.left = Vector::Zero(n2);
      unit.right = Vector::Zero(n2);
      unit.left[0] = 1.0;
      unit.right[0] = 1.0;
    }
    st.atoms.push_back(unit);
    st.weights.push_back(gamma * vw);
    for (int i = 0; i < m; ++i) st.r_cache[i] += gamma * delta[i];

    const double obj = objective(st.r_cache);
    if (obj <= best_objective) {
      best_objective = obj;
      best_weights = st.weights;
    }
    if (trace) {
      FwTraceRow row;
      row.step = t + 1;
      row.objective = obj;
      row.dual_gap = gap;
      int rank = 0;
      for (double w : st.weights) rank += w != 0.0;
      row.rank = rank;
      trace->push_back(row);
    }
  }

  if (best_weights.empty()) best_weights.assign(st.atoms.size(), 0.0);
  best_weights.resize(st.atoms.size(), 0.0);
  return st.snapshot(best_weights, radius);
}

EncDecFactors factorize(const SpectralModel& model, int rank_cap) {
  if (rank_cap < 0) throw std::invalid_argument("factorize: rank_cap must be >= 0");
  std::vector<int> order(model.atoms.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return model.atoms[a].weight > model.atoms[b].weight;
  });
  const int keep = std::min<int>(rank_cap, static_cast<int>(order.size()));
  const int n2 = model.dim * model.dim;
  EncDecFactors f;
  f.truncated = keep < static_cast<int>(order.size());
  f.encoder_a.resize(keep, n2);
  f.decoder_b.resize(n2, keep);
  for (int j = 0; j < keep; ++j) {
    const Rank1Atom& a = model.atoms[order[j]];
    f.encoder_a.row(j) = a.weight * a.right.transpose();
    f.decoder_b.col(j) = a.left;
  }
  return f;
}

Vector spectral_decode(const EncDecFactors& factors, const Vector& y) {
  if (y.size() != factors.decoder_b.cols()) {
    throw dimension_error("spectral_decode: code dimension mismatch");
  }
  const Vector by = factors.decoder_b * y;
  if (by.norm() == 0.0) throw std::invalid_argument("spectral_decode: zero By");
  LiftedVec z;
  z.base_dim = static_cast<int>(std::lround(std::sqrt(static_cast<double>(by.size()))));
  z.power = 2;
  z.entries = by;
  return v_max(z);
}

void save_spectral_model(const SpectralModel& model, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_spectral_model: cannot open " + path);
  os << "sa " << model.dim << ' ' << format_g17(model.radius) << ' '
     << model.atoms.size() << '\n';
  for (const auto& a : model.atoms) {
    os << format_g17(a.weight);
    for (Eigen::Index i = 0; i < a.left.size(); ++i) os << ' ' << format_g17(a.left[i]);
    for (Eigen::Index i = 0; i < a.right.size(); ++i) os << ' ' << format_g17(a.right[i]);
    os << '\n';
  }
}

SpectralModel load_spectral_model(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_spectral_model: cannot open " + path);
  std::string tag;
  SpectralModel model;
  size_t n_atoms = 0;
  if (!(is >> tag >> model.dim >> model.radius >> n_atoms) || tag != "sa") {
    throw std::runtime_error("load_spectral_model: bad header in " + path);
  }
  const int n2 = model.dim * model.dim;
  model.atoms.resize(n_atoms);
  for (auto& a : model.atoms) {
    a.left.resize(n2);
    a.right.resize(n2);
    if (!(is >> a.weight)) throw std::runtime_error("load_spectral_model: truncated " + path);
    for (int i = 0; i < n2; ++i) is >> a.left[i];
    for (int i = 0; i < n2; ++i) is >> a.right[i];
  }
  return model;
}

void write_fw_trace_csv(std::ostream& os, const std::vector<FwTraceRow>& trace,
                        bool with_dual_gap) {
  os << (with_dual_gap ? "step,objective,dualgap,rank\n" : "step,objective,rank\n");
  for (const auto& r : trace) {
    os << r.step << ',' << format_g17(r.objective);
    if (with_dual_gap) os << ',' << format_g17(r.dual_gap);
    os << ',' << r.rank << '\n';
  }
}

}  // namespace relaxlearn
