#include "relaxlearn/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "relaxlearn/rng.hpp"
#include "relaxlearn/util.hpp"

namespace relaxlearn {

SampleMask bernoulli_mask(int rows, int cols, double rho, std::uint64_t seed) {
  SampleMask mask;
  mask.rows = rows;
  mask.cols = cols;
  mask.rho = rho;
  mask.seed = seed;
  Rng rng(seed);
  const int total = rows * cols;
  for (int f = 0; f < total; ++f) {
    if (rng.next_double() < rho) mask.included.push_back(f);
  }
  return mask;
}

void save_group_code(const GroupCode& code, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_group_code: cannot open " + path);
  os << "dictcode " << code.mask.rows << ' ' << code.mask.cols << ' '
     << format_g17(code.mask.rho) << ' ' << code.mask.seed << '\n';
  for (size_t i = 0; i < code.values.size(); ++i) {
    os << code.mask.included[i] << ' ' << format_g17(code.values[i]) << '\n';
  }
}

GroupCode load_group_code(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_group_code: cannot open " + path);
  std::string tag;
  GroupCode code;
  if (!(is >> tag >> code.mask.rows >> code.mask.cols >> code.mask.rho >>
        code.mask.seed) ||
      tag != "dictcode") {
    throw std::runtime_error("load_group_code: bad header in " + path);
  }
  int idx;
  double value;
  while (is >> idx >> value) {
    code.mask.included.push_back(idx);
    code.values.push_back(value);
  }
  return code;
}

namespace {

// Euclidean projection onto the l1 ball of radius k.
Vector project_l1_ball(const Vector& y, double k) {
  if (k <= 0.0) return Vector::Zero(y.size());
  if (y.lpNorm<1>() <= k) return y;
  std::vector<double> mags(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) mags[i] = std::abs(y[i]);
  std::sort(mags.begin(), mags.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (size_t j = 0; j < mags.size(); ++j) {
    cum += mags[j];
    const double cand = (cum - k) / static_cast<double>(j + 1);
    if (j + 1 == mags.size() || mags[j + 1] <= cand) {
      theta = cand;
      break;
    }
  }
  Vector out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double mag = std::abs(y[i]) - theta;
    out[i] = mag > 0.0 ? (y[i] > 0 ? mag : -mag) : 0.0;
  }
  return out;
}

double l1_objective(const Matrix& a, const Vector& x, const Vector& y) {
  return (x - a * y).lpNorm<1>();
}

}  // namespace

Vector proper_encode(const Matrix& a, const Vector& x, double k,
                     std::uint64_t seed, int restarts, int iters) {
  if (matrix_l1_to_linf(a) > 1.0 + 1e-12) {
    throw std::invalid_argument("proper_encode: dictionary violates the l1->linf bound");
  }
  const int r = static_cast<int>(a.cols());
  if (k <= 0.0) return Vector::Zero(r);
  Rng rng(seed);
  Vector best = Vector::Zero(r);
  double best_obj = l1_objective(a, x, best);
  const double col_scale = std::max(1e-12, a.colwise().lpNorm<2>().mean());
  for (int restart = 0; restart < std::max(1, restarts); ++restart) {
    Vector y;
    if (restart == 0) {
      y = Vector::Zero(r);
    } else {
      y.resize(r);
      for (int i = 0; i < r; ++i) y[i] = rng.next_gaussian();
      y = project_l1_ball(y * (k / std::max(1e-12, y.lpNorm<1>())), k);
    }
    double local_best = l1_objective(a, x, y);
    Vector local_best_y = y;
    for (int t = 0; t < iters; ++t) {
      const Vector res = x - a * y;
      Vector g = Vector::Zero(r);
      for (Eigen::Index i = 0; i < res.size(); ++i) {
        if (res[i] > 0) g -= a.row(i);
        else if (res[i] < 0) g += a.row(i);
      }
      const double step = (0.5 * std::max(k, 0.5) / col_scale) / std::sqrt(t + 1.0);
      y = project_l1_ball(y - step * g, k);
      const double obj = l1_objective(a, x, y);
      if (obj < local_best) {
        local_best = obj;
        local_best_y = y;
      }
    }
    if (local_best < best_obj) {
      best_obj = local_best;
      best = local_best_y;
    }
  }
  return best;
}

double epsilon_star(const DictionarySpec& spec, const DataSet& data, std::uint64_t seed) {
  if (data.empty()) throw std::invalid_argument("epsilon_star: empty dataset");
  const int d = data.dim;
  std::vector<double> per(data.size());
  Rng base(seed);
  parallel_for(data.size(), [&](int i) {
    Rng rng = base.fork(i);
    const Vector y = proper_encode(spec.a_star, data.samples[i], spec.k, rng.next_u64());
    per[i] = (data.samples[i] - spec.a_star * y).lpNorm<1>() / d;
  });
  return std::accumulate(per.begin(), per.end(), 0.0) / data.size();
}

GroupEncodeResult group_encode(const Matrix& x, ConvexDenoiser& denoiser, double rho,
                               std::uint64_t seed) {
  if (x.rows() != denoiser.rows() || x.cols() != denoiser.cols()) {
    throw dimension_error("group_encode: denoiser configured for other dimensions");
  }
  GroupEncodeResult out;
  out.denoised = denoiser.full_denoise(x);
  out.code.mask = bernoulli_mask(static_cast<int>(x.rows()), static_cast<int>(x.cols()),
                                 rho, seed);
  out.code.values.reserve(out.code.mask.size());
  for (int f : out.code.mask.included) {
    out.code.values.push_back(out.denoised(f % x.rows(), f / x.rows()));
  }
  return out;
}

Matrix group_decode(const GroupCode& code, ConvexDenoiser& denoiser) {
  if (code.mask.rows != denoiser.rows() || code.mask.cols != denoiser.cols()) {
    throw dimension_error("group_decode: mask dimensions mismatch");
  }
  return denoiser.masked_fit(code);
}

GroupCode single_encode(const Vector& x, const ContextSampler& sampler,
                        ConvexDenoiser& denoiser, double rho, int n_columns,
                        std::uint64_t seed) {
  const int d = static_cast<int>(x.size());
  if (denoiser.rows() != d || denoiser.cols() != n_columns) {
    throw dimension_error("single_encode: denoiser dimensions mismatch");
  }
  Rng rng(seed);
  Matrix joint(d, n_columns);
  if (n_columns > 1) {
    joint.leftCols(n_columns - 1) = sampler(n_columns - 1, rng.next_u64());
  }
  joint.col(n_columns - 1) = x;
  const Matrix z = denoiser.full_denoise(joint);

  GroupCode code;
  code.mask.rows = d;
  code.mask.cols = 1;
  code.mask.rho = rho;
  code.mask.seed = seed;
  Rng mask_rng = rng.fork(0xA5);
  for (int i = 0; i < d; ++i) {
    if (mask_rng.next_double() < rho) {
      code.mask.included.push_back(i);
      code.values.push_back(z(i, n_columns - 1));
    }
  }
  return code;
}

Vector single_decode(const GroupCode& code, const std::vector<Vector>& fresh_samples,
                     const ContextSampler& sampler, ConvexDenoiser& denoiser,
                     double rho, int n_columns, std::uint64_t seed) {
  const int d = code.mask.rows;
  if (static_cast<int>(fresh_samples.size()) != n_columns - 1) {
    throw dimension_error("single_decode: expected n_columns - 1 fresh samples");
  }
  Rng rng(seed ^ 0xDECull);
  GroupCode joint;
  joint.mask.rows = d;
  joint.mask.cols = n_columns;
  joint.mask.rho = rho;
  joint.mask.seed = seed;
  for (int j = 0; j < n_columns - 1; ++j) {
    const GroupCode cj =
        single_encode(fresh_samples[j], sampler, denoiser, rho, n_columns,
                      rng.fork(j).next_u64());
    for (size_t t = 0; t < cj.values.size(); ++t) {
      joint.mask.included.push_back(j * d + cj.mask.included[t]);
      joint.values.push_back(cj.values[t]);
    }
  }
  for (size_t t = 0; t < code.values.size(); ++t) {
    joint.mask.included.push_back((n_columns - 1) * d + code.mask.included[t]);
    joint.values.push_back(code.values[t]);
  }
  const Matrix fit = denoiser.masked_fit(joint);
  return fit.col(n_columns - 1);
}

double matrix_l1_to_linf(const Matrix& a) {
  return a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
}

double matrix_l1_to_l1(const Matrix& a) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) best = std::max(best, a.col(j).lpNorm<1>());
  return best;
}

namespace {

double witness_product(const Matrix& a, const Matrix& b) {
  return matrix_l1_to_linf(a) * matrix_l1_to_l1(b);
}

// Gauge search over diagonal rescalings A diag(s), diag(1/s) B; keeps AB
// exact and often shrinks the norm product.
void balance_diagonal(Matrix* a, Matrix* b) {
  for (int pass = 0; pass < 4; ++pass) {
    for (Eigen::Index c = 0; c < a->cols(); ++c) {
      const double amax = a->col(c).cwiseAbs().maxCoeff();
      const double bnorm = b->row(c).cwiseAbs().sum();
      if (amax <= 0.0 || bnorm <= 0.0) continue;
      // Equalize the column's contribution on both sides.
      const double s = std::sqrt(bnorm / amax);
      a->col(c) *= s;
      b->row(c) /= s;
    }
  }
}

}  // namespace

GammaWitness gamma_upper_bound(const Matrix& z, int r, int restarts,
                               std::uint64_t seed,
                               const std::optional<std::pair<Matrix, Matrix>>& init) {
  if (r < 1) throw std::invalid_argument("gamma_upper_bound: r must be >= 1");
  const int d = static_cast<int>(z.rows());
  const int n = static_cast<int>(z.cols());
  const double zscale = z.cwiseAbs().maxCoeff();

  GammaWitness best;
  best.product = std::numeric_limits<double>::infinity();
  auto consider = [&](Matrix a, Matrix b) {
    if (a.cols() != b.rows()) return;
    if ((a * b - z).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, zscale)) return;
    balance_diagonal(&a, &b);
    const double p = witness_product(a, b);
    if (p < best.product) {
      best.a = a;
      best.b = b;
      best.product = p;
    }
  };

  if (zscale == 0.0) {
    best.a = Matrix::Zero(d, 1);
    best.b = Matrix::Zero(1, n);
    best.product = 0.0;
    return best;
  }

  if (init) consider(init->first, init->second);

  // Trivial exact factorizations.
  consider(z, Matrix::Identity(n, n));
  consider(Matrix::Identity(d, d), z);

  // SVD factorization at the numerical rank.
  Eigen::JacobiSVD<Matrix> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv(i) > 1e-12 * sv(0);
  if (rank > 0) {
    const Matrix u = svd.matrixU().leftCols(rank);
    const Matrix v = svd.matrixV().leftCols(rank);
    const Vector s = sv.head(rank);
    consider(u * s.asDiagonal(), v.transpose());
    consider(u, s.asDiagonal() * v.transpose());
    consider(u * s.cwiseSqrt().asDiagonal(), s.cwiseSqrt().asDiagonal() * v.transpose());

    // Random invertible gauge moves on the SVD witness.
    Rng rng(seed);
    Matrix a0 = u * s.cwiseSqrt().asDiagonal();
    Matrix b0 = s.cwiseSqrt().asDiagonal() * v.transpose();
    balance_diagonal(&a0, &b0);
    double cur = witness_product(a0, b0);
    for (int restart = 0; restart < restarts; ++restart) {
      Matrix a_cur = a0, b_cur = b0;
      double local = cur;
      double eta = 0.3;
      for (int step = 0; step < 200; ++step) {
        Matrix m = Matrix::Identity(rank, rank);
        for (int i = 0; i < rank; ++i)
          for (int j = 0; j < rank; ++j) m(i, j) += eta * rng.next_gaussian();
        Eigen::FullPivLU<Matrix> lu(m);
        if (!lu.isInvertible()) continue;
        Matrix a_try = a_cur * m;
        Matrix b_try = lu.solve(b_cur);
        balance_diagonal(&a_try, &b_try);
        const double p = witness_product(a_try, b_try);
        if (p < local && (a_try * b_try - z).cwiseAbs().maxCoeff() <
                             1e-9 * std::max(1.0, zscale)) {
          local = p;
          a_cur = a_try;
          b_cur = b_try;
        } else {
          eta *= 0.97;
        }
      }
      consider(a_cur, b_cur);
    }
  }
  return best;
}

GammaProbeReport gamma_norm_axiom_probe(const Matrix& z1, const Matrix& z2, int r,
                                        int restarts, std::uint64_t seed, double slack) {
  GammaProbeReport rep;
  const GammaWitness w1 = gamma_upper_bound(z1, r, restarts, seed);
  const GammaWitness w2 = gamma_upper_bound(z2, r, restarts, seed + 1);
  rep.bound1 = w1.product;
  rep.bound2 = w2.product;

  const double a1 = matrix_l1_to_linf(w1.a);
  const double a2 = matrix_l1_to_linf(w2.a);
  Matrix stacked_a, stacked_b;
  if (a1 == 0.0) {
    stacked_a = w2.a;
    stacked_b = w2.b;
  } else if (a2 == 0.0) {
    stacked_a = w1.a;
    stacked_b = w1.b;
  } else {
    // [t A1, A2] with t = ||A2||_alpha / ||A1||_alpha makes the combined
    // alpha-norm equal ||A2||_alpha, and the beta side telescopes.
    const double t = a2 / a1;
    stacked_a.resize(z1.rows(), w1.a.cols() + w2.a.cols());
    stacked_a << t * w1.a, w2.a;
    stacked_b.resize(w1.b.rows() + w2.b.rows(), z1.cols());
    stacked_b << w1.b / t, w2.b;
  }
  rep.combined = witness_product(stacked_a, stacked_b);
  const double scale = std::max(1.0, rep.bound1 + rep.bound2);
  rep.triangle_ok = rep.combined <= rep.bound1 + rep.bound2 + slack * scale;
  return rep;
}

// ---------------------------------------------------------------------------
// QsosDenoiser

struct QsosDenoiser::Impl {
  int r, p, degree;
  double k, scale;
  sos::SolveOptions solve;
  sos::PseudoExpectation last;
  bool has_last = false;
  sos::SolveStatus status = sos::SolveStatus::kSolved;
  double objective = 0.0;
};

QsosDenoiser::QsosDenoiser(int d, int n, int r, int p, double k, int degree,
                           sos::SolveOptions solve, double scale)
    : d_(d), n_(n), impl_(new Impl{r, p, degree, k, scale, solve, {}, false,
                                   sos::SolveStatus::kSolved, 0.0}) {}

QsosDenoiser::~QsosDenoiser() = default;

Matrix QsosDenoiser::full_denoise(const Matrix& x) {
  sos::DictProgramOptions opts;
  opts.degree = impl_->degree;
  auto res = sos::denoise_over_qsos(x, impl_->p, impl_->k, impl_->r, opts,
                                    std::nullopt, impl_->solve, impl_->scale);
  impl_->last = res.pexp;
  impl_->has_last = true;
  impl_->status = res.status;
  impl_->objective = res.objective;
  return res.c;
}

Matrix QsosDenoiser::masked_fit(const GroupCode& code) {
  Matrix x = Matrix::Zero(d_, n_);
  std::vector<int> observed = code.mask.included;
  for (size_t t = 0; t < code.values.size(); ++t) {
    x(code.mask.included[t] % d_, code.mask.included[t] / d_) = code.values[t];
  }
  sos::DictProgramOptions opts;
  opts.degree = impl_->degree;
  auto res = sos::denoise_over_qsos(x, impl_->p, impl_->k, impl_->r, opts, observed,
                                    impl_->solve, impl_->scale);
  impl_->last = res.pexp;
  impl_->has_last = true;
  impl_->status = res.status;
  impl_->objective = res.objective;
  return res.c;
}

sos::SolveStatus QsosDenoiser::last_status() const { return impl_->status; }

double QsosDenoiser::last_objective() const { return impl_->objective; }

double QsosDenoiser::support_value(const Vector& xi) {
  if (xi.size() != static_cast<Eigen::Index>(d_) * n_) {
    throw dimension_error("support_value: xi dimension mismatch");
  }
  sos::DictProgramOptions opts;
  opts.degree = impl_->degree;
  sos::SosProgram prog =
      sos::build_dict_set_program(d_, n_, impl_->r, impl_->p, impl_->k, opts);
  // maximize sum xi_f * scale * E[(AB)_f]  ==  minimize the negation
  sos::LinExpr objective;
  const int vc = static_cast<int>(prog.var_names.size());
  double xi_l1 = 0.0;
  for (int f = 0; f < xi.size(); ++f) {
    if (xi[f] == 0.0) continue;
    xi_l1 += std::abs(xi[f]);
    const int j = f / d_;
    const int i = f % d_;
    for (int l = 0; l < impl_->r; ++l) {
      sos::Monomial m = sos::Monomial::var(vc, i * impl_->r + l)
                            .times(sos::Monomial::var(vc, d_ * impl_->r + l * n_ + j));
      objective.push_back({prog.moment_index(m), -impl_->scale * xi[f]});
    }
  }
  sos::SolveOptions so = impl_->solve;
  so.objective_lower_bound =
      -4.0 * impl_->r * std::max(impl_->k, 1.0) * impl_->scale * xi_l1 - 1.0;
  auto res = sos::solve_sdp(prog, objective, so);
  return -res.objective;
}

const sos::PseudoExpectation& QsosDenoiser::last_certificate() const {
  if (!impl_->has_last) throw std::runtime_error("QsosDenoiser: no fit performed yet");
  return impl_->last;
}

// ---------------------------------------------------------------------------
// GammaHeuristicDenoiser

namespace {

double huber(double x, double delta) {
  const double ax = std::abs(x);
  return ax <= delta ? 0.5 * x * x / delta : ax - 0.5 * delta;
}

double huber_grad(double x, double delta) {
  if (x > delta) return 1.0;
  if (x < -delta) return -1.0;
  return x / delta;
}

// min_y sum_i huber(c_i - (M y)_i) over a convex set given by `project`,
// by projected gradient with backtracking.
Vector huberized_fit(const Matrix& m, const Vector& c, const Vector& y0,
                     const std::function<Vector(const Vector&)>& project,
                     double delta, int iters) {
  Vector y = project(y0);
  double step = 1.0 / std::max(1e-12, m.squaredNorm() / delta);
  auto objective = [&](const Vector& yy) {
    const Vector res = c - m * yy;
    double s = 0.0;
    for (Eigen::Index i = 0; i < res.size(); ++i) s += huber(res[i], delta);
    return s;
  };
  double cur = objective(y);
  for (int t = 0; t < iters; ++t) {
    const Vector res = c - m * y;
    Vector g = Vector::Zero(y.size());
    for (Eigen::Index i = 0; i < res.size(); ++i) {
      if (res[i] != 0.0) g -= huber_grad(res[i], delta) * m.row(i).transpose();
    }
    bool improved = false;
    for (int back = 0; back < 20; ++back) {
      const Vector cand = project(y - step * g);
      const double obj = objective(cand);
      if (obj < cur - 1e-15) {
        y = cand;
        cur = obj;
        step *= 1.3;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved && step < 1e-14) break;
  }
  return y;
}

}  // namespace

GammaHeuristicDenoiser::GammaHeuristicDenoiser(int d, int n, int r, double k,
                                               std::uint64_t seed, int rounds,
                                               int restarts, double scale)
    : d_(d), n_(n), r_(r), k_(k), seed_(seed), rounds_(rounds), restarts_(restarts),
      scale_(scale) {}

Matrix GammaHeuristicDenoiser::fit(const Matrix& x, const std::vector<int>* mask_indices) {
  const double k_eff = k_ * scale_;
  // Observed rows per column / observed columns per row.
  std::vector<std::vector<int>> rows_of_col(n_), cols_of_row(d_);
  if (mask_indices) {
    for (int f : *mask_indices) {
      rows_of_col[f / d_].push_back(f % d_);
      cols_of_row[f % d_].push_back(f / d_);
    }
  } else {
    for (int j = 0; j < n_; ++j)
      for (int i = 0; i < d_; ++i) rows_of_col[j].push_back(i);
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < n_; ++j) cols_of_row[i].push_back(j);
  }

  auto masked_objective = [&](const Matrix& a, const Matrix& b) {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) {
      if (rows_of_col[j].empty()) continue;
      const Vector col = a * b.col(j);
      for (int i : rows_of_col[j]) s += std::abs(x(i, j) - col[i]);
    }
    return s;
  };

  Rng rng(seed_);
  Matrix best_a, best_b;
  double best_obj = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < std::max(1, restarts_); ++restart) {
    // Seed the dictionary with rescaled data columns plus random noise.
    Matrix a(d_, r_);
    for (int c = 0; c < r_; ++c) {
      const int src = static_cast<int>(rng.next_below(std::max(1, n_)));
      Vector col = x.col(src % n_);
      const double mx = col.cwiseAbs().maxCoeff();
      if (mx > 1e-12) col /= mx;
      for (int i = 0; i < d_; ++i) {
        double e = 0.8 * col[i] + 0.2 * rng.next_uniform(-1.0, 1.0);
        a(i, c) = std::clamp(e, -1.0, 1.0);
      }
    }
    Matrix b = Matrix::Zero(r_, n_);

    double delta = 0.25;
    for (int round = 0; round < rounds_; ++round) {
      // B step: per-column l1-ball fit on observed rows.
      for (int j = 0; j < n_; ++j) {
        if (rows_of_col[j].empty()) {
          b.col(j).setZero();
          continue;
        }
        Matrix m(static_cast<int>(rows_of_col[j].size()), r_);
        Vector c(static_cast<int>(rows_of_col[j].size()));
        for (size_t t = 0; t < rows_of_col[j].size(); ++t) {
          m.row(static_cast<int>(t)) = a.row(rows_of_col[j][t]);
          c[static_cast<int>(t)] = x(rows_of_col[j][t], j);
        }
        b.col(j) = huberized_fit(
            m, c, b.col(j), [&](const Vector& y) { return project_l1_ball(y, k_eff); },
            delta, 60);
      }
      // A step: per-row box fit on observed columns.
      for (int i = 0; i < d_; ++i) {
        if (cols_of_row[i].empty()) continue;
        Matrix m(static_cast<int>(cols_of_row[i].size()), r_);
        Vector c(static_cast<int>(cols_of_row[i].size()));
        for (size_t t = 0; t < cols_of_row[i].size(); ++t) {
          m.row(static_cast<int>(t)) = b.col(cols_of_row[i][t]).transpose();
          c[static_cast<int>(t)] = x(i, cols_of_row[i][t]);
        }
        const Vector row = huberized_fit(
            m, c, a.row(i).transpose(),
            [&](const Vector& y) {
              return y.cwiseMax(-1.0).cwiseMin(1.0);
            },
            delta, 60);
        a.row(i) = row.transpose();
      }
      delta = std::max(1e-9, delta * 0.45);
    }
    const double obj = masked_objective(a, b);
    if (obj < best_obj) {
      best_obj = obj;
      best_a = a;
      best_b = b;
    }
  }

  last_a_ = best_a;
  last_b_ = best_b;
  return best_a * best_b;
}

Matrix GammaHeuristicDenoiser::full_denoise(const Matrix& x) {
  if (x.rows() != d_ || x.cols() != n_) {
    throw dimension_error("gamma_heuristic: dimensions mismatch");
  }
  return fit(x, nullptr);
}

Matrix GammaHeuristicDenoiser::masked_fit(const GroupCode& code) {
  Matrix x = Matrix::Zero(d_, n_);
  for (size_t t = 0; t < code.values.size(); ++t) {
    x(code.mask.included[t] % d_, code.mask.included[t] / d_) = code.values[t];
  }
  return fit(x, &code.mask.included);
}

}  // namespace relaxlearn
