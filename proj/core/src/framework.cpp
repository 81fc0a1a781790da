#include "relaxlearn/framework.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "relaxlearn/rng.hpp"
#include "relaxlearn/util.hpp"

namespace relaxlearn {

namespace {

int g_max_threads = -1;

int env_threads() {
  if (const char* s = std::getenv("RELAXLEARN_THREADS")) {
    int n = std::atoi(s);
    if (n >= 1) return n;
  }
  return 1;
}

WidthEstimate summarize(std::vector<double> values) {
  WidthEstimate e;
  e.trials = static_cast<int>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  e.mean = sum / e.trials;
  double ss = 0.0;
  for (double v : values) ss += (v - e.mean) * (v - e.mean);
  e.std_error = std::sqrt(ss / (e.trials - 1)) / std::sqrt(static_cast<double>(e.trials));
  e.values = std::move(values);
  return e;
}

}  // namespace

int max_threads() { return g_max_threads > 0 ? g_max_threads : env_threads(); }

void set_max_threads(int n) { g_max_threads = n >= 1 ? n : 1; }

void parallel_for(int n, const std::function<void(int)>& body) {
  const int workers = std::min(max_threads(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::mutex mu;
  int next = 0;
  constexpr int kChunk = 4;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        int lo;
        {
          std::lock_guard<std::mutex> lock(mu);
          lo = next;
          next = std::min(n, next + kChunk);
        }
        if (lo >= n) return;
        const int hi = std::min(n, lo + kChunk);
        for (int i = lo; i < hi; ++i) body(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

HypothesisPair identity_pair(int dim) {
  HypothesisPair p;
  p.encode = [](const Vector& x) { return x; };
  p.decode = [](const Vector& y) { return y; };
  p.code_length_bits = 64 * dim;
  return p;
}

double pair_loss(const HypothesisPair& pair, const Vector& x, LossKind loss) {
  const Vector recon = pair.decode(pair.encode(x));
  const Vector tgt = pair.target(x);
  if (recon.size() != tgt.size()) {
    throw dimension_error("pair_loss: decode(encode(x)) dimension mismatch");
  }
  const Vector diff = recon - tgt;
  switch (loss) {
    case LossKind::kSquaredEuclidean:
      return diff.squaredNorm();
    case LossKind::kL1PerCoordinate:
      return diff.lpNorm<1>() / static_cast<double>(tgt.size());
  }
  return 0.0;
}

double empirical_loss(const HypothesisPair& pair, const DataSet& data, LossKind loss) {
  if (data.empty()) throw std::invalid_argument("empirical_loss: empty dataset");
  std::vector<double> per(data.size());
  parallel_for(data.size(), [&](int i) { per[i] = pair_loss(pair, data.samples[i], loss); });
  double sum = 0.0;
  for (double v : per) sum += v;
  return sum / data.size();
}

WidthEstimate rademacher_estimate(const ClassEvaluator& evaluator, const DataSet& data,
                                  int trials, std::uint64_t seed) {
  if (trials < 2) throw std::invalid_argument("rademacher_estimate: trials must be >= 2");
  const int m = data.size();
  std::vector<double> values(trials);
  Rng base(seed);
  parallel_for(trials, [&](int t) {
    Rng rng = base.fork(static_cast<std::uint64_t>(t));
    std::vector<double> signs(m);
    for (int i = 0; i < m; ++i) signs[i] = rng.next_sign();
    values[t] = evaluator(signs, data);
  });
  return summarize(std::move(values));
}

WidthEstimate srw_estimate(const SetMaximizer& maximizer, int total_dim, int m,
                           int trials, std::uint64_t seed) {
  if (m < 1 || m > total_dim) throw std::invalid_argument("srw_estimate: need 1 <= m <= D");
  if (trials < 2) throw std::invalid_argument("srw_estimate: trials must be >= 2");
  std::vector<double> values(trials);
  Rng base(seed);
  parallel_for(trials, [&](int t) {
    Rng rng = base.fork(static_cast<std::uint64_t>(t));
    // Partial Fisher-Yates picks a uniform size-m subset of [D].
    std::vector<int> idx(total_dim);
    for (int i = 0; i < total_dim; ++i) idx[i] = i;
    for (int i = 0; i < m; ++i) {
      const int j = i + static_cast<int>(rng.next_below(total_dim - i));
      std::swap(idx[i], idx[j]);
    }
    Vector xi = Vector::Zero(total_dim);
    for (int i = 0; i < m; ++i) xi[idx[i]] = rng.next_sign();
    values[t] = maximizer(xi) / m;
  });
  return summarize(std::move(values));
}

std::vector<GeneralizationRow> generalization_report(const Learner& learner,
                                                     const Sampler& sampler,
                                                     const std::vector<int>& m_grid,
                                                     int holdout_m, LossKind loss,
                                                     std::uint64_t seed) {
  for (size_t i = 1; i < m_grid.size(); ++i) {
    if (m_grid[i] < m_grid[i - 1]) {
      throw std::invalid_argument("generalization_report: m_grid must ascend");
    }
  }
  const DataSet holdout = sampler(holdout_m, Rng::mix(seed ^ 0xB01DULL));
  std::vector<GeneralizationRow> rows;
  rows.reserve(m_grid.size());
  for (size_t i = 0; i < m_grid.size(); ++i) {
    const DataSet train = sampler(m_grid[i], Rng::mix(seed + i));
    const HypothesisPair pair = learner(train);
    GeneralizationRow row;
    row.m = m_grid[i];
    row.train_loss = empirical_loss(pair, train, loss);
    row.holdout_loss = empirical_loss(pair, holdout, loss);
    row.gap = row.holdout_loss - row.train_loss;
    rows.push_back(row);
  }
  return rows;
}

namespace {

// Affine least-squares fit; returns (w, b). Norm of w clipped to max_norm.
std::pair<Vector, double> fit_clipped_linear(const std::vector<Vector>& xs,
                                             const Vector& y, double max_norm) {
  const int n = static_cast<int>(xs.size());
  const int d = static_cast<int>(xs[0].size());
  Matrix a(n, d + 1);
  for (int i = 0; i < n; ++i) {
    a.row(i).head(d) = xs[i].transpose();
    a(i, d) = 1.0;
  }
  Vector sol = (a.transpose() * a + 1e-10 * Matrix::Identity(d + 1, d + 1))
                   .ldlt()
                   .solve(a.transpose() * y);
  Vector w = sol.head(d);
  double b = sol[d];
  const double n2 = w.norm();
  if (n2 > max_norm && n2 > 0.0) w *= max_norm / n2;
  return {w, b};
}

double abs_loss(const std::vector<Vector>& xs, const Vector& y, const Vector& w, double b) {
  double s = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) s += std::abs(w.dot(xs[i]) + b - y[static_cast<int>(i)]);
  return s / xs.size();
}

}  // namespace

DownstreamReport downstream_check(const HypothesisPair& pair, const DataSet& data,
                                  const Vector& targets, double lipschitz_L) {
  if (targets.size() != data.size()) {
    throw dimension_error("downstream_check: targets length must match samples");
  }
  std::vector<Vector> recon(data.size());
  double mean_err = 0.0;
  for (int i = 0; i < data.size(); ++i) {
    recon[i] = pair.decode(pair.encode(data.samples[i]));
    if (recon[i].size() != data.samples[i].size()) {
      throw dimension_error("downstream_check: reconstruction dimension mismatch");
    }
    mean_err += (recon[i] - data.samples[i]).norm();
  }
  mean_err /= data.size();

  const auto [w_raw, b_raw] = fit_clipped_linear(data.samples, targets, lipschitz_L);
  const auto [w_rec, b_rec] = fit_clipped_linear(recon, targets, lipschitz_L);

  DownstreamReport rep;
  rep.loss_on_raw = abs_loss(data.samples, targets, w_raw, b_raw);
  rep.mean_reconstruction_error = mean_err;
  rep.bound = rep.loss_on_raw + lipschitz_L * mean_err;
  // The raw predictor applied to reconstructions realizes the Lipschitz bound;
  // a refit can only be reported when it does at least as well.
  const double transported = abs_loss(recon, targets, w_raw, b_raw);
  const double refit = abs_loss(recon, targets, w_rec, b_rec);
  rep.loss_on_reconstructed = std::min(transported, refit);
  return rep;
}

void write_generalization_csv(std::ostream& os, const std::vector<GeneralizationRow>& rows) {
  os << "m,train_loss,holdout_loss,gap\n";
  for (const auto& r : rows) {
    os << r.m << ',' << format_g17(r.train_loss) << ',' << format_g17(r.holdout_loss)
       << ',' << format_g17(r.gap) << '\n';
  }
}

void write_width_csv(std::ostream& os, const WidthEstimate& estimate) {
  os << "trial,value\n";
  for (size_t t = 0; t < estimate.values.size(); ++t) {
    os << t << ',' << format_g17(estimate.values[t]) << '\n';
  }
}

}  // namespace relaxlearn
