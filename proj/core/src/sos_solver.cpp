#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "relaxlearn/rng.hpp"
#include "relaxlearn/sos.hpp"

namespace relaxlearn::sos {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

double eval_lin(const LinExpr& e, const Vector& y) {
  double s = 0.0;
  for (const auto& t : e) s += t.coef * y[t.index];
  return s;
}

// Relaxed alternating projections between the affine set
// {A y = b, z = G y} and the product of PSD cones on z. The fixed-point step
// norm is monotone; convergence is declared on the actual constraint
// violation of the affine-projected candidate, which separates feasible
// instances from infeasible ones (where the step norm also vanishes but the
// violation stalls at the positive set distance).
class PocsSolver {
 public:
  PocsSolver(const SosProgram& program, const LinExpr* level_row)
      : program_(program) {
    n_vars_ = program.total_vars();
    n_eq_ = static_cast<int>(program.equalities.size()) + (level_row ? 1 : 0);

    std::vector<Triplet> a_trip;
    b_.resize(n_eq_);
    for (size_t r = 0; r < program.equalities.size(); ++r) {
      for (const auto& t : program.equalities[r].first) {
        a_trip.emplace_back(static_cast<int>(r), t.index, t.coef);
      }
      b_[static_cast<int>(r)] = program.equalities[r].second;
    }
    if (level_row) {
      const int r = n_eq_ - 1;
      for (const auto& t : *level_row) a_trip.emplace_back(r, t.index, t.coef);
      b_[r] = 0.0;  // set via set_level
    }
    SpMat a(n_eq_, n_vars_);
    a.setFromTriplets(a_trip.begin(), a_trip.end());
    a_ = a;

    n_z_ = 0;
    for (const auto& blk : program.blocks) {
      block_offsets_.push_back(n_z_);
      n_z_ += blk.size * blk.size;
    }
    std::vector<Triplet> g_trip;
    int row = 0;
    for (const auto& blk : program.blocks) {
      for (const auto& entry : blk.entries) {
        for (const auto& t : entry) g_trip.emplace_back(row, t.index, t.coef);
        ++row;
      }
    }
    SpMat g(n_z_, n_vars_);
    g.setFromTriplets(g_trip.begin(), g_trip.end());
    g_ = g;

    // KKT for min ||y - y0||^2 + ||Gy - z0||^2 s.t. Ay = b.
    SpMat identity(n_vars_, n_vars_);
    identity.setIdentity();
    SpMat upper_left = identity + SpMat(g_.transpose() * g_);
    std::vector<Triplet> kkt;
    for (int c = 0; c < upper_left.outerSize(); ++c) {
      for (SpMat::InnerIterator it(upper_left, c); it; ++it) {
        kkt.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                         it.value());
      }
    }
    for (int c = 0; c < a_.outerSize(); ++c) {
      for (SpMat::InnerIterator it(a_, c); it; ++it) {
        kkt.emplace_back(n_vars_ + static_cast<int>(it.row()),
                         static_cast<int>(it.col()), it.value());
        kkt.emplace_back(static_cast<int>(it.col()),
                         n_vars_ + static_cast<int>(it.row()), it.value());
      }
    }
    for (int i = 0; i < n_eq_; ++i) kkt.emplace_back(n_vars_ + i, n_vars_ + i, -1e-10);
    SpMat kkt_mat(n_vars_ + n_eq_, n_vars_ + n_eq_);
    kkt_mat.setFromTriplets(kkt.begin(), kkt.end());
    ldlt_.compute(kkt_mat);
    if (ldlt_.info() != Eigen::Success) {
      throw std::runtime_error("solve_sdp: KKT factorization failed");
    }
  }

  void set_level(double rhs) { b_[n_eq_ - 1] = rhs; }

  void init_state(std::uint64_t seed, Vector* y, Vector* z) const {
    Rng rng(seed ^ 0x50C5ULL);
    y->resize(n_vars_);
    for (int i = 0; i < n_vars_; ++i) (*y)[i] = 0.01 * rng.next_gaussian();
    *z = g_ * (*y);
  }

  Vector image(const Vector& y) const { return g_ * y; }

  void project_affine(const Vector& y0, const Vector& z0, Vector* y, Vector* z) const {
    Vector rhs(n_vars_ + n_eq_);
    rhs.head(n_vars_) = y0 + g_.transpose() * z0;
    rhs.tail(n_eq_) = b_;
    const Vector sol = ldlt_.solve(rhs);
    *y = sol.head(n_vars_);
    *z = g_ * (*y);
  }

  void project_cone(Vector* z) const {
    for (size_t k = 0; k < program_.blocks.size(); ++k) {
      const int n = program_.blocks[k].size;
      const int off = block_offsets_[k];
      if (n == 1) {
        (*z)[off] = std::max(0.0, (*z)[off]);
        continue;
      }
      Matrix m(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = (*z)[off + i * n + j];
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
      const Vector lam = es.eigenvalues().cwiseMax(0.0);
      const Matrix proj =
          es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) (*z)[off + i * n + j] = proj(i, j);
    }
  }

  // Worst negative eigenvalue over the blocks of G y (y assumed affine-exact).
  double cone_violation(const Vector& y) const {
    const Vector z = g_ * y;
    double worst = 0.0;
    for (size_t k = 0; k < program_.blocks.size(); ++k) {
      const int n = program_.blocks[k].size;
      const int off = block_offsets_[k];
      if (n == 1) {
        worst = std::max(worst, -z[off]);
        continue;
      }
      Matrix m(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = z[off + i * n + j];
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()),
                                               Eigen::EigenvaluesOnly);
      worst = std::max(worst, -es.eigenvalues()(0));
    }
    return std::max(worst, 0.0);
  }

  struct RunStats {
    double step = 0.0;        // last full-cycle step norm (monotone)
    double violation = 0.0;   // cone violation of the affine candidate
    int iterations = 0;
    bool converged = false;
  };

  RunStats run(Vector* y, Vector* z, int max_iters, double tol, double alpha,
               std::vector<double>* history) const {
    RunStats stats;
    Vector py, pz;
    double stagnant_best = std::numeric_limits<double>::infinity();
    int stagnant_for = 0;
    for (int it = 0; it < max_iters; ++it) {
      const Vector y_prev = *y;
      const Vector z_prev = *z;
      project_affine(*y, *z, &py, &pz);
      *y += alpha * (py - *y);
      *z += alpha * (pz - *z);
      Vector cz = *z;
      project_cone(&cz);
      *z += alpha * (cz - *z);
      stats.step = std::sqrt((*y - y_prev).squaredNorm() + (*z - z_prev).squaredNorm());
      stats.iterations = it + 1;
      if (history) history->push_back(stats.step);

      const bool check_now = stats.step <= tol || (it & 0xF) == 0xF;
      if (check_now) {
        stats.violation = cone_violation(py);
        if (stats.violation <= tol) {
          stats.converged = true;
          *y = py;
          *z = g_ * py;
          return stats;
        }
        // Infeasibility cut: the iterate has settled but the violation hasn't.
        if (stats.violation < stagnant_best - 1e-12) {
          stagnant_best = stats.violation;
          stagnant_for = 0;
        } else if (stats.step < tol * 1e-2 && ++stagnant_for >= 16) {
          project_affine(*y, *z, &py, &pz);
          *y = py;
          return stats;
        }
      }
    }
    project_affine(*y, *z, &py, &pz);
    stats.violation = cone_violation(py);
    *y = py;
    return stats;
  }

 private:
  const SosProgram& program_;
  int n_vars_ = 0, n_eq_ = 0, n_z_ = 0;
  std::vector<int> block_offsets_;
  SpMat a_, g_;
  Vector b_;
  Eigen::SimplicialLDLT<SpMat> ldlt_;
};

PseudoExpectation pexp_from_moments(const SosProgram& program, const Vector& y) {
  PseudoExpectation pexp;
  pexp.degree = program.degree;
  pexp.var_names = program.var_names;
  pexp.basis = program.basis;
  pexp.index = program.index;
  pexp.moments.assign(y.data(), y.data() + program.basis.size());
  return pexp;
}

}  // namespace

SolveResult solve_sdp(const SosProgram& program, const SolveOptions& options) {
  return solve_sdp(program, LinExpr{}, options);
}

SolveResult solve_sdp(const SosProgram& program, const LinExpr& objective,
                      const SolveOptions& options) {
  SolveResult result;

  // Phase 1: plain feasibility on the raw program.
  PocsSolver feas(program, nullptr);
  Vector y, z;
  feas.init_state(options.seed, &y, &z);
  std::vector<double> history;
  auto stats = feas.run(&y, &z, options.max_iters, options.tol, options.over_relax,
                        options.track_history ? &history : nullptr);
  result.residual_history = std::move(history);
  result.iterations = stats.iterations;
  result.residual = std::max(stats.violation, 0.0);
  if (!stats.converged) {
    result.status = stats.step <= options.tol ? SolveStatus::kStalled
                                              : SolveStatus::kIterationLimit;
    result.pexp = pexp_from_moments(program, y);
    result.extras.assign(y.data() + program.basis.size(),
                         y.data() + program.total_vars());
    return result;
  }
  if (objective.empty()) {
    result.status = SolveStatus::kSolved;
    result.pexp = pexp_from_moments(program, y);
    result.extras.assign(y.data() + program.basis.size(),
                         y.data() + program.total_vars());
    return result;
  }

  // Phase 2: bisection on the objective level  c . y + s = t, s >= 0.
  SosProgram aug = program;
  const int slack_index = aug.total_vars();
  aug.extra_names.push_back("objlevel_slack");
  PsdBlock slack_block;
  slack_block.label = "objlevel";
  slack_block.size = 1;
  slack_block.entries = {LinExpr{{slack_index, 1.0}}};
  aug.blocks.push_back(slack_block);
  LinExpr level_row = objective;
  level_row.push_back({slack_index, 1.0});

  PocsSolver solver(aug, &level_row);
  double v_hi = eval_lin(objective, y);
  Vector best_y = y;
  double best_violation = stats.violation;
  int total_iters = stats.iterations;

  // Augmented warm-start state from the feasible point.
  Vector ya(aug.total_vars());
  ya.head(program.total_vars()) = y;
  ya[slack_index] = 0.0;
  Vector za;

  auto run_level = [&](double t, int budget, bool* ok) {
    solver.set_level(t);
    Vector yt = ya;
    yt[slack_index] = std::max(0.0, t - eval_lin(objective, ya));
    Vector zt = solver.image(yt);
    auto s = solver.run(&yt, &zt, budget, options.tol, options.over_relax, nullptr);
    total_iters += s.iterations;
    *ok = s.converged;
    if (s.converged) {
      ya = yt;
      best_y = yt.head(program.total_vars());
      best_violation = s.violation;
      v_hi = std::min(v_hi, eval_lin(objective, best_y));
    }
  };

  double v_lo;
  if (options.objective_lower_bound && *options.objective_lower_bound <= v_hi) {
    v_lo = *options.objective_lower_bound;
  } else {
    double step_down = std::max(1.0, 0.5 * std::abs(v_hi));
    double probe = v_hi;
    bool bracketed = false;
    for (int i = 0; i < 60 && !bracketed; ++i) {
      const double t = probe - step_down;
      bool ok = false;
      run_level(t, options.per_level_iters, &ok);
      if (ok) {
        probe = t;
        step_down *= 2.0;
      } else {
        v_lo = t;
        bracketed = true;
      }
    }
    if (!bracketed) {
      result.status = SolveStatus::kIterationLimit;
      result.pexp = pexp_from_moments(program, best_y);
      result.objective = v_hi;
      result.iterations = total_iters;
      result.residual = best_violation;
      return result;
    }
  }

  while (v_hi - v_lo > options.objective_tol) {
    const double t = 0.5 * (v_hi + v_lo);
    bool ok = false;
    run_level(t, options.per_level_iters, &ok);
    if (!ok) v_lo = t;
  }

  result.status = SolveStatus::kSolved;
  result.pexp = pexp_from_moments(program, best_y);
  result.extras.assign(best_y.data() + program.basis.size(),
                       best_y.data() + program.total_vars());
  result.objective = eval_lin(objective, best_y);
  result.iterations = total_iters;
  result.residual = best_violation;
  return result;
}

DenoiseResult denoise_over_qsos(const Matrix& x, int p, double k, int r,
                                const DictProgramOptions& program_options,
                                const std::optional<std::vector<int>>& observed,
                                const SolveOptions& solve_options, double scale) {
  const int d = static_cast<int>(x.rows());
  const int n = static_cast<int>(x.cols());
  SosProgram prog = build_dict_set_program(d, n, r, p, k, program_options);

  std::vector<int> obs;
  if (observed) {
    obs = *observed;
  } else {
    obs.resize(static_cast<size_t>(d) * n);
    for (size_t i = 0; i < obs.size(); ++i) obs[i] = static_cast<int>(i);
  }

  auto ab_lin = [&](int i, int j) {
    LinExpr e;
    const int vc = static_cast<int>(prog.var_names.size());
    for (int l = 0; l < r; ++l) {
      const Monomial m = Monomial::var(vc, i * r + l)
                             .times(Monomial::var(vc, d * r + l * n + j));
      e.push_back({prog.moment_index(m), scale});
    }
    return e;
  };

  LinExpr objective_expr;
  for (int flat : obs) {
    const int j = flat / d;
    const int i = flat % d;
    const int t_idx = prog.total_vars();
    prog.extra_names.push_back("t_" + std::to_string(i) + "_" + std::to_string(j));
    const int sp_idx = prog.total_vars();
    prog.extra_names.push_back("sp_" + std::to_string(i) + "_" + std::to_string(j));
    const int sm_idx = prog.total_vars();
    prog.extra_names.push_back("sm_" + std::to_string(i) + "_" + std::to_string(j));

    const LinExpr ab = ab_lin(i, j);
    // t + scale*E[(AB)_ij] - sp = X_ij   (t >= X - scale*E)
    LinExpr row1 = ab;
    row1.push_back({t_idx, 1.0});
    row1.push_back({sp_idx, -1.0});
    prog.equalities.push_back({row1, x(i, j)});
    // t - scale*E[(AB)_ij] - sm = -X_ij  (t >= scale*E - X)
    LinExpr row2;
    for (auto term : ab) {
      term.coef = -term.coef;
      row2.push_back(term);
    }
    row2.push_back({t_idx, 1.0});
    row2.push_back({sm_idx, -1.0});
    prog.equalities.push_back({row2, -x(i, j)});

    for (int idx : {sp_idx, sm_idx}) {
      PsdBlock blk;
      blk.label = "abs_slack";
      blk.size = 1;
      blk.entries = {LinExpr{{idx, 1.0}}};
      prog.blocks.push_back(blk);
    }
    objective_expr.push_back({t_idx, 1.0});
  }

  SolveOptions opts = solve_options;
  opts.objective_lower_bound = 0.0;
  const SolveResult sol = solve_sdp(prog, objective_expr, opts);

  DenoiseResult out;
  out.status = sol.status;
  out.residual = sol.residual;
  out.pexp = sol.pexp;
  out.objective = sol.objective;
  out.c.resize(d, n);
  const int vc = static_cast<int>(prog.var_names.size());
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < n; ++j) {
      double e = 0.0;
      for (int l = 0; l < r; ++l) {
        const Monomial m = Monomial::var(vc, i * r + l)
                               .times(Monomial::var(vc, d * r + l * n + j));
        e += sol.pexp.value(m);
      }
      out.c(i, j) = scale * e;
    }
  }
  return out;
}

}  // namespace relaxlearn::sos
