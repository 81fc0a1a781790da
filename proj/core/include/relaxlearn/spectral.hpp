#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relaxlearn/dataset.hpp"
#include "relaxlearn/linalg.hpp"

namespace relaxlearn {

// Operator R on the lifted space R^{d^2}, kept as a weighted sum of rank-1
// atoms with unit factors, so the Schatten-1 norm is at most the weight sum.
struct SpectralModel {
  std::vector<Rank1Atom> atoms;
  double radius = 0.0;  // tau * k constraint used during training
  int dim = 0;          // base dimension d

  Vector apply(const Vector& lifted) const;
  Matrix to_matrix() const;  // d^2 x d^2
  double weight_sum() const;
  int rank() const;  // atoms with nonzero weight
};

// Parameters of a (k, eps)-regularly spectral decodable planted family.
struct RegularDecodableSpec {
  int k = 1;
  double eps = 0.0;
  double tau = 1.0;
};

// f(R) = mean_i || M(R x_i^{(x)2} - x_i^{(x)2}) ||_op. Samples must be
// unit-normalized (1e-6).
double objective_value(const SpectralModel& model, const DataSet& data);

// Subgradient of the per-sample objective at R: (u (x) v) (x^{(x)2})^T with
// (u, v) the top singular pair of the residual. Zero residual gives zero.
Matrix subgradient_atom(const SpectralModel& model, const Vector& x);

struct FwTraceRow {
  int step = 0;
  double objective = 0.0;
  double dual_gap = 0.0;  // smooth runs only
  int rank = 0;
};

struct FwOptions {
  int steps = 100;
  double radius = 1.0;
  int averaging_window = 1;  // 1 = plain best-iterate selection
  int minibatch = 0;         // 0 = full batch
  std::uint64_t seed = 0;
};

// Non-smooth Frank-Wolfe with step size 2/(t+2); returns the best
// window-averaged iterate by objective. Iterate rank <= steps + 1.
SpectralModel fw_nonsmooth(const DataSet& data, const FwOptions& options,
                           std::vector<FwTraceRow>* trace = nullptr);

// Frank-Wolfe on the smooth objective f_p(R) = mean || residual ||_{S_p}^2,
// p even >= 2, with exact gradients and duality-gap tracking. With
// line_search the objective is nonincreasing per step.
SpectralModel fw_smooth_schatten(const DataSet& data, double radius, int p,
                                 int steps, bool line_search,
                                 std::vector<FwTraceRow>* trace = nullptr);

// Per-sample smooth objective pieces, exposed for gradient checks.
double schatten_sq_residual(const SpectralModel& model, const Vector& x, int p);
Matrix smooth_gradient(const SpectralModel& model, const DataSet& data, int p);

struct EncDecFactors {
  Matrix encoder_a;  // k' x d^2, row j = w_j v_j^T
  Matrix decoder_b;  // d^2 x k', column j = u_j
  bool truncated = false;
  Matrix reconstruct() const { return decoder_b * encoder_a; }
};

// Splits R = B A along its atoms; keeps the top-weight rank_cap atoms.
EncDecFactors factorize(const SpectralModel& model, int rank_cap);

// g(y) = v_max(By); unit output, sign canonicalized.
Vector spectral_decode(const EncDecFactors& factors, const Vector& y);

// Text format: header "sa d radius n_atoms", then one atom per line
// (weight, u entries, v entries).
void save_spectral_model(const SpectralModel& model, const std::string& path);
SpectralModel load_spectral_model(const std::string& path);

// CSV schemas: "step,objective,rank" (non-smooth), "step,objective,dualgap,rank".
void write_fw_trace_csv(std::ostream& os, const std::vector<FwTraceRow>& trace,
                        bool with_dual_gap);

}  // namespace relaxlearn
