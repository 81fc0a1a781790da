#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "relaxlearn/dataset.hpp"
#include "relaxlearn/linalg.hpp"
#include "relaxlearn/sos.hpp"

namespace relaxlearn {

// Planted dictionary model: max column l_inf norm of A_star at most 1,
// codes constrained to ||y||_1 <= k.
struct DictionarySpec {
  Matrix a_star;  // d x r
  double k = 1.0;
  double noise = 0.0;
};

// Bernoulli(rho) entry mask over a d x N matrix, stored as sorted flat
// indices (column-major: index = j * d + i).
struct SampleMask {
  int rows = 0;
  int cols = 0;
  double rho = 0.0;
  std::uint64_t seed = 0;
  std::vector<int> included;

  int size() const { return static_cast<int>(included.size()); }
};

SampleMask bernoulli_mask(int rows, int cols, double rho, std::uint64_t seed);

struct GroupCode {
  SampleMask mask;
  std::vector<double> values;

  int code_length_reals() const { return static_cast<int>(values.size()); }
};

// Text format: header "dictcode d N rho seed", then "index value" lines.
void save_group_code(const GroupCode& code, const std::string& path);
GroupCode load_group_code(const std::string& path);

// Convex (or surrogate) denoising set Q with the two fits Algorithm-style
// encoders need. Implementations certify membership their own way.
class ConvexDenoiser {
 public:
  virtual ~ConvexDenoiser() = default;
  virtual int rows() const = 0;
  virtual int cols() const = 0;
  // argmin_{C in Q} |X - C|_1
  virtual Matrix full_denoise(const Matrix& x) = 0;
  // argmin_{C in Q} |P_Omega(C) - Y|_1
  virtual Matrix masked_fit(const GroupCode& code) = 0;
  virtual std::string name() const = 0;
};

// l1-ball-constrained l1 regression min_{||y||_1 <= k} |x - A y|_1 by
// projected subgradient descent with random restarts.
Vector proper_encode(const Matrix& a, const Vector& x, double k,
                     std::uint64_t seed = 1, int restarts = 5, int iters = 2000);

// Empirical optimal error of the planted dictionary (per-entry l1).
double epsilon_star(const DictionarySpec& spec, const DataSet& data,
                    std::uint64_t seed = 1);

struct GroupEncodeResult {
  GroupCode code;
  Matrix denoised;  // Z
};

GroupEncodeResult group_encode(const Matrix& x, ConvexDenoiser& denoiser, double rho,
                               std::uint64_t seed);
Matrix group_decode(const GroupCode& code, ConvexDenoiser& denoiser);

using ContextSampler = std::function<Matrix(int n_samples, std::uint64_t seed)>;

// Single-example pipeline: denoise [context, x] jointly, transmit a sampled
// slice of the last column.
GroupCode single_encode(const Vector& x, const ContextSampler& sampler,
                        ConvexDenoiser& denoiser, double rho, int n_columns,
                        std::uint64_t seed);
// Joint masked fit over the query code and freshly encoded helper samples;
// returns the column for `code`.
Vector single_decode(const GroupCode& code, const std::vector<Vector>& fresh_samples,
                     const ContextSampler& sampler, ConvexDenoiser& denoiser,
                     double rho, int n_columns, std::uint64_t seed);

// Alternating-minimization upper bound on Gamma_{1,inf,1,1}(Z) with factor
// inner dimension r. Optional starting factors refine a known witness.
struct GammaWitness {
  Matrix a;  // d x r
  Matrix b;  // r x N
  double product = 0.0;  // ||A||_{l1->linf} * ||B||_{l1->l1}
};

GammaWitness gamma_upper_bound(const Matrix& z, int r, int restarts,
                               std::uint64_t seed = 1,
                               const std::optional<std::pair<Matrix, Matrix>>& init =
                                   std::nullopt);

struct GammaProbeReport {
  double bound1 = 0.0;
  double bound2 = 0.0;
  double combined = 0.0;  // product of the stacked witness
  bool triangle_ok = false;
};

// Builds the stacked witness [tA, B ; t^{-1}C, D] with t = ||B||_a / ||A||_a
// and checks combined <= bound1 + bound2 (+ slack).
GammaProbeReport gamma_norm_axiom_probe(const Matrix& z1, const Matrix& z2, int r,
                                        int restarts, std::uint64_t seed = 1,
                                        double slack = 1e-9);

double matrix_l1_to_linf(const Matrix& a);  // max column l_inf = max |entry|
double matrix_l1_to_l1(const Matrix& a);    // max column l1

// Exact convex denoiser over Q^sos_p (desk scale only). `scale` dilates the
// set: effective C = scale * E~[(AB)].
class QsosDenoiser : public ConvexDenoiser {
 public:
  QsosDenoiser(int d, int n, int r, int p, double k, int degree,
               sos::SolveOptions solve = {}, double scale = 1.0);
  ~QsosDenoiser() override;

  int rows() const override { return d_; }
  int cols() const override { return n_; }
  Matrix full_denoise(const Matrix& x) override;
  Matrix masked_fit(const GroupCode& code) override;
  std::string name() const override { return "qsos"; }

  // sup_{C in Q} <C, xi> for SRW estimation (xi given column-major flat).
  double support_value(const Vector& xi);
  // Pseudo-expectation certifying the last fit.
  const sos::PseudoExpectation& last_certificate() const;
  sos::SolveStatus last_status() const;
  double last_objective() const;

 private:
  struct Impl;
  int d_, n_;
  std::unique_ptr<Impl> impl_;
};

// Scalable non-convex surrogate: alternating minimization over the factor
// constraints ||A||_{l1->linf} <= 1, ||B||_{l1->l1} <= k.
class GammaHeuristicDenoiser : public ConvexDenoiser {
 public:
  GammaHeuristicDenoiser(int d, int n, int r, double k, std::uint64_t seed = 7,
                         int rounds = 25, int restarts = 3, double scale = 1.0);

  int rows() const override { return d_; }
  int cols() const override { return n_; }
  Matrix full_denoise(const Matrix& x) override;
  Matrix masked_fit(const GroupCode& code) override;
  std::string name() const override { return "gamma_heuristic"; }

  const Matrix& last_a() const { return last_a_; }
  const Matrix& last_b() const { return last_b_; }

 private:
  Matrix fit(const Matrix& x, const std::vector<int>* mask_indices);
  int d_, n_, r_;
  double k_;
  std::uint64_t seed_;
  int rounds_, restarts_;
  double scale_;
  Matrix last_a_, last_b_;
};

}  // namespace relaxlearn
