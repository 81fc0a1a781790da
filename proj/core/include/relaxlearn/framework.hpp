#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "relaxlearn/dataset.hpp"
#include "relaxlearn/linalg.hpp"

namespace relaxlearn {

// Encoder/decoder pair. `target` maps a raw sample to the representation the
// reconstruction is compared against (identity for plain autoencoding, the
// tensor lift for kernel classes). code_length_bits reports 64 * (number of
// reals in the code); encodings are not quantized.
struct HypothesisPair {
  std::function<Vector(const Vector&)> encode;
  std::function<Vector(const Vector&)> decode;
  std::function<Vector(const Vector&)> target = [](const Vector& x) { return x; };
  int code_length_bits = 0;
};

HypothesisPair identity_pair(int dim);

enum class LossKind {
  kSquaredEuclidean,   // ||g(h(x)) - x||^2
  kL1PerCoordinate,    // (1/d) ||x - g(h(x))||_1
};

double pair_loss(const HypothesisPair& pair, const Vector& x, LossKind loss);
double empirical_loss(const HypothesisPair& pair, const DataSet& data, LossKind loss);

struct WidthEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int trials = 0;
  std::vector<double> values;  // per-trial, in trial order
};

// Monte-Carlo empirical Rademacher complexity. The caller supplies the inner
// supremum: given signs sigma in {+-1}^m it returns
// sup_{f in H} (1/m) sum_i sigma_i l(f, x_i). Trial t draws its signs from
// substream (seed, t), so runs are reproducible bit-for-bit.
using ClassEvaluator =
    std::function<double(const std::vector<double>& signs, const DataSet& data)>;
WidthEstimate rademacher_estimate(const ClassEvaluator& evaluator, const DataSet& data,
                                  int trials, std::uint64_t seed);

// Monte-Carlo sampling Rademacher width of a set W in R^D. The maximizer
// receives xi = sigma (.) Omega (signs on a random size-m subset, zeros
// elsewhere) and returns sup_{x in W} <x, xi>.
using SetMaximizer = std::function<double(const Vector& xi)>;
WidthEstimate srw_estimate(const SetMaximizer& maximizer, int total_dim, int m,
                           int trials, std::uint64_t seed);

struct GeneralizationRow {
  int m = 0;
  double train_loss = 0.0;
  double holdout_loss = 0.0;
  double gap = 0.0;
};

using Learner = std::function<HypothesisPair(const DataSet&)>;
using Sampler = std::function<DataSet(int m, std::uint64_t seed)>;

// Train at each m in the ascending grid, evaluate on a fresh holdout of
// holdout_m samples, report the loss gap per row.
std::vector<GeneralizationRow> generalization_report(const Learner& learner,
                                                     const Sampler& sampler,
                                                     const std::vector<int>& m_grid,
                                                     int holdout_m, LossKind loss,
                                                     std::uint64_t seed);

struct DownstreamReport {
  double loss_on_raw = 0.0;
  double loss_on_reconstructed = 0.0;
  double bound = 0.0;
  double mean_reconstruction_error = 0.0;  // mean ||x - g(h(x))||_2
};

// Least-squares linear predictor (norm clipped to lipschitz_L) under absolute
// loss, fit on raw inputs and on reconstructions. The reported reconstructed
// loss is the better of the two predictors, which keeps it within
// loss_on_raw + L * mean reconstruction error by the Lipschitz argument.
DownstreamReport downstream_check(const HypothesisPair& pair, const DataSet& data,
                                  const Vector& targets, double lipschitz_L);

// Fixed CSV schemas: "m,train_loss,holdout_loss,gap" and "trial,value".
void write_generalization_csv(std::ostream& os, const std::vector<GeneralizationRow>& rows);
void write_width_csv(std::ostream& os, const WidthEstimate& estimate);

}  // namespace relaxlearn
