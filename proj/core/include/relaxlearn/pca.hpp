#pragma once

#include <string>

#include "relaxlearn/dataset.hpp"
#include "relaxlearn/framework.hpp"
#include "relaxlearn/linalg.hpp"

namespace relaxlearn {

// Kernel-PCA hypothesis: encode h_A(x) = A x^{(x)s}, decode g_A(y) = A^T y.
// Rows of `a` are orthonormal, so A^T A is the rank-k projection onto the
// top eigenspace of the lifted covariance.
struct PcaModel {
  Matrix a;        // k x d^s
  int base_dim = 0;
  int s = 1;
  int k = 0;
};

// ERM over rank-k projections by spectral decomposition of
// sum_i lift(x_i, s) lift(x_i, s)^T. Eigenvalue ties are broken by the
// lexicographically smallest sign-canonicalized eigenvector.
PcaModel fit_kernel_pca(const DataSet& data, int k, int s,
                        std::uint64_t lift_cap = kDefaultLiftCap);

Vector pca_encode(const PcaModel& model, const Vector& x);
LiftedVec pca_decode(const PcaModel& model, const Vector& y);

// Loss for this pair is the squared projection residual in the lifted space.
HypothesisPair pca_pair(const PcaModel& model);

// Text format: header "pca d s k", then A row-major, one row per line.
void save_pca_model(const PcaModel& model, const std::string& path);
PcaModel load_pca_model(const std::string& path);

// Exact inner maximizer for the Rademacher supremum of H^pca_{k,s} under the
// squared loss: the supremum over rank-<=k projections reduces to dropping
// the k most negative eigenvalues of the sign-weighted lifted covariance.
ClassEvaluator pca_class_evaluator(int k, int s);

}  // namespace relaxlearn
