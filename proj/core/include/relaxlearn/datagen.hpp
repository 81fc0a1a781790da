#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "relaxlearn/dataset.hpp"
#include "relaxlearn/dictionary.hpp"
#include "relaxlearn/rng.hpp"
#include "relaxlearn/spectral.hpp"

namespace relaxlearn {

// Seeded synthetic families. Every generator is a pure function of its
// arguments; identical calls reproduce identical datasets.

struct SubspaceData {
  DataSet data;
  Matrix basis;  // d x k, orthonormal columns
};

// x = normalize(U g + noise * eta), U a random orthonormal d x k frame.
SubspaceData gen_subspace(int d, int k, int m, double noise, std::uint64_t seed);

struct RegularDecodableData {
  DataSet data;
  SpectralModel witness;  // planted R with objective exactly eps on the data
  RegularDecodableSpec spec;
  Matrix atoms;  // d x k orthonormal directions
};

// Signed orthonormal-atom construction: samples are uniformly random signed
// atoms; the witness maps each lifted atom to its outer product plus a
// symmetric perturbation of operator norm exactly eps.
RegularDecodableData gen_regular_decodable(int d, int k, int m, double eps,
                                           std::uint64_t seed, double tau = 1.0);

struct DictionaryData {
  DataSet data;  // N columns
  DictionarySpec spec;
};

// A* entries uniform in [-1, 1]; each code has k random +-1 entries at a
// random support; x = A* y + noise * eta with eta uniform per entry.
DictionaryData gen_dictionary(int d, int r, int k, int n, double noise,
                              std::uint64_t seed);

struct ManifoldData {
  DataSet data;
  Matrix constraints;  // (d^2 - k) x d^2, rows c_i
};

// Unit-sphere samples projected onto the degree-2 variety
// {x : <c_i, x^{(x)2}> = 0} by local descent; only points with residual
// <= 1e-8 are emitted. Throws if the rejection budget is exhausted.
ManifoldData gen_manifold_s2(int d, int k, int m, std::uint64_t seed,
                             const std::optional<Matrix>& constraints = std::nullopt,
                             int budget_per_sample = 64);

// Random d x k matrix with orthonormal columns (Gram-Schmidt on a seeded
// Gaussian draw).
Matrix random_orthonormal(int rows, int cols, Rng& rng);

// Witness file helpers (same basename convention as datasets).
void save_matrix_file(const Matrix& m, const std::string& header,
                      const std::string& path);
Matrix load_matrix_file(const std::string& path, std::string* header = nullptr);

}  // namespace relaxlearn
