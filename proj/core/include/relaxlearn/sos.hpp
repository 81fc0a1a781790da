#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "relaxlearn/linalg.hpp"

namespace relaxlearn::sos {

// Monomial over a fixed ordered variable set, stored as a dense exponent
// vector. Listing order everywhere is graded lex: lower total degree first,
// earlier variables dominating within a degree.
struct Monomial {
  std::vector<std::uint8_t> exps;

  int degree() const;
  static Monomial one(int var_count);
  static Monomial var(int var_count, int index, int power = 1);
  Monomial times(const Monomial& other) const;
  bool operator==(const Monomial& other) const { return exps == other.exps; }
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const;
};

bool grlex_less(const Monomial& a, const Monomial& b);

std::uint64_t monomial_count(int var_count, int max_degree);

inline constexpr std::uint64_t kDefaultMonomialCap = 200'000;

// All monomials of degree <= max_degree in graded-lex order. Throws if the
// count exceeds the cap.
std::vector<Monomial> enumerate_monomials(int var_count, int max_degree,
                                          std::uint64_t cap = kDefaultMonomialCap);

// Sparse polynomial as (monomial, coefficient) terms.
using Poly = std::vector<std::pair<Monomial, double>>;

std::string monomial_to_string(const Monomial& m, const std::vector<std::string>& names);

struct LinTerm {
  int index = 0;  // into the program's combined (moments + extras) vector
  double coef = 0.0;
};
using LinExpr = std::vector<LinTerm>;

struct PsdBlock {
  std::string label;
  int size = 0;
  std::vector<LinExpr> entries;  // row-major, size*size
};

// Moment-SDP form of a polynomial system: linear equalities over pseudo-
// moments (plus optional plain scalar variables) and PSD blocks (the moment
// matrix and one localizing block per inequality).
struct SosProgram {
  std::vector<std::string> var_names;
  int degree = 0;  // D, even
  int p = 0;       // recorded dictionary parameters (0 when generic)
  double k = 0.0;
  int d = 0, r = 0, n = 0;

  std::vector<Monomial> basis;  // all monomials of degree <= D, graded lex
  std::unordered_map<Monomial, int, MonomialHash> index;

  std::vector<std::string> extra_names;  // scalar LP variables after moments
  int total_vars() const { return static_cast<int>(basis.size() + extra_names.size()); }

  std::vector<std::pair<LinExpr, double>> equalities;
  std::vector<PsdBlock> blocks;  // blocks[0] is the moment matrix

  // Generators kept for point evaluation and reporting.
  std::vector<Poly> equality_generators;
  std::vector<Poly> inequality_generators;

  int moment_index(const Monomial& m) const;
  LinExpr lin_of(const Poly& poly) const;
};

// Generic assembly: each equality q is imposed as E~[q * m] = 0 for all
// multipliers m with deg(q m) <= D; each inequality becomes a localizing PSD
// block; moment_pins add single rows E~[poly] = value.
struct GenericProgramSpec {
  std::vector<std::string> var_names;
  int degree = 2;
  std::vector<Poly> equalities;
  std::vector<Poly> inequalities;
  std::vector<std::pair<Poly, double>> moment_pins;
  std::uint64_t monomial_cap = kDefaultMonomialCap;
};

SosProgram build_generic_program(const GenericProgramSpec& spec);

// The dictionary-reconstruction constraint system A(C): variables A (d x r),
// B (r x N), b (r x N); B_ij = b_ij^{p-1}; sum_l b_lj^p <= k^{p/(p-1)};
// A_ik^2 <= 1; and E~[(AB)_ij * m] = C_ij E~[m] for multipliers up to
// c_multiplier_degree (default D-2; 0 couples only E~[(AB)_ij] = C_ij,
// which is the convexity-preserving choice used when C varies).
struct DictProgramOptions {
  int degree = 0;               // 0 = default 2p
  int c_multiplier_degree = -1; // -1 = degree - 2
  std::uint64_t monomial_cap = kDefaultMonomialCap;
};

SosProgram build_program(const Matrix& c, int p, double k, int r,
                         const DictProgramOptions& options = {});

// Same constraint system without any C rows (used when C is the quantity
// being optimized; C is then read off the moments).
SosProgram build_dict_set_program(int d, int n, int r, int p, double k,
                                  const DictProgramOptions& options = {});

struct PseudoExpectation {
  int degree = 0;
  std::vector<std::string> var_names;
  std::vector<Monomial> basis;
  std::unordered_map<Monomial, int, MonomialHash> index;
  std::vector<double> moments;

  double value(const Monomial& m) const;
  double value(const Poly& p) const;
};

// Moment table of the evaluation map p -> p(point); exact for any feasible
// assignment. Throws if the program's generators are violated beyond tol.
PseudoExpectation point_pexp(const SosProgram& program, const Vector& point,
                             double tol = 1e-10);

// Average of moment tables (certifies midpoints of certified sets).
PseudoExpectation average_pexp(const PseudoExpectation& a, const PseudoExpectation& b);

struct CheckReport {
  double normalization_error = 0.0;   // |E~[1] - 1|
  double moment_min_eig = 0.0;        // of the moment matrix
  double max_equality_residual = 0.0;
  double max_localizer_violation = 0.0;  // max over blocks of max(0, -lambda_min)
  bool pass(double tol = 1e-6) const;
};

CheckReport pexp_check(const PseudoExpectation& pexp, const SosProgram& program);

// Moment matrix indexed by the degree <= D/2 monomials.
Matrix moment_matrix_of(const PseudoExpectation& pexp);

enum class SolveStatus { kSolved, kIterationLimit, kStalled };

struct SolveOptions {
  int max_iters = 20000;
  int per_level_iters = 4000;
  double tol = 1e-7;        // fixed-point residual target
  double objective_tol = 1e-5;
  double over_relax = 1.6;
  std::uint64_t seed = 0;
  bool track_history = false;
  std::optional<double> objective_lower_bound;  // skips the downward search
};

struct SolveResult {
  SolveStatus status = SolveStatus::kIterationLimit;
  PseudoExpectation pexp;
  std::vector<double> extras;  // values of the program's extra scalars
  double residual = 0.0;       // final fixed-point residual
  double objective = 0.0;
  int iterations = 0;
  std::vector<double> residual_history;  // per full projection cycle
};

// First-order feasibility / optimization: relaxed alternating projections
// between the affine constraint set and the PSD cones; a linear objective is
// handled by bisection on its level sets with warm starts.
SolveResult solve_sdp(const SosProgram& program, const LinExpr& objective,
                      const SolveOptions& options = {});
SolveResult solve_sdp(const SosProgram& program, const SolveOptions& options = {});

struct DenoiseResult {
  Matrix c;  // d x N
  PseudoExpectation pexp;
  double objective = 0.0;  // |X - C|_1 over the fitted entries
  SolveStatus status = SolveStatus::kSolved;
  double residual = 0.0;
};

// min |X - C|_1 over C in scale * Q^sos_p, via auxiliary absolute-value
// variables. `observed` (flat column-major indices) restricts the objective
// to P_Omega; the returned C is the full certified matrix.
DenoiseResult denoise_over_qsos(const Matrix& x, int p, double k, int r,
                                const DictProgramOptions& program_options = {},
                                const std::optional<std::vector<int>>& observed =
                                    std::nullopt,
                                const SolveOptions& solve_options = {},
                                double scale = 1.0);

// Numeric conclusion of the SoS Holder inequality
// (sum u_i v_i^{p-1})^p <= (sum u_i^p)(sum v_i^p)^{p-1}; p a power of 2.
bool holder_check(const Vector& u, const Vector& v, int p, double rel_slack = 1e-9);

// One "monomial = value" line per moment, graded-lex order.
void dump_moments(std::ostream& os, const PseudoExpectation& pexp);

}  // namespace relaxlearn::sos
