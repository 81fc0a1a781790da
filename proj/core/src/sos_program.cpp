#include "relaxlearn/sos.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "relaxlearn/dataset.hpp"

namespace relaxlearn::sos {

int Monomial::degree() const {
  int d = 0;
  for (auto e : exps) d += e;
  return d;
}

Monomial Monomial::one(int var_count) {
  Monomial m;
  m.exps.assign(var_count, 0);
  return m;
}

Monomial Monomial::var(int var_count, int index, int power) {
  Monomial m = one(var_count);
  m.exps[index] = static_cast<std::uint8_t>(power);
  return m;
}

Monomial Monomial::times(const Monomial& other) const {
  Monomial m = *this;
  for (size_t i = 0; i < exps.size(); ++i) {
    m.exps[i] = static_cast<std::uint8_t>(m.exps[i] + other.exps[i]);
  }
  return m;
}

std::size_t MonomialHash::operator()(const Monomial& m) const {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (auto e : m.exps) {
    h ^= e;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool grlex_less(const Monomial& a, const Monomial& b) {
  const int da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  // Within a degree, more weight on earlier variables comes first.
  return std::lexicographical_compare(b.exps.begin(), b.exps.end(),
                                      a.exps.begin(), a.exps.end());
}

std::uint64_t monomial_count(int var_count, int max_degree) {
  // binomial(var_count + max_degree, max_degree), saturating at uint64 max.
  std::uint64_t result = 1;
  for (int i = 1; i <= max_degree; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(var_count) + i;
    if (result > UINT64_MAX / num) return UINT64_MAX;
    result = result * num / i;
  }
  return result;
}

namespace {

void enumerate_rec(int var, int remaining, Monomial& cur, std::vector<Monomial>& out) {
  if (var == static_cast<int>(cur.exps.size())) {
    out.push_back(cur);
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    cur.exps[var] = static_cast<std::uint8_t>(e);
    enumerate_rec(var + 1, remaining - e, cur, out);
  }
  cur.exps[var] = 0;
}

}  // namespace

std::vector<Monomial> enumerate_monomials(int var_count, int max_degree,
                                          std::uint64_t cap) {
  if (max_degree > 255) throw std::invalid_argument("enumerate_monomials: degree too large");
  const std::uint64_t count = monomial_count(var_count, max_degree);
  if (count > cap) {
    throw std::invalid_argument("enumerate_monomials: monomial count " +
                                std::to_string(count) + " exceeds cap " +
                                std::to_string(cap));
  }
  std::vector<Monomial> out;
  out.reserve(count);
  Monomial cur = Monomial::one(var_count);
  enumerate_rec(0, max_degree, cur, out);
  std::sort(out.begin(), out.end(), grlex_less);
  return out;
}

std::string monomial_to_string(const Monomial& m, const std::vector<std::string>& names) {
  std::string s;
  for (size_t i = 0; i < m.exps.size(); ++i) {
    if (m.exps[i] == 0) continue;
    if (!s.empty()) s += '*';
    s += names[i];
    if (m.exps[i] > 1) s += '^' + std::to_string(static_cast<int>(m.exps[i]));
  }
  return s.empty() ? "1" : s;
}

int SosProgram::moment_index(const Monomial& m) const {
  auto it = index.find(m);
  if (it == index.end()) throw std::invalid_argument("SosProgram: monomial outside basis");
  return it->second;
}

LinExpr SosProgram::lin_of(const Poly& poly) const {
  LinExpr e;
  e.reserve(poly.size());
  for (const auto& [mono, coef] : poly) e.push_back({moment_index(mono), coef});
  return e;
}

namespace {

void add_basis(SosProgram& prog, std::uint64_t cap) {
  prog.basis = enumerate_monomials(static_cast<int>(prog.var_names.size()),
                                   prog.degree, cap);
  prog.index.reserve(prog.basis.size());
  for (size_t i = 0; i < prog.basis.size(); ++i) {
    prog.index.emplace(prog.basis[i], static_cast<int>(i));
  }
}

void add_normalization(SosProgram& prog) {
  const Monomial one = Monomial::one(static_cast<int>(prog.var_names.size()));
  prog.equalities.push_back({LinExpr{{prog.moment_index(one), 1.0}}, 1.0});
}

void add_moment_matrix(SosProgram& prog, std::uint64_t cap) {
  const int vars = static_cast<int>(prog.var_names.size());
  const auto half = enumerate_monomials(vars, prog.degree / 2, cap);
  PsdBlock block;
  block.label = "moment";
  block.size = static_cast<int>(half.size());
  block.entries.resize(static_cast<size_t>(block.size) * block.size);
  for (int i = 0; i < block.size; ++i) {
    for (int j = 0; j < block.size; ++j) {
      const Monomial prod = half[i].times(half[j]);
      block.entries[static_cast<size_t>(i) * block.size + j] =
          LinExpr{{prog.moment_index(prod), 1.0}};
    }
  }
  prog.blocks.insert(prog.blocks.begin(), std::move(block));
}

int poly_degree(const Poly& p) {
  int d = 0;
  for (const auto& [m, c] : p) d = std::max(d, m.degree());
  return d;
}

// E~[q * m] = 0 for all multipliers with deg(q m) <= limit.
void add_equality_with_multipliers(SosProgram& prog, const Poly& q, int multiplier_limit,
                                   std::uint64_t cap) {
  prog.equality_generators.push_back(q);
  const int vars = static_cast<int>(prog.var_names.size());
  const int room = std::min(multiplier_limit, prog.degree - poly_degree(q));
  if (room < 0) throw std::invalid_argument("sos: constraint degree exceeds program degree");
  for (const auto& mult : enumerate_monomials(vars, room, cap)) {
    LinExpr row;
    for (const auto& [mono, coef] : q) {
      const int idx = prog.moment_index(mono.times(mult));
      bool merged = false;
      for (auto& t : row) {
        if (t.index == idx) {
          t.coef += coef;
          merged = true;
          break;
        }
      }
      if (!merged) row.push_back({idx, coef});
    }
    prog.equalities.push_back({std::move(row), 0.0});
  }
}

// Localizing block for g >= 0: [E~[g * m_i * m_j]]_{ij} >= 0 over multipliers
// with deg <= (D - deg g) / 2.
void add_inequality(SosProgram& prog, const Poly& g, const std::string& label,
                    std::uint64_t cap) {
  prog.inequality_generators.push_back(g);
  const int vars = static_cast<int>(prog.var_names.size());
  const int half = (prog.degree - poly_degree(g)) / 2;
  if (half < 0) throw std::invalid_argument("sos: inequality degree exceeds program degree");
  const auto mults = enumerate_monomials(vars, half, cap);
  PsdBlock block;
  block.label = label;
  block.size = static_cast<int>(mults.size());
  block.entries.resize(static_cast<size_t>(block.size) * block.size);
  for (int i = 0; i < block.size; ++i) {
    for (int j = 0; j < block.size; ++j) {
      const Monomial pair = mults[i].times(mults[j]);
      LinExpr e;
      for (const auto& [mono, coef] : g) e.push_back({prog.moment_index(mono.times(pair)), coef});
      block.entries[static_cast<size_t>(i) * block.size + j] = std::move(e);
    }
  }
  prog.blocks.push_back(std::move(block));
}

}  // namespace

SosProgram build_generic_program(const GenericProgramSpec& spec) {
  if (spec.degree % 2 != 0 || spec.degree < 2) {
    throw std::invalid_argument("build_generic_program: degree must be even >= 2");
  }
  SosProgram prog;
  prog.var_names = spec.var_names;
  prog.degree = spec.degree;
  add_basis(prog, spec.monomial_cap);
  add_normalization(prog);
  for (const auto& q : spec.equalities) {
    add_equality_with_multipliers(prog, q, prog.degree, spec.monomial_cap);
  }
  for (size_t i = 0; i < spec.inequalities.size(); ++i) {
    add_inequality(prog, spec.inequalities[i], "ineq" + std::to_string(i),
                   spec.monomial_cap);
  }
  for (const auto& [poly, value] : spec.moment_pins) {
    prog.equalities.push_back({prog.lin_of(poly), value});
  }
  add_moment_matrix(prog, spec.monomial_cap);
  return prog;
}

namespace {

// Variable layout: A row-major (d x r), then B row-major (r x N), then b.
struct DictVars {
  int d, r, n;
  int count() const { return d * r + 2 * r * n; }
  int a(int i, int k) const { return i * r + k; }
  int b_cap(int i, int j) const { return d * r + i * n + j; }
  int b_low(int i, int j) const { return d * r + r * n + i * n + j; }

  std::vector<std::string> names() const {
    std::vector<std::string> out(count());
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < r; ++k)
        out[a(i, k)] = "A" + std::to_string(i + 1) + std::to_string(k + 1);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < n; ++j) {
        out[b_cap(i, j)] = "B" + std::to_string(i + 1) + std::to_string(j + 1);
        out[b_low(i, j)] = "b" + std::to_string(i + 1) + std::to_string(j + 1);
      }
    return out;
  }
};

SosProgram dict_skeleton(int d, int n, int r, int p, double k,
                         const DictProgramOptions& options) {
  if (p < 4 || p % 2 != 0) throw std::invalid_argument("sos dict: p must be even >= 4");
  const int degree = options.degree > 0 ? options.degree : 2 * p;
  if (degree % 2 != 0 || degree < p) {
    throw std::invalid_argument("sos dict: degree must be even and >= p");
  }
  DictVars v{d, r, n};
  SosProgram prog;
  prog.var_names = v.names();
  prog.degree = degree;
  prog.p = p;
  prog.k = k;
  prog.d = d;
  prog.r = r;
  prog.n = n;
  add_basis(prog, options.monomial_cap);
  add_normalization(prog);

  const int vc = v.count();
  // B_ij = b_ij^{p-1}
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < n; ++j) {
      Poly q{{Monomial::var(vc, v.b_cap(i, j)), 1.0},
             {Monomial::var(vc, v.b_low(i, j), p - 1), -1.0}};
      add_equality_with_multipliers(prog, q, degree, options.monomial_cap);
    }
  }
  // sum_l b_lj^p <= k^{p/(p-1)}
  for (int j = 0; j < n; ++j) {
    Poly g{{Monomial::one(vc), std::pow(k, static_cast<double>(p) / (p - 1))}};
    for (int l = 0; l < r; ++l) g.push_back({Monomial::var(vc, v.b_low(l, j), p), -1.0});
    add_inequality(prog, g, "bcol" + std::to_string(j), options.monomial_cap);
  }
  // A_ik^2 <= 1
  for (int i = 0; i < d; ++i) {
    for (int kk = 0; kk < r; ++kk) {
      Poly g{{Monomial::one(vc), 1.0}, {Monomial::var(vc, v.a(i, kk), 2), -1.0}};
      add_inequality(prog, g, "abox" + std::to_string(i) + "_" + std::to_string(kk),
                     options.monomial_cap);
    }
  }
  add_moment_matrix(prog, options.monomial_cap);
  return prog;
}

Poly ab_entry(const DictVars& v, int i, int j) {
  Poly p;
  const int vc = v.count();
  for (int l = 0; l < v.r; ++l) {
    p.push_back({Monomial::var(vc, v.a(i, l)).times(Monomial::var(vc, v.b_cap(l, j))), 1.0});
  }
  return p;
}

}  // namespace

SosProgram build_dict_set_program(int d, int n, int r, int p, double k,
                                  const DictProgramOptions& options) {
  return dict_skeleton(d, n, r, p, k, options);
}

SosProgram build_program(const Matrix& c, int p, double k, int r,
                         const DictProgramOptions& options) {
  const int d = static_cast<int>(c.rows());
  const int n = static_cast<int>(c.cols());
  SosProgram prog = dict_skeleton(d, n, r, p, k, options);
  DictVars v{d, r, n};
  const int c_mult = options.c_multiplier_degree >= 0 ? options.c_multiplier_degree
                                                      : prog.degree - 2;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < n; ++j) {
      Poly q = ab_entry(v, i, j);
      q.push_back({Monomial::one(v.count()), -c(i, j)});
      add_equality_with_multipliers(prog, q, c_mult, options.monomial_cap);
    }
  }
  return prog;
}

double PseudoExpectation::value(const Monomial& m) const {
  auto it = index.find(m);
  if (it == index.end()) throw std::invalid_argument("PseudoExpectation: monomial outside basis");
  return moments[it->second];
}

double PseudoExpectation::value(const Poly& p) const {
  double s = 0.0;
  for (const auto& [m, c] : p) s += c * value(m);
  return s;
}

PseudoExpectation point_pexp(const SosProgram& program, const Vector& point,
                             double tol) {
  if (point.size() != static_cast<Eigen::Index>(program.var_names.size())) {
    throw dimension_error("point_pexp: wrong number of variable values");
  }
  auto eval_poly = [&](const Poly& p) {
    double s = 0.0;
    for (const auto& [m, c] : p) {
      double t = c;
      for (size_t v = 0; v < m.exps.size(); ++v) {
        for (int e = 0; e < m.exps[v]; ++e) t *= point[static_cast<Eigen::Index>(v)];
      }
      s += t;
    }
    return s;
  };
  for (const auto& q : program.equality_generators) {
    if (std::abs(eval_poly(q)) > tol) {
      throw std::invalid_argument("point_pexp: assignment violates an equality constraint");
    }
  }
  for (const auto& g : program.inequality_generators) {
    if (eval_poly(g) < -tol) {
      throw std::invalid_argument("point_pexp: assignment violates an inequality constraint");
    }
  }
  PseudoExpectation pexp;
  pexp.degree = program.degree;
  pexp.var_names = program.var_names;
  pexp.basis = program.basis;
  pexp.index = program.index;
  pexp.moments.resize(pexp.basis.size());
  for (size_t i = 0; i < pexp.basis.size(); ++i) {
    double t = 1.0;
    const auto& m = pexp.basis[i];
    for (size_t v = 0; v < m.exps.size(); ++v) {
      for (int e = 0; e < m.exps[v]; ++e) t *= point[static_cast<Eigen::Index>(v)];
    }
    pexp.moments[i] = t;
  }
  return pexp;
}

PseudoExpectation average_pexp(const PseudoExpectation& a, const PseudoExpectation& b) {
  if (a.basis.size() != b.basis.size() || a.degree != b.degree) {
    throw dimension_error("average_pexp: mismatched bases");
  }
  PseudoExpectation out = a;
  for (size_t i = 0; i < out.moments.size(); ++i) {
    out.moments[i] = 0.5 * (a.moments[i] + b.moments[i]);
  }
  return out;
}

bool CheckReport::pass(double tol) const {
  return normalization_error <= tol && moment_min_eig >= -tol &&
         max_equality_residual <= tol && max_localizer_violation <= tol;
}

CheckReport pexp_check(const PseudoExpectation& pexp, const SosProgram& program) {
  CheckReport rep;
  // Evaluate a LinExpr over moment entries; program extras are not part of a
  // pseudo-expectation and must not appear in checked rows/blocks.
  const int n_moments = static_cast<int>(program.basis.size());
  auto eval_lin = [&](const LinExpr& e, bool* uses_extras) {
    double s = 0.0;
    for (const auto& t : e) {
      if (t.index >= n_moments) {
        *uses_extras = true;
        return 0.0;
      }
      s += t.coef * pexp.moments[t.index];
    }
    return s;
  };

  const Monomial one = Monomial::one(static_cast<int>(program.var_names.size()));
  rep.normalization_error = std::abs(pexp.value(one) - 1.0);

  for (const auto& [row, rhs] : program.equalities) {
    bool skip = false;
    const double v = eval_lin(row, &skip);
    if (skip) continue;
    rep.max_equality_residual = std::max(rep.max_equality_residual, std::abs(v - rhs));
  }

  bool first = true;
  for (const auto& block : program.blocks) {
    Matrix m(block.size, block.size);
    bool skip = false;
    for (int i = 0; i < block.size && !skip; ++i) {
      for (int j = 0; j < block.size && !skip; ++j) {
        m(i, j) = eval_lin(block.entries[static_cast<size_t>(i) * block.size + j], &skip);
      }
    }
    if (skip) continue;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()),
                                             Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues()(0);
    if (first) {
      rep.moment_min_eig = min_eig;  // blocks[0] is the moment matrix
      first = false;
    } else {
      rep.max_localizer_violation =
          std::max(rep.max_localizer_violation, std::max(0.0, -min_eig));
    }
  }
  return rep;
}

Matrix moment_matrix_of(const PseudoExpectation& pexp) {
  const int vars = static_cast<int>(pexp.var_names.size());
  const auto half = enumerate_monomials(vars, pexp.degree / 2);
  const int n = static_cast<int>(half.size());
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = pexp.value(half[i].times(half[j]));
  return m;
}

bool holder_check(const Vector& u, const Vector& v, int p, double rel_slack) {
  if (p < 2 || (p & (p - 1)) != 0) {
    throw std::invalid_argument("holder_check: p must be a power of 2, >= 2");
  }
  if (u.size() != v.size()) throw dimension_error("holder_check: length mismatch");
  double lhs_base = 0.0, up = 0.0, vp = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    lhs_base += u[i] * std::pow(v[i], p - 1);
    up += std::pow(u[i], p);
    vp += std::pow(v[i], p);
  }
  const double lhs = std::pow(lhs_base, p);
  const double rhs = up * std::pow(vp, p - 1);
  const double scale = std::max({std::abs(lhs), std::abs(rhs), 1.0});
  return lhs <= rhs + rel_slack * scale;
}

void dump_moments(std::ostream& os, const PseudoExpectation& pexp) {
  for (size_t i = 0; i < pexp.basis.size(); ++i) {
    os << monomial_to_string(pexp.basis[i], pexp.var_names) << " = "
       << format_g17(pexp.moments[i]) << '\n';
  }
}

}  // namespace relaxlearn::sos
