#include "relaxlearn/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "relaxlearn/datagen.hpp"
#include "relaxlearn/dictionary.hpp"
#include "relaxlearn/framework.hpp"
#include "relaxlearn/pca.hpp"
#include "relaxlearn/rng.hpp"
#include "relaxlearn/sos.hpp"
#include "relaxlearn/spectral.hpp"
#include "relaxlearn/util.hpp"

namespace relaxlearn::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;

struct Manifest {
  std::string subcommand;
  ordered_json params = ordered_json::object();
  std::vector<std::string> outputs;

  void write(const fs::path& out_dir) const {
    ordered_json j;
    j["subcommand"] = subcommand;
    j["params"] = params;
    j["outputs"] = outputs;
    std::ofstream os(out_dir / "manifest.json");
    os << j.dump(2) << '\n';
  }
};

std::ofstream open_out(const fs::path& out_dir, const std::string& name,
                       Manifest* manifest) {
  fs::create_directories(out_dir);
  manifest->outputs.push_back(name);
  std::ofstream os(out_dir / name);
  if (!os) throw std::runtime_error("cannot open output file " + name);
  return os;
}

// For artifacts written by library save_* helpers.
std::string note_output(const fs::path& out_dir, const std::string& name,
                        Manifest* manifest) {
  fs::create_directories(out_dir);
  manifest->outputs.push_back(name);
  return (out_dir / name).string();
}

std::vector<std::string> flags_from_manifest(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open manifest " + path.string());
  ordered_json j;
  is >> j;
  std::vector<std::string> args;
  args.push_back(j.at("subcommand").get<std::string>());
  for (const auto& [key, value] : j.at("params").items()) {
    args.push_back("--" + key);
    if (value.is_string()) {
      args.push_back(value.get<std::string>());
    } else if (value.is_boolean()) {
      args.back() = "--" + key + "=" + (value.get<bool>() ? "true" : "false");
    } else {
      args.push_back(value.dump());
    }
  }
  return args;
}

std::vector<std::string> flags_from_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path.string());
  std::vector<std::string> args;
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    args.push_back("--" + key);
    args.push_back(value);
  }
  return args;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

// Common options shared by the experiment subcommands.
struct Common {
  std::string out = ".";
  std::uint64_t seed = 1;
  int threads = 0;

  void attach(CLI::App* app) {
    app->add_option("--out", out, "output directory");
    app->add_option("--seed", seed, "run seed");
    app->add_option("--threads", threads, "worker thread cap");
  }

  void apply() const {
    if (threads > 0) set_max_threads(threads);
  }

  void echo(Manifest* m) const { m->params["seed"] = seed; }
};

int run_gen(const Common& common, const std::string& family, int d, int k, int r,
            int m, double noise, Manifest manifest) {
  const fs::path out(common.out);
  manifest.params["family"] = family;
  manifest.params["d"] = d;
  manifest.params["k"] = k;
  manifest.params["r"] = r;
  manifest.params["m"] = m;
  manifest.params["noise"] = noise;

  if (family == "subspace") {
    const SubspaceData gen = gen_subspace(d, k, m, noise, common.seed);
    save_dataset(gen.data, note_output(out, "dataset.txt", &manifest));
    save_matrix_file(gen.basis, "subspace_basis", note_output(out, "witness.txt", &manifest));
  } else if (family == "regular_decodable") {
    const RegularDecodableData gen = gen_regular_decodable(d, k, m, noise, common.seed);
    save_dataset(gen.data, note_output(out, "dataset.txt", &manifest));
    save_spectral_model(gen.witness, note_output(out, "witness.sa", &manifest));
    save_matrix_file(gen.atoms, "decodable_atoms", note_output(out, "atoms.txt", &manifest));
  } else if (family == "dictionary") {
    const DictionaryData gen = gen_dictionary(d, r, k, m, noise, common.seed);
    save_dataset(gen.data, note_output(out, "dataset.txt", &manifest));
    save_matrix_file(gen.spec.a_star, "dict_astar", note_output(out, "witness.txt", &manifest));
  } else if (family == "manifold_s2") {
    const ManifoldData gen = gen_manifold_s2(d, k, m, common.seed);
    save_dataset(gen.data, note_output(out, "dataset.txt", &manifest));
    save_matrix_file(gen.constraints, "manifold_constraints",
                     note_output(out, "witness.txt", &manifest));
  } else {
    std::cerr << "gen: unknown family '" << family << "'\n";
    return kExitConfig;
  }
  manifest.write(out);
  return kExitOk;
}

int run_pca(const Common& common, const std::string& input, int k, int s,
            Manifest manifest) {
  const fs::path out(common.out);
  manifest.params["in"] = input;
  manifest.params["k"] = k;
  manifest.params["s"] = s;
  const DataSet data = load_dataset(input);
  const PcaModel model = fit_kernel_pca(data, k, s);
  const double train = empirical_loss(pca_pair(model), data, LossKind::kSquaredEuclidean);

  fs::create_directories(out);
  manifest.outputs.push_back("model.pca");
  save_pca_model(model, (out / "model.pca").string());
  {
    auto os = open_out(out, "results.json", &manifest);
    ordered_json j;
    j["train_loss"] = train;
    os << j.dump(2) << '\n';
  }
  manifest.write(out);
  return kExitOk;
}

int run_spectral(const Common& common, const std::string& input, double radius,
                 int steps, int p, int window, int minibatch, bool line_search,
                 Manifest manifest) {
  const fs::path out(common.out);
  manifest.params["in"] = input;
  manifest.params["radius"] = radius;
  manifest.params["steps"] = steps;
  manifest.params["p"] = p;
  manifest.params["window"] = window;
  manifest.params["minibatch"] = minibatch;
  manifest.params["line-search"] = line_search;

  const DataSet data = load_dataset(input);
  std::vector<FwTraceRow> trace;
  SpectralModel model;
  try {
    if (p == 0) {
      FwOptions options;
      options.steps = steps;
      options.radius = radius;
      options.averaging_window = window;
      options.minibatch = minibatch;
      options.seed = common.seed;
      model = fw_nonsmooth(data, options, &trace);
    } else {
      model = fw_smooth_schatten(data, radius, p, steps, line_search, &trace);
    }
  } catch (const no_convergence_error& e) {
    std::cerr << "spectral: " << e.what() << '\n';
    return kExitSolver;
  }

  fs::create_directories(out);
  manifest.outputs.push_back("model.sa");
  save_spectral_model(model, (out / "model.sa").string());
  {
    auto os = open_out(out, "trace.csv", &manifest);
    write_fw_trace_csv(os, trace, p != 0);
  }
  {
    auto os = open_out(out, "results.json", &manifest);
    ordered_json j;
    j["final_objective"] = objective_value(model, data);
    j["rank"] = model.rank();
    os << j.dump(2) << '\n';
  }
  manifest.write(out);
  return kExitOk;
}

struct DictFlags {
  int d = 3, r = 2, k = 1, n = 3;
  double noise = 0.0, rho = 0.8;
  std::string denoiser = "qsos";
  int p = 4, degree = 4, seeds = 1;
  double scale = 1.0;

  void attach(CLI::App* app) {
    app->add_option("--d", d);
    app->add_option("--r", r);
    app->add_option("--k", k);
    app->add_option("--n", n);
    app->add_option("--noise", noise);
    app->add_option("--rho", rho);
    app->add_option("--denoiser", denoiser)->check(CLI::IsMember({"qsos", "gamma"}));
    app->add_option("--p", p);
    app->add_option("--degree", degree);
    app->add_option("--seeds", seeds, "number of seeds, starting at --seed");
  }

  void echo(Manifest* m) const {
    m->params["d"] = d;
    m->params["r"] = r;
    m->params["k"] = k;
    m->params["n"] = n;
    m->params["noise"] = noise;
    m->params["rho"] = rho;
    m->params["denoiser"] = denoiser;
    m->params["p"] = p;
    m->params["degree"] = degree;
    m->params["seeds"] = seeds;
  }

  std::unique_ptr<ConvexDenoiser> make(std::uint64_t seed) const {
    if (denoiser == "qsos") {
      return std::make_unique<QsosDenoiser>(d, n, r, p, static_cast<double>(k), degree);
    }
    return std::make_unique<GammaHeuristicDenoiser>(d, n, r, static_cast<double>(k), seed);
  }
};

int run_dict_group(const Common& common, const DictFlags& flags, Manifest manifest) {
  const fs::path out(common.out);
  flags.echo(&manifest);
  auto os = open_out(out, "experiment.csv", &manifest);
  os << "seed,rho,eps_star_hat,denoise_err,decode_err,code_len\n";
  bool solver_trouble = false;
  for (int si = 0; si < flags.seeds; ++si) {
    const std::uint64_t seed = common.seed + si;
    const DictionaryData gen =
        gen_dictionary(flags.d, flags.r, flags.k, flags.n, flags.noise, seed);
    const Matrix x = gen.data.as_matrix();
    const double eps_hat = epsilon_star(gen.spec, gen.data, seed);
    auto den = flags.make(seed);
    const GroupEncodeResult enc = group_encode(x, *den, flags.rho, Rng::mix(seed));
    const double denoise_err =
        (enc.denoised - x).cwiseAbs().sum() / (flags.d * flags.n);
    const Matrix xhat = group_decode(enc.code, *den);
    const double decode_err = (xhat - x).cwiseAbs().sum() / (flags.d * flags.n);
    if (auto* q = dynamic_cast<QsosDenoiser*>(den.get())) {
      if (q->last_status() != sos::SolveStatus::kSolved) solver_trouble = true;
    }
    os << seed << ',' << format_g17(flags.rho) << ',' << format_g17(eps_hat) << ','
       << format_g17(denoise_err) << ',' << format_g17(decode_err) << ','
       << enc.code.code_length_reals() << '\n';
  }
  os.close();
  manifest.write(out);
  return solver_trouble ? kExitSolver : kExitOk;
}

int run_dict_single(const Common& common, const DictFlags& flags, int queries,
                    Manifest manifest) {
  const fs::path out(common.out);
  flags.echo(&manifest);
  manifest.params["queries"] = queries;
  auto os = open_out(out, "experiment.csv", &manifest);
  os << "seed,rho,eps_star_hat,denoise_err,decode_err,code_len\n";
  bool solver_trouble = false;
  for (int si = 0; si < flags.seeds; ++si) {
    const std::uint64_t seed = common.seed + si;
    const DictionaryData gen =
        gen_dictionary(flags.d, flags.r, flags.k, flags.n * (queries + 4), flags.noise, seed);
    const double eps_hat = epsilon_star(gen.spec, gen.data, seed);
    // Fresh draws from the same planted model.
    const DictionarySpec spec = gen.spec;
    const double noise = flags.noise;
    const int d = flags.d, r = flags.r, kk = flags.k;
    ContextSampler sampler = [spec, noise, d, r, kk](int count, std::uint64_t s) {
      Rng rng(s);
      Matrix c(d, count);
      for (int j = 0; j < count; ++j) {
        Rng sub = rng.fork(j);
        std::vector<int> idx(r);
        for (int i = 0; i < r; ++i) idx[i] = i;
        for (int i = 0; i < kk; ++i) {
          const int t = i + static_cast<int>(sub.next_below(r - i));
          std::swap(idx[i], idx[t]);
        }
        Vector y = Vector::Zero(r);
        for (int i = 0; i < kk; ++i) y[idx[i]] = sub.next_sign();
        Vector col = spec.a_star * y;
        for (int i = 0; i < d && noise > 0.0; ++i) col[i] += noise * sub.next_uniform(-1.0, 1.0);
        c.col(j) = col;
      }
      return c;
    };

    double decode_err = 0.0;
    int code_len = 0;
    auto den = flags.make(seed);
    Rng qrng(Rng::mix(seed ^ 0x51));
    for (int q = 0; q < queries; ++q) {
      const Vector x = sampler(1, qrng.fork(q).next_u64()).col(0);
      const GroupCode code = single_encode(x, sampler, *den, flags.rho, flags.n,
                                           qrng.fork(q + 1000).next_u64());
      std::vector<Vector> fresh;
      const Matrix f = sampler(flags.n - 1, qrng.fork(q + 2000).next_u64());
      for (int j = 0; j < flags.n - 1; ++j) fresh.push_back(f.col(j));
      const Vector xhat = single_decode(code, fresh, sampler, *den, flags.rho, flags.n,
                                        qrng.fork(q + 3000).next_u64());
      decode_err += (xhat - x).lpNorm<1>() / flags.d;
      code_len += code.code_length_reals();
      if (auto* qd = dynamic_cast<QsosDenoiser*>(den.get())) {
        if (qd->last_status() != sos::SolveStatus::kSolved) solver_trouble = true;
      }
    }
    decode_err /= std::max(1, queries);
    os << seed << ',' << format_g17(flags.rho) << ',' << format_g17(eps_hat) << ','
       << format_g17(0.0) << ',' << format_g17(decode_err) << ','
       << code_len / std::max(1, queries) << '\n';
  }
  os.close();
  manifest.write(out);
  return solver_trouble ? kExitSolver : kExitOk;
}

int run_srw(const Common& common, const std::string& set, int dim, int n_cols,
            const std::string& m_list, int trials, double radius, int r, int p,
            int degree, double k, Manifest manifest) {
  const fs::path out(common.out);
  manifest.params["set"] = set;
  manifest.params["dim"] = dim;
  manifest.params["n"] = n_cols;
  manifest.params["m-list"] = m_list;
  manifest.params["trials"] = trials;
  manifest.params["radius"] = radius;
  manifest.params["r"] = r;
  manifest.params["p"] = p;
  manifest.params["degree"] = degree;
  manifest.params["k"] = k;

  SetMaximizer maximizer;
  int total_dim = dim;
  std::unique_ptr<QsosDenoiser> qsos;
  if (set == "zero") {
    maximizer = [](const Vector&) { return 0.0; };
  } else if (set == "linf") {
    maximizer = [radius](const Vector& xi) { return radius * xi.lpNorm<1>(); };
  } else if (set == "schatten") {
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dim))));
    if (side * side != dim) {
      std::cerr << "srw: schatten set needs a square dim\n";
      return kExitConfig;
    }
    maximizer = [radius, side](const Vector& xi) {
      Matrix m(side, side);
      for (int i = 0; i < side; ++i)
        for (int j = 0; j < side; ++j) m(i, j) = xi[i * side + j];
      Eigen::JacobiSVD<Matrix> svd(m);
      return radius * svd.singularValues()(0);
    };
  } else if (set == "qsos") {
    total_dim = dim * n_cols;
    qsos = std::make_unique<QsosDenoiser>(dim, n_cols, r, p, k, degree);
    maximizer = [&qsos](const Vector& xi) { return qsos->support_value(xi); };
  } else {
    std::cerr << "srw: unknown set '" << set << "'\n";
    return kExitConfig;
  }

  ordered_json summary = ordered_json::array();
  for (int m : parse_int_list(m_list)) {
    const WidthEstimate est = srw_estimate(maximizer, total_dim, m, trials, common.seed);
    auto os = open_out(out, "srw_m" + std::to_string(m) + ".csv", &manifest);
    write_width_csv(os, est);
    ordered_json row;
    row["m"] = m;
    row["mean"] = est.mean;
    row["std_error"] = est.std_error;
    summary.push_back(row);
  }
  {
    auto os = open_out(out, "results.json", &manifest);
    os << summary.dump(2) << '\n';
  }
  manifest.write(out);
  return kExitOk;
}

int run_rademacher(const Common& common, int d, int k, int s, const std::string& m_list,
                   int trials, Manifest manifest) {
  const fs::path out(common.out);
  manifest.params["d"] = d;
  manifest.params["k"] = k;
  manifest.params["s"] = s;
  manifest.params["m-list"] = m_list;
  manifest.params["trials"] = trials;

  ordered_json summary = ordered_json::array();
  for (int m : parse_int_list(m_list)) {
    const DataSet data = gen_subspace(d, d, m, 0.0, Rng::mix(common.seed + m)).data;
    const WidthEstimate est =
        rademacher_estimate(pca_class_evaluator(k, s), data, trials, common.seed);
    auto os = open_out(out, "rademacher_m" + std::to_string(m) + ".csv", &manifest);
    write_width_csv(os, est);
    ordered_json row;
    row["m"] = m;
    row["mean"] = est.mean;
    row["std_error"] = est.std_error;
    row["bound"] = 3.0 * std::sqrt(static_cast<double>(d) / m);
    summary.push_back(row);
  }
  {
    auto os = open_out(out, "results.json", &manifest);
    os << summary.dump(2) << '\n';
  }
  manifest.write(out);
  return kExitOk;
}

int run_sos_check(const Common& common, int d, int r, int n, int p, double k,
                  int degree, Manifest manifest) {
  const fs::path out(common.out);
  manifest.params["d"] = d;
  manifest.params["r"] = r;
  manifest.params["n"] = n;
  manifest.params["p"] = p;
  manifest.params["k"] = k;
  manifest.params["degree"] = degree;

  // Feasible interior assignment from the seed.
  Rng rng(common.seed);
  const int vars = d * r + 2 * r * n;
  Vector point(vars);
  for (int i = 0; i < d * r; ++i) point[i] = 0.6 * rng.next_uniform(-1.0, 1.0);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < n; ++j) {
      // b within the column budget, B = b^{p-1} exactly.
      const double cap = std::pow(k, 1.0 / (p - 1)) / std::pow(r, 1.0 / p);
      const double b = 0.6 * cap * rng.next_uniform(-1.0, 1.0);
      point[d * r + r * n + i * n + j] = b;
      point[d * r + i * n + j] = std::pow(b, p - 1);
    }
  }
  Matrix a(d, r), bmat(r, n);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < r; ++j) a(i, j) = point[i * r + j];
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < n; ++j) bmat(i, j) = point[d * r + i * n + j];
  const Matrix c = a * bmat;

  sos::DictProgramOptions opts;
  opts.degree = degree;
  const sos::SosProgram program = sos::build_program(c, p, k, r, opts);
  const sos::PseudoExpectation pexp = sos::point_pexp(program, point);
  const sos::CheckReport report = sos::pexp_check(pexp, program);

  sos::SolveOptions solve_opts;
  solve_opts.seed = common.seed;
  solve_opts.tol = 1e-6;
  solve_opts.track_history = true;
  const sos::SolveResult solved = sos::solve_sdp(program, solve_opts);

  fs::create_directories(out);
  {
    auto os = open_out(out, "pexp.txt", &manifest);
    sos::dump_moments(os, pexp);
  }
  {
    auto os = open_out(out, "results.json", &manifest);
    ordered_json j;
    j["normalization_error"] = report.normalization_error;
    j["moment_min_eig"] = report.moment_min_eig;
    j["max_equality_residual"] = report.max_equality_residual;
    j["max_localizer_violation"] = report.max_localizer_violation;
    j["point_check_pass"] = report.pass(1e-8);
    j["solver_residual"] = solved.residual;
    j["solver_iterations"] = solved.iterations;
    j["solver_status"] = solved.status == sos::SolveStatus::kSolved ? "solved" : "diagnostic";
    os << j.dump(2) << '\n';
  }
  manifest.write(out);
  return solved.status == sos::SolveStatus::kSolved ? kExitOk : kExitSolver;
}

int run_report(const Common& common, int d, int gen_k, int fit_k, int s, double noise,
               const std::string& m_grid_csv, int holdout_m, Manifest manifest) {
  const fs::path out(common.out);
  manifest.params["d"] = d;
  manifest.params["gen-k"] = gen_k;
  manifest.params["fit-k"] = fit_k;
  manifest.params["s"] = s;
  manifest.params["noise"] = noise;
  manifest.params["m-grid"] = m_grid_csv;
  manifest.params["holdout-m"] = holdout_m;

  const std::vector<int> m_grid = parse_int_list(m_grid_csv);
  Sampler sampler = [d, gen_k, noise](int m, std::uint64_t seed) {
    return gen_subspace(d, gen_k, m, noise, seed).data;
  };
  Learner learner = [fit_k, s](const DataSet& train) {
    return pca_pair(fit_kernel_pca(train, fit_k, s));
  };
  const auto rows = generalization_report(learner, sampler, m_grid, holdout_m,
                                          LossKind::kSquaredEuclidean, common.seed);
  {
    auto os = open_out(out, "report.csv", &manifest);
    write_generalization_csv(os, rows);
  }
  manifest.write(out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& raw_args) {
  // Resolve --from-manifest / --config into flag lists; explicit flags win.
  std::vector<std::string> args;
  std::vector<std::string> manifest_flags, config_flags;
  try {
    for (size_t i = 0; i < raw_args.size(); ++i) {
      if (raw_args[i] == "--from-manifest" && i + 1 < raw_args.size()) {
        manifest_flags = flags_from_manifest(raw_args[++i]);
      } else if (raw_args[i] == "--config" && i + 1 < raw_args.size()) {
        config_flags = flags_from_config(raw_args[++i]);
      } else {
        args.push_back(raw_args[i]);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "relaxlearn: " << e.what() << '\n';
    return kExitConfig;
  }
  std::vector<std::string> merged;
  if (!manifest_flags.empty()) {
    merged = manifest_flags;
    merged.insert(merged.end(), config_flags.begin(), config_flags.end());
    merged.insert(merged.end(), args.begin(), args.end());
  } else if (!config_flags.empty()) {
    // Subcommand must come first for CLI11; take it from the explicit args.
    if (args.empty()) {
      std::cerr << "relaxlearn: --config requires a subcommand\n";
      return kExitConfig;
    }
    merged.push_back(args.front());
    merged.insert(merged.end(), config_flags.begin(), config_flags.end());
    merged.insert(merged.end(), args.begin() + 1, args.end());
  } else {
    merged = args;
  }

  CLI::App app{"relaxlearn experiment runner"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset + witness");
  Common gen_common;
  gen_common.attach(gen);
  std::string gen_family = "subspace";
  int gen_d = 8, gen_k = 2, gen_r = 4, gen_m = 100;
  double gen_noise = 0.0;
  gen->add_option("--family", gen_family);
  gen->add_option("--d", gen_d);
  gen->add_option("--k", gen_k);
  gen->add_option("--r", gen_r);
  gen->add_option("--m", gen_m);
  gen->add_option("--noise", gen_noise, "noise scale (eps for regular_decodable)");

  // pca
  auto* pca_cmd = app.add_subcommand("pca", "fit kernel PCA on a dataset file");
  Common pca_common;
  pca_common.attach(pca_cmd);
  std::string pca_in;
  int pca_k = 2, pca_s = 1;
  pca_cmd->add_option("--in", pca_in)->required();
  pca_cmd->add_option("--k", pca_k);
  pca_cmd->add_option("--s", pca_s);

  // spectral
  auto* spec_cmd = app.add_subcommand("spectral", "train a spectral autoencoder");
  Common spec_common;
  spec_common.attach(spec_cmd);
  std::string spec_in;
  double spec_radius = 2.0;
  int spec_steps = 400, spec_p = 0, spec_window = 1, spec_minibatch = 0;
  bool spec_ls = false;
  spec_cmd->add_option("--in", spec_in)->required();
  spec_cmd->add_option("--radius", spec_radius);
  spec_cmd->add_option("--steps", spec_steps);
  spec_cmd->add_option("--p", spec_p, "0 = non-smooth objective, else even Schatten p");
  spec_cmd->add_option("--window", spec_window);
  spec_cmd->add_option("--minibatch", spec_minibatch);
  spec_cmd->add_flag("--line-search", spec_ls);

  // dict-group / dict-single
  auto* group_cmd = app.add_subcommand("dict-group", "group encode/decode experiment");
  Common group_common;
  group_common.attach(group_cmd);
  DictFlags group_flags;
  group_flags.attach(group_cmd);

  auto* single_cmd = app.add_subcommand("dict-single", "single-example pipeline experiment");
  Common single_common;
  single_common.attach(single_cmd);
  DictFlags single_flags;
  single_flags.attach(single_cmd);
  int single_queries = 3;
  single_cmd->add_option("--queries", single_queries);

  // srw
  auto* srw_cmd = app.add_subcommand("srw", "sampling Rademacher width estimates");
  Common srw_common;
  srw_common.attach(srw_cmd);
  std::string srw_set = "linf", srw_mlist = "4";
  int srw_dim = 16, srw_trials = 200, srw_n = 3, srw_r = 1, srw_p = 4, srw_degree = 4;
  double srw_radius = 1.0, srw_k = 1.0;
  srw_cmd->add_option("--set", srw_set);
  srw_cmd->add_option("--dim", srw_dim, "ambient dim (rows for qsos)");
  srw_cmd->add_option("--n", srw_n, "columns (qsos only)");
  srw_cmd->add_option("--m-list", srw_mlist);
  srw_cmd->add_option("--trials", srw_trials);
  srw_cmd->add_option("--radius", srw_radius);
  srw_cmd->add_option("--r", srw_r);
  srw_cmd->add_option("--p", srw_p);
  srw_cmd->add_option("--degree", srw_degree);
  srw_cmd->add_option("--k", srw_k);

  // rademacher
  auto* rad_cmd = app.add_subcommand("rademacher", "H^pca Rademacher estimates");
  Common rad_common;
  rad_common.attach(rad_cmd);
  int rad_d = 8, rad_k = 2, rad_s = 1, rad_trials = 200;
  std::string rad_mlist = "50,200,800";
  rad_cmd->add_option("--d", rad_d);
  rad_cmd->add_option("--k", rad_k);
  rad_cmd->add_option("--s", rad_s);
  rad_cmd->add_option("--m-list", rad_mlist);
  rad_cmd->add_option("--trials", rad_trials);

  // sos-check
  auto* sos_cmd = app.add_subcommand("sos-check", "SoS feasibility instance check");
  Common sos_common;
  sos_common.attach(sos_cmd);
  int sosd = 1, sosr = 1, sosn = 1, sosp = 4, sosdeg = 8;
  double sosk = 1.0;
  sos_cmd->add_option("--d", sosd);
  sos_cmd->add_option("--r", sosr);
  sos_cmd->add_option("--n", sosn);
  sos_cmd->add_option("--p", sosp);
  sos_cmd->add_option("--k", sosk);
  sos_cmd->add_option("--degree", sosdeg);

  // report
  auto* rep_cmd = app.add_subcommand("report", "PCA generalization report");
  Common rep_common;
  rep_common.attach(rep_cmd);
  int rep_d = 8, rep_genk = 2, rep_fitk = 2, rep_s = 1, rep_holdout = 2000;
  double rep_noise = 0.1;
  std::string rep_grid = "50,100,200,400,800";
  rep_cmd->add_option("--d", rep_d);
  rep_cmd->add_option("--gen-k", rep_genk);
  rep_cmd->add_option("--fit-k", rep_fitk);
  rep_cmd->add_option("--s", rep_s);
  rep_cmd->add_option("--noise", rep_noise);
  rep_cmd->add_option("--m-grid", rep_grid);
  rep_cmd->add_option("--holdout-m", rep_holdout);

  std::vector<const char*> argv;
  argv.push_back("relaxlearn");
  for (const auto& a : merged) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help
      std::cout << app.help() << '\n';
      return kExitOk;
    }
    std::cerr << "relaxlearn: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (gen->parsed()) {
      gen_common.apply();
      Manifest m{"gen"};
      gen_common.echo(&m);
      return run_gen(gen_common, gen_family, gen_d, gen_k, gen_r, gen_m, gen_noise, m);
    }
    if (pca_cmd->parsed()) {
      pca_common.apply();
      Manifest m{"pca"};
      pca_common.echo(&m);
      return run_pca(pca_common, pca_in, pca_k, pca_s, m);
    }
    if (spec_cmd->parsed()) {
      spec_common.apply();
      Manifest m{"spectral"};
      spec_common.echo(&m);
      return run_spectral(spec_common, spec_in, spec_radius, spec_steps, spec_p,
                          spec_window, spec_minibatch, spec_ls, m);
    }
    if (group_cmd->parsed()) {
      group_common.apply();
      Manifest m{"dict-group"};
      group_common.echo(&m);
      return run_dict_group(group_common, group_flags, m);
    }
    if (single_cmd->parsed()) {
      single_common.apply();
      Manifest m{"dict-single"};
      single_common.echo(&m);
      return run_dict_single(single_common, single_flags, single_queries, m);
    }
    if (srw_cmd->parsed()) {
      srw_common.apply();
      Manifest m{"srw"};
      srw_common.echo(&m);
      return run_srw(srw_common, srw_set, srw_dim, srw_n, srw_mlist, srw_trials,
                     srw_radius, srw_r, srw_p, srw_degree, srw_k, m);
    }
    if (rad_cmd->parsed()) {
      rad_common.apply();
      Manifest m{"rademacher"};
      rad_common.echo(&m);
      return run_rademacher(rad_common, rad_d, rad_k, rad_s, rad_mlist, rad_trials, m);
    }
    if (sos_cmd->parsed()) {
      sos_common.apply();
      Manifest m{"sos-check"};
      sos_common.echo(&m);
      return run_sos_check(sos_common, sosd, sosr, sosn, sosp, sosk, sosdeg, m);
    }
    if (rep_cmd->parsed()) {
      rep_common.apply();
      Manifest m{"report"};
      rep_common.echo(&m);
      return run_report(rep_common, rep_d, rep_genk, rep_fitk, rep_s, rep_noise,
                        rep_grid, rep_holdout, m);
    }
  } catch (const std::exception& e) {
    std::cerr << "relaxlearn: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace relaxlearn::cli
