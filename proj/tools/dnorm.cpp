// Command-line front end: closed-form evaluation, Monte Carlo
// estimation, Wasserstein distances, generator iteration, the Dirichlet
// family and max-stable / GPD sampling with reproducible seeds.
#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dnorm/core.hpp"
#include "dnorm/dirichlet.hpp"
#include "dnorm/doubly_stochastic.hpp"
#include "dnorm/format.hpp"
#include "dnorm/markov.hpp"
#include "dnorm/montecarlo.hpp"
#include "dnorm/simulate.hpp"
#include "dnorm/transport.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(field, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("cannot parse '" + field + "' as a number");
    }
    if (pos != field.size()) throw std::invalid_argument("trailing junk in number '" + field + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty vector argument");
  return out;
}

struct GeneratorArgs {
  std::string kind = "constant";
  int d = 0;
  double alpha = 1.0;
  double lambda = 2.0;
  std::string measure_file;

  void add_flags(CLI::App* cmd, const std::string& suffix) {
    cmd->add_option("--gen" + suffix, kind,
                    "generator: constant|scaledperm|frechet|dirichlet|spacings|discrete")
        ->required();
    cmd->add_option("--d" + suffix, d, "dimension (required unless inferable)");
    cmd->add_option("--alpha" + suffix, alpha, "dirichlet shape parameter");
    cmd->add_option("--lambda" + suffix, lambda, "frechet/logistic parameter, > 1");
    cmd->add_option("--measure" + suffix, measure_file, "JSON file with a discrete measure");
  }

  dnorm::GeneratorSpec build(int inferred_d) const {
    const int dim = d > 0 ? d : inferred_d;
    if (kind == "constant") return dnorm::GeneratorSpec::constant(dim);
    if (kind == "scaledperm") return dnorm::GeneratorSpec::scaled_permutation(dim);
    if (kind == "frechet") return dnorm::GeneratorSpec::frechet_logistic(dim, lambda);
    if (kind == "dirichlet") return dnorm::GeneratorSpec::dirichlet(dim, alpha);
    if (kind == "spacings") return dnorm::GeneratorSpec::uniform_spacings(dim);
    if (kind == "discrete") {
      std::ifstream f(measure_file);
      if (!f) throw std::invalid_argument("cannot open measure file: " + measure_file);
      std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
      return dnorm::GeneratorSpec::discrete(dnorm::discrete_measure_from_json(text));
    }
    throw std::invalid_argument("unknown generator kind: " + kind);
  }
};

std::string estimate_json(const dnorm::Estimate& e) {
  std::ostringstream os;
  os << "{\"value\":" << dnorm::format17(e.value) << ",\"std_error\":"
     << dnorm::format17(e.std_error) << ",\"n\":" << e.n_samples << ",\"seed\":" << e.seed << "}";
  return os.str();
}

void write_manifest(const std::string& out_path, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& params,
                    std::uint64_t seed, double wall_seconds) {
  nlohmann::json j;
  j["command"] = command;
  auto& p = j["parameters"] = nlohmann::json::object();
  for (const auto& [k, v] : params) p[k] = v;
  j["seed"] = seed;
  j["version"] = dnorm::kVersion;
  j["wall_time_seconds"] = wall_seconds;
  std::ofstream f(out_path + ".manifest.json");
  f << j.dump(2) << "\n";
}

std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd() ^
         static_cast<std::uint64_t>(
             std::chrono::steady_clock::now().time_since_epoch().count());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"D-norm toolbox: exact norms, Monte Carlo estimation, Wasserstein distances, "
               "doubly stochastic iteration, the Dirichlet family, max-stable/GPD sampling"};
  app.require_subcommand(1);

  // ---- eval ----
  auto* eval = app.add_subcommand("eval", "evaluate a closed-form norm");
  std::string eval_norm, eval_x;
  double eval_lambda = 2.0, eval_alpha = 1.0;
  eval->add_option("--norm", eval_norm, "sup|l1|logistic|dirichlet2")->required();
  eval->add_option("--x", eval_x, "comma-separated point")->required();
  eval->add_option("--lambda", eval_lambda, "logistic parameter, >= 1 or 'inf'");
  eval->add_option("--alpha", eval_alpha, "dirichlet2 parameter, > 0");

  // ---- estimate ----
  auto* est = app.add_subcommand("estimate", "Monte Carlo D-norm estimate");
  GeneratorArgs est_gen;
  std::string est_x;
  long long est_n = 100000;
  std::uint64_t est_seed = dnorm::kDefaultSeed;
  int est_streams = 1;
  bool est_entropy = false;
  est_gen.add_flags(est, "");
  est->add_option("--x", est_x, "comma-separated point")->required();
  est->add_option("--n", est_n, "sample count");
  est->add_option("--seed", est_seed, "RNG seed");
  est->add_option("--streams", est_streams, "parallel streams");
  est->add_flag("--entropy", est_entropy, "draw the seed from system entropy");

  // ---- distance ----
  auto* dist = app.add_subcommand("distance", "Wasserstein distance between two D-norms");
  GeneratorArgs dist_a, dist_b;
  long long dist_n = 2000;
  std::uint64_t dist_seed = dnorm::kDefaultSeed;
  std::string dist_solver = "auto";
  dist_a.add_flags(dist, "-a");
  dist_b.add_flags(dist, "-b");
  dist->add_option("--n", dist_n, "standardization samples per generator");
  dist->add_option("--seed", dist_seed, "RNG seed");
  dist->add_option("--solver", dist_solver, "auto|exact|sinkhorn");

  // ---- iterate ----
  auto* iter = app.add_subcommand("iterate", "generator iteration M^n Z");
  GeneratorArgs iter_gen;
  std::string iter_matrix, iter_x;
  int iter_nmax = 20;
  long long iter_n = 100000;
  std::uint64_t iter_seed = dnorm::kDefaultSeed;
  int iter_streams = 1;
  iter->add_option("--matrix", iter_matrix, "matrix file (CSV rows or JSON array)")->required();
  iter_gen.add_flags(iter, "");
  iter->add_option("--x", iter_x, "comma-separated point")->required();
  iter->add_option("--n-max", iter_nmax, "last power to evaluate");
  iter->add_option("--n", iter_n, "samples per estimate");
  iter->add_option("--seed", iter_seed, "RNG seed");
  iter->add_option("--streams", iter_streams, "parallel streams");

  // ---- dirichlet ----
  auto* diri = app.add_subcommand("dirichlet", "extremal-coefficient table or inversion");
  auto* diri_table = diri->add_subcommand("table", "m(alpha) over a list of alphas");
  std::string table_alphas;
  int table_d = 2;
  long long table_n = 100000;
  std::uint64_t table_seed = dnorm::kDefaultSeed;
  diri_table->add_option("--d", table_d, "dimension")->required();
  diri_table->add_option("--alphas", table_alphas, "comma-separated alphas")->required();
  diri_table->add_option("--n", table_n, "samples for the Monte Carlo cases");
  diri_table->add_option("--seed", table_seed, "RNG seed");
  auto* diri_solve = diri->add_subcommand("solve", "find alpha with m(alpha) = target");
  double solve_target = 1.5, solve_tol = 1e-8;
  int solve_d = 2;
  long long solve_n = 100000;
  std::uint64_t solve_seed = dnorm::kDefaultSeed;
  diri_solve->add_option("--d", solve_d, "dimension")->required();
  diri_solve->add_option("--target", solve_target, "target in (1, d)")->required();
  diri_solve->add_option("--tol", solve_tol, "tolerance on m(alpha)");
  diri_solve->add_option("--n", solve_n, "initial samples per evaluation (d > 2)");
  diri_solve->add_option("--seed", solve_seed, "RNG seed");
  diri->require_subcommand(1);

  // ---- sample ----
  auto* sample = app.add_subcommand("sample", "draw max-stable or GPD samples to CSV");
  auto* sample_ms = sample->add_subcommand("maxstable", "standard max-stable vectors");
  GeneratorArgs ms_gen;
  long long ms_n = 1000;
  int ms_points = 1000;
  std::uint64_t ms_seed = dnorm::kDefaultSeed;
  std::string ms_out;
  bool ms_entropy = false;
  ms_gen.add_flags(sample_ms, "");
  sample_ms->add_option("--n", ms_n, "number of draws");
  sample_ms->add_option("--points", ms_points, "Poisson points retained");
  sample_ms->add_option("--seed", ms_seed, "RNG seed");
  sample_ms->add_option("--out", ms_out, "output CSV path")->required();
  sample_ms->add_flag("--entropy", ms_entropy, "draw the seed from system entropy");
  auto* sample_gpd = sample->add_subcommand("gpd", "generalized Pareto vectors");
  double gpd_alpha = 1.0;
  int gpd_d = 2;
  long long gpd_n = 1000;
  std::uint64_t gpd_seed = dnorm::kDefaultSeed;
  std::string gpd_out;
  bool gpd_entropy = false;
  sample_gpd->add_option("--alpha", gpd_alpha, "dirichlet parameter")->required();
  sample_gpd->add_option("--d", gpd_d, "dimension")->required();
  sample_gpd->add_option("--n", gpd_n, "number of draws");
  sample_gpd->add_option("--seed", gpd_seed, "RNG seed");
  sample_gpd->add_option("--out", gpd_out, "output CSV path")->required();
  sample_gpd->add_flag("--entropy", gpd_entropy, "draw the seed from system entropy");
  sample->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  const auto started = std::chrono::steady_clock::now();
  auto wall_seconds = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  };

  try {
    if (*eval) {
      const auto x = parse_vector(eval_x);
      double value = 0.0;
      if (eval_norm == "sup") {
        value = dnorm::sup_norm(x);
      } else if (eval_norm == "l1") {
        value = dnorm::l1_norm(x);
      } else if (eval_norm == "logistic") {
        value = dnorm::logistic_norm(x, eval_lambda);
      } else if (eval_norm == "dirichlet2") {
        if (x.size() != 2) throw std::invalid_argument("dirichlet2 needs a 2-dimensional x");
        value = dnorm::bivariate_dirichlet_norm(x[0], x[1], eval_alpha);
      } else {
        throw std::invalid_argument("unknown norm: " + eval_norm);
      }
      std::cout << dnorm::format17(value) << "\n";
      return 0;
    }

    if (*est) {
      const auto x = parse_vector(est_x);
      const auto spec = est_gen.build(static_cast<int>(x.size()));
      if (est_entropy) est_seed = entropy_seed();
      dnorm::EstimationConfig cfg{est_n, est_seed, est_streams};
      std::cout << estimate_json(dnorm::estimate_dnorm(spec, x, cfg)) << "\n";
      return 0;
    }

    if (*dist) {
      const auto a = dist_a.build(0);
      const auto b = dist_b.build(0);
      dnorm::DistanceSolver solver = dnorm::DistanceSolver::automatic;
      if (dist_solver == "exact") {
        solver = dnorm::DistanceSolver::exact;
      } else if (dist_solver == "sinkhorn") {
        solver = dnorm::DistanceSolver::sinkhorn;
      } else if (dist_solver != "auto") {
        throw std::invalid_argument("unknown solver: " + dist_solver);
      }
      dnorm::EstimationConfig cfg;
      cfg.seed = dist_seed;
      const auto r = dnorm::dnorm_distance(a, b, dist_n, cfg, solver);
      if (!r.converged) throw dnorm::numerical_error("distance solver did not converge");
      std::cout << "{\"cost\":" << dnorm::format17(r.cost) << ",\"method\":\"" << r.method
                << "\",\"n\":" << r.n << "}\n";
      return 0;
    }

    if (*iter) {
      const auto x = parse_vector(iter_x);
      const auto m = dnorm::read_matrix_file(iter_matrix);
      const auto spec = iter_gen.build(static_cast<int>(x.size()));
      if (!dnorm::is_primitive(m).primitive) {
        std::cerr << "warning: matrix is not primitive; the iteration need not converge\n";
      }
      dnorm::EstimationConfig cfg{iter_n, iter_seed, iter_streams};
      const auto estimates = dnorm::iterate_generator(m, spec, iter_nmax, x, cfg);
      std::cout << "n,estimate,std_error\n";
      for (std::size_t n = 0; n < estimates.size(); ++n) {
        std::cout << n << "," << dnorm::format17(estimates[n].value) << ","
                  << dnorm::format17(estimates[n].std_error) << "\n";
      }
      return 0;
    }

    if (*diri_table) {
      const auto alphas = parse_vector(table_alphas);
      dnorm::EstimationConfig cfg;
      cfg.n_samples = table_n;
      cfg.seed = table_seed;
      std::cout << "alpha,d,m_value,std_error\n";
      for (double a : alphas) {
        const auto e = dnorm::generator_constant(a, table_d, cfg);
        std::cout << dnorm::format17(a) << "," << table_d << "," << dnorm::format17(e.value)
                  << "," << dnorm::format17(e.std_error) << "\n";
      }
      return 0;
    }

    if (*diri_solve) {
      dnorm::EstimationConfig cfg;
      cfg.n_samples = solve_n;
      cfg.seed = solve_seed;
      const auto r = dnorm::solve_alpha_for_constant(solve_target, solve_d, solve_tol, cfg);
      if (r.exact) {
        std::cout << dnorm::format17(r.alpha) << "\n";
      } else {
        std::cout << "alpha,alpha_lo,alpha_hi,m_value,m_std_error\n"
                  << dnorm::format17(r.alpha) << "," << dnorm::format17(r.alpha_lo) << ","
                  << dnorm::format17(r.alpha_hi) << "," << dnorm::format17(r.m_value) << ","
                  << dnorm::format17(r.m_std_error) << "\n";
      }
      return 0;
    }

    if (*sample_ms) {
      if (ms_n < 1) throw std::invalid_argument("sample: n must be >= 1");
      if (ms_entropy) ms_seed = entropy_seed();
      const auto spec = ms_gen.build(0);
      const dnorm::MaxStableConfig cfg{spec, ms_points};
      std::vector<std::vector<double>> rows;
      rows.reserve(static_cast<std::size_t>(ms_n));
      for (long long k = 0; k < ms_n; ++k) {
        dnorm::Rng rng = dnorm::Rng::stream(ms_seed, static_cast<std::uint64_t>(k));
        rows.push_back(dnorm::sample_max_stable(cfg, rng));
      }
      std::ofstream f(ms_out);
      if (!f) throw std::invalid_argument("cannot open output file: " + ms_out);
      dnorm::write_samples_csv(f, rows, "eta");
      write_manifest(ms_out, "sample maxstable",
                     {{"gen", ms_gen.kind},
                      {"d", std::to_string(spec.dim())},
                      {"n", std::to_string(ms_n)},
                      {"points", std::to_string(ms_points)}},
                     ms_seed, wall_seconds());
      return 0;
    }

    if (*sample_gpd) {
      if (gpd_n < 1) throw std::invalid_argument("sample: n must be >= 1");
      if (gpd_entropy) gpd_seed = entropy_seed();
      std::vector<std::vector<double>> rows;
      rows.reserve(static_cast<std::size_t>(gpd_n));
      for (long long k = 0; k < gpd_n; ++k) {
        dnorm::Rng rng = dnorm::Rng::stream(gpd_seed, static_cast<std::uint64_t>(k));
        rows.push_back(dnorm::sample_gpd(gpd_alpha, gpd_d, rng));
      }
      std::ofstream f(gpd_out);
      if (!f) throw std::invalid_argument("cannot open output file: " + gpd_out);
      dnorm::write_samples_csv(f, rows, "y");
      write_manifest(gpd_out, "sample gpd",
                     {{"alpha", dnorm::format17(gpd_alpha)},
                      {"d", std::to_string(gpd_d)},
                      {"n", std::to_string(gpd_n)}},
                     gpd_seed, wall_seconds());
      return 0;
    }
  } catch (const dnorm::numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
