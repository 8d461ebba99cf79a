// concord: generate synthetic problems, fit CONCORD estimates, benchmark CD vs PCD.
//
// Exit status: 0 converged / success, 1 usage or parse error, 2 fit stopped at
// the iteration cap (the partial estimate is still written).

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "concord/bench.hpp"
#include "concord/core_model.hpp"
#include "concord/datagen.hpp"
#include "concord/io.hpp"
#include "concord/schedule.hpp"
#include "concord/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotConverged = 2;

constexpr const char* kMaxWorkersEnv = "CONCORD_MAX_WORKERS";

std::size_t worker_cap() {
  std::size_t cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv(kMaxWorkersEnv)) {
    try {
      const long value = std::stol(env);
      if (value >= 1) cap = static_cast<std::size_t>(value);
    } catch (const std::exception&) {
      std::cerr << "ignoring invalid " << kMaxWorkersEnv << "='" << env << "'\n";
    }
  }
  return cap;
}

/// 0 means "as many as allowed".
std::size_t resolve_workers(std::size_t requested) {
  const std::size_t cap = worker_cap();
  return requested == 0 ? cap : std::min(requested, cap);
}

struct GenerateArgs {
  std::string kind = "ar2";
  std::size_t p = 0;
  std::size_t n = 0;
  std::uint64_t seed = 1;
  double alpha = 2.3;
  std::string out;
};

int run_generate(const GenerateArgs& args) {
  const concord::TruthModel truth = args.kind == "ar2" ? concord::ar2_precision(args.p)
                                                       : concord::scale_free_precision(args.p, args.alpha, args.seed);
  const concord::DataMatrixd x = concord::sample_mvn(truth, args.n, args.seed);
  concord::io::write_problem(std::filesystem::path(args.out), x);
  concord::io::write_estimate(std::filesystem::path(args.out + ".truth"),
                              concord::io::EstimateFile{truth.omega_true, 0.0, 0, 0.0});
  std::cout << "truth_edges=" << truth.support.size() << '\n';
  return kExitOk;
}

struct FitArgs {
  std::string in;
  std::string solver = "pcd";
  double lambda = 0.1;
  double delta_tol = 1e-5;
  std::size_t workers = 0;
  std::size_t max_iter = 1000;
  std::string scale = "raw";
  std::string out;
};

concord::PenaltyScale parse_scale(const std::string& name) {
  return name == "correlation" ? concord::PenaltyScale::Correlation : concord::PenaltyScale::Raw;
}

int run_fit(const FitArgs& args) {
  const concord::DataMatrixd raw = concord::io::read_problem(std::filesystem::path(args.in));
  const concord::PenaltyScale scale = parse_scale(args.scale);
  const concord::GramMatrixd gram = concord::compute_gram(concord::prepare_data(raw, scale));

  concord::SolverConfig<double> config;
  config.lambda = concord::objective_lambda(args.lambda, gram.n(), scale);
  config.delta_tol = args.delta_tol;
  config.max_outer_iterations = args.max_iter;
  config.workers = resolve_workers(args.workers);
  config.track_objective = false;

  const auto report = args.solver == "cd"
                          ? concord::cd_fit(gram, config)
                          : concord::pcd_fit(gram, config,
                                             concord::build_circle_schedule(static_cast<std::size_t>(gram.dim())));

  concord::io::write_estimate(std::filesystem::path(args.out),
                              concord::io::EstimateFile{report.estimate, args.lambda, report.iterations,
                                                        report.final_delta});
  std::cout << "iterations=" << report.iterations << ", delta=" << concord::io::format_real(report.final_delta)
            << ", edges=" << report.edge_count << ", seconds=" << concord::io::format_real(report.seconds()) << '\n';
  if (!report.converged) {
    std::cerr << "not converged after " << report.iterations << " iterations\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

struct BenchArgs {
  std::vector<std::size_t> ns{500};
  std::vector<std::size_t> ps{500};
  std::vector<double> lambdas{0.1, 0.3};
  std::size_t reps = 10;
  std::uint64_t seed = 1;
  std::string kind = "ar2";
  double alpha = 2.3;
  std::size_t workers = 0;
  double delta_tol = 1e-5;
  std::size_t max_iter = 1000;
  std::string scale = "correlation";
  std::string csv;
  bool quiet = false;
};

int run_bench(const BenchArgs& args) {
  concord::bench::BenchConfig config;
  config.ns = args.ns;
  config.ps = args.ps;
  config.lambdas = args.lambdas;
  config.replicates = args.reps;
  config.seed = args.seed;
  config.kind = args.kind == "ar2" ? concord::TruthKind::AR2 : concord::TruthKind::ScaleFree;
  config.alpha = args.alpha;
  config.workers = resolve_workers(args.workers);
  config.delta_tol = args.delta_tol;
  config.max_outer_iterations = args.max_iter;
  config.scale = parse_scale(args.scale);

  std::cout << "pcd workers: " << config.workers << '\n';
  const auto report = concord::bench::run_bench(config, args.quiet ? nullptr : &std::cerr);
  concord::bench::write_table(std::cout, report);
  if (!args.csv.empty()) {
    std::ofstream out(args.csv, std::ios::binary);
    if (!out) throw concord::Error("cannot open '" + args.csv + "' for writing");
    concord::bench::write_csv(out, report);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse precision matrix estimation with the CONCORD objective"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Sample a synthetic problem and write it with a truth sidecar");
  generate->add_option("--kind", gen.kind, "Truth model")->check(CLI::IsMember({"ar2", "scalefree"}));
  generate->add_option("--p", gen.p, "Number of variables")->required();
  generate->add_option("--n", gen.n, "Number of samples")->required()->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen.seed, "Random seed");
  generate->add_option("--alpha", gen.alpha, "Scale-free degree exponent");
  generate->add_option("--out", gen.out, "Problem file to write (truth goes to <out>.truth)")->required();

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a precision matrix estimate");
  fit_cmd->add_option("--in", fit.in, "Problem file")->required();
  fit_cmd->add_option("--solver", fit.solver, "cd (serial) or pcd (parallel rounds)")
      ->check(CLI::IsMember({"cd", "pcd"}));
  fit_cmd->add_option("--lambda", fit.lambda, "L1 penalty (presets used in experiments: 0.1, 0.3)")
      ->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--delta-tol", fit.delta_tol, "Stop when the max-abs change drops below this")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--workers", fit.workers, "PCD lanes; 0 = all cores (capped by CONCORD_MAX_WORKERS)");
  fit_cmd->add_option("--max-iter", fit.max_iter, "Outer iteration cap")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--scale", fit.scale, "raw: center only, lambda as given; correlation: standardize, lambda -> 2 n lambda")
      ->check(CLI::IsMember({"raw", "correlation"}));
  fit_cmd->add_option("--out", fit.out, "Estimate file to write")->required();

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time CD against PCD over a grid of (n, p, lambda)");
  bench_cmd->add_option("--n", bench.ns, "Sample sizes")->delimiter(',');
  bench_cmd->add_option("--p", bench.ps, "Variable counts")->delimiter(',');
  bench_cmd->add_option("--lambda", bench.lambdas, "Penalties")->delimiter(',');
  bench_cmd->add_option("--reps", bench.reps, "Replicate data sets per cell")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.seed, "Seed of the first replicate");
  bench_cmd->add_option("--kind", bench.kind, "Truth model")->check(CLI::IsMember({"ar2", "scalefree"}));
  bench_cmd->add_option("--alpha", bench.alpha, "Scale-free degree exponent");
  bench_cmd->add_option("--workers", bench.workers, "PCD lanes; 0 = all cores (capped by CONCORD_MAX_WORKERS)");
  bench_cmd->add_option("--delta-tol", bench.delta_tol, "Convergence threshold")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--max-iter", bench.max_iter, "Outer iteration cap")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--scale", bench.scale, "Penalty scale, as for fit (default correlation)")
      ->check(CLI::IsMember({"raw", "correlation"}));
  bench_cmd->add_option("--csv", bench.csv, "Also write the machine-readable CSV here");
  bench_cmd->add_flag("--quiet", bench.quiet, "No per-replicate progress on stderr");

  std::size_t schedule_p = 0;
  auto* schedule_cmd = app.add_subcommand("schedule", "Print the circle-method rounds for p variables");
  schedule_cmd->add_option("--p", schedule_p, "Number of variables")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (generate->parsed()) return run_generate(gen);
    if (fit_cmd->parsed()) return run_fit(fit);
    if (bench_cmd->parsed()) return run_bench(bench);
    if (schedule_cmd->parsed()) {
      concord::dump_schedule(std::cout, concord::build_circle_schedule(schedule_p));
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
