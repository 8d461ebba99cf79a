#include "concord/bench.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>

#include "concord/io.hpp"
#include "concord/solver.hpp"

namespace concord::bench {

namespace {

struct Samples {
  std::vector<double> seconds;
  std::vector<double> iterations;
  std::vector<double> edges;
  std::size_t not_converged = 0;
};

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

BenchRow summarize(std::string solver, std::size_t n, std::size_t p, double lambda, const Samples& s) {
  return BenchRow{std::move(solver),  n,   p, lambda, mean(s.seconds), standard_error(s.seconds), mean(s.iterations),
                  mean(s.edges), s.seconds.size()};
}

void record(Samples& samples, const FitReport<double>& fit) {
  samples.seconds.push_back(fit.seconds());
  samples.iterations.push_back(static_cast<double>(fit.iterations));
  samples.edges.push_back(static_cast<double>(fit.edge_count));
  if (!fit.converged) ++samples.not_converged;
}

TruthModel make_truth(const BenchConfig& config, std::size_t p, std::uint64_t seed) {
  if (config.kind == TruthKind::AR2) return ar2_precision(p);
  return scale_free_precision(p, config.alpha, seed);
}

std::string fixed(double value, int decimals) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::fixed, decimals);
  return ec == std::errc() ? std::string(buffer, ptr) : std::string("?");
}

}  // namespace

BenchReport run_bench(const BenchConfig& config, std::ostream* progress) {
  if (config.ns.empty() || config.ps.empty() || config.lambdas.empty() || config.replicates == 0) {
    throw std::invalid_argument("benchmark grid is empty");
  }
  BenchReport report;
  for (std::size_t n : config.ns) {
    for (std::size_t p : config.ps) {
      const Schedule schedule = build_circle_schedule(p);
      for (double lambda : config.lambdas) {
        Samples cd, pcd;
        BenchCell cell;
        for (std::size_t rep = 0; rep < config.replicates; ++rep) {
          const std::uint64_t seed = config.seed + rep;
          try {
            const TruthModel truth = make_truth(config, p, seed);
            const GramMatrixd gram = compute_gram(prepare_data(sample_mvn(truth, n, seed), config.scale));

            SolverConfig<double> solver;
            solver.lambda = objective_lambda(lambda, gram.n(), config.scale);
            solver.delta_tol = config.delta_tol;
            solver.max_outer_iterations = config.max_outer_iterations;
            solver.track_objective = false;
            solver.workers = 1;
            record(cd, cd_fit(gram, solver));
            solver.workers = config.workers;
            record(pcd, pcd_fit(gram, solver, schedule));
          } catch (const std::exception& e) {
            cell.failures.push_back("replicate " + std::to_string(rep) + ": " + e.what());
          }
          if (progress != nullptr) {
            *progress << "n=" << n << " p=" << p << " lambda=" << lambda << " replicate " << rep + 1 << '/'
                      << config.replicates << " done\n";
          }
        }
        if (cd.not_converged > 0) cell.failures.push_back(std::to_string(cd.not_converged) + " cd fits hit the iteration cap");
        if (pcd.not_converged > 0) cell.failures.push_back(std::to_string(pcd.not_converged) + " pcd fits hit the iteration cap");
        cell.cd = summarize("cd", n, p, lambda, cd);
        cell.pcd = summarize("pcd", n, p, lambda, pcd);
        cell.speedup = cell.pcd.time_mean > 0.0 ? cell.cd.time_mean / cell.pcd.time_mean : 0.0;
        report.cells.push_back(std::move(cell));
      }
    }
  }
  return report;
}

void write_csv(std::ostream& out, const BenchReport& report) {
  out << "name,n,p,lambda,time_mean,time_se,iters_mean,edges_mean,reps\n";
  for (const auto& cell : report.cells) {
    for (const BenchRow* row : {&cell.cd, &cell.pcd}) {
      out << row->solver << ',' << row->n << ',' << row->p << ',' << io::format_real(row->lambda) << ','
          << io::format_real(row->time_mean) << ',' << io::format_real(row->time_se) << ','
          << io::format_real(row->iters_mean) << ',' << io::format_real(row->edges_mean) << ',' << row->reps << '\n';
    }
  }
}

void write_table(std::ostream& out, const BenchReport& report) {
  out << "lambda      n      p |   CD time (se)      PCD time (se)   | iter CD  iter PCD |   |E| CD    |E| PCD | speedup\n";
  for (const auto& cell : report.cells) {
    const auto& c = cell.cd;
    const auto& q = cell.pcd;
    char line[256];
    std::snprintf(line, sizeof(line), "%6s %6zu %6zu | %8s (%6s) %8s (%6s) | %7s %9s | %9s %9s | %7s\n",
                  fixed(c.lambda, 2).c_str(), c.n, c.p, fixed(c.time_mean, 3).c_str(), fixed(c.time_se, 3).c_str(),
                  fixed(q.time_mean, 3).c_str(), fixed(q.time_se, 3).c_str(), fixed(c.iters_mean, 2).c_str(),
                  fixed(q.iters_mean, 2).c_str(), fixed(c.edges_mean, 1).c_str(), fixed(q.edges_mean, 1).c_str(),
                  fixed(cell.speedup, 2).c_str());
    out << line;
    for (const auto& failure : cell.failures) out << "    ! " << failure << '\n';
  }
}

}  // namespace concord::bench
