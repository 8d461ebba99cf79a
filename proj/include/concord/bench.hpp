#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "concord/datagen.hpp"

namespace concord::bench {

struct BenchConfig {
  std::vector<std::size_t> ns;
  std::vector<std::size_t> ps;
  std::vector<double> lambdas;
  std::size_t replicates = 10;
  std::uint64_t seed = 1;
  TruthKind kind = TruthKind::AR2;
  double alpha = 2.3;
  std::size_t workers = 1;
  double delta_tol = 1e-5;
  std::size_t max_outer_iterations = 1000;
  PenaltyScale scale = PenaltyScale::Correlation;
};

/// Aggregates for one solver on one (n, p, lambda) cell.
struct BenchRow {
  std::string solver;  ///< "cd" or "pcd"
  std::size_t n = 0;
  std::size_t p = 0;
  double lambda = 0.0;
  double time_mean = 0.0;  ///< seconds of solver time, excluding data generation and I/O
  double time_se = 0.0;
  double iters_mean = 0.0;
  double edges_mean = 0.0;
  std::size_t reps = 0;
};

struct BenchCell {
  BenchRow cd;
  BenchRow pcd;
  double speedup = 0.0;  ///< cd time_mean / pcd time_mean
  std::vector<std::string> failures;
};

struct BenchReport {
  std::vector<BenchCell> cells;
};

/// Runs every (n, p, lambda) cell; replicate r of a cell uses data seed `seed + r`.
/// Per-cell failures are recorded and the run moves on.
BenchReport run_bench(const BenchConfig& config, std::ostream* progress = nullptr);

/// Columns: name,n,p,lambda,time_mean,time_se,iters_mean,edges_mean,reps
void write_csv(std::ostream& out, const BenchReport& report);

/// Human-readable table, one line per cell with both solvers and the speedup.
void write_table(std::ostream& out, const BenchReport& report);

}  // namespace concord::bench
