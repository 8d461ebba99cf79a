#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "concord/core_model.hpp"
#include "concord/errors.hpp"
#include "concord/round_pool.hpp"
#include "concord/schedule.hpp"

namespace concord {

template <class Scalar>
struct SolverConfig {
  Scalar lambda = Scalar(0);
  Scalar delta_tol = Scalar(1e-5);
  std::size_t max_outer_iterations = 1000;
  /// Starting iterate; identity when empty.
  std::optional<PrecisionEstimate<Scalar>> initial;
  /// Parallel lanes for pcd_fit. Ignored by cd_fit.
  std::size_t workers = 1;
  /// Evaluating the objective costs O(p^3) per iteration and is kept out of the timings.
  bool track_objective = true;

  void validate(Eigen::Index p) const {
    if (!(lambda >= Scalar(0))) throw std::invalid_argument("lambda must be nonnegative");
    if (!(delta_tol > Scalar(0))) throw std::invalid_argument("delta_tol must be positive");
    if (max_outer_iterations < 1) throw std::invalid_argument("max_outer_iterations must be at least 1");
    if (workers < 1) throw std::invalid_argument("workers must be at least 1");
    if (initial && initial->dim() != p) throw DimensionError("initial estimate has the wrong dimension");
  }
};

template <class Scalar>
struct FitReport {
  explicit FitReport(PrecisionEstimate<Scalar> start) : estimate(std::move(start)) {}

  PrecisionEstimate<Scalar> estimate;
  std::size_t iterations = 0;
  Scalar final_delta = Scalar(0);
  bool converged = false;
  /// Objective after each completed outer iteration (empty if not tracked).
  std::vector<Scalar> objective_trace;
  std::size_t edge_count = 0;
  std::vector<std::chrono::duration<double>> wall_time_per_iteration;

  double seconds() const {
    double total = 0;
    for (const auto& d : wall_time_per_iteration) total += d.count();
    return total;
  }
};

/// Thrown by require_converged(); still carries the partial fit.
template <class Scalar>
class NotConverged : public Error {
 public:
  explicit NotConverged(FitReport<Scalar> report)
      : Error("not converged after " + std::to_string(report.iterations) + " iterations"), report_(std::move(report)) {}
  const FitReport<Scalar>& report() const noexcept { return report_; }

 private:
  FitReport<Scalar> report_;
};

template <class Scalar>
FitReport<Scalar> require_converged(FitReport<Scalar> report) {
  if (!report.converged) throw NotConverged<Scalar>(std::move(report));
  return report;
}

template <class Scalar>
using IterationObserver = std::function<void(std::size_t, const PrecisionEstimate<Scalar>&)>;

namespace detail {

/// sum_{u != skip} a[u] * b[u]
template <class Scalar>
Scalar dot_skip(const Scalar* a, const Scalar* b, Eigen::Index n, Eigen::Index skip) {
  using Map = Eigen::Map<const DenseVector<Scalar>>;
  const Scalar head = Map(a, skip).dot(Map(b, skip));
  const Eigen::Index rest = n - skip - 1;
  const Scalar tail = Map(a + skip + 1, rest).dot(Map(b + skip + 1, rest));
  return head + tail;
}

template <class Scalar>
const Scalar* gram_row(const GramMatrix<Scalar>& gram, Eigen::Index i) {
  return gram.t().data() + i * gram.dim();
}

// Unchecked kernels shared by both solvers. Every read goes through rows r
// and s of omega (mirror cells of column reads), which is what
// read_write_sets() describes.

template <class Scalar>
Scalar offdiagonal_value(const PrecisionEstimate<Scalar>& omega, const GramMatrix<Scalar>& gram, Eigen::Index r,
                         Eigen::Index s, Scalar lambda) {
  const Eigen::Index p = gram.dim();
  const Scalar row_r = dot_skip(omega.row_data(r), gram_row(gram, s), p, s);  // sum_{u!=s} w_ru T_su
  const Scalar row_s = dot_skip(omega.row_data(s), gram_row(gram, r), p, r);  // sum_{u!=r} w_us T_ru
  return soft_threshold(-(row_r + row_s), lambda) / (gram(r, r) + gram(s, s));
}

template <class Scalar>
Scalar diagonal_value(const PrecisionEstimate<Scalar>& omega, const GramMatrix<Scalar>& gram, Eigen::Index i) {
  const Scalar a = dot_skip(omega.row_data(i), gram_row(gram, i), gram.dim(), i);
  const Scalar tii = gram(i, i);
  const Scalar root = std::sqrt(a * a + Scalar(4) * Scalar(gram.n()) * tii);
  // Same root; the second form avoids cancellation when a > 0.
  if (a > Scalar(0)) return Scalar(2) * Scalar(gram.n()) / (a + root);
  return (root - a) / (Scalar(2) * tii);
}

inline void check_index(Eigen::Index i, Eigen::Index p) {
  if (i < 0 || i >= p) throw IndexError("index " + std::to_string(i) + " out of range for p = " + std::to_string(p));
}

template <class Scalar>
void check_dims(const PrecisionEstimate<Scalar>& omega, const GramMatrix<Scalar>& gram) {
  if (omega.dim() != gram.dim()) throw DimensionError("estimate and Gram matrix differ in dimension");
}

}  // namespace detail

/**
 * Coordinate minimizer of the objective in w_rs (= w_sr), all else fixed:
 *
 *   Soft_lambda(-sum_{u!=s} w_ru T_su - sum_{u!=r} w_us T_ru) / (T_rr + T_ss)
 *
 * Does not modify omega; the caller writes both mirrored cells.
 */
template <class Scalar>
Scalar update_offdiagonal(const PrecisionEstimate<Scalar>& omega, const GramMatrix<Scalar>& gram, Eigen::Index r,
                          Eigen::Index s, Scalar lambda) {
  detail::check_dims(omega, gram);
  detail::check_index(r, gram.dim());
  detail::check_index(s, gram.dim());
  if (r == s) throw IndexError("update_offdiagonal needs r != s");
  return detail::offdiagonal_value(omega, gram, r, s, lambda);
}

/// Coordinate minimizer in w_ii: (-a + sqrt(a^2 + 4 n T_ii)) / (2 T_ii), a = sum_{j!=i} w_ij T_ij.
template <class Scalar>
Scalar update_diagonal(const PrecisionEstimate<Scalar>& omega, const GramMatrix<Scalar>& gram, Eigen::Index i) {
  detail::check_dims(omega, gram);
  detail::check_index(i, gram.dim());
  return detail::diagonal_value(omega, gram, i);
}

/// Half-vectorization (upper triangle, row by row) of a - b. Length p(p+1)/2.
template <class Scalar>
std::vector<Scalar> vech_difference(const PrecisionEstimate<Scalar>& a, const PrecisionEstimate<Scalar>& b) {
  if (a.dim() != b.dim()) throw DimensionError("vech_difference: dimension mismatch");
  const Eigen::Index p = a.dim();
  std::vector<Scalar> d;
  d.reserve(static_cast<std::size_t>(p * (p + 1) / 2));
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = i; j < p; ++j) d.push_back(a(i, j) - b(i, j));
  return d;
}

namespace detail {
inline constexpr std::size_t kReduceChunk = 4096;
}

/**
 * Infinity norm by pairwise cyclic reduction, in place.
 *
 * With z = ceil(log2 m): the first level (q = z - 1) folds d[j + 2^q] into
 * d[j] only where j + 2^q < m; levels q = z - 2 .. 0 then halve the active
 * prefix. Each level's comparisons are independent and may run on the pool;
 * run() ends each level with a barrier. Returns d[0].
 */
template <class Scalar>
Scalar cyclic_max_reduce_inplace(std::span<Scalar> d, RoundPool* pool = nullptr) {
  const std::size_t m = d.size();
  if (m == 0) throw EmptyVector("cyclic_max_reduce: empty vector");
  if (m == 1) return std::abs(d[0]);

  const auto z = static_cast<int>(std::bit_width(m - 1));
  for (int q = z - 1; q >= 0; --q) {
    const std::size_t half = std::size_t{1} << q;
    auto fold = [&](std::size_t begin, std::size_t end) {
      for (std::size_t j = begin; j < end; ++j) {
        const std::size_t partner = j + half;
        if (partner < m) d[j] = std::max(std::abs(d[j]), std::abs(d[partner]));
      }
    };
    if (pool != nullptr && pool->size() > 1 && half >= 2 * detail::kReduceChunk) {
      const std::size_t chunks = (half + detail::kReduceChunk - 1) / detail::kReduceChunk;
      pool->run(chunks, [&](std::size_t c) {
        fold(c * detail::kReduceChunk, std::min(half, (c + 1) * detail::kReduceChunk));
      });
    } else {
      fold(0, half);
    }
  }
  return d[0];
}

template <class Scalar>
Scalar cyclic_max_reduce(std::vector<Scalar> d) {
  return cyclic_max_reduce_inplace(std::span<Scalar>(d));
}

struct Cell {
  std::size_t row = 0;
  std::size_t col = 0;
  auto operator<=>(const Cell&) const = default;
};

struct CellSets {
  std::vector<Cell> read;   ///< sorted
  std::vector<Cell> write;  ///< sorted
};

/**
 * Cells of omega touched when updating w_rs: reads row r without column s and
 * row s without column r; writes (r, s) and (s, r). The Gram matrix is
 * constant and not listed.
 */
CellSets read_write_sets(std::size_t p, const IndexPair& pair);

/**
 * Serial coordinate descent with an explicit off-diagonal sweep order. Each
 * outer iteration visits `order`, then every diagonal, then measures the
 * max-abs change against the previous iterate.
 */
template <class Scalar>
FitReport<Scalar> cd_fit_ordered(const GramMatrix<Scalar>& gram, const SolverConfig<Scalar>& config,
                                 std::span<const IndexPair> order, const IterationObserver<Scalar>& observer = {}) {
  using clock = std::chrono::steady_clock;
  const Eigen::Index p = gram.dim();
  config.validate(p);
  for (const auto& pair : order)
    if (pair.s >= static_cast<std::size_t>(p)) throw IndexError("sweep order references an index >= p");

  PrecisionEstimate<Scalar> omega = config.initial ? *config.initial : PrecisionEstimate<Scalar>::identity(p);
  PrecisionEstimate<Scalar> previous = omega;
  FitReport<Scalar> report(omega);

  for (std::size_t t = 1; t <= config.max_outer_iterations; ++t) {
    const auto start = clock::now();
    for (const auto& pair : order) {
      const auto r = static_cast<Eigen::Index>(pair.r);
      const auto s = static_cast<Eigen::Index>(pair.s);
      omega.set_offdiagonal(r, s, detail::offdiagonal_value(omega, gram, r, s, config.lambda));
    }
    for (Eigen::Index i = 0; i < p; ++i) omega.set_diagonal(i, detail::diagonal_value(omega, gram, i));
    const Scalar delta = max_abs_diff(omega, previous);
    previous = omega;
    report.wall_time_per_iteration.push_back(clock::now() - start);

    report.iterations = t;
    report.final_delta = delta;
    if (config.track_objective) report.objective_trace.push_back(objective(omega, gram, config.lambda));
    if (observer) observer(t, omega);
    if (delta < config.delta_tol) {
      report.converged = true;
      break;
    }
  }
  report.edge_count = edge_count(omega);
  report.estimate = std::move(omega);
  return report;
}

/// Upper triangle, row by row: (0,1), (0,2), ..., (0,p-1), (1,2), ...
std::vector<IndexPair> row_major_order(std::size_t p);

/// Rounds of the schedule concatenated in order, phantom pairs dropped.
std::vector<IndexPair> flattened_order(const Schedule& schedule);

/// Serial reference solver; row-major upper-triangle sweep, then diagonals.
template <class Scalar>
FitReport<Scalar> cd_fit(const GramMatrix<Scalar>& gram, const SolverConfig<Scalar>& config,
                         const IterationObserver<Scalar>& observer = {}) {
  const auto order = row_major_order(static_cast<std::size_t>(gram.dim()));
  return cd_fit_ordered(gram, config, std::span<const IndexPair>(order), observer);
}

/**
 * Parallel coordinate descent over circle-method rounds.
 *
 * Per outer iteration: every round's real pairs are updated concurrently
 * against the shared iterate and written in place, with a barrier after each
 * round; then all diagonals concurrently; then the change is reduced with
 * cyclic_max_reduce. Pairs in a round share no vertex, so no task reads a cell
 * another task of the same round writes, and the result does not depend on
 * config.workers.
 */
template <class Scalar>
FitReport<Scalar> pcd_fit(const GramMatrix<Scalar>& gram, const SolverConfig<Scalar>& config,
                          const Schedule& schedule, const IterationObserver<Scalar>& observer = {}) {
  using clock = std::chrono::steady_clock;
  const Eigen::Index p = gram.dim();
  if (schedule.p() != static_cast<std::size_t>(p)) {
    throw ScheduleMismatch("schedule built for p = " + std::to_string(schedule.p()) + ", data has p = " +
                           std::to_string(p));
  }
  config.validate(p);

  const auto rounds = schedule.active_rounds();
  RoundPool pool(config.workers);

  PrecisionEstimate<Scalar> omega = config.initial ? *config.initial : PrecisionEstimate<Scalar>::identity(p);
  PrecisionEstimate<Scalar> previous = omega;
  std::vector<Scalar> diff(static_cast<std::size_t>(p * (p + 1) / 2));
  FitReport<Scalar> report(omega);

  const std::vector<IndexPair>* current = nullptr;
  const std::function<void(std::size_t)> offdiagonal_task = [&](std::size_t k) {
    const auto r = static_cast<Eigen::Index>((*current)[k].r);
    const auto s = static_cast<Eigen::Index>((*current)[k].s);
    omega.set_offdiagonal(r, s, detail::offdiagonal_value(omega, gram, r, s, config.lambda));
  };
  const std::function<void(std::size_t)> diagonal_task = [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    omega.set_diagonal(ii, detail::diagonal_value(omega, gram, ii));
  };
  const std::function<void(std::size_t)> diff_task = [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    // row i of the upper triangle starts at i*p - i*(i-1)/2
    std::size_t at = i * static_cast<std::size_t>(p) - i * (i - 1) / 2;
    for (Eigen::Index j = ii; j < p; ++j) diff[at++] = omega(ii, j) - previous(ii, j);
  };

  for (std::size_t t = 1; t <= config.max_outer_iterations; ++t) {
    const auto start = clock::now();
    for (const auto& round : rounds) {
      current = &round;
      pool.run(round.size(), offdiagonal_task);
    }
    pool.run(static_cast<std::size_t>(p), diagonal_task);
    pool.run(static_cast<std::size_t>(p), diff_task);
    const Scalar delta = cyclic_max_reduce_inplace(std::span<Scalar>(diff), &pool);
    previous = omega;
    report.wall_time_per_iteration.push_back(clock::now() - start);

    report.iterations = t;
    report.final_delta = delta;
    if (config.track_objective) report.objective_trace.push_back(objective(omega, gram, config.lambda));
    if (observer) observer(t, omega);
    if (delta < config.delta_tol) {
      report.converged = true;
      break;
    }
  }
  report.edge_count = edge_count(omega);
  report.estimate = std::move(omega);
  return report;
}

}  // namespace concord
