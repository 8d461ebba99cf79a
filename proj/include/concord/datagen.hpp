#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "concord/core_model.hpp"
#include "concord/schedule.hpp"

namespace concord {

enum class TruthKind { AR2, ScaleFree };

/// A synthetic ground-truth precision matrix and its off-diagonal support.
struct TruthModel {
  TruthKind kind = TruthKind::AR2;
  double alpha = 0.0;       ///< ScaleFree only
  std::uint64_t seed = 0;   ///< ScaleFree only
  PrecisionEstimated omega_true;
  std::vector<IndexPair> support;  ///< sorted

  std::size_t p() const { return static_cast<std::size_t>(omega_true.dim()); }
};

/// Band matrix: 1 on the diagonal, 0.45 at |i-j| = 1, 0.4 at |i-j| = 2. Needs p >= 3.
TruthModel ar2_precision(std::size_t p);

/**
 * Scale-free truth:
 *  1. preferential-attachment tree; a new vertex links to i with probability
 *     proportional to deg(i) + A, A = alpha - 3, giving P(k) ~ k^-alpha
 *     (requires alpha > 2 so every weight stays positive). Vertices at the
 *     structural cutoff ceil(sqrt(2 p)) accept no further links,
 *  2. weights Unif([-1,-0.5] U [0.5,1]) on the edges, unit diagonal,
 *  3. each row's off-diagonals divided by 1.25 * S_i, S_i = sum_j |w_ij|,
 *  4. symmetrized by the geometric mean of the two scaled entries,
 *     w_ij / (1.25 sqrt(S_i S_j)); the off-diagonal part then has spectral
 *     norm at most 0.8,
 * then support entries below 0.1 in magnitude are raised to 0.1 * sign.
 */
TruthModel scale_free_precision(std::size_t p, double alpha, std::uint64_t seed);

/// Step 1 of scale_free_precision. Sorted edge list with p - 1 edges.
std::vector<IndexPair> preferential_attachment_tree(std::size_t p, double alpha, std::uint64_t seed);

/// Degree cap used by preferential_attachment_tree.
std::size_t structural_cutoff(std::size_t p);

/**
 * n rows from N(0, Omega^-1): Omega = L L^T, z ~ N(0, I), x = L^-T z.
 * Throws NotPositiveDefinite if the Cholesky factorization fails.
 */
DataMatrixd sample_mvn(const TruthModel& truth, std::size_t n, std::uint64_t seed);

}  // namespace concord
