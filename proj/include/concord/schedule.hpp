#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace concord {

/// Unordered index pair {r, s}, stored normalized with r < s. Zero-based.
struct IndexPair {
  std::size_t r = 0;
  std::size_t s = 0;

  IndexPair() = default;
  IndexPair(std::size_t a, std::size_t b);

  auto operator<=>(const IndexPair&) const = default;
};

/**
 * Edge coloring of the complete graph on `p_even` vertices; each round is
 * one color class (a perfect matching).
 *
 * For odd p the extra vertex index `p` (zero-based) is a phantom. Pairs that
 * touch it stay in their round so all rounds have p_even / 2 pairs; consumers
 * skip them via is_phantom().
 */
class Schedule {
 public:
  Schedule(std::size_t p, std::vector<std::vector<IndexPair>> rounds);

  std::size_t p() const noexcept { return p_; }
  std::size_t p_even() const noexcept { return p_ % 2 == 0 ? p_ : p_ + 1; }
  const std::vector<std::vector<IndexPair>>& rounds() const noexcept { return rounds_; }

  bool is_phantom(const IndexPair& pair) const noexcept { return pair.s >= p_; }

  /// Rounds with phantom pairs removed; round indexing is preserved.
  std::vector<std::vector<IndexPair>> active_rounds() const;

  /// Number of rounds that still contain at least one real pair.
  std::size_t nonempty_rounds() const;

 private:
  std::size_t p_;
  std::vector<std::vector<IndexPair>> rounds_;
};

/**
 * Circle-method schedule for p variables.
 *
 * Starts from the index table (0, 1, ..., p_even - 1), pairs position q with
 * position p_even - 1 - q, then rotates: the last entry moves to position 1,
 * entries 1..p_even-2 shift right by one, position 0 stays fixed. Emits
 * p_even - 1 rounds. Throws DimensionError for p < 2.
 */
Schedule build_circle_schedule(std::size_t p);

struct ValidationReport {
  bool ok = true;
  std::string message;
  std::optional<std::size_t> round;
};

/// Checks round count, matching property within each round, and exactly-once
/// coverage of all pairs over 0..p_even-1 (and over 0..p-1 once phantoms drop).
ValidationReport validate_schedule(const Schedule& schedule);

/// Exhaustive minimum number of colors in a proper edge coloring of K_p, 2 <= p <= 7.
std::size_t brute_force_chromatic_index(std::size_t p);

/// One round per line, pairs as "r-s" with one-based indices, phantom pairs suffixed '*'.
void dump_schedule(std::ostream& out, const Schedule& schedule);

}  // namespace concord
