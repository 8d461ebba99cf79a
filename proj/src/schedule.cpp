#include "concord/schedule.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

#include "concord/errors.hpp"

namespace concord {

IndexPair::IndexPair(std::size_t a, std::size_t b) : r(std::min(a, b)), s(std::max(a, b)) {
  if (a == b) throw IndexError("index pair needs two distinct indices");
}

Schedule::Schedule(std::size_t p, std::vector<std::vector<IndexPair>> rounds)
    : p_(p), rounds_(std::move(rounds)) {}

std::vector<std::vector<IndexPair>> Schedule::active_rounds() const {
  std::vector<std::vector<IndexPair>> active;
  active.reserve(rounds_.size());
  for (const auto& round : rounds_) {
    auto& kept = active.emplace_back();
    for (const auto& pair : round)
      if (!is_phantom(pair)) kept.push_back(pair);
  }
  return active;
}

std::size_t Schedule::nonempty_rounds() const {
  std::size_t count = 0;
  for (const auto& round : rounds_)
    if (std::any_of(round.begin(), round.end(), [&](const IndexPair& pr) { return !is_phantom(pr); })) ++count;
  return count;
}

Schedule build_circle_schedule(std::size_t p) {
  if (p < 2) throw DimensionError("schedule needs p >= 2");
  const std::size_t p_even = p % 2 == 0 ? p : p + 1;

  std::vector<std::size_t> table(p_even);
  std::iota(table.begin(), table.end(), std::size_t{0});

  std::vector<std::vector<IndexPair>> rounds;
  rounds.reserve(p_even - 1);
  for (std::size_t k = 0; k + 1 < p_even; ++k) {
    auto& round = rounds.emplace_back();
    round.reserve(p_even / 2);
    for (std::size_t q = 0; q < p_even / 2; ++q) round.emplace_back(table[q], table[p_even - 1 - q]);
    // position 0 fixed; last entry moves to position 1
    std::rotate(table.begin() + 1, table.end() - 1, table.end());
  }
  return Schedule(p, std::move(rounds));
}

namespace {

ValidationReport fail(std::string message, std::optional<std::size_t> round = std::nullopt) {
  return ValidationReport{false, std::move(message), round};
}

std::string pair_name(const IndexPair& pair) {
  return "(" + std::to_string(pair.r + 1) + "," + std::to_string(pair.s + 1) + ")";
}

}  // namespace

ValidationReport validate_schedule(const Schedule& schedule) {
  const std::size_t p = schedule.p();
  const std::size_t p_even = schedule.p_even();
  const auto& rounds = schedule.rounds();

  if (p < 2) return fail("p must be at least 2");
  if (rounds.size() != p_even - 1) {
    return fail("expected " + std::to_string(p_even - 1) + " rounds, found " + std::to_string(rounds.size()));
  }

  // seen[r * p_even + s] counts occurrences of pair (r, s)
  std::vector<unsigned> seen(p_even * p_even, 0);
  for (std::size_t k = 0; k < rounds.size(); ++k) {
    const auto& round = rounds[k];
    if (round.size() != p_even / 2) {
      return fail("round " + std::to_string(k + 1) + " has " + std::to_string(round.size()) + " pairs, expected " +
                      std::to_string(p_even / 2),
                  k);
    }
    std::vector<bool> used(p_even, false);
    for (const auto& pair : round) {
      if (pair.r >= pair.s || pair.s >= p_even) return fail("round " + std::to_string(k + 1) + " has invalid pair", k);
      for (std::size_t v : {pair.r, pair.s}) {
        if (used[v]) {
          return fail("round " + std::to_string(k + 1) + " shares vertex " + std::to_string(v + 1) + " at pair " +
                          pair_name(pair),
                      k);
        }
        used[v] = true;
      }
      if (++seen[pair.r * p_even + pair.s] > 1) {
        return fail("pair " + pair_name(pair) + " appears more than once", k);
      }
    }
  }

  for (std::size_t r = 0; r < p_even; ++r) {
    for (std::size_t s = r + 1; s < p_even; ++s) {
      if (seen[r * p_even + s] == 0) return fail("pair " + pair_name(IndexPair(r, s)) + " is never scheduled");
    }
  }

  // With phantoms dropped, the real pairs must still cover K_p exactly once.
  std::size_t real_pairs = 0;
  for (const auto& round : schedule.active_rounds()) real_pairs += round.size();
  if (real_pairs != p * (p - 1) / 2) return fail("phantom filtering does not leave exactly p(p-1)/2 pairs");

  return {};
}

namespace {

class EdgeColoringSearch {
 public:
  EdgeColoringSearch(std::size_t p, std::size_t colors) : p_(p), colors_(colors), vertex_colors_(p, 0) {
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = a + 1; b < p; ++b) edges_.emplace_back(a, b);
  }

  bool solve() {
    // Edges at vertex 0 are pairwise adjacent, so w.l.o.g. edge (0, b) gets color b - 1.
    std::size_t fixed = 0;
    for (std::size_t b = 1; b < p_; ++b, ++fixed) {
      if (b - 1 >= colors_) return false;
      assign(edges_[fixed], b - 1);
    }
    return extend(fixed);
  }

 private:
  using Mask = unsigned;

  void assign(const IndexPair& e, std::size_t c) {
    vertex_colors_[e.r] |= Mask{1} << c;
    vertex_colors_[e.s] |= Mask{1} << c;
  }
  void unassign(const IndexPair& e, std::size_t c) {
    vertex_colors_[e.r] &= ~(Mask{1} << c);
    vertex_colors_[e.s] &= ~(Mask{1} << c);
  }

  bool extend(std::size_t next) {
    if (next == edges_.size()) return true;
    const IndexPair& e = edges_[next];
    const Mask blocked = vertex_colors_[e.r] | vertex_colors_[e.s];
    for (std::size_t c = 0; c < colors_; ++c) {
      if (blocked & (Mask{1} << c)) continue;
      assign(e, c);
      if (extend(next + 1)) return true;
      unassign(e, c);
    }
    return false;
  }

  std::size_t p_;
  std::size_t colors_;
  std::vector<IndexPair> edges_;
  std::vector<Mask> vertex_colors_;
};

}  // namespace

std::size_t brute_force_chromatic_index(std::size_t p) {
  if (p < 2 || p > 7) throw DimensionError("brute-force chromatic index is limited to 2 <= p <= 7");
  const std::size_t edges = p * (p - 1) / 2;
  for (std::size_t colors = 1; colors <= edges; ++colors) {
    if (EdgeColoringSearch(p, colors).solve()) return colors;
  }
  return edges;
}

void dump_schedule(std::ostream& out, const Schedule& schedule) {
  for (const auto& round : schedule.rounds()) {
    bool first = true;
    for (const auto& pair : round) {
      if (!first) out << ' ';
      first = false;
      out << pair.r + 1 << '-' << pair.s + 1;
      if (schedule.is_phantom(pair)) out << '*';
    }
    out << '\n';
  }
}

}  // namespace concord
