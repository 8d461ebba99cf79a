#include "concord/solver.hpp"

namespace concord {

CellSets read_write_sets(std::size_t p, const IndexPair& pair) {
  if (pair.s >= p || pair.r >= pair.s) throw IndexError("pair out of range for p = " + std::to_string(p));
  CellSets sets;
  sets.read.reserve(2 * (p - 1));
  for (std::size_t u = 0; u < p; ++u)
    if (u != pair.s) sets.read.push_back({pair.r, u});
  for (std::size_t u = 0; u < p; ++u)
    if (u != pair.r) sets.read.push_back({pair.s, u});
  std::sort(sets.read.begin(), sets.read.end());
  sets.write = {{pair.r, pair.s}, {pair.s, pair.r}};
  return sets;
}

std::vector<IndexPair> row_major_order(std::size_t p) {
  std::vector<IndexPair> order;
  order.reserve(p * (p - 1) / 2);
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t s = r + 1; s < p; ++s) order.emplace_back(r, s);
  return order;
}

std::vector<IndexPair> flattened_order(const Schedule& schedule) {
  std::vector<IndexPair> order;
  for (const auto& round : schedule.active_rounds()) order.insert(order.end(), round.begin(), round.end());
  return order;
}

}  // namespace concord
