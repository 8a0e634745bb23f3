#include <algorithm>
#include <queue>

#include <fmt/format.h>

#include "selfcal/topology.hpp"

namespace selfcal {

Topology decode_prufer(int m, int reference, std::span<const int> sequence) {
  if (m < 2 || static_cast<int>(sequence.size()) != m - 2) {
    throw std::invalid_argument(
        fmt::format("Prüfer sequence for {} antennas must have length {}", m, m - 2));
  }
  std::vector<int> degree(m + 1, 1);
  for (int v : sequence) {
    if (v < 1 || v > m) throw std::invalid_argument(fmt::format("Prüfer entry {} outside 1..{}", v, m));
    ++degree[v];
  }

  std::priority_queue<int, std::vector<int>, std::greater<>> leaves;
  for (int v = 1; v <= m; ++v) {
    if (degree[v] == 1) leaves.push(v);
  }

  std::vector<Edge> edges;
  edges.reserve(m - 1);
  for (int v : sequence) {
    const int leaf = leaves.top();
    leaves.pop();
    edges.push_back({leaf, v});
    if (--degree[v] == 1) leaves.push(v);
  }
  const int u = leaves.top();
  leaves.pop();
  edges.push_back({u, leaves.top()});
  return Topology::from_edges(m, reference, edges);
}

TreeEnumerator::TreeEnumerator(int m, int reference, int cap) : m_(m), reference_(reference), total_(1) {
  if (m < 2) throw std::invalid_argument(fmt::format("need at least 2 antennas, got {}", m));
  if (m > cap) {
    throw std::invalid_argument(
        fmt::format("enumerating trees on {} antennas exceeds the cap of {} ({}^{} trees)", m, cap, m, m - 2));
  }
  if (reference < 1 || reference > m) {
    throw std::invalid_argument(fmt::format("reference antenna {} outside 1..{}", reference, m));
  }
  for (int k = 0; k < m - 2; ++k) total_ *= static_cast<std::uint64_t>(m);
  sequence_.assign(static_cast<std::size_t>(m - 2), 1);
}

std::optional<Topology> TreeEnumerator::next() {
  if (done_) return std::nullopt;
  Topology tree = decode_prufer(m_, reference_, sequence_);

  // Odometer increment over {1..m}^(m-2).
  int pos = static_cast<int>(sequence_.size()) - 1;
  while (pos >= 0 && sequence_[pos] == m_) {
    sequence_[pos] = 1;
    --pos;
  }
  if (pos < 0) {
    done_ = true;
  } else {
    ++sequence_[pos];
  }
  return tree;
}

}  // namespace selfcal
