#include "selfcal/topology.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>

#include <fmt/format.h>

namespace selfcal {

namespace {

void check_size_and_reference(int m, int reference) {
  if (m < 2) {
    throw TopologyError(TopologyError::Kind::InvalidSize,
                        fmt::format("need at least 2 antennas, got {}", m));
  }
  if (reference < 1 || reference > m) {
    throw TopologyError(TopologyError::Kind::IndexOutOfRange,
                        fmt::format("reference antenna {} outside 1..{}", reference, m));
  }
}

}  // namespace

Topology Topology::star(int m, int reference) {
  check_size_and_reference(m, reference);
  std::vector<Edge> edges;
  edges.reserve(m - 1);
  for (int k = 1; k <= m; ++k) {
    if (k != reference) edges.push_back({reference, k});
  }
  return from_edges(m, reference, edges);
}

Topology Topology::daisy(int m, int reference) {
  check_size_and_reference(m, reference);
  std::vector<Edge> edges;
  edges.reserve(m - 1);
  for (int k = 1; k < m; ++k) edges.push_back({k, k + 1});
  return from_edges(m, reference, edges);
}

Topology Topology::from_edges(int m, int reference, std::span<const Edge> edges) {
  check_size_and_reference(m, reference);

  std::set<Edge> seen;
  for (const Edge& e : edges) {
    if (e.p < 1 || e.p > m || e.q < 1 || e.q > m) {
      throw TopologyError(TopologyError::Kind::IndexOutOfRange,
                          fmt::format("edge ({},{}) references an antenna outside 1..{}", e.p, e.q, m));
    }
    if (e.p == e.q) {
      throw TopologyError(TopologyError::Kind::SelfLoop,
                          fmt::format("edge ({},{}) is a self-loop", e.p, e.q));
    }
    const Edge normalized{std::min(e.p, e.q), std::max(e.p, e.q)};
    if (!seen.insert(normalized).second) {
      throw TopologyError(TopologyError::Kind::DuplicateEdge,
                          fmt::format("edge ({},{}) appears more than once", e.p, e.q));
    }
  }
  if (static_cast<int>(seen.size()) != m - 1) {
    throw TopologyError(TopologyError::Kind::WrongEdgeCount,
                        fmt::format("{} antennas need exactly {} lines, got {}", m, m - 1, seen.size()));
  }

  Topology t;
  t.m_ = m;
  t.reference_ = reference;
  t.edges_.assign(seen.begin(), seen.end());
  t.adjacency_.assign(m + 1, {});
  for (const Edge& e : t.edges_) {
    t.adjacency_[e.p].push_back(e.q);
    t.adjacency_[e.q].push_back(e.p);
  }
  for (auto& list : t.adjacency_) std::sort(list.begin(), list.end());

  // With exactly M-1 distinct edges, connected <=> acyclic <=> spanning tree.
  t.parent_.assign(m + 1, -1);
  t.parent_[reference] = 0;
  t.bfs_.reserve(m);
  std::queue<int> frontier;
  frontier.push(reference);
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    t.bfs_.push_back(u);
    for (int v : t.adjacency_[u]) {
      if (t.parent_[v] == -1) {
        t.parent_[v] = u;
        frontier.push(v);
      }
    }
  }
  if (static_cast<int>(t.bfs_.size()) != m) {
    const auto missing = std::find(t.parent_.begin() + 1, t.parent_.end(), -1) - t.parent_.begin();
    throw TopologyError(TopologyError::Kind::NotEffective,
                        fmt::format("antenna {} has no calibration path to reference {}", missing, reference));
  }
  t.parent_[0] = 0;
  return t;
}

void Topology::check_antenna(int antenna) const {
  if (antenna < 1 || antenna > m_) {
    throw TopologyError(TopologyError::Kind::IndexOutOfRange,
                        fmt::format("antenna {} outside 1..{}", antenna, m_));
  }
}

const std::vector<int>& Topology::neighbors(int antenna) const {
  check_antenna(antenna);
  return adjacency_[antenna];
}

bool Topology::interconnected(int p, int q) const {
  const auto& list = neighbors(p);
  check_antenna(q);
  return std::binary_search(list.begin(), list.end(), q);
}

std::vector<int> Topology::ordinary_antennas() const {
  std::vector<int> out;
  out.reserve(m_ - 1);
  for (int k = 1; k <= m_; ++k) {
    if (k != reference_) out.push_back(k);
  }
  return out;
}

int Topology::ordinary_position(int antenna) const {
  check_antenna(antenna);
  if (antenna == reference_) {
    throw std::invalid_argument(fmt::format("antenna {} is the reference", antenna));
  }
  return antenna < reference_ ? antenna - 1 : antenna - 2;
}

bool Topology::is_path() const {
  return std::all_of(adjacency_.begin() + 1, adjacency_.end(),
                     [](const auto& list) { return list.size() <= 2; });
}

bool Topology::is_star() const {
  return std::any_of(adjacency_.begin() + 1, adjacency_.end(),
                     [this](const auto& list) { return static_cast<int>(list.size()) == m_ - 1; });
}

int DistanceProfile::distance_of(int antenna) const {
  const auto it = std::lower_bound(antennas.begin(), antennas.end(), antenna);
  if (it == antennas.end() || *it != antenna) {
    throw std::out_of_range(fmt::format("antenna {} is not an ordinary antenna", antenna));
  }
  return distances[it - antennas.begin()];
}

DistanceProfile calibration_distances(const Topology& t) {
  std::vector<int> depth(t.size() + 1, 0);
  const auto& parent = t.parents();
  for (int u : t.bfs_order()) {
    if (u != t.reference()) depth[u] = depth[parent[u]] + 1;
  }

  DistanceProfile profile;
  profile.antennas = t.ordinary_antennas();
  profile.distances.reserve(profile.antennas.size());
  std::int64_t total = 0;
  for (int k : profile.antennas) {
    profile.distances.push_back(depth[k]);
    total += depth[k];
  }
  profile.mean = Rational(total, static_cast<std::int64_t>(profile.antennas.size()));
  return profile;
}

int max_degree(const Topology& t) {
  int best = 0;
  for (int k = 1; k <= t.size(); ++k) best = std::max(best, t.degree(k));
  return best;
}

std::vector<std::vector<int>> decompose_chains(const Topology& t) {
  const auto& parent = t.parents();
  std::vector<std::vector<int>> chains;
  std::vector<int> path;

  // Iterative DFS emitting each root-to-leaf path.
  struct Frame {
    int node;
    std::size_t cursor;
    bool leaf;
  };
  for (int start : t.neighbors(t.reference())) {
    std::vector<Frame> stack{{start, 0, true}};
    path.assign(1, start);
    while (!stack.empty()) {
      Frame& top = stack.back();
      const auto& adj = t.neighbors(top.node);
      while (top.cursor < adj.size() && adj[top.cursor] == parent[top.node]) ++top.cursor;
      if (top.cursor < adj.size()) {
        const int child = adj[top.cursor++];
        top.leaf = false;
        stack.push_back({child, 0, true});
        path.push_back(child);
        continue;
      }
      if (top.leaf) chains.push_back(path);
      stack.pop_back();
      path.pop_back();
    }
  }
  return chains;
}

Schedule measurement_schedule(const Topology& t, double slot_duration) {
  const auto& parent = t.parents();
  std::vector<int> edge_color(t.size() + 1, -1);  // colour of edge (parent[v], v), keyed by v
  int colors = 0;
  for (int u : t.bfs_order()) {
    const int taken = u == t.reference() ? -1 : edge_color[u];
    int c = 0;
    for (int v : t.neighbors(u)) {
      if (v == parent[u]) continue;
      if (c == taken) ++c;
      edge_color[v] = c;
      colors = std::max(colors, c + 1);
      ++c;
    }
  }

  Schedule schedule;
  schedule.slot_duration = slot_duration;
  schedule.slots.resize(2 * static_cast<std::size_t>(colors));
  for (int v = 1; v <= t.size(); ++v) {
    if (v == t.reference()) continue;
    const auto c = static_cast<std::size_t>(edge_color[v]);
    schedule.slots[2 * c].push_back({parent[v], v});
    schedule.slots[2 * c + 1].push_back({v, parent[v]});
  }
  for (auto& slot : schedule.slots) std::sort(slot.begin(), slot.end());
  return schedule;
}

std::optional<std::string> schedule_violation(const Topology& t, const Schedule& schedule) {
  std::set<Link> covered;
  for (std::size_t s = 0; s < schedule.slots.size(); ++s) {
    std::vector<bool> busy(t.size() + 1, false);
    for (const Link& link : schedule.slots[s]) {
      if (link.tx < 1 || link.tx > t.size() || link.rx < 1 || link.rx > t.size()) {
        return fmt::format("slot {}: link {}->{} outside 1..{}", s, link.tx, link.rx, t.size());
      }
      if (!t.interconnected(link.tx, link.rx)) {
        return fmt::format("slot {}: {}->{} is not a wired pair", s, link.tx, link.rx);
      }
      if (busy[link.tx] || busy[link.rx]) {
        return fmt::format("slot {}: antenna reused by {}->{}", s, link.tx, link.rx);
      }
      busy[link.tx] = busy[link.rx] = true;
      if (!covered.insert(link).second) {
        return fmt::format("measurement {}->{} scheduled twice", link.tx, link.rx);
      }
    }
  }
  if (covered.size() != 2 * t.edges().size()) {
    return fmt::format("{} of {} directed measurements scheduled", covered.size(), 2 * t.edges().size());
  }
  return std::nullopt;
}

}  // namespace selfcal
