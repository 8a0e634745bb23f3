#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace selfcal {

/// Exact rational used for calibration distances and the closed forms built on them.
using Rational = boost::rational<std::int64_t>;

/// Unordered antenna pair. Antennas are 1-indexed; `from_edges` normalizes so that p < q.
struct Edge {
  int p = 0;
  int q = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// One directed sounding measurement: `tx` transmits, `rx` receives.
struct Link {
  int tx = 0;
  int rx = 0;

  friend auto operator<=>(const Link&, const Link&) = default;
};

/// Time expressed as a whole number of measurement slots of duration T.
struct SlotCount {
  std::int64_t value = 0;

  friend auto operator<=>(const SlotCount&, const SlotCount&) = default;
  double seconds(double slot_duration) const { return static_cast<double>(value) * slot_duration; }
};

class TopologyError : public std::invalid_argument {
 public:
  enum class Kind {
    InvalidSize,
    IndexOutOfRange,
    SelfLoop,
    DuplicateEdge,
    WrongEdgeCount,
    NotEffective,
  };

  TopologyError(Kind kind, const std::string& what) : std::invalid_argument(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// An interconnection strategy: a spanning tree of transmission lines over M antennas,
/// one of which is the reference antenna with known gains.
///
/// Instances are only produced by the validating factories, so every Topology is
/// "effective": each ordinary antenna has exactly one calibration path to the reference.
class Topology {
 public:
  static Topology star(int m, int reference);
  static Topology daisy(int m, int reference);
  static Topology from_edges(int m, int reference, std::span<const Edge> edges);

  int size() const noexcept { return m_; }
  int reference() const noexcept { return reference_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Directly wired antennas, ascending.
  const std::vector<int>& neighbors(int antenna) const;
  int degree(int antenna) const { return static_cast<int>(neighbors(antenna).size()); }

  /// Entry of the interconnection matrix.
  bool interconnected(int p, int q) const;

  /// Ordinary antennas in ascending order; position k here is row k of each
  /// parameter block of the Fisher matrix.
  std::vector<int> ordinary_antennas() const;
  /// 0-based position of an ordinary antenna in `ordinary_antennas()`.
  int ordinary_position(int antenna) const;

  /// Parent of each antenna when the tree is rooted at the reference (0 for the reference).
  const std::vector<int>& parents() const noexcept { return parent_; }
  /// Breadth-first order from the reference, children visited by ascending index.
  const std::vector<int>& bfs_order() const noexcept { return bfs_; }

  bool is_path() const;
  bool is_star() const;
  /// Star whose hub is the reference antenna.
  bool is_reference_star() const { return degree(reference_) == m_ - 1; }

  friend bool operator==(const Topology& a, const Topology& b) {
    return a.m_ == b.m_ && a.reference_ == b.reference_ && a.edges_ == b.edges_;
  }

 private:
  Topology() = default;

  void check_antenna(int antenna) const;

  int m_ = 0;
  int reference_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;  // index 0 unused
  std::vector<int> parent_;
  std::vector<int> bfs_;
};

struct DistanceProfile {
  std::vector<int> antennas;   // ordinary antennas, ascending
  std::vector<int> distances;  // d_m, aligned with `antennas`
  Rational mean;

  int distance_of(int antenna) const;
};

/// Hop count from the reference to every ordinary antenna.
DistanceProfile calibration_distances(const Topology& t);

/// N_max: largest number of directly wired neighbours over all antennas.
int max_degree(const Topology& t);

/// Splits the tree into calibration chains walking away from the reference.
/// When branching happens away from the reference, every root-to-leaf path is
/// returned and shared prefixes appear in more than one chain.
std::vector<std::vector<int>> decompose_chains(const Topology& t);

struct Schedule {
  std::vector<std::vector<Link>> slots;
  double slot_duration = 1.0;

  SlotCount slot_count() const { return SlotCount{static_cast<std::int64_t>(slots.size())}; }
  double collection_seconds() const { return slot_count().seconds(slot_duration); }
};

/// Parallel measurement plan with exactly 2 * N_max slots. Built from a proper
/// N_max edge colouring of the tree; each colour class yields a parent-to-child
/// slot followed by the reverse slot.
Schedule measurement_schedule(const Topology& t, double slot_duration);

/// Checks per-slot antenna disjointness and exact coverage of both directions of
/// every edge. Returns a description of the first violation, or nullopt.
std::optional<std::string> schedule_violation(const Topology& t, const Schedule& schedule);

/// Enumerates every labeled tree on {1..m} exactly once by decoding Prüfer sequences
/// in lexicographic order.
class TreeEnumerator {
 public:
  static constexpr int kDefaultCap = 8;

  TreeEnumerator(int m, int reference, int cap = kDefaultCap);

  std::optional<Topology> next();
  /// Cayley's count m^(m-2).
  std::uint64_t total() const noexcept { return total_; }

 private:
  int m_;
  int reference_;
  std::uint64_t total_;
  std::vector<int> sequence_;
  bool done_ = false;
};

/// Decodes a Prüfer sequence (length m - 2, entries in 1..m) into a tree.
Topology decode_prufer(int m, int reference, std::span<const int> sequence);

}  // namespace selfcal
