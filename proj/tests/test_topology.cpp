#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracles.hpp"
#include "selfcal/topology.hpp"

using namespace selfcal;

namespace {

std::vector<Edge> edge_list(std::initializer_list<std::pair<int, int>> pairs) {
  std::vector<Edge> out;
  for (auto [p, q] : pairs) out.push_back({p, q});
  return out;
}

TopologyError::Kind error_kind(int m, int reference, const std::vector<Edge>& edges) {
  try {
    Topology::from_edges(m, reference, edges);
  } catch (const TopologyError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected a TopologyError";
  return TopologyError::Kind::InvalidSize;
}

// Fig.-3-style network: reference 3 with three two-antenna branches.
Topology seven_antenna_tree() {
  return Topology::from_edges(7, 3, edge_list({{3, 1}, {1, 2}, {3, 4}, {4, 5}, {3, 6}, {6, 7}}));
}

}  // namespace

TEST(Topology, StarEdges) {
  const auto t = Topology::star(5, 1);
  EXPECT_EQ(t.edges(), edge_list({{1, 2}, {1, 3}, {1, 4}, {1, 5}}));
  EXPECT_TRUE(t.is_reference_star());

  const auto big = Topology::star(129, 64);
  EXPECT_EQ(big.edges().size(), 128u);
  for (const auto& e : big.edges()) EXPECT_TRUE(e.p == 64 || e.q == 64);
}

TEST(Topology, TwoAntennasStarEqualsDaisy) {
  EXPECT_EQ(Topology::star(2, 1).edges(), Topology::daisy(2, 1).edges());
  EXPECT_EQ(Topology::star(2, 1).edges(), edge_list({{1, 2}}));
}

TEST(Topology, DaisyEdgesIndependentOfReference) {
  const auto end = Topology::daisy(5, 1);
  const auto mid = Topology::daisy(5, 3);
  EXPECT_EQ(end.edges(), edge_list({{1, 2}, {2, 3}, {3, 4}, {4, 5}}));
  EXPECT_EQ(end.edges(), mid.edges());
  EXPECT_EQ(mid.reference(), 3);
  EXPECT_TRUE(Topology::daisy(129, 64).is_path());
}

TEST(Topology, FactoryArgumentErrors) {
  EXPECT_THROW(Topology::star(1, 1), TopologyError);
  EXPECT_THROW(Topology::star(5, 0), TopologyError);
  EXPECT_THROW(Topology::daisy(5, 6), TopologyError);
}

TEST(Topology, FromEdgesAcceptsBranchingTree) {
  const auto t = seven_antenna_tree();
  EXPECT_EQ(t.degree(3), 3);
  EXPECT_EQ(t.neighbors(3), (std::vector<int>{1, 4, 6}));
  EXPECT_TRUE(t.interconnected(1, 3));
  EXPECT_FALSE(t.interconnected(1, 4));
}

TEST(Topology, FromEdgesErrors) {
  using K = TopologyError::Kind;
  EXPECT_EQ(error_kind(4, 1, edge_list({{1, 2}, {3, 4}, {1, 2}})), K::DuplicateEdge);
  EXPECT_EQ(error_kind(4, 1, edge_list({{1, 2}, {2, 1}, {3, 4}})), K::DuplicateEdge);
  EXPECT_EQ(error_kind(4, 1, edge_list({{1, 2}, {2, 3}})), K::WrongEdgeCount);
  EXPECT_EQ(error_kind(4, 1, edge_list({{1, 2}, {2, 3}, {3, 4}, {4, 1}})), K::WrongEdgeCount);
  EXPECT_EQ(error_kind(4, 1, edge_list({{1, 1}, {2, 3}, {3, 4}})), K::SelfLoop);
  EXPECT_EQ(error_kind(4, 1, edge_list({{1, 2}, {2, 5}, {3, 4}})), K::IndexOutOfRange);
  EXPECT_EQ(error_kind(4, 9, edge_list({{1, 2}, {2, 3}, {3, 4}})), K::IndexOutOfRange);
  // Right count, but a triangle leaves antenna 4 unreachable.
  EXPECT_EQ(error_kind(4, 1, edge_list({{1, 2}, {2, 3}, {3, 1}})), K::NotEffective);
  EXPECT_EQ(error_kind(5, 1, edge_list({{1, 2}, {2, 3}, {3, 1}, {4, 5}})), K::NotEffective);
}

TEST(Topology, OrdinaryPositions) {
  const auto t = Topology::daisy(5, 3);
  EXPECT_EQ(t.ordinary_antennas(), (std::vector<int>{1, 2, 4, 5}));
  EXPECT_EQ(t.ordinary_position(1), 0);
  EXPECT_EQ(t.ordinary_position(4), 2);
  EXPECT_THROW(t.ordinary_position(3), std::invalid_argument);
}

TEST(CalibrationDistances, Examples) {
  const auto star = calibration_distances(Topology::star(5, 1));
  EXPECT_EQ(star.distances, (std::vector<int>{1, 1, 1, 1}));
  EXPECT_EQ(star.mean, Rational(1));

  const auto mid = calibration_distances(Topology::daisy(5, 3));
  EXPECT_EQ(mid.antennas, (std::vector<int>{1, 2, 4, 5}));
  EXPECT_EQ(mid.distances, (std::vector<int>{2, 1, 1, 2}));
  EXPECT_EQ(mid.mean, Rational(3, 2));

  const auto end = calibration_distances(Topology::daisy(5, 1));
  EXPECT_EQ(end.distances, (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(end.mean, Rational(5, 2));
  EXPECT_EQ(end.distance_of(4), 3);
  EXPECT_THROW(end.distance_of(1), std::out_of_range);
}

TEST(CalibrationDistances, MatchFloydWarshallOnRandomTrees) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 2 + static_cast<int>(gen() % 30);
    const int f = 1 + static_cast<int>(gen() % m);
    const auto edges = oracle::random_tree_edges(m, gen);
    const auto t = Topology::from_edges(m, f, edges);
    const auto d = oracle::hop_distances(m, edges);
    const auto profile = calibration_distances(t);
    std::int64_t total = 0;
    for (std::size_t k = 0; k < profile.antennas.size(); ++k) {
      ASSERT_EQ(profile.distances[k], d[f][profile.antennas[k]]);
      total += d[f][profile.antennas[k]];
    }
    ASSERT_EQ(profile.mean, Rational(total, m - 1));
    ASSERT_EQ(profile.mean == Rational(1), t.is_reference_star());
  }
}

TEST(MaxDegree, Examples) {
  EXPECT_EQ(max_degree(Topology::daisy(6, 3)), 2);
  EXPECT_EQ(max_degree(Topology::star(6, 1)), 5);
  EXPECT_EQ(max_degree(seven_antenna_tree()), 3);
  EXPECT_EQ(max_degree(Topology::star(2, 1)), 1);
}

TEST(DecomposeChains, Examples) {
  EXPECT_EQ(decompose_chains(seven_antenna_tree()),
            (std::vector<std::vector<int>>{{1, 2}, {4, 5}, {6, 7}}));

  const auto daisy = decompose_chains(Topology::daisy(129, 64));
  ASSERT_EQ(daisy.size(), 2u);
  EXPECT_EQ(daisy[0].size(), 63u);
  EXPECT_EQ(daisy[1].size(), 65u);
  EXPECT_EQ(daisy[0].front(), 63);
  EXPECT_EQ(daisy[0].back(), 1);
  EXPECT_EQ(daisy[1].front(), 65);

  const auto star = decompose_chains(Topology::star(5, 1));
  EXPECT_EQ(star, (std::vector<std::vector<int>>{{2}, {3}, {4}, {5}}));
}

TEST(DecomposeChains, BranchingAwayFromReferenceDuplicatesPrefix) {
  // 1 - 2, with 2 branching to 3 and 4.
  const auto t = Topology::from_edges(4, 1, edge_list({{1, 2}, {2, 3}, {2, 4}}));
  EXPECT_EQ(decompose_chains(t), (std::vector<std::vector<int>>{{2, 3}, {2, 4}}));
}

TEST(DecomposeChains, PositionInChainIsCalibrationDistance) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + static_cast<int>(gen() % 20);
    const int f = 1 + static_cast<int>(gen() % m);
    const auto t = Topology::from_edges(m, f, oracle::random_tree_edges(m, gen));
    const auto profile = calibration_distances(t);
    std::set<int> covered;
    for (const auto& chain : decompose_chains(t)) {
      ASSERT_TRUE(t.interconnected(chain.front(), f));
      for (std::size_t k = 0; k < chain.size(); ++k) {
        // A chain processed on its own assigns its k-th antenna the bound (k+1) * rho.
        ASSERT_EQ(profile.distance_of(chain[k]), static_cast<int>(k + 1));
        covered.insert(chain[k]);
      }
    }
    ASSERT_EQ(covered.size(), static_cast<std::size_t>(m - 1));
  }
}

TEST(Schedule, DaisyFiveFromEnd) {
  const auto s = measurement_schedule(Topology::daisy(5, 1), 0.5);
  const std::vector<std::vector<Link>> expected{
      {{1, 2}, {3, 4}}, {{2, 1}, {4, 3}}, {{2, 3}, {4, 5}}, {{3, 2}, {5, 4}}};
  EXPECT_EQ(s.slots, expected);
  EXPECT_EQ(s.slot_count(), SlotCount{4});
  EXPECT_DOUBLE_EQ(s.collection_seconds(), 2.0);
}

TEST(Schedule, StarNeedsTwoSlotsPerLine) {
  const auto t = Topology::star(5, 1);
  const auto s = measurement_schedule(t, 1.0);
  EXPECT_EQ(s.slot_count(), SlotCount{8});
  EXPECT_FALSE(schedule_violation(t, s).has_value());
}

TEST(Schedule, ViolationsAreReported) {
  const auto t = Topology::daisy(4, 1);
  Schedule bad{{{{1, 2}, {2, 3}}}, 1.0};
  EXPECT_TRUE(schedule_violation(t, bad).has_value());
  Schedule incomplete{{{{1, 2}}, {{2, 1}}}, 1.0};
  EXPECT_TRUE(schedule_violation(t, incomplete).has_value());
  Schedule unwired{{{{1, 3}}}, 1.0};
  EXPECT_TRUE(schedule_violation(t, unwired).has_value());
}

TEST(Schedule, ValidOnRandomTrees) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 2 + static_cast<int>(gen() % 40);
    const auto t = Topology::from_edges(m, 1 + static_cast<int>(gen() % m), oracle::random_tree_edges(m, gen));
    const auto s = measurement_schedule(t, 1.0);
    ASSERT_EQ(s.slot_count().value, 2 * max_degree(t));
    const auto violation = schedule_violation(t, s);
    ASSERT_FALSE(violation.has_value()) << *violation;
  }
}

TEST(TreeEnumerator, Counts) {
  const auto count = [](int m) {
    TreeEnumerator e(m, 1);
    std::uint64_t n = 0, stars = 0, paths = 0;
    std::set<std::vector<Edge>> distinct;
    while (auto t = e.next()) {
      ++n;
      stars += t->is_star() && m > 3;
      paths += t->is_path();
      distinct.insert(t->edges());
    }
    EXPECT_EQ(distinct.size(), n);
    EXPECT_EQ(n, e.total());
    return std::tuple{n, stars, paths};
  };
  EXPECT_EQ(std::get<0>(count(2)), 1u);
  EXPECT_EQ(std::get<0>(count(3)), 3u);
  EXPECT_EQ(count(4), (std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>{16, 4, 12}));
  EXPECT_EQ(std::get<0>(count(5)), 125u);
  EXPECT_EQ(std::get<2>(count(5)), 60u);
  EXPECT_EQ(std::get<0>(count(6)), 1296u);
}

TEST(TreeEnumerator, CapAndArguments) {
  EXPECT_THROW(TreeEnumerator(9, 1), std::invalid_argument);
  EXPECT_NO_THROW(TreeEnumerator(9, 1, 9));
  EXPECT_THROW(TreeEnumerator(4, 5), std::invalid_argument);
}

TEST(TreeEnumerator, InvariantsOverAllTrees) {
  for (int m = 3; m <= 7; ++m) {
    TreeEnumerator e(m, 2);
    while (auto t = e.next()) {
      const auto profile = calibration_distances(*t);
      ASSERT_GE(profile.mean, Rational(1));
      ASSERT_EQ(profile.mean == Rational(1), t->is_reference_star());
      const int nmax = max_degree(*t);
      ASSERT_GE(nmax, 2);
      ASSERT_LE(nmax, m - 1);
      ASSERT_EQ(nmax == 2, t->is_path());
      ASSERT_EQ(nmax == m - 1, t->is_star());
      // Factories' outputs and enumerated trees both pass validation again.
      ASSERT_NO_THROW(Topology::from_edges(m, t->reference(), t->edges()));
    }
    ASSERT_NO_THROW(Topology::from_edges(m, 1, Topology::star(m, 1).edges()));
    ASSERT_NO_THROW(Topology::from_edges(m, 1, Topology::daisy(m, 1).edges()));
  }
}

TEST(DecodePrufer, KnownSequence) {
  // Sequence (4, 4, 4, 5) on 6 labels: leaves 1, 2, 3 hang off 4; 4 joins 5; 5 joins 6.
  const std::vector<int> seq{4, 4, 4, 5};
  const auto t = decode_prufer(6, 1, seq);
  EXPECT_EQ(t.edges(), edge_list({{1, 4}, {2, 4}, {3, 4}, {4, 5}, {5, 6}}));
  EXPECT_THROW(decode_prufer(6, 1, std::vector<int>{4, 4}), std::invalid_argument);
}
