#include <gtest/gtest.h>

#include <cmath>

#include "jolt/bench.hpp"
#include "jolt/ersom.hpp"
#include "oracles.hpp"

using namespace jolt;

namespace {

Ring ring_of(std::vector<Point2> weights, std::vector<std::size_t> counters = {}) {
  Ring r;
  for (std::size_t i = 0; i < weights.size(); ++i) r.cells.push_back({weights[i], counters.empty() ? 0 : counters[i]});
  return r;
}

double mean_gap(const Ring& ring, std::span<const Point2> stops) {
  double s = 0.0;
  for (auto p : stops) s += distance(ring.cells[find_winner(ring, p)].weight, p);
  return s / static_cast<double>(stops.size());
}

}  // namespace

TEST(InitialRing, SizeAndCircleGeometry) {
  const std::vector<Point2> four{{0, 0}, {4, 0}, {4, 4}, {0, 4}};
  const Ring r = initial_ring(four);
  ASSERT_EQ(r.size(), 3u);
  const double radius = 0.25 * std::sqrt(32.0);
  for (const auto& c : r.cells) {
    EXPECT_NEAR(oracle::dist(c.weight, {2, 2}), radius, 1e-12);
    EXPECT_EQ(c.counter, 0u);
  }
  EXPECT_NEAR(r.cells[0].weight.x, 2 + radius, 1e-12);
  EXPECT_NEAR(r.cells[0].weight.y, 2, 1e-12);

  std::vector<Point2> nine(9, Point2{1, 1});
  nine[0] = {0, 0};
  EXPECT_EQ(initial_ring(nine).size(), 5u);
  EXPECT_EQ(initial_ring(std::vector<Point2>(10, Point2{0, 0})).size(), 5u);
  EXPECT_THROW(initial_ring(std::vector<Point2>{}), ParameterError);
}

TEST(FindWinner, NearestWithSmallestIndexOnTies) {
  const Ring r = ring_of({{0, 0}, {2, 0}, {1, 5}});
  EXPECT_EQ(find_winner(r, {1.9, 0.1}), 1u);
  EXPECT_EQ(find_winner(r, {1, 0}), 0u);
  EXPECT_EQ(find_winner(r, {1, 4}), 2u);
}

TEST(UpdateWeights, WinnerAndBothNeighboursMoveByBeta) {
  Ring r = ring_of({{0, 0}, {10, 0}, {0, 10}, {5, 5}});
  update_weights(r, 1, {20, 0}, 0.1);
  EXPECT_EQ(r.cells[0].weight, (Point2{2, 0}));
  EXPECT_EQ(r.cells[1].weight, (Point2{11, 0}));
  EXPECT_EQ(r.cells[2].weight, (Point2{2, 9}));
  EXPECT_EQ(r.cells[3].weight, (Point2{5, 5}));
  EXPECT_EQ(r.cells[1].counter, 1u);
  EXPECT_EQ(r.counter_sum(), 1u);

  // wrap-around neighbours of cell 0
  update_weights(r, 0, {0, 0}, 0.5);
  EXPECT_EQ(r.cells[3].weight, (Point2{2.5, 2.5}));
  EXPECT_EQ(r.cells[2].weight, (Point2{2, 9}));
}

TEST(UpdateWeights, SmallRingsMoveEachCellOnce) {
  Ring two = ring_of({{0, 0}, {10, 0}});
  update_weights(two, 0, {0, 10}, 0.5);
  EXPECT_EQ(two.cells[0].weight, (Point2{0, 5}));
  EXPECT_EQ(two.cells[1].weight, (Point2{5, 5}));
  Ring one = ring_of({{0, 0}});
  update_weights(one, 0, {4, 0}, 0.5);
  EXPECT_EQ(one.cells[0].weight, (Point2{2, 0}));
}

TEST(InsertCell, SplitsTowardFartherNeighbour) {
  // busiest cell 1; neighbour 2 is farther, so the new cell goes after it
  Ring r = ring_of({{0, 0}, {1, 0}, {5, 0}, {0, 3}}, {0, 4, 1, 1});
  Rng rng(0);
  EXPECT_EQ(insert_cell(r, rng), 2u);
  ASSERT_EQ(r.size(), 5u);
  EXPECT_EQ(r.cells[2].weight, (Point2{3, 0}));
  EXPECT_EQ(r.cells[2].counter, 0u);
  EXPECT_EQ(r.cells[3].weight, (Point2{5, 0}));

  // previous neighbour farther: the new cell takes the busiest cell's slot
  Ring s = ring_of({{-6, 0}, {0, 0}, {1, 0}}, {0, 7, 0});
  EXPECT_EQ(insert_cell(s, rng), 1u);
  EXPECT_EQ(s.cells[1].weight, (Point2{-3, 0}));
  EXPECT_EQ(s.cells[2].weight, (Point2{0, 0}));
  EXPECT_EQ(s.cells[2].counter, 7u);
}

TEST(InsertCell, EquidistantNeighboursPickPrevious) {
  Ring r = ring_of({{-1, 0}, {0, 0}, {1, 0}}, {0, 2, 0});
  Rng rng(0);
  EXPECT_EQ(insert_cell(r, rng), 1u);
  EXPECT_EQ(r.cells[1].weight, (Point2{-0.5, 0}));
}

TEST(InsertCell, RepeatedInsertionMatchesListSplice) {
  Rng rng(31), noise(8);
  Ring r = initial_ring(random_point_set(12, 2).points);
  // mirror: cell identities in ring order
  std::vector<int> ids(r.size());
  std::iota(ids.begin(), ids.end(), 0);
  int next_id = static_cast<int>(r.size());
  for (int step = 0; step < 60; ++step) {
    for (auto& c : r.cells) c.counter = noise.index(4);
    const std::vector<Cell> before = r.cells;
    const std::size_t pos = insert_cell(r, rng);
    ids.insert(ids.begin() + static_cast<std::ptrdiff_t>(pos), next_id++);
    ASSERT_EQ(r.size(), before.size() + 1);
    // all other cells keep their order and contents
    for (std::size_t i = 0, j = 0; i < r.size(); ++i) {
      if (i == pos) continue;
      EXPECT_EQ(r.cells[i].weight, before[j].weight);
      EXPECT_EQ(r.cells[i].counter, before[j].counter);
      ++j;
    }
    // new cell is the midpoint of its ring neighbours, one of which is a busiest cell
    const Point2 a = r.cells[r.prev(pos)].weight, b = r.cells[r.next(pos)].weight;
    EXPECT_EQ(r.cells[pos].weight, (Point2{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}));
    std::size_t top = 0;
    for (const auto& c : before) top = std::max(top, c.counter);
    EXPECT_TRUE(r.cells[r.prev(pos)].counter == top || r.cells[r.next(pos)].counter == top);
  }
  EXPECT_EQ(static_cast<std::size_t>(next_id), r.size());
}

TEST(DeleteCell, RemovesLeastUsedOnlyAboveTwiceStopCount) {
  Ring r = ring_of({{0, 0}, {1, 0}, {2, 0}}, {5, 0, 3});
  EXPECT_TRUE(delete_cell(r, 1));
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r.cells[0].counter, 5u);
  EXPECT_EQ(r.cells[1].counter, 3u);
  EXPECT_FALSE(delete_cell(r, 1));
  EXPECT_EQ(r.size(), 2u);

  Ring tie = ring_of({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}}, {2, 1, 4, 1, 3});
  EXPECT_TRUE(delete_cell(tie, 2));
  EXPECT_EQ(tie.cells[1].counter, 4u);
}

TEST(ExtractOrder, SortsStopsByNearestCell) {
  const Ring r = ring_of({{0, 0}, {10, 0}, {10, 10}, {0, 10}});
  const std::vector<Point2> stops{{9, 9}, {1, 1}, {1, 9}, {9, 1}, {0.5, 0.5}};
  EXPECT_EQ(extract_order(r, stops), (std::vector<std::size_t>{1, 4, 3, 0, 2}));
}

TEST(RunErsom, ObserverSeesEveryEpoch) {
  const PointSet set = random_point_set(10, 4);
  ErsomConfig cfg;
  cfg.max_epochs = 40;
  Rng rng(0);
  std::vector<std::size_t> seen;
  run_ersom(set, cfg, rng, [&](std::size_t e, const Ring&) { seen.push_back(e); });
  ASSERT_EQ(seen.size(), 41u);
  for (std::size_t i = 0; i <= 40; ++i) EXPECT_EQ(seen[i], i);
}

TEST(RunErsom, CounterAndSizeBookkeeping) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const PointSet set = random_point_set(3 + seed % 15, seed);
    ErsomConfig cfg;
    cfg.max_epochs = 200;
    cfg.insert_period = 1 + seed % 5;
    cfg.deletion_factor = 1 + seed % 3;
    Rng rng(seed);
    const std::size_t n0 = initial_ring(set.points).size();
    std::size_t last_size = n0;
    const ErsomResult res = run_ersom(set, cfg, rng, [&](std::size_t e, const Ring& ring) {
      if (e == 0) return;
      EXPECT_LE(ring.size(), last_size + 1);
      EXPECT_GE(ring.size() + 1, last_size);
      last_size = ring.size();
    });
    EXPECT_EQ(res.wins, 200 * set.size());
    EXPECT_EQ(res.ring.counter_sum(), res.wins - res.removed_counts);
    EXPECT_EQ(res.ring.size(), n0 + res.insertions - res.deletions);
    EXPECT_EQ(res.insertions, 200 / cfg.insert_period);
    EXPECT_NO_THROW(validate_permutation(res.tour.order, set.size()));
    EXPECT_NEAR(res.tour.length, oracle::closed_length(set.points, res.tour.order), 1e-9);
  }
}

TEST(RunErsom, IdenticalToRingWithoutDeletionWhenNeverTriggered) {
  // 20 stops, 10 starting cells, 20 insertions: the ring never exceeds 40
  const PointSet set = random_point_set(20, 6);
  ErsomConfig cfg;
  cfg.max_epochs = 100;
  Rng a(3), b(3);
  const ErsomResult e = run_ersom(set, cfg, a);
  ErsomConfig plain = cfg;
  plain.deletion_enabled = false;
  const ErsomResult r = run_ersom(set, plain, b);
  EXPECT_EQ(e.deletions, 0u);
  EXPECT_EQ(e.tour.order, r.tour.order);
  ASSERT_EQ(e.ring.size(), r.ring.size());
  for (std::size_t i = 0; i < e.ring.size(); ++i) EXPECT_EQ(e.ring.cells[i].weight, r.ring.cells[i].weight);
}

TEST(RunErsom, DeletionShrinksRingRelativeToPlainRing) {
  const PointSet set = random_point_set(5, 1);
  ErsomConfig cfg;
  cfg.max_epochs = 600;
  ErsomConfig plain = cfg;
  plain.deletion_enabled = false;
  Rng a(1), b(1);
  const ErsomResult res = run_ersom(set, cfg, a);
  const ErsomResult ref = run_ersom(set, plain, b);
  EXPECT_GT(res.deletions, 0u);
  EXPECT_EQ(ref.deletions, 0u);
  EXPECT_EQ(ref.ring.size(), 3u + 120u);
  EXPECT_EQ(res.ring.size(), ref.ring.size() - res.deletions);
}

TEST(RunErsom, SameSeedSameTour) {
  const PointSet set = load_instance("att48");
  Rng a(12), b(12);
  EXPECT_EQ(run_ersom(set, {}, a).tour.order, run_ersom(set, {}, b).tour.order);
}

TEST(RunErsom, RingPullsTowardStops) {
  int improved = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PointSet set = random_point_set(30, 50 + seed);
    Rng rng(seed);
    double first = 0.0, last = 0.0;
    run_ersom(set, {}, rng, [&](std::size_t e, const Ring& ring) {
      const double g = mean_gap(ring, set.points);
      if (e == 0) first = g;
      last = g;
    });
    if (last < 0.5 * first) ++improved;
  }
  EXPECT_GE(improved, 9);
}

TEST(RunErsom, SmallInstancesNearOptimal) {
  int close = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PointSet set = random_point_set(8, 200 + seed);
    Rng rng(seed);
    const double got = run_ersom(set, {}, rng).tour.length;
    const double best = oracle::held_karp(set.points);
    EXPECT_GE(got, best - 1e-9);
    if (got <= 1.05 * best) ++close;
  }
  EXPECT_GE(close, 9);
}

TEST(RunErsom, InvalidConfig) {
  const PointSet set = random_point_set(5, 0);
  Rng rng(0);
  ErsomConfig c;
  c.beta = 0.0;
  EXPECT_THROW(run_ersom(set, c, rng), ParameterError);
  c = {};
  c.insert_period = 0;
  EXPECT_THROW(run_ersom(set, c, rng), ParameterError);
}

TEST(BruteForce, AgreesWithDynamicProgramming) {
  for (std::size_t k = 1; k <= 10; ++k) {
    const PointSet set = random_point_set(k, 300 + k);
    const Tour t = brute_force_tour(set);
    EXPECT_NEAR(t.length, oracle::held_karp(set.points), 1e-9 * std::max(1.0, t.length));
    EXPECT_NEAR(t.length, tour_length(set, t.order), 1e-9 * std::max(1.0, t.length));
  }
  EXPECT_THROW(brute_force_tour(random_point_set(12, 0)), SizeLimitError);
}
