#include <gtest/gtest.h>

#include <sstream>

#include "jolt/bench.hpp"
#include "jolt/scenario.hpp"
#include "jolt/tsplib.hpp"
#include "oracles.hpp"

using namespace jolt;

TEST(GenerateScenario, DefaultsMatchPublishedSimulationTable) {
  const Scenario s = generate_scenario(100, 42);
  EXPECT_EQ(s.device_count(), 100u);
  EXPECT_EQ(s.uav_altitude_m, 200.0);
  EXPECT_EQ(s.capacity, 5u);
  EXPECT_EQ(s.radio.tx_power_w, 0.1);
  EXPECT_EQ(s.power.hover_power_w, 1000.0);
  EXPECT_EQ(s.power.flight_power_w, 1283.0);
  EXPECT_EQ(s.power.weight_hover, 10000.0);
  EXPECT_EQ(s.power.weight_fly, 0.5);
  EXPECT_EQ(s.radio.bandwidth_hz, 1e6);
  EXPECT_EQ(s.radio.path_loss_1, 0.01);
  EXPECT_EQ(s.radio.path_loss_2, 0.01);
  // -250 dBm = 10^(-28) W
  EXPECT_NEAR(s.radio.noise_power_w / 1e-28, 1.0, 1e-12);
  EXPECT_NEAR(watts_to_dbm(s.radio.noise_power_w), -250.0, 1e-9);
  EXPECT_EQ(s.irs.x, 500.0);
  EXPECT_EQ(s.irs.y, 500.0);
  EXPECT_EQ(s.k_min, 20u);
  EXPECT_EQ(s.k_max, 100u);
  EXPECT_EQ(s.radio.element_spacing_m, 0.5 * s.radio.wavelength_m);
  EXPECT_EQ(s.radio.phase_levels, 8);
}

TEST(GenerateScenario, SingleDeviceInsideBoundsWithDataInRange) {
  const Scenario s = generate_scenario(1, 0);
  ASSERT_EQ(s.device_count(), 1u);
  const auto& d = s.devices[0];
  EXPECT_GT(d.position.x, 0.0);
  EXPECT_LT(d.position.x, 1000.0);
  EXPECT_GT(d.position.y, 0.0);
  EXPECT_LT(d.position.y, 1000.0);
  EXPECT_GE(d.data_bits, 1.0 * 8e6);
  EXPECT_LE(d.data_bits, 1000.0 * 8e6);
}

TEST(GenerateScenario, SameArgumentsGiveIdenticalSerialization) {
  const auto a = to_json(generate_scenario(50, 7, {{"capacity", 4}})).dump();
  const auto b = to_json(generate_scenario(50, 7, {{"capacity", 4}})).dump();
  EXPECT_EQ(a, b);
  EXPECT_NE(a, to_json(generate_scenario(50, 8, {{"capacity", 4}})).dump());
}

TEST(GenerateScenario, FixedSeedGivesPinnedFirstDevice) {
  // Pins the generator stream so that seeds keep their meaning across builds.
  const Scenario s = generate_scenario(3, 1);
  Rng rng = Rng::derive(1, streams::scenario);
  const double x = rng.uniform(0.0, 1000.0), y = rng.uniform(0.0, 1000.0), mb = rng.uniform(1.0, 1000.0);
  EXPECT_EQ(s.devices[0].position.x, x);
  EXPECT_EQ(s.devices[0].position.y, y);
  EXPECT_EQ(s.devices[0].data_bits, mb * 8e6);
}

TEST(GenerateScenario, RejectsBadOverrides) {
  EXPECT_THROW(generate_scenario(10, 0, {{"no_such_key", 1.0}}), ParameterError);
  EXPECT_THROW(generate_scenario(10, 0, {{"tx_power_w", 0.0}}), ParameterError);
  EXPECT_THROW(generate_scenario(10, 0, {{"bandwidth_hz", -1.0}}), ParameterError);
  EXPECT_THROW(generate_scenario(10, 0, {{"capacity", 2.5}}), ParameterError);
  EXPECT_THROW(generate_scenario(10, 0, {{"phase_levels", 1}}), ParameterError);
  EXPECT_THROW(generate_scenario(0, 0), ParameterError);
  EXPECT_THROW(generate_scenario(10, 0, {{"irs_height_m", 300}}), ParameterError);
}

TEST(GenerateScenario, WavelengthOverrideKeepsHalfWavelengthSpacing) {
  const Scenario s = generate_scenario(5, 0, {{"wavelength_m", 0.2}});
  EXPECT_EQ(s.radio.element_spacing_m, 0.1);
  const Scenario t = generate_scenario(5, 0, {{"wavelength_m", 0.2}, {"element_spacing_m", 0.05}});
  EXPECT_EQ(t.radio.element_spacing_m, 0.05);
  EXPECT_THROW(generate_scenario(5, 0, {{"element_spacing_m", 0.5}}), ParameterError);
}

TEST(GenerateScenario, UnsatisfiableStopBoundIsInfeasible) {
  EXPECT_THROW(generate_scenario(30, 0, {{"k_max", 2}}), InfeasibleError);
  EXPECT_THROW(generate_scenario(30, 0, {{"k_min", 10}, {"k_max", 8}}), ParameterError);
}

TEST(ScenarioJson, RoundTripsExactly) {
  const Scenario s = generate_scenario(20, 3, {{"num_elements", 4}});
  const auto j = to_json(s);
  EXPECT_EQ(j.at("schema_version"), kScenarioSchemaVersion);
  const Scenario back = scenario_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(to_json(back).dump(), j.dump());
}

TEST(ScenarioJson, RejectsWrongSchemaAndMissingFields) {
  auto j = to_json(generate_scenario(5, 0));
  auto bad = j;
  bad["schema_version"] = 99;
  EXPECT_THROW(scenario_from_json(bad), ParameterError);
  bad = j;
  bad.erase("radio");
  EXPECT_THROW(scenario_from_json(bad), ParameterError);
}

TEST(ScenarioFromPoints, RescalesIntoAreaKeepingShape) {
  PointSet set;
  set.points = {{10, 10}, {30, 10}, {10, 20}};
  const Scenario s = scenario_from_points(set, 0);
  EXPECT_EQ(s.devices[0].position.x, 0.0);
  EXPECT_EQ(s.devices[1].position.x, 1000.0);
  EXPECT_EQ(s.devices[2].position.y, 500.0);
}

namespace {

const char* kSmallTsp = R"(NAME : tiny
COMMENT : four points
TYPE : TSP
DIMENSION : 4
EDGE_WEIGHT_TYPE : EUC_2D
NODE_COORD_SECTION
1 0 0
2 1 0
3 1 1
4 0 1
EOF
)";

}  // namespace

TEST(LoadTsplib, ReadsPointsInFileOrder) {
  std::istringstream in(kSmallTsp);
  const PointSet set = load_tsplib(in);
  EXPECT_EQ(set.name, "tiny");
  ASSERT_EQ(set.size(), 4u);
  EXPECT_EQ(set.points[2], (Point2{1, 1}));
  EXPECT_FALSE(set.known_optimum.has_value());
}

TEST(LoadTsplib, BundledAtt48HasRegistryOptimum) {
  const PointSet set = load_instance("att48");
  EXPECT_EQ(set.size(), 48u);
  ASSERT_TRUE(set.known_optimum);
  EXPECT_EQ(*set.known_optimum, 33523.71);
}

TEST(LoadTsplib, BundledEil101HasRegistryOptimum) {
  const PointSet set = load_instance("eil101");
  EXPECT_EQ(set.size(), 101u);
  ASSERT_TRUE(set.known_optimum);
  EXPECT_EQ(*set.known_optimum, 642.30);
  EXPECT_EQ(*known_optimum("tsp225"), 3859.00);
}

TEST(LoadTsplib, MissingCoordinateSectionIsParseError) {
  std::istringstream in("NAME : x\nTYPE : TSP\nDIMENSION : 2\nEDGE_WEIGHT_TYPE : EUC_2D\nEOF\n");
  EXPECT_THROW(load_tsplib(in), ParseError);
}

TEST(LoadTsplib, MalformedCoordinateReportsLine) {
  std::istringstream in("NAME : x\nTYPE : TSP\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 zero 1\n");
  try {
    load_tsplib(in);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 6u);
  }
}

TEST(LoadTsplib, UnsupportedEdgeWeightType) {
  std::istringstream in("NAME : x\nTYPE : TSP\nEDGE_WEIGHT_TYPE : GEO\nNODE_COORD_SECTION\n1 0 0\n");
  EXPECT_THROW(load_tsplib(in), UnsupportedFormatError);
  std::istringstream explicit_weights("NAME : x\nTYPE : TSP\nEDGE_WEIGHT_TYPE : EXPLICIT\n");
  EXPECT_THROW(load_tsplib(explicit_weights), UnsupportedFormatError);
}

TEST(LoadTsplib, DimensionMismatchIsParseError) {
  std::istringstream in("NAME : x\nTYPE : TSP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : ATT\nNODE_COORD_SECTION\n1 0 0\n2 1 1\nEOF\n");
  EXPECT_THROW(load_tsplib(in), ParseError);
}

TEST(LoadTsplib, WriteThenLoadIsIdentityOnCoordinates) {
  for (const char* name : {"att48", "eil101"}) {
    const PointSet a = load_instance(name);
    std::stringstream buf;
    write_tsplib(buf, a);
    const PointSet b = load_tsplib(buf);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.points[i], b.points[i]);
    EXPECT_EQ(a.known_optimum, b.known_optimum);
  }
  const PointSet r = random_point_set(30, 5);
  std::stringstream buf;
  write_tsplib(buf, r);
  const PointSet back = load_tsplib(buf);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_EQ(r.points[i], back.points[i]);
}

TEST(TourLength, UnitSquareCorners) {
  const std::vector<Point2> p{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const std::vector<std::size_t> o{0, 1, 2, 3};
  EXPECT_DOUBLE_EQ(tour_length(p, o), 4.0);
}

TEST(TourLength, TwoPointsOutAndBack) {
  const std::vector<Point2> p{{0, 0}, {6, 8}};
  const std::vector<std::size_t> o{1, 0};
  EXPECT_DOUBLE_EQ(tour_length(p, o), 20.0);
}

TEST(TourLength, InvalidPermutations) {
  const std::vector<Point2> p{{0, 0}, {1, 0}, {2, 0}};
  EXPECT_THROW(tour_length(p, std::vector<std::size_t>{0, 1, 1}), InvalidPermutationError);
  EXPECT_THROW(tour_length(p, std::vector<std::size_t>{0, 1}), InvalidPermutationError);
  EXPECT_THROW(tour_length(p, std::vector<std::size_t>{0, 1, 3}), InvalidPermutationError);
}

TEST(TourLength, OptimalOrderOfEightPointsMatchesExhaustiveMinimum) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const PointSet set = random_point_set(8, seed);
    const Tour t = brute_force_tour(set);
    EXPECT_NEAR(tour_length(set, t.order), oracle::all_permutations_min(set.points), 1e-9);
  }
}

TEST(TourLength, InvariantUnderRotationAndReversal) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.index(20);
    const PointSet set = random_point_set(n, 100 + trial);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
    const double base = tour_length(set, order);
    auto rotated = order;
    std::rotate(rotated.begin(), rotated.begin() + static_cast<std::ptrdiff_t>(rng.index(n)), rotated.end());
    auto reversed = order;
    std::reverse(reversed.begin(), reversed.end());
    EXPECT_NEAR(tour_length(set, rotated), base, 1e-9 * base);
    EXPECT_NEAR(tour_length(set, reversed), base, 1e-9 * base);
  }
}
