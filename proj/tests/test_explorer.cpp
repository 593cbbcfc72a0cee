#include <gtest/gtest.h>

#include <memory>
#include <sstream>

#include "mrmr/explorer.hpp"
#include "support.hpp"

using namespace mrmr;
using mrmr::testing::closed_room;
using mrmr::testing::fully_known;
using mrmr::testing::two_rooms_scenario;

namespace {

// Robot standing on circle `a`, which it is currently targeting. The map is
// entirely unknown so no cues are extracted and the planted circles persist.
Agent agent_on_circle(const std::vector<Circle>& circles) {
  Agent a;
  a.map = std::make_shared<KnownMap>(GridSpec{60, 60, 10, 0.2});
  a.observed = ObservedSet(a.map->grid().voxels());
  for (const auto& c : circles) a.coord.circles.insert(c);
  const Circle& first = a.coord.circles.circles().front();
  a.robot.pose = {first.center.x, first.center.y, 1.0, 0.0};
  a.robot.mode = Mode::to_circle;
  a.robot.target_kind = TargetKind::circle;
  a.robot.target = first.center;
  a.robot.target_circle = first.id;
  return a;
}

SimConfig sim_config(Policy p, int robots, double duration) {
  SimConfig cfg;
  cfg.policy = p;
  cfg.robots = robots;
  cfg.duration = duration;
  return cfg;
}

std::string trajectory_text(const Simulation& sim) {
  std::ostringstream out;
  write_trajectory_csv(out, sim.trajectory());
  return out.str();
}

}  // namespace

TEST(Frontiers, BoundaryBetweenFreeAndUnknown) {
  PlanarMap m(20, 10, 0.2, PlanarState::unknown);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 8; ++x) m(x, y) = PlanarState::free;
  }
  const auto f = find_frontiers(m, 4);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].cells.size(), 10u);
  for (Cell2 c : f[0].cells) EXPECT_EQ(c.x, 7);
  EXPECT_NEAR(f[0].centroid.x, m.center({7, 0}).x, 1e-9);
  EXPECT_TRUE(find_frontiers(m, 11).empty());
}

TEST(Frontiers, SeparateGroupsAndOccupiedCells) {
  PlanarMap m(20, 20, 0.2, PlanarState::free);
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 5; ++x) m(x, y) = PlanarState::unknown;
  }
  for (int y = 15; y < 20; ++y) {
    for (int x = 15; x < 20; ++x) m(x, y) = PlanarState::unknown;
  }
  // Occupied cells next to unknown space are never frontiers.
  for (int x = 0; x < 6; ++x) m(x, 5) = PlanarState::occupied;
  const auto f = find_frontiers(m, 1);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_LT(f[0].centroid.y, f[1].centroid.y);
  for (Cell2 c : f[0].cells) EXPECT_EQ(m[c], PlanarState::free);
}

TEST(FrontierStep, TargetsTheOnlyFrontier) {
  const GroundTruthWorld w = rasterize(closed_room(4.0));
  auto map = std::make_shared<KnownMap>(w.grid());
  // Everything known except a 1 m square patch in one corner of the room.
  const auto& g = w.grid();
  for (std::size_t i = 0; i < g.voxels(); ++i) {
    const Cell3 c = g.cell_of_index(i);
    if (c.x >= 15 && c.x < 20 && c.y >= 15 && c.y < 20) continue;
    map->mark(c, w.occupied_index(i) ? VoxelState::occupied : VoxelState::free);
  }
  Agent a;
  a.map = map;
  a.robot.pose = closed_room(4.0).spawns[0];
  frontier_step(a, 0.0, ExplorerConfig{});
  EXPECT_EQ(a.robot.mode, Mode::frontier);
  EXPECT_EQ(a.robot.target_kind, TargetKind::frontier);
  EXPECT_GT(a.robot.target.x, 2.8);
  EXPECT_GT(a.robot.target.y, 2.8);
  EXPECT_GE(a.robot.path.size(), 2u);
}

TEST(FrontierStep, IdlesWithoutFrontiers) {
  const GroundTruthWorld w = rasterize(closed_room(4.0));
  Agent a;
  a.map = std::make_shared<KnownMap>(fully_known(w));
  a.robot.pose = closed_room(4.0).spawns[0];
  frontier_step(a, 0.0, ExplorerConfig{});
  EXPECT_EQ(a.robot.mode, Mode::idle);
  EXPECT_TRUE(a.robot.path.empty());
}

TEST(MrmrStep, AdjacentCircleIsChained) {
  // Centers 2.1 m apart with r = 1: 2.1 < 1.1 * 2.0, adjacent. A smaller,
  // nearer circle that is not adjacent is passed over.
  Agent a = agent_on_circle({generate_circle({5.0, 5.0}, 1.0), generate_circle({7.1, 5.0}, 1.0),
                             generate_circle({3.5, 5.0}, 0.3)});
  mrmr_step(a, 0.0, ExplorerConfig{});
  ASSERT_NE(a.coord.circles.find(1), nullptr);
  EXPECT_TRUE(a.coord.circles.find(1)->reached);
  ASSERT_EQ(a.coord.circles_reached.size(), 1u);
  EXPECT_TRUE(a.publish);
  EXPECT_EQ(a.robot.mode, Mode::to_circle);
  EXPECT_EQ(a.robot.target_circle, 2);
}

TEST(MrmrStep, DistantCircleIsNotChained) {
  // 2.3 m apart: not adjacent, so the robot falls back to ordinary selection,
  // which takes the nearest circle.
  Agent a = agent_on_circle({generate_circle({5.0, 5.0}, 1.0), generate_circle({7.3, 5.0}, 1.0),
                             generate_circle({3.5, 5.0}, 0.3)});
  mrmr_step(a, 0.0, ExplorerConfig{});
  // Selection drops reached circles from the candidate set.
  EXPECT_EQ(a.coord.circles.find(1), nullptr);
  ASSERT_EQ(a.coord.circles_reached.size(), 1u);
  EXPECT_EQ(a.coord.circles_reached[0].center, (Vec3{5.0, 5.0, 1.0}));
  EXPECT_EQ(a.robot.mode, Mode::to_circle);
  EXPECT_EQ(a.robot.target_circle, 3);
}

TEST(MrmrStep, CircleReachedByOthersIsSkipped) {
  Agent a = agent_on_circle({generate_circle({5.0, 5.0}, 1.0), generate_circle({7.1, 5.0}, 1.0),
                             generate_circle({3.5, 5.0}, 0.3)});
  a.coord.circles_others = {{{7.0, 5.0, 1.0}, 1.0}};
  mrmr_step(a, 0.0, ExplorerConfig{});
  EXPECT_EQ(a.robot.target_circle, 3);
}

TEST(Explorer, ConfigValidation) {
  ExplorerConfig cfg;
  EXPECT_NO_THROW(validate(cfg));
  cfg.tick_dt = 0.0;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  EXPECT_EQ(parse_policy("mrmr"), Policy::mrmr);
  EXPECT_EQ(parse_policy("frontier"), Policy::frontier);
  EXPECT_THROW(parse_policy("random"), std::invalid_argument);
}

TEST(Simulation, ZeroRobotsLogZeros) {
  const GroundTruthWorld w = rasterize(two_rooms_scenario());
  Simulation sim(w, two_rooms_scenario().spawns, sim_config(Policy::mrmr, 0, 0.5));
  sim.run();
  ASSERT_EQ(sim.metrics().rows().size(), 5u);
  for (const auto& row : sim.metrics().rows()) {
    EXPECT_EQ(row.room_voxels, 0);
    EXPECT_EQ(row.rooms_visited, 0);
    EXPECT_TRUE(row.observed.empty());
  }
  EXPECT_TRUE(sim.trajectory().empty());
}

TEST(Simulation, TooFewSpawnsIsRejected) {
  const GroundTruthWorld w = rasterize(two_rooms_scenario());
  EXPECT_THROW(Simulation(w, two_rooms_scenario().spawns, sim_config(Policy::mrmr, 4, 1.0)),
               std::invalid_argument);
}

TEST(Simulation, IdleRobotOnlySeesItsFirstView) {
  // A small closed room is fully mapped by the first scan, so the frontier
  // robot has nowhere to go and stays put.
  const Scenario s = closed_room(2.0);
  const GroundTruthWorld w = rasterize(s);
  Simulation sim(w, s.spawns, sim_config(Policy::frontier, 1, 2.0));
  sim.run();
  const auto& rows = sim.metrics().rows();
  for (const auto& tr : sim.trajectory()) {
    EXPECT_EQ(tr.pose.x, s.spawns[0].x);
    EXPECT_EQ(tr.pose.y, s.spawns[0].y);
    EXPECT_EQ(tr.mode, Mode::idle);
  }
  EXPECT_GT(rows.front().observed[0], 0);
  EXPECT_EQ(rows.front().observed[0], rows.back().observed[0]);
}

TEST(Simulation, SafeDeterministicAndMonotone) {
  const Scenario s = two_rooms_scenario();
  const GroundTruthWorld w = rasterize(s);
  for (Policy p : {Policy::mrmr, Policy::frontier}) {
    Simulation a(w, s.spawns, sim_config(p, 2, 30.0));
    Simulation b(w, s.spawns, sim_config(p, 2, 30.0));
    a.run();
    b.run();
    EXPECT_EQ(trajectory_text(a), trajectory_text(b)) << to_string(p);
    EXPECT_TRUE(a.metrics().monotone());
    for (const auto& tr : a.trajectory()) {
      ASSERT_TRUE(w.free_at(tr.pose.position())) << tr.t << " robot " << tr.robot;
      EXPECT_DOUBLE_EQ(tr.pose.z, 1.0);
    }
  }
}

TEST(Simulation, ReachedSetsWereActuallyVisited) {
  const Scenario s = two_rooms_scenario();
  const GroundTruthWorld w = rasterize(s);
  Simulation sim(w, s.spawns, sim_config(Policy::mrmr, 2, 60.0));
  sim.run();
  for (const auto& agent : sim.agents()) {
    auto visited = [&](Vec3 p) {
      for (const auto& tr : sim.trajectory()) {
        if (tr.robot == agent.robot.id && distance(tr.pose.xy(), p.xy()) <= 0.5 + 1e-3) return true;
      }
      return false;
    };
    for (const auto& d : agent.coord.doors_reached) EXPECT_TRUE(visited(d));
    for (const auto& c : agent.coord.circles_reached) EXPECT_TRUE(visited(c.center));
  }
}

TEST(Simulation, MrmrCrossesTheDoorIntoTheSecondRoom) {
  const Scenario s = two_rooms_scenario();
  const GroundTruthWorld w = rasterize(s);
  Simulation sim(w, s.spawns, sim_config(Policy::mrmr, 1, 60.0));
  sim.run();
  EXPECT_GE(sim.agents()[0].coord.doors_reached.size(), 1u);
  EXPECT_EQ(sim.metrics().back().rooms_visited, 2);
  bool entered = false;
  for (const auto& tr : sim.trajectory()) entered |= tr.pose.x > 4.8;
  EXPECT_TRUE(entered);
}

TEST(Trajectory, CsvLayout) {
  std::vector<TrajectoryRow> rows(2);
  rows[0].t = 0.1;
  rows[0].pose = {1.5, 2.25, 1.0, 0.5};
  rows[1].t = 0.2;
  rows[1].robot = 1;
  rows[1].pose = {3.0, 4.0, 1.0, -1.0};
  rows[1].mode = Mode::to_door;
  rows[1].target_kind = TargetKind::door;
  rows[1].target = {4.6, 2.5};
  std::ostringstream out;
  write_trajectory_csv(out, rows);
  EXPECT_EQ(out.str(),
            "t,robot,x,y,z,yaw,mode,target_kind,target_x,target_y\n"
            "0.1,0,1.500,2.250,1.000,0.5000,idle,none,,\n"
            "0.2,1,3.000,4.000,1.000,-1.0000,to_door,door,4.600,2.500\n");
}
