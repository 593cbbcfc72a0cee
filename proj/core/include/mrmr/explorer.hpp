#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mrmr/circles.hpp"
#include "mrmr/coordination.hpp"
#include "mrmr/cues.hpp"
#include "mrmr/metrics.hpp"
#include "mrmr/perception.hpp"
#include "mrmr/planner.hpp"
#include "mrmr/world.hpp"

namespace mrmr {

enum class Policy { mrmr, frontier };
enum class Mode { idle, to_door, to_circle, frontier };
enum class TargetKind { none, door, circle, frontier };

const char* to_string(Policy p);
const char* to_string(Mode m);
const char* to_string(TargetKind k);
// Throws std::invalid_argument for anything but "mrmr" / "frontier".
Policy parse_policy(std::string_view s);

struct FrontierConfig {
  int min_cluster = 4;       // cells
  double hysteresis = 1.25;  // score bonus for the cluster already being pursued
};

struct ExplorerConfig {
  double tick_dt = 0.1;
  double speed = 1.0;     // m/s
  double yaw_rate = 1.5;  // rad/s
  double adjacency_mu = 1.1;
  double reach_tolerance = 0.5;
  double eps_door = 1.0;
  double eps_circle = 1.5;
  // Unreachable or stalled targets are skipped locally for this long.
  double blacklist_seconds = 30.0;
  // A target whose path length has not shrunk for this long counts as stalled.
  double stall_seconds = 15.0;
  // Ticks a door target may go undetected before it is dropped.
  int door_grace_ticks = 10;
  // When doors and circles run out, MRMR robots explore frontiers.
  bool frontier_fallback = true;
  CueConfig cues;
  CircleConfig circles;
  PlannerConfig planner;
  FrontierConfig frontier;
};

// Throws std::invalid_argument for out-of-range fields.
void validate(const ExplorerConfig& cfg);

struct BlacklistEntry {
  Vec2 point;
  double until = 0.0;
};

struct RobotState {
  int id = 0;
  Pose pose;
  Mode mode = Mode::idle;
  TargetKind target_kind = TargetKind::none;
  Vec2 target;
  int target_circle = 0;  // circle id while heading to a circle
  Path path;
  double travelled = 0.0;

  // Where the robot stood when it committed to the current door.
  Vec2 door_origin;
  int door_missing = 0;
  std::vector<BlacklistEntry> blacklist;
  double best_remaining = 0.0;
  double last_progress = 0.0;
  std::uint64_t seq = 0;
};

struct StageSamples {
  std::vector<double> distance_transform_us;
  std::vector<double> extract_cues_us;
  std::vector<double> update_circles_us;
};

// Everything one robot owns. The map pointer may be shared between robots
// when the frontier baseline runs with a common map.
struct Agent {
  RobotState robot;
  CoordinationState coord;
  std::shared_ptr<KnownMap> map;
  ObservedSet observed;
  bool publish = false;  // reached sets grew since the last message
  std::vector<Vec3> last_saddles;
};

struct FrontierCluster {
  std::vector<Cell2> cells;
  Vec2 centroid;
};

// Known-free cells 4-adjacent to unknown cells, grouped 8-connected; clusters
// smaller than `min_cluster` are dropped. Ordered by their first cell in
// raster order.
std::vector<FrontierCluster> find_frontiers(const PlanarMap& map, int min_cluster);

// One MRMR decision: cue extraction, circle update, target bookkeeping and a
// fresh path. Stage timings are appended to `samples` when given.
void mrmr_step(Agent& agent, double t, const ExplorerConfig& cfg, StageSamples* samples = nullptr);

// One frontier-baseline decision.
void frontier_step(Agent& agent, double t, const ExplorerConfig& cfg);

// Advances the pose along the current path for one tick, never entering an
// occupied voxel. Returns the distance moved.
double move_along_path(RobotState& robot, const GroundTruthWorld& world, const ExplorerConfig& cfg);

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimConfig {
  Policy policy = Policy::mrmr;
  int robots = 1;
  double duration = 120.0;
  std::uint64_t seed = 0;
  BusConfig bus;
  ExplorerConfig explorer;
  SensorConfig sensors;
  // Unset: the frontier baseline shares one map, MRMR robots keep their own.
  std::optional<bool> share_map;
  double room_threshold = 0.5;
};

struct TrajectoryRow {
  double t = 0.0;
  int robot = 0;
  Pose pose;
  Mode mode = Mode::idle;
  TargetKind target_kind = TargetKind::none;
  Vec2 target;
};

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows);

class Simulation {
 public:
  // Throws std::invalid_argument if there are fewer spawns than robots.
  Simulation(const GroundTruthWorld& world, const std::vector<Pose>& spawns, SimConfig cfg);

  // One tick: deliver messages, sense, decide, move, publish, log.
  void step();
  void run();
  bool done() const { return tick_ >= total_ticks_; }

  std::int64_t tick() const { return tick_; }
  std::int64_t total_ticks() const { return total_ticks_; }
  const SimConfig& config() const { return cfg_; }
  const GroundTruthWorld& world() const { return *world_; }
  const std::vector<Agent>& agents() const { return agents_; }
  const MetricsLog& metrics() const { return log_; }
  const std::vector<TrajectoryRow>& trajectory() const { return trajectory_; }
  const StageSamples& samples() const { return samples_; }
  const CoverageTracker& coverage() const { return coverage_; }
  const Bus& bus() const { return bus_; }

  // Optional per-ray lidar dump.
  void set_scan_dump(std::ostream* out) { scan_dump_ = out; }

 private:
  void sense(Agent& a, double t);

  const GroundTruthWorld* world_;
  SimConfig cfg_;
  std::vector<Agent> agents_;
  Bus bus_;
  CoverageTracker coverage_;
  MetricsLog log_;
  std::vector<TrajectoryRow> trajectory_;
  StageSamples samples_;
  std::int64_t tick_ = 0;
  std::int64_t total_ticks_ = 0;
  std::ostream* scan_dump_ = nullptr;
};

}  // namespace mrmr
