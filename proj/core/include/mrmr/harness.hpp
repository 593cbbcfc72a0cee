#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrmr/coordination.hpp"
#include "mrmr/explorer.hpp"
#include "mrmr/metrics.hpp"
#include "mrmr/world.hpp"

namespace mrmr {

const char* version();

class HarnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string scenario_path;
  Policy policy = Policy::mrmr;
  int robots = 1;
  std::uint64_t seed = 0;
  // Unset: the scenario's own duration (120 s unless it says otherwise).
  std::optional<double> duration;
  BusConfig bus;
  ExplorerConfig explorer;
  SensorConfig sensors;
  std::optional<bool> share_map;
  double room_threshold = 0.5;
  std::string out_dir;  // empty: keep results in memory only
  bool force = false;   // allow writing into a non-empty directory
  bool scan_dump = false;
};

struct RobotSummary {
  std::int64_t observed = 0;
  double path_length = 0.0;
  int doors_reached = 0;
  int circles_reached = 0;
};

struct EpisodeResult {
  std::string scenario;
  RunConfig config;
  double duration = 0.0;
  std::int64_t ticks = 0;
  MetricsLog metrics;
  std::vector<TrajectoryRow> trajectory;
  std::int64_t room_voxels_total = 0;
  std::int64_t room_voxels = 0;
  double coverage = 0.0;  // fraction
  int rooms_visited = 0;
  int rooms_total = 0;
  std::vector<RobotSummary> robots;
  // Reached circles per robot, for post-hoc redundancy checks.
  std::vector<std::vector<ReachedCircle>> circles_reached;
  std::optional<DetectionScore> detection;
  std::vector<TimingStats> timings;
  std::uint64_t messages_sent = 0;
  std::uint64_t messages_dropped = 0;

  // Deterministic report (no wall-clock values).
  std::string summary_json() const;
  std::string timings_json() const;
};

// Throws ScenarioError, std::invalid_argument or SimulationError.
EpisodeResult run_episode(const RunConfig& cfg);
EpisodeResult run_episode(const Scenario& scenario, const RunConfig& cfg);

// Writes metrics.csv, trajectories.csv, coverage_curve.dat, summary.json and
// timings.json into `dir`. Refuses a non-empty directory unless `force`.
void write_episode(const EpisodeResult& r, const std::string& dir, bool force);

// Throws HarnessError if `dir` exists, is not empty and `force` is false.
void prepare_output_dir(const std::string& dir, bool force);

struct SuiteMatrix {
  std::vector<std::string> scenarios;  // resolved paths
  std::vector<Policy> policies;
  std::vector<int> robots;
  std::vector<std::uint64_t> seeds;
  std::optional<double> duration;
  BusConfig bus;
  std::optional<bool> share_map;
};

// JSON document; scenario paths are resolved against the file's directory.
SuiteMatrix load_matrix(const std::string& path);

// One RunConfig per (scenario, policy, robots, seed), in that nesting order.
// Episode outputs go to <out_dir>/<scenario>/<policy>_n<robots>_s<seed>.
std::vector<RunConfig> expand(const SuiteMatrix& m, const std::string& out_dir);

struct EpisodeOutcome {
  RunConfig config;
  std::string scenario;  // file stem, or the path when loading failed
  bool ok = false;
  std::string error;
  std::int64_t room_voxels = 0;
  std::int64_t room_voxels_total = 0;
  double coverage = 0.0;
  int rooms_visited = 0;
  int rooms_total = 0;
};

struct SuiteCell {
  Policy policy = Policy::mrmr;
  int robots = 0;
  double vxl_equal = 0.0;     // percent, mean over scenarios of per-scenario seed means
  double vxl_weighted = 0.0;  // percent, pooled voxels over pooled totals
  double rooms = 0.0;         // percent of rooms explored, pooled
  int episodes = 0;
  int failed = 0;
};

struct ScenarioCell {
  std::string scenario;
  Policy policy = Policy::mrmr;
  int robots = 0;
  double vxl = 0.0;
  double rooms_visited = 0.0;  // mean over seeds
  int rooms_total = 0;
  int failed = 0;
  int episodes = 0;
};

struct SuiteResult {
  std::vector<EpisodeOutcome> episodes;
  std::vector<ScenarioCell> per_scenario;
  std::vector<SuiteCell> cells;

  // Table in markdown with improvement rows (mrmr over frontier per robot count).
  std::string table_markdown() const;
  std::string to_json() const;
  std::string episodes_csv() const;
};

// Runs every configuration; failures are recorded and the rest continue.
// Up to `jobs` episodes run concurrently; results do not depend on it.
SuiteResult run_suite(const std::vector<RunConfig>& runs, int jobs = 1);

// Writes table.md, suite.json and episodes.csv into `dir`.
void write_suite(const SuiteResult& r, const std::string& dir);

}  // namespace mrmr
