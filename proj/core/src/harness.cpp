#include "mrmr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace mrmr {

namespace fs = std::filesystem;
using nlohmann::json;

const char* version() { return MRMR_VERSION_STRING; }

namespace {

// Voxel-wise union of several robots' maps; occupied wins over free.
KnownMap merged_map(const std::vector<Agent>& agents, const GridSpec& g) {
  KnownMap out(g);
  for (auto pass : {VoxelState::occupied, VoxelState::free}) {
    for (const auto& a : agents) {
      const auto states = a.map->states();
      for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i] == pass) out.mark(g.cell_of_index(i), pass);
      }
    }
  }
  return out;
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw HarnessError("cannot write " + p.string());
  out << content;
  if (!out) throw HarnessError("write failed: " + p.string());
}

json detection_json(const DetectionScore& d) {
  return {{"true_positives", d.true_positives},
          {"false_positives", d.false_positives},
          {"false_negatives", d.false_negatives},
          {"precision", d.precision},
          {"recall", d.recall},
          {"precision_undefined", d.precision_undefined},
          {"recall_undefined", d.recall_undefined},
          {"match_radius", 1.0}};
}

json bus_json(const BusConfig& b) {
  return {{"delivery", b.delivery == Delivery::perfect ? "perfect" : "lossy"},
          {"drop_probability", b.drop_probability},
          {"latency_ticks", b.latency_ticks}};
}

}  // namespace

EpisodeResult run_episode(const RunConfig& cfg) {
  const Scenario scenario = load_scenario_file(cfg.scenario_path);
  return run_episode(scenario, cfg);
}

EpisodeResult run_episode(const Scenario& scenario, const RunConfig& cfg) {
  const GroundTruthWorld world = rasterize(scenario);

  SimConfig sim_cfg;
  sim_cfg.policy = cfg.policy;
  sim_cfg.robots = cfg.robots;
  sim_cfg.duration = cfg.duration.value_or(scenario.duration);
  sim_cfg.seed = cfg.seed;
  sim_cfg.bus = cfg.bus;
  sim_cfg.bus.seed = cfg.seed;
  sim_cfg.explorer = cfg.explorer;
  sim_cfg.sensors = cfg.sensors;
  sim_cfg.share_map = cfg.share_map;
  sim_cfg.room_threshold = cfg.room_threshold;

  if (!cfg.out_dir.empty()) prepare_output_dir(cfg.out_dir, cfg.force);
  std::ofstream dump;
  Simulation sim(world, scenario.spawns, sim_cfg);
  if (cfg.scan_dump && !cfg.out_dir.empty()) {
    dump.open(fs::path(cfg.out_dir) / "scans.csv", std::ios::binary | std::ios::trunc);
    dump << "t,robot,azimuth,x,y,z\n";
    sim.set_scan_dump(&dump);
  }
  sim.run();

  EpisodeResult r;
  r.scenario = scenario.name;
  r.config = cfg;
  r.duration = sim_cfg.duration;
  r.ticks = sim.tick();
  r.metrics = sim.metrics();
  r.trajectory = sim.trajectory();
  r.room_voxels_total = world.total_room_voxels();
  r.room_voxels = sim.coverage().room_voxels();
  r.coverage = sim.coverage().fraction();
  r.rooms_visited = sim.coverage().rooms_visited(cfg.room_threshold);
  r.rooms_total = world.room_count();
  r.messages_sent = sim.bus().sent();
  r.messages_dropped = sim.bus().dropped();
  for (const auto& a : sim.agents()) {
    RobotSummary s;
    s.observed = static_cast<std::int64_t>(a.observed.size());
    s.path_length = a.robot.travelled;
    s.doors_reached = static_cast<int>(a.coord.doors_reached.size());
    s.circles_reached = static_cast<int>(a.coord.circles_reached.size());
    r.robots.push_back(s);
    r.circles_reached.push_back(a.coord.circles_reached);
  }

  if (!scenario.doors.empty() && !sim.agents().empty()) {
    const KnownMap merged = merged_map(sim.agents(), world.grid());
    const CueSet cues = extract_cues(merged, cfg.explorer.cues);
    std::vector<Vec2> found;
    for (const auto& p : cues.saddles) found.push_back(p.xy());
    r.detection = score_detections(found, scenario.doors, 1.0);
  }

  const auto& smp = sim.samples();
  const std::pair<const char*, const std::vector<double>*> stages[] = {
      {"distance_transform", &smp.distance_transform_us},
      {"extract_cues", &smp.extract_cues_us},
      {"update_circles", &smp.update_circles_us}};
  for (const auto& [tag, v] : stages) {
    if (v->size() >= 30) r.timings.push_back(time_module(tag, *v));
  }

  if (!cfg.out_dir.empty()) write_episode(r, cfg.out_dir, true);
  return r;
}

std::string EpisodeResult::summary_json() const {
  json robots_j = json::array();
  for (std::size_t i = 0; i < robots.size(); ++i) {
    robots_j.push_back({{"id", i},
                        {"observed_voxels", robots[i].observed},
                        {"path_length", std::round(robots[i].path_length * 1000.0) / 1000.0},
                        {"doors_reached", robots[i].doors_reached},
                        {"circles_reached", robots[i].circles_reached}});
  }
  json j = {{"scenario", scenario},
            {"policy", to_string(config.policy)},
            {"robots", config.robots},
            {"seed", config.seed},
            {"duration", duration},
            {"ticks", ticks},
            {"bus", bus_json(config.bus)},
            {"room_voxels_total", room_voxels_total},
            {"room_voxels_observed", room_voxels},
            {"coverage_percent", std::round(coverage * 1e6) / 1e4},
            {"rooms_visited", rooms_visited},
            {"rooms_total", rooms_total},
            {"room_threshold", config.room_threshold},
            {"messages_sent", messages_sent},
            {"messages_dropped", messages_dropped},
            {"per_robot", robots_j},
            {"version", version()}};
  j["door_detection"] = detection ? detection_json(*detection) : json(nullptr);
  return j.dump(2) + "\n";
}

std::string EpisodeResult::timings_json() const {
  json stages = json::array();
  for (const auto& t : timings) {
    stages.push_back({{"stage", t.tag},
                      {"samples", t.samples},
                      {"mean_us", t.mean_us},
                      {"p50_us", t.p50_us},
                      {"p90_us", t.p90_us},
                      {"p99_us", t.p99_us},
                      {"max_us", t.max_us}});
  }
  return json{{"stages", stages}}.dump(2) + "\n";
}

void prepare_output_dir(const std::string& dir, bool force) {
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!fs::is_directory(dir, ec)) throw HarnessError(dir + " exists and is not a directory");
    if (!force && !fs::is_empty(dir, ec)) {
      throw HarnessError("output directory " + dir + " is not empty (use --force to overwrite)");
    }
    return;
  }
  fs::create_directories(dir, ec);
  if (ec) throw HarnessError("cannot create " + dir + ": " + ec.message());
}

void write_episode(const EpisodeResult& r, const std::string& dir, bool force) {
  prepare_output_dir(dir, force);
  const fs::path base(dir);
  std::ostringstream metrics, traj, curve;
  r.metrics.write_csv(metrics);
  write_trajectory_csv(traj, r.trajectory);
  r.metrics.write_coverage_curve(curve);
  write_file(base / "metrics.csv", metrics.str());
  write_file(base / "trajectories.csv", traj.str());
  write_file(base / "coverage_curve.dat", curve.str());
  write_file(base / "summary.json", r.summary_json());
  write_file(base / "timings.json", r.timings_json());
}

SuiteMatrix load_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw HarnessError("cannot open matrix file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw HarnessError("matrix " + path + ": " + e.what());
  }
  const fs::path dir = fs::path(path).parent_path();
  SuiteMatrix m;
  try {
    for (const auto& s : j.at("scenarios")) {
      const fs::path p(s.get<std::string>());
      m.scenarios.push_back((p.is_absolute() ? p : dir / p).lexically_normal().string());
    }
    for (const auto& p : j.value("policies", json::array({"frontier", "mrmr"}))) {
      m.policies.push_back(parse_policy(p.get<std::string>()));
    }
    for (const auto& n : j.value("robots", json::array({1, 2, 3}))) m.robots.push_back(n.get<int>());
    for (const auto& s : j.value("seeds", json::array({1, 2, 3}))) {
      m.seeds.push_back(s.get<std::uint64_t>());
    }
    if (j.contains("duration")) m.duration = j["duration"].get<double>();
    if (j.contains("share_map")) m.share_map = j["share_map"].get<bool>();
    if (j.contains("bus")) {
      const auto& b = j["bus"];
      const std::string mode = b.value("delivery", "perfect");
      if (mode != "perfect" && mode != "lossy") throw HarnessError("bus.delivery must be perfect or lossy");
      m.bus.delivery = mode == "perfect" ? Delivery::perfect : Delivery::lossy;
      m.bus.drop_probability = b.value("drop_probability", 0.0);
      m.bus.latency_ticks = b.value("latency_ticks", 0);
      validate(m.bus);
    }
  } catch (const json::exception& e) {
    throw HarnessError("matrix " + path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw HarnessError("matrix " + path + ": " + e.what());
  }
  if (m.scenarios.empty() || m.policies.empty() || m.robots.empty() || m.seeds.empty()) {
    throw HarnessError("matrix " + path + " expands to no episodes");
  }
  return m;
}

std::vector<RunConfig> expand(const SuiteMatrix& m, const std::string& out_dir) {
  std::vector<RunConfig> out;
  for (const auto& s : m.scenarios) {
    for (Policy p : m.policies) {
      for (int n : m.robots) {
        for (auto seed : m.seeds) {
          RunConfig c;
          c.scenario_path = s;
          c.policy = p;
          c.robots = n;
          c.seed = seed;
          c.duration = m.duration;
          c.bus = m.bus;
          c.share_map = m.share_map;
          if (!out_dir.empty()) {
            char leaf[96];
            std::snprintf(leaf, sizeof leaf, "%s_n%d_s%llu", to_string(p), n,
                          static_cast<unsigned long long>(seed));
            c.out_dir = (fs::path(out_dir) / stem_of(s) / leaf).string();
          }
          out.push_back(c);
        }
      }
    }
  }
  return out;
}

SuiteResult run_suite(const std::vector<RunConfig>& runs, int jobs) {
  if (runs.empty()) throw HarnessError("suite has no episodes");
  SuiteResult res;
  res.episodes.resize(runs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= runs.size()) return;
      EpisodeOutcome& o = res.episodes[i];
      o.config = runs[i];
      o.scenario = stem_of(runs[i].scenario_path);
      try {
        const EpisodeResult r = run_episode(runs[i]);
        o.ok = true;
        o.room_voxels = r.room_voxels;
        o.room_voxels_total = r.room_voxels_total;
        o.coverage = r.coverage;
        o.rooms_visited = r.rooms_visited;
        o.rooms_total = r.rooms_total;
      } catch (const std::exception& e) {
        o.ok = false;
        o.error = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(runs.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // Per (scenario, policy, robots): seed means.
  using Key = std::tuple<std::string, int, int>;
  struct Acc {
    double vxl = 0.0;
    double voxels = 0.0;
    double rooms = 0.0;
    std::int64_t voxels_total = 0;
    int rooms_total = 0;
    int ok = 0;
    int failed = 0;
  };
  std::map<Key, Acc> per;
  std::vector<Key> order;
  for (const auto& e : res.episodes) {
    const Key k{e.scenario, static_cast<int>(e.config.policy), e.config.robots};
    if (!per.count(k)) order.push_back(k);
    Acc& a = per[k];
    if (!e.ok) {
      ++a.failed;
      continue;
    }
    ++a.ok;
    a.vxl += e.coverage;
    a.voxels += static_cast<double>(e.room_voxels);
    a.rooms += e.rooms_visited;
    a.voxels_total = e.room_voxels_total;
    a.rooms_total = e.rooms_total;
  }
  for (const auto& k : order) {
    const Acc& a = per[k];
    ScenarioCell c;
    c.scenario = std::get<0>(k);
    c.policy = static_cast<Policy>(std::get<1>(k));
    c.robots = std::get<2>(k);
    c.failed = a.failed;
    c.episodes = a.ok + a.failed;
    c.rooms_total = a.rooms_total;
    if (a.ok > 0) {
      c.vxl = 100.0 * a.vxl / a.ok;
      c.rooms_visited = a.rooms / a.ok;
    }
    res.per_scenario.push_back(c);
  }

  // Per (policy, robots) across scenarios.
  std::vector<std::pair<int, int>> cell_order;
  for (const auto& k : order) {
    const std::pair<int, int> pk{std::get<1>(k), std::get<2>(k)};
    if (std::find(cell_order.begin(), cell_order.end(), pk) == cell_order.end()) {
      cell_order.push_back(pk);
    }
  }
  for (const auto& [pol, n_robots] : cell_order) {
    SuiteCell cell;
    cell.policy = static_cast<Policy>(pol);
    cell.robots = n_robots;
    double eq_sum = 0.0;
    int eq_n = 0;
    double vox = 0.0;
    double vox_total = 0.0;
    double rooms = 0.0;
    double rooms_total = 0.0;
    for (const auto& k : order) {
      if (std::get<1>(k) != pol || std::get<2>(k) != n_robots) continue;
      const Acc& a = per[k];
      cell.episodes += a.ok + a.failed;
      cell.failed += a.failed;
      if (a.ok == 0) continue;
      eq_sum += a.vxl / a.ok;
      ++eq_n;
      vox += a.voxels / a.ok;
      vox_total += static_cast<double>(a.voxels_total);
      rooms += a.rooms / a.ok;
      rooms_total += a.rooms_total;
    }
    if (eq_n > 0) cell.vxl_equal = 100.0 * eq_sum / eq_n;
    if (vox_total > 0) cell.vxl_weighted = 100.0 * vox / vox_total;
    if (rooms_total > 0) cell.rooms = 100.0 * rooms / rooms_total;
    res.cells.push_back(cell);
  }
  return res;
}

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const SuiteCell* find_cell(const SuiteResult& r, Policy p, int n) {
  for (const auto& c : r.cells) {
    if (c.policy == p && c.robots == n) return &c;
  }
  return nullptr;
}

double improvement(double ours, double base) {
  return base > 0.0 ? 100.0 * (ours - base) / base : 0.0;
}

}  // namespace

std::string SuiteResult::table_markdown() const {
  std::string out;
  out += "| policy | robots | Vxl.% (equal) | Vxl.% (voxel-weighted) | Rm.% | episodes | failed |\n";
  out += "|---|---|---|---|---|---|---|\n";
  for (const auto& c : cells) {
    out += "| " + std::string(to_string(c.policy)) + " | " + std::to_string(c.robots) + " | " +
           fmt("%.2f", c.vxl_equal) + " | " + fmt("%.2f", c.vxl_weighted) + " | " +
           fmt("%.2f", c.rooms) + " | " + std::to_string(c.episodes) + " | " +
           std::to_string(c.failed) + " |\n";
  }
  std::string imp;
  for (const auto& c : cells) {
    if (c.policy != Policy::mrmr) continue;
    const SuiteCell* base = find_cell(*this, Policy::frontier, c.robots);
    if (!base) continue;
    imp += "| " + std::to_string(c.robots) + " | " +
           fmt("%+.2f", improvement(c.vxl_equal, base->vxl_equal)) + " | " +
           fmt("%+.2f", improvement(c.vxl_weighted, base->vxl_weighted)) + " | " +
           fmt("%+.2f", improvement(c.rooms, base->rooms)) + " |\n";
  }
  if (!imp.empty()) {
    out += "\nImprovement of mrmr over frontier (relative %):\n\n";
    out += "| robots | Vxl. (equal) | Vxl. (voxel-weighted) | Rm. |\n|---|---|---|---|\n" + imp;
  }
  out += "\nPer scenario:\n\n| scenario | policy | robots | Vxl.% | rooms visited | status |\n";
  out += "|---|---|---|---|---|---|\n";
  for (const auto& c : per_scenario) {
    const bool failed = c.failed == c.episodes;
    out += "| " + c.scenario + " | " + to_string(c.policy) + " | " + std::to_string(c.robots) +
           " | " + (failed ? std::string("-") : fmt("%.2f", c.vxl)) + " | " +
           (failed ? std::string("-")
                   : fmt("%.2f", c.rooms_visited) + "/" + std::to_string(c.rooms_total)) +
           " | " +
           (c.failed == 0 ? std::string("ok")
                          : (failed ? std::string("FAILED")
                                    : std::to_string(c.failed) + " failed")) +
           " |\n";
  }
  return out;
}

std::string SuiteResult::to_json() const {
  json cells_j = json::array();
  for (const auto& c : cells) {
    cells_j.push_back({{"policy", to_string(c.policy)},
                       {"robots", c.robots},
                       {"vxl_equal_percent", c.vxl_equal},
                       {"vxl_weighted_percent", c.vxl_weighted},
                       {"rooms_percent", c.rooms},
                       {"episodes", c.episodes},
                       {"failed", c.failed}});
  }
  json imp = json::array();
  for (const auto& c : cells) {
    if (c.policy != Policy::mrmr) continue;
    const SuiteCell* base = find_cell(*this, Policy::frontier, c.robots);
    if (!base) continue;
    imp.push_back({{"robots", c.robots},
                   {"vxl_equal", improvement(c.vxl_equal, base->vxl_equal)},
                   {"vxl_weighted", improvement(c.vxl_weighted, base->vxl_weighted)},
                   {"rooms", improvement(c.rooms, base->rooms)}});
  }
  json eps = json::array();
  for (const auto& e : episodes) {
    json je = {{"scenario", e.scenario},
               {"policy", to_string(e.config.policy)},
               {"robots", e.config.robots},
               {"seed", e.config.seed},
               {"ok", e.ok}};
    if (e.ok) {
      je["coverage_percent"] = 100.0 * e.coverage;
      je["rooms_visited"] = e.rooms_visited;
      je["rooms_total"] = e.rooms_total;
    } else {
      je["error"] = e.error;
    }
    eps.push_back(je);
  }
  return json{{"cells", cells_j}, {"improvement_percent", imp}, {"episodes", eps}}.dump(2) + "\n";
}

std::string SuiteResult::episodes_csv() const {
  std::string out = "scenario,policy,robots,seed,ok,room_voxels,room_voxels_total,coverage,rooms_visited,rooms_total\n";
  char buf[256];
  for (const auto& e : episodes) {
    std::snprintf(buf, sizeof buf, "%s,%s,%d,%llu,%d,%lld,%lld,%.6f,%d,%d\n", e.scenario.c_str(),
                  to_string(e.config.policy), e.config.robots,
                  static_cast<unsigned long long>(e.config.seed), e.ok ? 1 : 0,
                  static_cast<long long>(e.room_voxels), static_cast<long long>(e.room_voxels_total),
                  e.coverage, e.rooms_visited, e.rooms_total);
    out += buf;
  }
  return out;
}

void write_suite(const SuiteResult& r, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw HarnessError("cannot create " + dir + ": " + ec.message());
  write_file(fs::path(dir) / "table.md", r.table_markdown());
  write_file(fs::path(dir) / "suite.json", r.to_json());
  write_file(fs::path(dir) / "episodes.csv", r.episodes_csv());
}

}  // namespace mrmr
