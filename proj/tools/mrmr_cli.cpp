#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mrmr/cues.hpp"
#include "mrmr/harness.hpp"
#include "mrmr/metrics.hpp"
#include "mrmr/world.hpp"

using nlohmann::json;

namespace {

enum Exit { kOk = 0, kError = 1, kInvariant = 3 };

// "x y" or "x,y" per line; '#' starts a comment. A .json file is read as a
// scenario and its labeled doors are used.
std::vector<mrmr::Vec2> read_truth(const std::string& path) {
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    return mrmr::load_scenario_file(path).doors;
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<mrmr::Vec2> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    for (char& c : line) {
      if (c == ',') c = ' ';
    }
    std::istringstream ls(line);
    double x, y;
    if (!(ls >> x)) continue;
    if (!(ls >> y)) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected x y");
    out.push_back({x, y});
  }
  return out;
}

void print_episode(const mrmr::EpisodeResult& r, bool as_json) {
  if (as_json) {
    std::cout << r.summary_json();
    return;
  }
  std::printf("scenario %s, policy %s, %d robot(s), seed %llu, %.1f s\n", r.scenario.c_str(),
              mrmr::to_string(r.config.policy), r.config.robots,
              static_cast<unsigned long long>(r.config.seed), r.duration);
  std::printf("room voxels observed: %lld / %lld (%.2f%%)\n",
              static_cast<long long>(r.room_voxels), static_cast<long long>(r.room_voxels_total),
              100.0 * r.coverage);
  std::printf("rooms explored: %d / %d\n", r.rooms_visited, r.rooms_total);
  for (std::size_t i = 0; i < r.robots.size(); ++i) {
    std::printf("  robot %zu: %lld voxels, %.1f m, %d doors, %d circles\n", i,
                static_cast<long long>(r.robots[i].observed), r.robots[i].path_length,
                r.robots[i].doors_reached, r.robots[i].circles_reached);
  }
  if (r.detection) {
    std::printf("door detection: precision %.3f, recall %.3f\n", r.detection->precision,
                r.detection->recall);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-robot multi-room exploration simulator"};
  app.set_version_flag("--version", std::string("mrmr ") + mrmr::version());
  app.require_subcommand(1);

  // run
  mrmr::RunConfig run;
  std::string policy = "mrmr";
  std::string bus = "perfect";
  std::string share = "auto";
  std::string report;
  double duration = 0.0;
  auto* run_cmd = app.add_subcommand("run", "Run one episode");
  run_cmd->add_option("--scenario", run.scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--policy", policy, "mrmr or frontier")->check(CLI::IsMember({"mrmr", "frontier"}));
  run_cmd->add_option("--robots", run.robots, "Number of robots")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--seed", run.seed, "Seed for the lossy bus");
  run_cmd->add_option("--duration", duration, "Simulated seconds (default: scenario value)");
  run_cmd->add_option("--out", run.out_dir, "Output directory");
  run_cmd->add_option("--bus", bus, "perfect or lossy")->check(CLI::IsMember({"perfect", "lossy"}));
  run_cmd->add_option("--drop", run.bus.drop_probability, "Drop probability (lossy bus)")->check(CLI::Range(0.0, 1.0));
  run_cmd->add_option("--latency", run.bus.latency_ticks, "Delivery latency in ticks (lossy bus)")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--share-map", share, "auto, on or off")->check(CLI::IsMember({"auto", "on", "off"}));
  run_cmd->add_option("--room-threshold", run.room_threshold, "Fraction of a room that counts as explored")->check(CLI::Range(0.0, 1.0));
  run_cmd->add_option("--speed", run.explorer.speed, "Robot speed in m/s")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--force", run.force, "Overwrite a non-empty output directory");
  run_cmd->add_flag("--scan-dump", run.scan_dump, "Write every lidar ray to scans.csv");
  run_cmd->add_option("--report", report, "Print the summary as json")->check(CLI::IsMember({"json"}));

  // suite
  std::string matrix_path, suite_out;
  int jobs = 1;
  bool suite_force = false;
  auto* suite_cmd = app.add_subcommand("suite", "Run a comparison matrix");
  suite_cmd->add_option("--matrix", matrix_path, "Matrix JSON file")->required()->check(CLI::ExistingFile);
  suite_cmd->add_option("--out", suite_out, "Output directory")->required();
  suite_cmd->add_option("--jobs", jobs, "Episodes run in parallel")->check(CLI::PositiveNumber);
  suite_cmd->add_flag("--force", suite_force, "Overwrite existing episode outputs");
  suite_cmd->add_option("--report", report, "Print the table as json")->check(CLI::IsMember({"json"}));

  // detect
  std::string map_path, truth_path;
  double cell_size = 0.2;
  double radius = 1.0;
  auto* detect_cmd = app.add_subcommand("detect", "Score door detection on a standalone map");
  detect_cmd->add_option("--map", map_path, "PGM occupancy image (dark = free)")->required()->check(CLI::ExistingFile);
  detect_cmd->add_option("--truth", truth_path, "Door list (x y per line) or scenario JSON")->required()->check(CLI::ExistingFile);
  detect_cmd->add_option("--cell-size", cell_size, "Meters per pixel")->check(CLI::PositiveNumber);
  detect_cmd->add_option("--radius", radius, "Match radius in meters")->check(CLI::PositiveNumber);
  detect_cmd->add_option("--report", report, "Print the score as json")->check(CLI::IsMember({"json"}));

  // export
  std::string export_scenario, pgm_out, truth_out;
  auto* export_cmd = app.add_subcommand("export", "Write a scenario's ground-truth floor map as PGM");
  export_cmd->add_option("--scenario", export_scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  export_cmd->add_option("--pgm", pgm_out, "Output PGM")->required();
  export_cmd->add_option("--doors", truth_out, "Also write the labeled doors here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      run.policy = mrmr::parse_policy(policy);
      if (duration > 0.0) run.duration = duration;
      run.bus.delivery = bus == "perfect" ? mrmr::Delivery::perfect : mrmr::Delivery::lossy;
      if (share != "auto") run.share_map = share == "on";
      const auto r = mrmr::run_episode(run);
      print_episode(r, report == "json");
      return kOk;
    }
    if (*suite_cmd) {
      auto matrix = mrmr::load_matrix(matrix_path);
      auto runs = mrmr::expand(matrix, suite_out);
      for (auto& r : runs) r.force = suite_force;
      const auto res = mrmr::run_suite(runs, jobs);
      mrmr::write_suite(res, suite_out);
      if (report == "json") {
        std::cout << res.to_json();
      } else {
        std::cout << res.table_markdown();
      }
      for (const auto& e : res.episodes) {
        if (!e.ok) std::cerr << "failed: " << e.scenario << " " << mrmr::to_string(e.config.policy)
                             << " n=" << e.config.robots << " seed=" << e.config.seed << ": "
                             << e.error << "\n";
      }
      return kOk;
    }
    if (*detect_cmd) {
      std::ifstream in(map_path, std::ios::binary);
      const mrmr::BinaryMap map = mrmr::read_pgm_binary(in, cell_size);
      const mrmr::CueSet cues = mrmr::extract_cues(map, mrmr::CueConfig{});
      std::vector<mrmr::Vec2> found;
      for (const auto& p : cues.saddles) found.push_back(p.xy());
      const auto truth = read_truth(truth_path);
      const auto s = mrmr::score_detections(found, truth, radius);
      if (report == "json") {
        json doors = json::array();
        for (const auto& p : found) doors.push_back({p.x, p.y});
        std::cout << json{{"detected", doors},
                          {"true_positives", s.true_positives},
                          {"false_positives", s.false_positives},
                          {"false_negatives", s.false_negatives},
                          {"precision", s.precision},
                          {"recall", s.recall},
                          {"precision_undefined", s.precision_undefined},
                          {"recall_undefined", s.recall_undefined}}
                         .dump(2)
                  << "\n";
      } else {
        for (const auto& p : found) std::printf("door %.2f %.2f\n", p.x, p.y);
        std::printf("tp %d fp %d fn %d precision %.3f%s recall %.3f%s\n", s.true_positives,
                    s.false_positives, s.false_negatives, s.precision,
                    s.precision_undefined ? " (no detections)" : "", s.recall,
                    s.recall_undefined ? " (no labeled doors)" : "");
      }
      return kOk;
    }
    if (*export_cmd) {
      const auto scenario = mrmr::load_scenario_file(export_scenario);
      const auto world = mrmr::rasterize(scenario);
      mrmr::KnownMap known(world.grid());
      for (std::size_t i = 0; i < world.grid().voxels(); ++i) {
        known.mark(world.grid().cell_of_index(i),
                   world.occupied_index(i) ? mrmr::VoxelState::occupied : mrmr::VoxelState::free);
      }
      const mrmr::CueConfig cues;
      std::ofstream out(pgm_out, std::ios::binary);
      mrmr::write_pgm(out, mrmr::flatten(known, cues.z_low, cues.z_high));
      if (!out) throw std::runtime_error("cannot write " + pgm_out);
      if (!truth_out.empty()) {
        std::ofstream t(truth_out);
        t << "# door centers, meters\n";
        for (const auto& d : scenario.doors) t << d.x << ' ' << d.y << '\n';
      }
      return kOk;
    }
  } catch (const mrmr::SimulationError& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return kInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kOk;
}
