#include "mrmr/explorer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "mrmr/raycast.hpp"

namespace mrmr {

const char* to_string(Policy p) { return p == Policy::mrmr ? "mrmr" : "frontier"; }

const char* to_string(Mode m) {
  switch (m) {
    case Mode::idle: return "idle";
    case Mode::to_door: return "to_door";
    case Mode::to_circle: return "to_circle";
    case Mode::frontier: return "frontier";
  }
  return "?";
}

const char* to_string(TargetKind k) {
  switch (k) {
    case TargetKind::none: return "none";
    case TargetKind::door: return "door";
    case TargetKind::circle: return "circle";
    case TargetKind::frontier: return "frontier";
  }
  return "?";
}

Policy parse_policy(std::string_view s) {
  if (s == "mrmr") return Policy::mrmr;
  if (s == "frontier") return Policy::frontier;
  throw std::invalid_argument("unknown policy '" + std::string(s) + "' (expected mrmr or frontier)");
}

void validate(const ExplorerConfig& cfg) {
  if (!(cfg.tick_dt > 0.0)) throw std::invalid_argument("tick_dt must be positive");
  if (!(cfg.speed > 0.0)) throw std::invalid_argument("speed must be positive");
  if (!(cfg.yaw_rate > 0.0)) throw std::invalid_argument("yaw_rate must be positive");
  if (!(cfg.reach_tolerance > 0.0)) throw std::invalid_argument("reach_tolerance must be positive");
  if (!(cfg.adjacency_mu > 0.0)) throw std::invalid_argument("adjacency_mu must be positive");
  if (!(cfg.eps_door >= 0.0) || !(cfg.eps_circle >= 0.0)) {
    throw std::invalid_argument("exclusion radii must be non-negative");
  }
  if (!(cfg.circles.r_thresh > 0.0) || !(cfg.circles.r_min > 0.0)) {
    throw std::invalid_argument("circle radii must be positive");
  }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Blacklisted points block targets within this distance.
constexpr double kBlacklistRadius = 0.5;

using Clock = std::chrono::steady_clock;

double micros(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::micro>(b - a).count();
}

Vec3 at(Vec2 p, double z) { return {p.x, p.y, z}; }

bool blacklisted(const RobotState& r, Vec2 p) {
  for (const auto& e : r.blacklist) {
    if (distance(e.point, p) < kBlacklistRadius) return true;
  }
  return false;
}

void clear_target(RobotState& r) {
  r.mode = Mode::idle;
  r.target_kind = TargetKind::none;
  r.target_circle = 0;
  r.path.clear();
}

void set_target(RobotState& r, Mode mode, TargetKind kind, Vec2 p, double t, int circle = 0) {
  const bool same = r.target_kind == kind && r.target_circle == circle &&
                    distance(r.target, p) < kBlacklistRadius;
  if (!same) {
    r.best_remaining = kInf;
    r.last_progress = t;
  }
  r.mode = mode;
  r.target_kind = kind;
  r.target = p;
  r.target_circle = circle;
}

void give_up(RobotState& r, double t, const ExplorerConfig& cfg) {
  r.blacklist.push_back({r.target, t + cfg.blacklist_seconds});
  clear_target(r);
}

std::optional<DoorCandidate> nearest_door(const CoordinationState& s, const RobotState& r,
                                          Vec3 pos) {
  std::optional<DoorCandidate> best;
  double best_d = kInf;
  for (const auto& d : s.doors) {
    if (blacklisted(r, d.point.xy())) continue;
    const double dist = distance(pos, d.point);
    if (dist < best_d) {
      best = d;
      best_d = dist;
    }
  }
  return best;
}

template <typename Pred>
std::optional<Circle> nearest_circle(const CoordinationState& s, const RobotState& r, Vec2 pos,
                                     double z, Pred&& accept) {
  std::optional<Circle> best;
  double best_d = kInf;
  for (const auto& c : s.circles.circles()) {
    if (c.reached || blacklisted(r, c.center) || circle_excluded(s, c.center3(z))) continue;
    if (!accept(c)) continue;
    const double dist = distance(pos, c.center);
    if (dist < best_d) {
      best = c;
      best_d = dist;
    }
  }
  return best;
}

bool choose_frontier(Agent& a, const PlanarMap& planar, const CostMap& costs, double t,
                     const ExplorerConfig& cfg) {
  RobotState& r = a.robot;
  const auto clusters = find_frontiers(planar, cfg.frontier.min_cluster);
  if (clusters.empty()) {
    clear_target(r);
    return false;
  }
  const CostField field = dijkstra(costs, r.pose.xy());
  const double cs = planar.cell_size();
  double best_score = -1.0;
  Cell2 best_cell{};
  for (const auto& cl : clusters) {
    std::optional<Cell2> rep;
    double rep_d = kInf;
    for (const Cell2 c : cl.cells) {
      if (!std::isfinite(field.cost[c])) continue;
      const double d = distance(planar.center(c), cl.centroid);
      if (d < rep_d) {
        rep = c;
        rep_d = d;
      }
    }
    if (!rep || blacklisted(r, planar.center(*rep))) continue;
    double score = static_cast<double>(cl.cells.size()) / (field.cost[*rep] + 1.0);
    if (r.target_kind == TargetKind::frontier) {
      for (const Cell2 c : cl.cells) {
        if (distance(planar.center(c), r.target) < 2.0 * cs + cfg.reach_tolerance) {
          score *= cfg.frontier.hysteresis;
          break;
        }
      }
    }
    if (score > best_score) {
      best_score = score;
      best_cell = *rep;
    }
  }
  if (best_score < 0.0) {
    clear_target(r);
    return false;
  }
  auto path = extract_path(costs, field, r.pose.xy(), best_cell);
  if (!path) {
    clear_target(r);
    return false;
  }
  set_target(r, Mode::frontier, TargetKind::frontier, planar.center(best_cell), t);
  r.path = std::move(*path);
  return true;
}

// Gives up on targets whose remaining path has not shrunk for a while.
void check_stall(RobotState& r, double t, const ExplorerConfig& cfg) {
  if (r.mode == Mode::idle) return;
  const double remaining = path_length(r.path);
  if (remaining < r.best_remaining - 0.1) {
    r.best_remaining = remaining;
    r.last_progress = t;
  } else if (t - r.last_progress > cfg.stall_seconds) {
    give_up(r, t, cfg);
  }
}

}  // namespace

std::vector<FrontierCluster> find_frontiers(const PlanarMap& map, int min_cluster) {
  const int w = map.width();
  const int h = map.height();
  Grid2<std::uint8_t> is_frontier(w, h, map.cell_size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (map(x, y) != PlanarState::free) continue;
      const int nx[4] = {x + 1, x - 1, x, x};
      const int ny[4] = {y, y, y + 1, y - 1};
      for (int k = 0; k < 4; ++k) {
        if (map.contains(nx[k], ny[k]) && map(nx[k], ny[k]) == PlanarState::unknown) {
          is_frontier(x, y) = 1;
          break;
        }
      }
    }
  }
  std::vector<FrontierCluster> out;
  Grid2<std::uint8_t> visited(w, h, map.cell_size(), 0);
  std::vector<Cell2> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!is_frontier(x, y) || visited(x, y)) continue;
      FrontierCluster cl;
      stack.assign(1, Cell2{x, y});
      visited(x, y) = 1;
      while (!stack.empty()) {
        const Cell2 c = stack.back();
        stack.pop_back();
        cl.cells.push_back(c);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const Cell2 n{c.x + dx, c.y + dy};
            if (!map.contains(n) || !is_frontier[n] || visited[n]) continue;
            visited[n] = 1;
            stack.push_back(n);
          }
        }
      }
      if (static_cast<int>(cl.cells.size()) < min_cluster) continue;
      std::sort(cl.cells.begin(), cl.cells.end(),
                [](Cell2 a, Cell2 b) { return a.y != b.y ? a.y < b.y : a.x < b.x; });
      Vec2 sum;
      for (const Cell2 c : cl.cells) sum = sum + map.center(c);
      cl.centroid = sum * (1.0 / static_cast<double>(cl.cells.size()));
      out.push_back(std::move(cl));
    }
  }
  return out;
}

void mrmr_step(Agent& a, double t, const ExplorerConfig& cfg, StageSamples* samples) {
  RobotState& r = a.robot;
  CoordinationState& s = a.coord;
  s.eps_door = cfg.eps_door;
  s.eps_circle = cfg.eps_circle;
  std::erase_if(r.blacklist, [t](const BlacklistEntry& e) { return e.until <= t; });
  const double z = cfg.cues.cue_z;
  const Vec3 pos = at(r.pose.xy(), z);

  // Cues and circles from the robot's own map.
  const auto t0 = Clock::now();
  const BinaryMap binary = flatten(*a.map, cfg.cues.z_low, cfg.cues.z_high);
  const BinaryMap filtered = median_filter(binary, cfg.cues.median);
  const auto t1 = Clock::now();
  const DistanceField dist = distance_transform(filtered);
  const auto t2 = Clock::now();
  const HessianField hess = hessian(dist);
  const CueSet cues = classify_cues(binary, filtered, dist, hess, cfg.cues);
  const auto t3 = Clock::now();
  s.set_doors(cues.saddles);
  a.last_saddles = cues.saddles;
  const auto candidates = candidates_from(cues.maxima);
  const auto t4 = Clock::now();
  s.circles = update_circles(std::move(s.circles), candidates, cfg.circles,
                             [&](const Circle& c) {
                               return longest_free_direction(filtered, c.center, 2.0 * c.r);
                             });
  clamp_to_free_space(s.circles, dist, cfg.circles);
  const auto t5 = Clock::now();
  if (samples) {
    samples->distance_transform_us.push_back(micros(t1, t2));
    samples->extract_cues_us.push_back(micros(t0, t3));
    samples->update_circles_us.push_back(micros(t4, t5));
  }

  const PlanarMap planar = planar_map(*a.map, cfg.cues.z_low, cfg.cues.z_high);
  const CostMap costs(planar, cfg.planner);

  // Re-validate the current target against the refreshed candidates.
  if (r.mode == Mode::to_door) {
    if (door_excluded(s, at(r.target, z))) {
      clear_target(r);
    } else {
      // Saddle positions jitter as the map fills in; follow the closest detection.
      std::optional<Vec2> snap;
      double best = cfg.eps_door;
      for (const auto& d : s.doors) {
        const double dd = distance(d.point.xy(), r.target);
        if (dd < best) {
          best = dd;
          snap = d.point.xy();
        }
      }
      if (snap) {
        r.target = *snap;
        r.door_missing = 0;
      } else if (++r.door_missing > cfg.door_grace_ticks) {
        clear_target(r);
      }
    }
  } else if (r.mode == Mode::to_circle) {
    const Circle* c = s.circles.find(r.target_circle);
    if (c && !c->reached && !circle_excluded(s, c->center3(z))) {
      r.target = c->center;
    } else {
      // The circle was merged or clamped away; adopt one that covers the old target.
      const Vec2 old = r.target;
      auto repl = nearest_circle(s, r, old, z, [&](const Circle& o) {
        return distance(o.center, old) < o.r;
      });
      if (repl) {
        r.target_circle = repl->id;
        r.target = repl->center;
      } else {
        clear_target(r);
      }
    }
  }

  // Arrivals. Chains of adjacent circles can resolve several in one tick.
  for (int guard = 0; guard < 8; ++guard) {
    const double here = distance(r.pose.xy(), r.target);
    if (r.mode == Mode::to_door && here <= cfg.reach_tolerance) {
      if (s.add_reached_door(at(r.target, z))) a.publish = true;
      const Vec2 door = r.target;
      const Vec2 approach = door - r.door_origin;
      clear_target(r);
      // Enter the room: prefer circles on the far side of the door.
      auto next = nearest_circle(s, r, r.pose.xy(), z, [&](const Circle& c) {
        return (c.center - door).dot(approach) > 0.0;
      });
      if (next) set_target(r, Mode::to_circle, TargetKind::circle, next->center, t, next->id);
      continue;
    }
    if (r.mode == Mode::to_circle && here <= cfg.reach_tolerance) {
      Circle* c = s.circles.find(r.target_circle);
      if (!c) {
        clear_target(r);
        break;
      }
      c->reached = true;
      if (s.add_reached_circle(c->center3(z), c->r)) a.publish = true;
      const Circle done = *c;
      clear_target(r);
      auto next = nearest_circle(s, r, r.pose.xy(), z, [&](const Circle& o) {
        return distance(o.center, done.center) < cfg.adjacency_mu * (o.r + done.r);
      });
      if (next) set_target(r, Mode::to_circle, TargetKind::circle, next->center, t, next->id);
      continue;
    }
    break;
  }

  // Doors first, then circles; frontiers only when both are exhausted.
  auto select = [&]() {
    target_door(s, pos);
    if (auto d = nearest_door(s, r, pos)) {
      set_target(r, Mode::to_door, TargetKind::door, d->point.xy(), t);
      r.door_origin = r.pose.xy();
      r.door_missing = 0;
      return true;
    }
    target_circle(s, pos, z);
    if (auto c = nearest_circle(s, r, r.pose.xy(), z, [](const Circle&) { return true; })) {
      set_target(r, Mode::to_circle, TargetKind::circle, c->center, t, c->id);
      return true;
    }
    return false;
  };
  auto fallback = [&]() {
    if (!cfg.frontier_fallback) {
      clear_target(r);
      return;
    }
    if (r.mode == Mode::frontier && distance(r.pose.xy(), r.target) <= cfg.reach_tolerance) {
      give_up(r, t, cfg);
    }
    choose_frontier(a, planar, costs, t, cfg);
  };

  if (r.mode == Mode::idle || r.mode == Mode::frontier) {
    if (!select()) fallback();
  }

  for (int attempt = 0; attempt < 4; ++attempt) {
    if (r.mode == Mode::idle || r.mode == Mode::frontier) break;
    if (auto p = plan_path(costs, r.pose.xy(), r.target, cfg.planner)) {
      r.path = std::move(*p);
      break;
    }
    give_up(r, t, cfg);
    if (!select()) {
      fallback();
      break;
    }
  }
  check_stall(r, t, cfg);
}

void frontier_step(Agent& a, double t, const ExplorerConfig& cfg) {
  RobotState& r = a.robot;
  std::erase_if(r.blacklist, [t](const BlacklistEntry& e) { return e.until <= t; });
  const PlanarMap planar = planar_map(*a.map, cfg.cues.z_low, cfg.cues.z_high);
  const CostMap costs(planar, cfg.planner);
  if (r.mode == Mode::frontier && distance(r.pose.xy(), r.target) <= cfg.reach_tolerance) {
    give_up(r, t, cfg);
  }
  choose_frontier(a, planar, costs, t, cfg);
  check_stall(r, t, cfg);
}

double move_along_path(RobotState& r, const GroundTruthWorld& world, const ExplorerConfig& cfg) {
  if (r.path.size() < 2) return 0.0;
  Vec2 p = r.pose.xy();
  double budget = cfg.speed * cfg.tick_dt;
  std::size_t i = 1;
  Vec2 heading;
  while (budget > 1e-12 && i < r.path.size()) {
    const Vec2 d = r.path[i] - p;
    const double len = d.norm();
    if (len <= budget) {
      p = r.path[i];
      budget -= len;
      heading = heading + d;
      ++i;
    } else {
      p = p + d * (budget / len);
      heading = heading + d * (budget / len);
      budget = 0.0;
    }
  }

  const Vec3 from = r.pose.position();
  const Vec3 to{p.x, p.y, r.pose.z};
  for (const Cell3 c : voxels_on_segment(world.grid(), from, to)) {
    if (!world.grid().contains(c) || world.occupied(c)) return 0.0;
  }
  if (!world.free_at(to)) return 0.0;

  const double moved = distance(from.xy(), p);
  r.pose.x = p.x;
  r.pose.y = p.y;
  Path rest{p};
  rest.insert(rest.end(), r.path.begin() + static_cast<std::ptrdiff_t>(i), r.path.end());
  r.path = std::move(rest);
  if (heading.norm() > 1e-9) {
    const double want = std::atan2(heading.y, heading.x);
    const double limit = cfg.yaw_rate * cfg.tick_dt;
    const double diff = std::clamp(wrap_angle(want - r.pose.yaw), -limit, limit);
    r.pose.yaw = wrap_angle(r.pose.yaw + diff);
  }
  r.travelled += moved;
  return moved;
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows) {
  out << "t,robot,x,y,z,yaw,mode,target_kind,target_x,target_y\n";
  char buf[192];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%.1f,%d,%.3f,%.3f,%.3f,%.4f,%s,%s,", row.t, row.robot,
                  row.pose.x, row.pose.y, row.pose.z, row.pose.yaw, to_string(row.mode),
                  to_string(row.target_kind));
    out << buf;
    if (row.target_kind != TargetKind::none) {
      std::snprintf(buf, sizeof buf, "%.3f,%.3f", row.target.x, row.target.y);
      out << buf;
    } else {
      out << ',';
    }
    out << '\n';
  }
}

Simulation::Simulation(const GroundTruthWorld& world, const std::vector<Pose>& spawns,
                       SimConfig cfg)
    : world_(&world),
      cfg_(std::move(cfg)),
      bus_(cfg_.bus, std::max(cfg_.robots, 0)),
      coverage_(world),
      log_(std::max(cfg_.robots, 0)) {
  validate(cfg_.explorer);
  validate(cfg_.sensors);
  if (cfg_.robots < 0) throw std::invalid_argument("robot count must be non-negative");
  if (static_cast<std::size_t>(cfg_.robots) > spawns.size()) {
    throw std::invalid_argument("scenario has " + std::to_string(spawns.size()) +
                                " spawn poses but " + std::to_string(cfg_.robots) +
                                " robots were requested");
  }
  if (!(cfg_.duration > 0.0)) throw std::invalid_argument("duration must be positive");
  total_ticks_ = std::max<std::int64_t>(1, std::llround(cfg_.duration / cfg_.explorer.tick_dt));

  const bool share = cfg_.share_map.value_or(cfg_.policy == Policy::frontier);
  auto shared = std::make_shared<KnownMap>(world.grid());
  for (int i = 0; i < cfg_.robots; ++i) {
    Agent a;
    a.robot.id = i;
    a.robot.pose = spawns[static_cast<std::size_t>(i)];
    if (!world.free_at(a.robot.pose.position())) {
      throw SimulationError("spawn " + std::to_string(i) + " is not in free space");
    }
    a.map = share ? shared : std::make_shared<KnownMap>(world.grid());
    a.observed = ObservedSet(world.grid().voxels());
    a.coord.eps_door = cfg_.explorer.eps_door;
    a.coord.eps_circle = cfg_.explorer.eps_circle;
    agents_.push_back(std::move(a));
  }
}

void Simulation::sense(Agent& a, double t) {
  const auto rays = lidar_scan(*world_, a.robot.pose, cfg_.sensors);
  integrate_scan(*a.map, rays);
  if (scan_dump_) write_scan_dump(*scan_dump_, t, a.robot.id, rays, world_->grid());
  const auto seen = camera_observe(*world_, a.robot.pose, cfg_.sensors, &a.observed);
  a.observed.insert(seen);
  coverage_.add(seen);
}

void Simulation::step() {
  if (done()) return;
  const double t = static_cast<double>(tick_) * cfg_.explorer.tick_dt;

  for (auto& a : agents_) {
    for (const auto& line : bus_.collect(tick_, a.robot.id)) {
      merge_message(a.coord, decode_message(line));
    }
  }
  for (auto& a : agents_) sense(a, t);
  for (auto& a : agents_) {
    if (cfg_.policy == Policy::mrmr) {
      mrmr_step(a, t, cfg_.explorer, &samples_);
    } else {
      frontier_step(a, t, cfg_.explorer);
    }
  }
  for (const auto& a : agents_) {
    trajectory_.push_back(
        {t, a.robot.id, a.robot.pose, a.robot.mode, a.robot.target_kind, a.robot.target});
  }
  for (auto& a : agents_) {
    move_along_path(a.robot, *world_, cfg_.explorer);
    if (!world_->free_at(a.robot.pose.position())) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "robot %d entered an occupied voxel at (%.3f, %.3f, %.3f)",
                    a.robot.id, a.robot.pose.x, a.robot.pose.y, a.robot.pose.z);
      throw SimulationError(buf);
    }
  }
  for (auto& a : agents_) {
    if (!a.publish) continue;
    bus_.post(tick_, a.robot.id, encode_message(make_message(a.coord, a.robot.id, a.robot.seq++)));
    a.publish = false;
  }

  MetricsRow row;
  row.t = t;
  row.room_voxels = coverage_.room_voxels();
  row.room_fraction = coverage_.fraction();
  row.rooms_visited = coverage_.rooms_visited(cfg_.room_threshold);
  for (const auto& a : agents_) {
    row.observed.push_back(static_cast<std::int64_t>(a.observed.size()));
    row.path_length.push_back(a.robot.travelled);
  }
  log_.append(std::move(row));
  ++tick_;
}

void Simulation::run() {
  while (!done()) step();
}

}  // namespace mrmr
