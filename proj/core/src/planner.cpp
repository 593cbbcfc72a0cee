#include "mrmr/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "mrmr/cues.hpp"
#include "mrmr/raycast.hpp"

namespace mrmr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};

struct QueueEntry {
  double f;
  std::uint64_t order;  // FIFO among equal f keeps expansion deterministic
  std::int32_t cell;
  bool operator>(const QueueEntry& o) const {
    return f != o.f ? f > o.f : order > o.order;
  }
};
using MinQueue = std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>>;

std::int32_t linear(const CostMap& m, Cell2 c) { return c.y * m.width() + c.x; }
Cell2 unlinear(const CostMap& m, std::int32_t i) { return {i % m.width(), i / m.width()}; }

Cell2 clamp_cell(const CostMap& m, Cell2 c) {
  return {std::clamp(c.x, 0, m.width() - 1), std::clamp(c.y, 0, m.height() - 1)};
}

// Can we step from c in direction k? The start cell is always leavable.
bool can_step(const CostMap& m, Cell2 c, int k) {
  const Cell2 n{c.x + kDx[k], c.y + kDy[k]};
  if (!m.contains(n) || m.blocked(n)) return false;
  if (k >= 4) {
    if (m.blocked({c.x + kDx[k], c.y}) || m.blocked({c.x, c.y + kDy[k]})) return false;
  }
  return true;
}

// Nearest passable cell to `goal` within `radius` meters, or nothing.
std::optional<Cell2> snap_goal(const CostMap& m, Cell2 goal, double radius) {
  if (m.contains(goal) && !m.blocked(goal)) return goal;
  const int r = static_cast<int>(std::ceil(radius / m.cell_size()));
  std::optional<Cell2> best;
  double best_d = kInf;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      const Cell2 c{goal.x + dx, goal.y + dy};
      if (!m.contains(c) || m.blocked(c)) continue;
      const double d = std::hypot(dx, dy) * m.cell_size();
      if (d <= radius + 1e-9 && d < best_d) {
        best = c;
        best_d = d;
      }
    }
  }
  return best;
}

}  // namespace

PlanarMap planar_map(const KnownMap& map, double z_low, double z_high) {
  const GridSpec& g = map.grid();
  PlanarMap out(g.nx, g.ny, g.cell_size, PlanarState::unknown);
  int k0 = std::max(0, static_cast<int>(std::ceil(z_low / g.cell_size - 0.5)));
  int k1 = std::min(g.nz - 1, static_cast<int>(std::floor(z_high / g.cell_size - 0.5)));
  if (k0 > k1) throw std::invalid_argument("planar band contains no voxel layer");
  const auto states = map.states();
  for (int y = 0; y < g.ny; ++y) {
    for (int x = 0; x < g.nx; ++x) {
      const std::size_t base = g.column_index({x, y}) * g.nz;
      bool any_free = false;
      bool any_occ = false;
      for (int z = k0; z <= k1; ++z) {
        const VoxelState s = states[base + z];
        any_free |= s == VoxelState::free;
        any_occ |= s == VoxelState::occupied;
      }
      out(x, y) = any_occ ? PlanarState::occupied
                          : (any_free ? PlanarState::free : PlanarState::unknown);
    }
  }
  return out;
}

CostMap::CostMap(const PlanarMap& map, const PlannerConfig& cfg)
    : mult_(map.width(), map.height(), map.cell_size(), 1.0),
      inflated_(map.width(), map.height(), map.cell_size(), 0) {
  BinaryMap occ(map.width(), map.height(), map.cell_size(), 0);
  bool any = false;
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (map(x, y) == PlanarState::occupied) {
        occ(x, y) = 1;
        any = true;
      }
    }
  }
  DistanceField dist;
  if (any) dist = distance_transform(occ);
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      const PlanarState s = map(x, y);
      if (s == PlanarState::occupied) {
        mult_(x, y) = 0.0;
        continue;
      }
      double m = s == PlanarState::unknown ? cfg.unknown_cost : 1.0;
      if (any && dist(x, y) < cfg.robot_radius) {
        inflated_(x, y) = 1;
        m *= cfg.inflated_cost;
      }
      mult_(x, y) = m;
    }
  }
}

double path_length(const Path& p) {
  double len = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) len += distance(p[i - 1], p[i]);
  return len;
}

Path shortcut(const CostMap& costs, const Path& path) {
  if (path.size() <= 2) return path;
  const double cs = costs.cell_size();
  auto cell_of = [cs](Vec2 p) {
    return Cell2{static_cast<int>(std::floor(p.x / cs)), static_cast<int>(std::floor(p.y / cs))};
  };
  // A shortcut may not cross cells dearer than the stretch it replaces, so
  // straightening never drags a free-space detour back through unknown space.
  std::vector<double> mult(path.size(), 1.0);
  for (std::size_t k = 0; k < path.size(); ++k) {
    const Cell2 c = cell_of(path[k]);
    if (costs.contains(c)) mult[k] = costs.multiplier(c);
  }
  auto visible = [&](std::size_t i, std::size_t j) {
    const double limit = *std::max_element(mult.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                                           mult.begin() + static_cast<std::ptrdiff_t>(j) + 1);
    // The segment's own start cell may be inflated; leaving it is allowed.
    const Cell2 first = cell_of(path[i]);
    for (const Cell2 c : cells_on_segment(costs.width(), costs.height(), cs, path[i], path[j])) {
      if (c == first) continue;
      if (!costs.clear(c) || costs.multiplier(c) > limit) return false;
    }
    return true;
  };
  Path out{path.front()};
  std::size_t i = 0;
  while (i + 1 < path.size()) {
    std::size_t j = path.size() - 1;
    while (j > i + 1 && !visible(i, j)) --j;
    out.push_back(path[j]);
    i = j;
  }
  return out;
}

std::optional<Path> plan_path(const CostMap& costs, Vec2 start, Vec2 goal,
                              const PlannerConfig& cfg) {
  const double cs = costs.cell_size();
  const Cell2 s = clamp_cell(costs, {static_cast<int>(std::floor(start.x / cs)),
                                      static_cast<int>(std::floor(start.y / cs))});
  const Cell2 graw{static_cast<int>(std::floor(goal.x / cs)),
                   static_cast<int>(std::floor(goal.y / cs))};
  const auto g = snap_goal(costs, graw, cfg.goal_snap);
  if (!g) return std::nullopt;
  const Vec2 goal_pt = (*g == graw) ? goal : Vec2{(g->x + 0.5) * cs, (g->y + 0.5) * cs};
  if (*g == s) return Path{start, goal_pt};

  const std::size_t n = static_cast<std::size_t>(costs.width()) * costs.height();
  std::vector<double> gcost(n, kInf);
  std::vector<std::int32_t> parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);
  auto h = [&](Cell2 c) {
    const double dx = std::abs(c.x - g->x);
    const double dy = std::abs(c.y - g->y);
    return cs * (std::max(dx, dy) + (std::sqrt(2.0) - 1.0) * std::min(dx, dy));
  };
  MinQueue open;
  std::uint64_t order = 0;
  const std::int32_t si = linear(costs, s);
  const std::int32_t gi = linear(costs, *g);
  gcost[si] = 0.0;
  open.push({h(s), order++, si});
  while (!open.empty()) {
    const QueueEntry e = open.top();
    open.pop();
    if (closed[e.cell]) continue;
    closed[e.cell] = 1;
    if (e.cell == gi) break;
    const Cell2 c = unlinear(costs, e.cell);
    for (int k = 0; k < 8; ++k) {
      if (!can_step(costs, c, k)) continue;
      const Cell2 nb{c.x + kDx[k], c.y + kDy[k]};
      const std::int32_t ni = linear(costs, nb);
      if (closed[ni]) continue;
      const double step = (k < 4 ? 1.0 : std::sqrt(2.0)) * cs * costs.multiplier(nb);
      const double ng = gcost[e.cell] + step;
      if (ng < gcost[ni]) {
        gcost[ni] = ng;
        parent[ni] = e.cell;
        open.push({ng + h(nb), order++, ni});
      }
    }
  }
  if (!closed[gi]) return std::nullopt;

  Path raw;
  for (std::int32_t i = gi; i != -1; i = parent[i]) {
    const Cell2 c = unlinear(costs, i);
    raw.push_back({(c.x + 0.5) * cs, (c.y + 0.5) * cs});
  }
  std::reverse(raw.begin(), raw.end());
  raw.front() = start;
  raw.back() = goal_pt;
  return shortcut(costs, raw);
}

std::optional<Path> plan_path(const KnownMap& map, Vec2 start, Vec2 goal, double z_low,
                              double z_high, const PlannerConfig& cfg) {
  const PlanarMap planar = planar_map(map, z_low, z_high);
  const CostMap costs(planar, cfg);
  return plan_path(costs, start, goal, cfg);
}

CostField dijkstra(const CostMap& costs, Vec2 start) {
  const double cs = costs.cell_size();
  CostField out{Grid2<double>(costs.width(), costs.height(), cs, kInf),
                Grid2<std::int32_t>(costs.width(), costs.height(), cs, -1)};
  const Cell2 s = clamp_cell(costs, {static_cast<int>(std::floor(start.x / cs)),
                                      static_cast<int>(std::floor(start.y / cs))});
  auto cost = out.cost.data();
  auto parent = out.parent.data();
  std::vector<std::uint8_t> closed(cost.size(), 0);
  MinQueue open;
  std::uint64_t order = 0;
  const std::int32_t si = linear(costs, s);
  cost[si] = 0.0;
  open.push({0.0, order++, si});
  while (!open.empty()) {
    const QueueEntry e = open.top();
    open.pop();
    if (closed[e.cell]) continue;
    closed[e.cell] = 1;
    const Cell2 c = unlinear(costs, e.cell);
    for (int k = 0; k < 8; ++k) {
      if (!can_step(costs, c, k)) continue;
      const Cell2 nb{c.x + kDx[k], c.y + kDy[k]};
      const std::int32_t ni = linear(costs, nb);
      if (closed[ni]) continue;
      const double ng = cost[e.cell] + (k < 4 ? 1.0 : std::sqrt(2.0)) * cs * costs.multiplier(nb);
      if (ng < cost[ni]) {
        cost[ni] = ng;
        parent[ni] = e.cell;
        open.push({ng, order++, ni});
      }
    }
  }
  return out;
}

std::optional<Path> extract_path(const CostMap& costs, const CostField& field, Vec2 start,
                                 Cell2 goal) {
  if (!costs.contains(goal) || !std::isfinite(field.cost[goal])) return std::nullopt;
  const double cs = costs.cell_size();
  Path raw;
  const auto parent = field.parent.data();
  for (std::int32_t i = linear(costs, goal); i != -1; i = parent[i]) {
    const Cell2 c = unlinear(costs, i);
    raw.push_back({(c.x + 0.5) * cs, (c.y + 0.5) * cs});
  }
  std::reverse(raw.begin(), raw.end());
  if (raw.size() == 1) return Path{start, raw.front()};
  raw.front() = start;
  return shortcut(costs, raw);
}

}  // namespace mrmr
