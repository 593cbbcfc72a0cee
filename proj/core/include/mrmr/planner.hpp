#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mrmr/geometry.hpp"
#include "mrmr/grid.hpp"
#include "mrmr/perception.hpp"

namespace mrmr {

enum class PlanarState : std::uint8_t { unknown = 0, free = 1, occupied = 2 };
using PlanarMap = Grid2<PlanarState>;

// Collapses the z band [z_low, z_high] of a known map: occupied if any voxel
// in the band is occupied, free if any is free, unknown otherwise.
PlanarMap planar_map(const KnownMap& map, double z_low, double z_high);

struct PlannerConfig {
  double robot_radius = 0.45;
  double unknown_cost = 2.0;   // multiplier for stepping into unknown cells
  double inflated_cost = 10.0; // multiplier for cells closer than robot_radius to a wall
  double goal_snap = 0.5;      // occupied goals move to a traversable cell within this radius
};

// Traversal costs derived from a planar map. Occupied cells are impassable;
// cells within robot_radius of an occupied cell are passable at a penalty so
// a robot that finds itself near a fresh wall can still leave.
class CostMap {
 public:
  CostMap(const PlanarMap& map, const PlannerConfig& cfg);

  int width() const { return mult_.width(); }
  int height() const { return mult_.height(); }
  double cell_size() const { return mult_.cell_size(); }
  bool contains(Cell2 c) const { return mult_.contains(c); }
  bool blocked(Cell2 c) const { return mult_[c] <= 0.0; }
  // 0 for blocked cells.
  double multiplier(Cell2 c) const { return mult_[c]; }
  // Free of walls and inflation (unknown allowed).
  bool clear(Cell2 c) const { return mult_[c] > 0.0 && !inflated_[c]; }

 private:
  Grid2<double> mult_;
  Grid2<std::uint8_t> inflated_;
};

using Path = std::vector<Vec2>;

double path_length(const Path& p);

// A* over 8-connected cells, no corner cutting, octile heuristic. The result
// starts at `start`, ends at the goal and is shortened by line-of-sight
// shortcuts over clear cells. Returns nothing if the goal is unreachable.
std::optional<Path> plan_path(const CostMap& costs, Vec2 start, Vec2 goal,
                              const PlannerConfig& cfg = {});
std::optional<Path> plan_path(const KnownMap& map, Vec2 start, Vec2 goal, double z_low,
                              double z_high, const PlannerConfig& cfg = {});

// Single-source costs (meters, weighted) to every cell; infinity if unreachable.
struct CostField {
  Grid2<double> cost;
  Grid2<std::int32_t> parent;  // linear index of the predecessor, -1 at the source
};
CostField dijkstra(const CostMap& costs, Vec2 start);

// Walks parents back from `goal` and shortcuts the result like plan_path.
std::optional<Path> extract_path(const CostMap& costs, const CostField& field, Vec2 start,
                                 Cell2 goal);

// Greedy line-of-sight simplification; keeps first and last points.
Path shortcut(const CostMap& costs, const Path& path);

}  // namespace mrmr
