#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "mrmr/geometry.hpp"
#include "mrmr/grid.hpp"

namespace mrmr {

// Incremental grid traversal: visits each cell the segment
// origin + t*dir, t in [0, max_t], passes through, in order, once.
// `dir` need not be normalized; t is measured in units of |dir|.
// The visitor receives (cell, t_enter) and returns false to stop early.
// Ties between axes step x before y before z, so traversal is deterministic.
// Traversal ends when the ray leaves the grid.
template <typename Visitor>
void traverse_voxels(const GridSpec& g, Vec3 origin, Vec3 dir, double max_t, Visitor&& visit) {
  const double cs = g.cell_size;
  Cell3 c = g.cell_of(origin);
  if (!g.contains(c)) return;
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double o[3] = {origin.x, origin.y, origin.z};
  const double d[3] = {dir.x, dir.y, dir.z};
  int idx[3] = {c.x, c.y, c.z};
  const int lim[3] = {g.nx, g.ny, g.nz};
  int step[3];
  double t_max[3];
  double t_delta[3];
  for (int a = 0; a < 3; ++a) {
    if (d[a] > 0.0) {
      step[a] = 1;
      t_max[a] = ((idx[a] + 1) * cs - o[a]) / d[a];
      t_delta[a] = cs / d[a];
    } else if (d[a] < 0.0) {
      step[a] = -1;
      t_max[a] = (idx[a] * cs - o[a]) / d[a];
      t_delta[a] = -cs / d[a];
    } else {
      step[a] = 0;
      t_max[a] = inf;
      t_delta[a] = inf;
    }
  }
  double t = 0.0;
  while (true) {
    if (!visit(Cell3{idx[0], idx[1], idx[2]}, t)) return;
    int axis = 0;
    if (t_max[1] < t_max[axis]) axis = 1;
    if (t_max[2] < t_max[axis]) axis = 2;
    t = t_max[axis];
    if (t > max_t) return;
    idx[axis] += step[axis];
    if (idx[axis] < 0 || idx[axis] >= lim[axis]) return;
    t_max[axis] += t_delta[axis];
  }
}

// 2D counterpart over a width x height lattice of square cells.
template <typename Visitor>
void traverse_cells(int width, int height, double cs, Vec2 origin, Vec2 dir, double max_t,
                    Visitor&& visit) {
  int ix = static_cast<int>(std::floor(origin.x / cs));
  int iy = static_cast<int>(std::floor(origin.y / cs));
  if (ix < 0 || iy < 0 || ix >= width || iy >= height) return;
  constexpr double inf = std::numeric_limits<double>::infinity();
  auto setup = [&](double o, double d, int i, int& step, double& tm, double& td) {
    if (d > 0.0) {
      step = 1;
      tm = ((i + 1) * cs - o) / d;
      td = cs / d;
    } else if (d < 0.0) {
      step = -1;
      tm = (i * cs - o) / d;
      td = -cs / d;
    } else {
      step = 0;
      tm = inf;
      td = inf;
    }
  };
  int sx, sy;
  double tmx, tmy, tdx, tdy;
  setup(origin.x, dir.x, ix, sx, tmx, tdx);
  setup(origin.y, dir.y, iy, sy, tmy, tdy);
  double t = 0.0;
  while (true) {
    if (!visit(Cell2{ix, iy}, t)) return;
    if (tmy < tmx) {
      t = tmy;
      if (t > max_t) return;
      iy += sy;
      if (iy < 0 || iy >= height) return;
      tmy += tdy;
    } else {
      t = tmx;
      if (t > max_t) return;
      ix += sx;
      if (ix < 0 || ix >= width) return;
      tmx += tdx;
    }
  }
}

// All cells crossed by the segment a->b (inclusive of both end cells).
std::vector<Cell2> cells_on_segment(int width, int height, double cell_size, Vec2 a, Vec2 b);
std::vector<Cell3> voxels_on_segment(const GridSpec& g, Vec3 a, Vec3 b);

}  // namespace mrmr
