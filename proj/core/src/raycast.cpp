#include "mrmr/raycast.hpp"

namespace mrmr {

std::vector<Cell2> cells_on_segment(int width, int height, double cell_size, Vec2 a, Vec2 b) {
  std::vector<Cell2> out;
  traverse_cells(width, height, cell_size, a, b - a, 1.0, [&](Cell2 c, double) {
    out.push_back(c);
    return true;
  });
  return out;
}

std::vector<Cell3> voxels_on_segment(const GridSpec& g, Vec3 a, Vec3 b) {
  std::vector<Cell3> out;
  traverse_voxels(g, a, b - a, 1.0, [&](Cell3 c, double) {
    out.push_back(c);
    return true;
  });
  return out;
}

}  // namespace mrmr
