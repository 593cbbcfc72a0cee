#include "support.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mrmr::testing {

std::string scenario_path(const std::string& file) { return std::string(MRMR_SCENARIO_DIR) + "/" + file; }
std::string golden_path(const std::string& file) { return std::string(MRMR_GOLDEN_DIR) + "/" + file; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "mrmr-tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

Scenario closed_room(double side, double wall) {
  Scenario s;
  s.name = "closed-room";
  const double ext = side + 2 * wall;
  s.extents = {ext, ext, 2.0};
  const double h = wall / 2;
  s.walls = {
      {{h, h}, {ext - h, h}, wall},
      {{h, ext - h}, {ext - h, ext - h}, wall},
      {{h, h}, {h, ext - h}, wall},
      {{ext - h, h}, {ext - h, ext - h}, wall},
  };
  s.rooms = {{1, {{wall, wall}, {wall + side, wall}, {wall + side, wall + side}, {wall, wall + side}}}};
  s.spawns = {{ext / 2 + 0.1, ext / 2 + 0.1, 1.0, 0.0}};
  validate_scenario(s);
  return s;
}

BinaryMap two_rooms_map(Vec2* door_center) {
  // 1 + 20 + 1 + 20 + 1 cells across, 1 + 20 + 1 down.
  BinaryMap b(43, 22, 0.2, 0);
  for (int x = 0; x < b.width(); ++x) {
    b(x, 0) = 1;
    b(x, b.height() - 1) = 1;
  }
  for (int y = 0; y < b.height(); ++y) {
    b(0, y) = 1;
    b(21, y) = 1;
    b(42, y) = 1;
  }
  // Door rows 9..13 (five cells, 1.0 m) centered on the interior.
  for (int y = 9; y <= 13; ++y) b(21, y) = 0;
  if (door_center) *door_center = b.center({21, 11});
  return b;
}

Scenario two_rooms_scenario() {
  Scenario s;
  s.name = "two-rooms";
  // Interior x: [0.4, 4.4] and [4.8, 8.8]; y: [0.4, 4.4].
  s.extents = {9.2, 4.8, 2.4};
  s.walls = {
      {{0.2, 0.2}, {9.0, 0.2}, 0.4},
      {{0.2, 4.6}, {9.0, 4.6}, 0.4},
      {{0.2, 0.2}, {0.2, 4.6}, 0.4},
      {{9.0, 0.2}, {9.0, 4.6}, 0.4},
      {{4.6, 0.2}, {4.6, 1.8}, 0.4},  // door gap y in [2.0, 3.0]
      {{4.6, 3.2}, {4.6, 4.6}, 0.4},
  };
  s.rooms = {{1, {{0.4, 0.4}, {4.4, 0.4}, {4.4, 4.4}, {0.4, 4.4}}},
             {2, {{4.8, 0.4}, {8.8, 0.4}, {8.8, 4.4}, {4.8, 4.4}}}};
  s.spawns = {{1.5, 2.3, 1.0, 0.0}, {1.5, 1.5, 1.0, 0.0}, {1.5, 3.1, 1.0, 0.0}};
  s.doors = {{4.6, 2.5}};
  s.duration = 60.0;
  validate_scenario(s);
  return s;
}

KnownMap fully_known(const GroundTruthWorld& w) {
  KnownMap k(w.grid());
  for (std::size_t i = 0; i < w.grid().voxels(); ++i) {
    k.mark(w.grid().cell_of_index(i), w.occupied_index(i) ? VoxelState::occupied : VoxelState::free);
  }
  return k;
}

BinaryMap box_map(int inner_w, int inner_h, double cell) {
  BinaryMap b(inner_w + 2, inner_h + 2, cell, 0);
  for (int x = 0; x < b.width(); ++x) {
    b(x, 0) = 1;
    b(x, b.height() - 1) = 1;
  }
  for (int y = 0; y < b.height(); ++y) {
    b(0, y) = 1;
    b(b.width() - 1, y) = 1;
  }
  return b;
}

BinaryMap random_map(std::mt19937_64& rng, int w, int h, double p_occupied) {
  std::bernoulli_distribution occ(p_occupied);
  BinaryMap b(w, h, 0.2, 0);
  for (auto& v : b.data()) v = occ(rng) ? 1 : 0;
  return b;
}

DistanceField brute_force_distance(const BinaryMap& b) {
  const double cs = b.cell_size();
  std::vector<Cell2> occupied;
  for (int y = 0; y < b.height(); ++y) {
    for (int x = 0; x < b.width(); ++x) {
      if (b(x, y)) occupied.push_back({x, y});
    }
  }
  const double diag = cs * std::hypot(double(b.width()), double(b.height()));
  DistanceField m(b.width(), b.height(), cs, diag);
  if (occupied.empty()) return m;
  for (int y = 0; y < b.height(); ++y) {
    for (int x = 0; x < b.width(); ++x) {
      long best = std::numeric_limits<long>::max();
      for (Cell2 o : occupied) {
        const long dx = x - o.x, dy = y - o.y;
        best = std::min(best, dx * dx + dy * dy);
      }
      m(x, y) = cs * std::sqrt(double(best));
    }
  }
  return m;
}

std::vector<Cell2> brute_force_saddles(const BinaryMap& b, const DistanceField& m) {
  static const Cell2 axes[4] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
  std::vector<Cell2> out;
  for (int y = 1; y + 1 < m.height(); ++y) {
    for (int x = 1; x + 1 < m.width(); ++x) {
      if (b(x, y)) continue;
      const double v = m(x, y);
      for (int k = 0; k < 4; ++k) {
        const Cell2 a = axes[k];
        const Cell2 p = axes[(k + 2) % 4];
        const bool max_a = v > m(x + a.x, y + a.y) && v > m(x - a.x, y - a.y);
        const bool min_p = v < m(x + p.x, y + p.y) && v < m(x - p.x, y - p.y);
        if (max_a && min_p) {
          out.push_back({x, y});
          break;
        }
      }
    }
  }
  return out;
}

}  // namespace mrmr::testing
