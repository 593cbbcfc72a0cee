#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mrmr/geometry.hpp"
#include "mrmr/grid.hpp"

namespace mrmr {

// Raised for malformed scenario documents (kind == parse) and for documents
// that parse but violate a scenario invariant (kind == validation).
class ScenarioError : public std::runtime_error {
 public:
  enum class Kind { parse, validation };
  ScenarioError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// A wall is a rectangle swept along start->end with square end caps of half
// its thickness, extruded from `base` up to `base + height`.
struct WallSegment {
  Vec2 start;
  Vec2 end;
  double thickness = 0.2;
  double height = 0.0;  // <= 0 means full world height
  double base = 0.0;
};

// Oriented furniture box.
struct BoxObstacle {
  Vec2 center;
  Vec2 size;
  double yaw = 0.0;
  double z_min = 0.0;
  double z_max = 1.0;
};

struct RoomPolygon {
  int id = 0;
  std::vector<Vec2> polygon;
};

struct Scenario {
  std::string name;
  double cell_size = 0.2;
  Vec3 extents;
  std::vector<WallSegment> walls;
  std::vector<BoxObstacle> obstacles;
  std::vector<RoomPolygon> rooms;  // sorted by id, ids are 1..K
  std::vector<Pose> spawns;
  double duration = 120.0;
  // Labeled door centers; optional, used only for detection scoring.
  std::vector<Vec2> doors;

  int room_count() const { return static_cast<int>(rooms.size()); }
};

// Parses and validates a scenario document (JSON syntax).
Scenario load_scenario(std::string_view text);
Scenario load_scenario_file(const std::string& path);

// Canonical text form: fixed key order, two-decimal numbers.
std::string serialize_scenario(const Scenario& s);

// Throws ScenarioError(validation) naming the first violated invariant.
void validate_scenario(const Scenario& s);

// Even-odd point-in-polygon test with half-open edge handling.
bool point_in_polygon(Vec2 p, const std::vector<Vec2>& poly);

// Rasterized, immutable ground truth.
class GroundTruthWorld {
 public:
  const GridSpec& grid() const { return grid_; }
  int room_count() const { return room_count_; }

  bool occupied(Cell3 c) const { return occupancy_[grid_.index(c)] != 0; }
  bool occupied_index(std::size_t idx) const { return occupancy_[idx] != 0; }
  // Points outside the world are treated as blocked.
  bool free_at(Vec3 p) const {
    const Cell3 c = grid_.cell_of(p);
    return grid_.contains(c) && !occupied(c);
  }
  // Occupied and adjacent (26-neighborhood) to at least one in-bounds free voxel.
  bool exposed(std::size_t idx) const { return exposed_[idx] != 0; }

  bool wall_column(Cell2 c) const { return wall_column_[grid_.column_index(c)] != 0; }
  // 0 when the column belongs to no room.
  int room_label(Cell2 c) const { return room_label_[grid_.column_index(c)]; }
  // 0 when the voxel is not a room voxel.
  int room_of_voxel(std::size_t idx) const { return room_of_voxel_[idx]; }

  std::int64_t room_voxel_count(int room_id) const;
  std::int64_t total_room_voxels() const;
  std::int64_t occupied_voxel_count() const { return occupied_count_; }
  std::int64_t free_voxel_count() const {
    return static_cast<std::int64_t>(grid_.voxels()) - occupied_count_;
  }

  std::span<const std::uint8_t> occupancy() const { return occupancy_; }
  const std::vector<Vec2>& doors() const { return doors_; }

 private:
  friend GroundTruthWorld rasterize(const Scenario& s);

  GridSpec grid_;
  int room_count_ = 0;
  std::vector<std::uint8_t> occupancy_;
  std::vector<std::uint8_t> exposed_;
  std::vector<std::uint8_t> wall_column_;
  std::vector<std::int16_t> room_label_;
  std::vector<std::int16_t> room_of_voxel_;
  std::vector<std::int64_t> room_voxel_counts_;
  std::int64_t occupied_count_ = 0;
  std::vector<Vec2> doors_;
};

GroundTruthWorld rasterize(const Scenario& s);

// Voxel indices of room j (1-based), ascending. Room voxels are the occupied
// surfaces that bound the room: obstacle voxels inside its columns plus the
// wall voxels of columns touching it. Throws std::out_of_range for unknown j.
std::vector<std::size_t> room_voxels(const GroundTruthWorld& w, int room_id);

}  // namespace mrmr
