#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mrmr/geometry.hpp"
#include "mrmr/grid.hpp"
#include "mrmr/world.hpp"

namespace mrmr {

enum class VoxelState : std::uint8_t { unknown = 0, free = 1, occupied = 2 };

// A robot's accumulated occupancy knowledge. Known voxels never revert.
class KnownMap {
 public:
  KnownMap() = default;
  explicit KnownMap(const GridSpec& g) : grid_(g), state_(g.voxels(), VoxelState::unknown) {}

  const GridSpec& grid() const { return grid_; }
  VoxelState state(Cell3 c) const { return state_[grid_.index(c)]; }
  VoxelState state_index(std::size_t i) const { return state_[i]; }

  // Only unknown voxels change; returns true if the voxel changed.
  bool mark(Cell3 c, VoxelState s) {
    auto& v = state_[grid_.index(c)];
    if (v != VoxelState::unknown || s == VoxelState::unknown) return false;
    v = s;
    return true;
  }

  std::size_t count(VoxelState s) const;
  std::span<const VoxelState> states() const { return state_; }

  friend bool operator==(const KnownMap&, const KnownMap&) = default;

 private:
  GridSpec grid_;
  std::vector<VoxelState> state_;
};

struct SensorConfig {
  double camera_range = 5.0;
  double camera_fov = 170.0 * std::numbers::pi / 180.0;
  double lidar_range = 15.0;
  int rays_per_scan = 360;  // azimuth samples per elevation ring
  std::vector<double> elevations = {-0.2618, -0.1309, 0.0, 0.1309, 0.2618};

  double angular_resolution() const { return 2.0 * std::numbers::pi / rays_per_scan; }
};

// Throws std::invalid_argument when a field is out of range.
void validate(const SensorConfig& cfg);

struct ScanRay {
  double azimuth = 0.0;
  double elevation = 0.0;
  Vec3 origin;
  Vec3 direction;  // unit
  double max_range = 0.0;
  std::optional<Cell3> hit;
  double range = 0.0;  // distance travelled before the hit cell or the end of the ray
};

// One sweep: elevation rings in configured order, azimuth k * resolution.
std::vector<ScanRay> lidar_scan(const GroundTruthWorld& world, const Pose& pose,
                                const SensorConfig& cfg);

// Marks voxels traversed before each hit free and the hit voxel occupied.
// Returns the number of voxels whose state changed.
std::size_t integrate_scan(KnownMap& map, std::span<const ScanRay> rays);

// Writes `t,robot,ray_azimuth,hit_x,hit_y,hit_z` (or `...,MISS`) per ray.
void write_scan_dump(std::ostream& out, double t, int robot, std::span<const ScanRay> rays,
                     const GridSpec& g);

// Per-robot set of observed occupied voxels; grows monotonically.
class ObservedSet {
 public:
  ObservedSet() = default;
  explicit ObservedSet(std::size_t voxels) : bits_(voxels, 0) {}

  bool contains(std::size_t idx) const { return bits_[idx] != 0; }
  bool insert(std::size_t idx) {
    if (bits_[idx]) return false;
    bits_[idx] = 1;
    ++count_;
    return true;
  }
  std::size_t insert(std::span<const std::size_t> idxs) {
    std::size_t added = 0;
    for (auto i : idxs) added += insert(i) ? 1 : 0;
    return added;
  }
  std::size_t size() const { return count_; }
  std::size_t capacity() const { return bits_.size(); }
  std::vector<std::size_t> indices() const;

 private:
  std::vector<std::uint8_t> bits_;
  std::size_t count_ = 0;
};

// Line of sight from `from` to the center of `target`: true when the
// traversal reaches the target without crossing another occupied voxel.
bool line_of_sight(const GroundTruthWorld& world, Vec3 from, Cell3 target);

// Ground-truth occupied voxels inside the camera fan (range, horizontal FOV
// about the yaw, full vertical extent) with clear line of sight. Voxels
// already in `skip` are not re-tested or returned.
std::vector<std::size_t> camera_observe(const GroundTruthWorld& world, const Pose& pose,
                                        const SensorConfig& cfg,
                                        const ObservedSet* skip = nullptr);

}  // namespace mrmr
