#include "mrmr/perception.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "mrmr/raycast.hpp"

namespace mrmr {

std::size_t KnownMap::count(VoxelState s) const {
  return static_cast<std::size_t>(std::count(state_.begin(), state_.end(), s));
}

void validate(const SensorConfig& cfg) {
  if (!(cfg.camera_range > 0.0)) throw std::invalid_argument("camera_range must be positive");
  if (!(cfg.camera_fov > 0.0 && cfg.camera_fov < 2.0 * std::numbers::pi)) {
    throw std::invalid_argument("camera_fov must lie in (0, 2*pi)");
  }
  if (!(cfg.lidar_range > 0.0)) throw std::invalid_argument("lidar_range must be positive");
  if (cfg.rays_per_scan <= 0) throw std::invalid_argument("rays_per_scan must be positive");
}

std::vector<ScanRay> lidar_scan(const GroundTruthWorld& world, const Pose& pose,
                                const SensorConfig& cfg) {
  const GridSpec& g = world.grid();
  std::vector<ScanRay> rays;
  rays.reserve(cfg.elevations.size() * static_cast<std::size_t>(cfg.rays_per_scan));
  const double res = cfg.angular_resolution();
  const Vec3 origin = pose.position();
  for (double el : cfg.elevations) {
    const double ce = std::cos(el);
    const double se = std::sin(el);
    for (int k = 0; k < cfg.rays_per_scan; ++k) {
      ScanRay ray;
      ray.azimuth = k * res;
      ray.elevation = el;
      ray.origin = origin;
      ray.direction = {ce * std::cos(ray.azimuth), ce * std::sin(ray.azimuth), se};
      ray.max_range = cfg.lidar_range;
      ray.range = cfg.lidar_range;
      traverse_voxels(g, origin, ray.direction, cfg.lidar_range, [&](Cell3 c, double t) {
        if (world.occupied(c)) {
          ray.hit = c;
          ray.range = t;
          return false;
        }
        ray.range = t;
        return true;
      });
      if (!ray.hit) {
        // Leaving the world counts as a miss at the exit distance.
        ray.range = std::min(ray.range, cfg.lidar_range);
      }
      rays.push_back(ray);
    }
  }
  return rays;
}

std::size_t integrate_scan(KnownMap& map, std::span<const ScanRay> rays) {
  std::size_t changed = 0;
  const GridSpec& g = map.grid();
  for (const ScanRay& ray : rays) {
    traverse_voxels(g, ray.origin, ray.direction, ray.max_range, [&](Cell3 c, double) {
      if (ray.hit && c == *ray.hit) {
        changed += map.mark(c, VoxelState::occupied) ? 1 : 0;
        return false;
      }
      changed += map.mark(c, VoxelState::free) ? 1 : 0;
      return true;
    });
  }
  return changed;
}

void write_scan_dump(std::ostream& out, double t, int robot, std::span<const ScanRay> rays,
                     const GridSpec& g) {
  char buf[160];
  for (const ScanRay& ray : rays) {
    if (ray.hit) {
      const Vec3 p = g.center(*ray.hit);
      std::snprintf(buf, sizeof buf, "%.1f,%d,%.4f,%.3f,%.3f,%.3f\n", t, robot, ray.azimuth, p.x,
                    p.y, p.z);
    } else {
      std::snprintf(buf, sizeof buf, "%.1f,%d,%.4f,MISS\n", t, robot, ray.azimuth);
    }
    out << buf;
  }
}

std::vector<std::size_t> ObservedSet::indices() const {
  std::vector<std::size_t> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) out.push_back(i);
  }
  return out;
}

bool line_of_sight(const GroundTruthWorld& world, Vec3 from, Cell3 target) {
  const GridSpec& g = world.grid();
  const Vec3 to = g.center(target);
  bool visible = false;
  traverse_voxels(g, from, to - from, 1.0, [&](Cell3 c, double) {
    if (c == target) {
      visible = true;
      return false;
    }
    return !world.occupied(c);
  });
  return visible;
}

std::vector<std::size_t> camera_observe(const GroundTruthWorld& world, const Pose& pose,
                                        const SensorConfig& cfg, const ObservedSet* skip) {
  const GridSpec& g = world.grid();
  const Vec3 eye = pose.position();
  const double range = cfg.camera_range;
  const double half_fov = 0.5 * cfg.camera_fov;
  const double cos_half = std::cos(half_fov);
  const Vec2 heading{std::cos(pose.yaw), std::sin(pose.yaw)};

  const int x0 = std::max(0, g.to_index(eye.x - range));
  const int x1 = std::min(g.nx - 1, g.to_index(eye.x + range));
  const int y0 = std::max(0, g.to_index(eye.y - range));
  const int y1 = std::min(g.ny - 1, g.to_index(eye.y + range));

  std::vector<std::size_t> out;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const Vec2 c = g.center(Cell2{x, y});
      const Vec2 d = c - eye.xy();
      const double hd = d.norm();
      if (hd > range) continue;
      if (hd > 1e-9 && d.dot(heading) < cos_half * hd) continue;
      for (int z = 0; z < g.nz; ++z) {
        const Cell3 cell{x, y, z};
        const std::size_t idx = g.index(cell);
        if (!world.exposed(idx)) continue;
        if (skip && skip->contains(idx)) continue;
        const double dz = g.center(z) - eye.z;
        if (hd * hd + dz * dz > range * range) continue;
        if (line_of_sight(world, eye, cell)) out.push_back(idx);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace mrmr
