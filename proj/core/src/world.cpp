#include "mrmr/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mrmr {
namespace {

using nlohmann::json;

constexpr double kBoundaryEps = 1e-9;

[[noreturn]] void parse_fail(const std::string& field, const std::string& msg) {
  throw ScenarioError(ScenarioError::Kind::parse, field + ": " + msg);
}

[[noreturn]] void invalid(const std::string& msg) {
  throw ScenarioError(ScenarioError::Kind::validation, msg);
}

double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) parse_fail(field, "expected number");
  return j.get<double>();
}

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) parse_fail(path + key, "missing field");
  return *it;
}

std::vector<double> get_numbers(const json& j, const std::string& field, std::size_t min_n,
                                std::size_t max_n) {
  if (!j.is_array()) parse_fail(field, "expected array");
  if (j.size() < min_n || j.size() > max_n) {
    parse_fail(field, "expected " + std::to_string(min_n) +
                          (min_n == max_n ? "" : "-" + std::to_string(max_n)) + " numbers, got " +
                          std::to_string(j.size()));
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(get_number(j[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Vec2 get_vec2(const json& j, const std::string& field) {
  auto v = get_numbers(j, field, 2, 2);
  return {v[0], v[1]};
}

const json& get_array(const json& obj, const char* key, bool required) {
  static const json empty = json::array();
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) parse_fail(key, "missing field");
    return empty;
  }
  if (!it->is_array()) parse_fail(key, "expected array");
  return *it;
}

int line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + offset, '\n'));
}

// Oriented box in the plane with a z slab; membership is half-open so that
// boxes aligned with cell boundaries cover exactly size / cell_size cells.
struct SolidBox {
  Vec2 center;
  Vec2 axis_u;
  Vec2 axis_v;
  double half_u = 0.0;
  double half_v = 0.0;
  double z_min = 0.0;
  double z_max = 0.0;

  bool contains(Vec3 p) const {
    const Vec2 d = p.xy() - center;
    const double a = d.dot(axis_u);
    const double b = d.dot(axis_v);
    return a >= -half_u - kBoundaryEps && a < half_u - kBoundaryEps &&
           b >= -half_v - kBoundaryEps && b < half_v - kBoundaryEps &&
           p.z >= z_min - kBoundaryEps && p.z < z_max - kBoundaryEps;
  }
  double radius() const { return std::hypot(half_u, half_v); }
};

SolidBox wall_box(const WallSegment& w, double world_height) {
  const Vec2 d = w.end - w.start;
  const double len = d.norm();
  SolidBox b;
  b.center = (w.start + w.end) * 0.5;
  b.axis_u = d * (1.0 / len);
  b.axis_v = {-b.axis_u.y, b.axis_u.x};
  b.half_u = 0.5 * len + 0.5 * w.thickness;
  b.half_v = 0.5 * w.thickness;
  b.z_min = w.base;
  b.z_max = w.height > 0.0 ? w.base + w.height : world_height;
  return b;
}

SolidBox obstacle_box(const BoxObstacle& o) {
  SolidBox b;
  b.center = o.center;
  b.axis_u = {std::cos(o.yaw), std::sin(o.yaw)};
  b.axis_v = {-b.axis_u.y, b.axis_u.x};
  b.half_u = 0.5 * o.size.x;
  b.half_v = 0.5 * o.size.y;
  b.z_min = o.z_min;
  b.z_max = o.z_max;
  return b;
}

GridSpec grid_for(const Scenario& s) {
  GridSpec g;
  g.cell_size = s.cell_size;
  g.nx = static_cast<int>(std::ceil(s.extents.x / s.cell_size - 1e-9));
  g.ny = static_cast<int>(std::ceil(s.extents.y / s.cell_size - 1e-9));
  g.nz = static_cast<int>(std::ceil(s.extents.z / s.cell_size - 1e-9));
  return g;
}

bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  auto orient = [](Vec2 p, Vec2 q, Vec2 r) {
    const double v = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    return (v > 1e-12) - (v < -1e-12);
  };
  const int o1 = orient(a, b, c);
  const int o2 = orient(a, b, d);
  const int o3 = orient(c, d, a);
  const int o4 = orient(c, d, b);
  return o1 * o2 < 0 && o3 * o4 < 0;
}

Vec2 polygon_centroid(const std::vector<Vec2>& poly) {
  double area = 0.0;
  Vec2 acc;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 p = poly[i];
    const Vec2 q = poly[(i + 1) % poly.size()];
    const double cr = p.x * q.y - q.x * p.y;
    area += cr;
    acc = acc + (p + q) * cr;
  }
  if (std::abs(area) < 1e-12) return poly.front();
  return acc * (1.0 / (3.0 * area));
}

bool polygons_overlap(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (segments_cross(a[i], a[(i + 1) % a.size()], b[k], b[(k + 1) % b.size()])) return true;
    }
  }
  if (point_in_polygon(polygon_centroid(a), b) || point_in_polygon(polygon_centroid(b), a)) {
    return true;
  }
  // Vertex strictly inside the other polygon: nudge toward the centroid to
  // ignore vertices that only touch a shared boundary.
  auto vertex_inside = [](const std::vector<Vec2>& p, const std::vector<Vec2>& q) {
    const Vec2 c = polygon_centroid(p);
    for (Vec2 v : p) {
      const Vec2 nudged = v + (c - v) * 1e-6;
      if (point_in_polygon(nudged, q)) return true;
    }
    return false;
  };
  return vertex_inside(a, b) || vertex_inside(b, a);
}

std::string fmt2(double v) {
  char buf[64];
  double r = std::round(v * 100.0) / 100.0;
  if (r == 0.0) r = 0.0;  // no negative zero
  std::snprintf(buf, sizeof buf, "%.2f", r);
  return buf;
}

}  // namespace

bool point_in_polygon(Vec2 p, const std::vector<Vec2>& poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

void validate_scenario(const Scenario& s) {
  if (!(s.cell_size > 0.0)) invalid("cell_size must be positive");
  if (!(s.extents.x > 0.0 && s.extents.y > 0.0 && s.extents.z > 0.0)) {
    invalid("extents must be positive");
  }
  if (!(s.duration > 0.0)) invalid("duration must be positive");
  if (s.rooms.empty()) invalid("scenario needs at least one room");
  for (std::size_t i = 0; i < s.rooms.size(); ++i) {
    if (s.rooms[i].id != static_cast<int>(i) + 1) invalid("room ids must be 1..K without gaps");
    if (s.rooms[i].polygon.size() < 3) {
      invalid("room " + std::to_string(s.rooms[i].id) + " polygon needs at least 3 vertices");
    }
  }
  for (std::size_t i = 0; i < s.rooms.size(); ++i) {
    for (std::size_t k = i + 1; k < s.rooms.size(); ++k) {
      if (polygons_overlap(s.rooms[i].polygon, s.rooms[k].polygon)) {
        invalid("rooms overlap: " + std::to_string(s.rooms[i].id) + " and " +
                std::to_string(s.rooms[k].id));
      }
    }
  }
  for (std::size_t i = 0; i < s.walls.size(); ++i) {
    const auto& w = s.walls[i];
    if ((w.end - w.start).norm() <= 0.0) invalid("wall " + std::to_string(i) + " has zero length");
    if (!(w.thickness > 0.0)) invalid("wall " + std::to_string(i) + " thickness must be positive");
  }
  for (std::size_t i = 0; i < s.obstacles.size(); ++i) {
    const auto& o = s.obstacles[i];
    if (!(o.size.x > 0.0 && o.size.y > 0.0 && o.z_max > o.z_min)) {
      invalid("obstacle " + std::to_string(i) + " has empty extent");
    }
  }
  const GridSpec g = grid_for(s);
  std::vector<SolidBox> solids;
  for (const auto& w : s.walls) solids.push_back(wall_box(w, g.height()));
  for (const auto& o : s.obstacles) solids.push_back(obstacle_box(o));
  for (std::size_t i = 0; i < s.spawns.size(); ++i) {
    const Pose& p = s.spawns[i];
    const Cell3 c = g.cell_of(p.position());
    if (!g.contains(c)) invalid("spawn " + std::to_string(i) + " lies outside the world");
    const Vec3 center = g.center(c);
    for (const auto& b : solids) {
      if (b.contains(center)) invalid("spawn " + std::to_string(i) + " lies inside a wall or obstacle");
    }
  }
}

Scenario load_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ScenarioError(ScenarioError::Kind::parse,
                        "line " + std::to_string(line_of_offset(text, e.byte)) + ": " + e.what());
  }
  if (!doc.is_object()) parse_fail("<document>", "expected object");

  Scenario s;
  const json& name = require(doc, "name", "");
  if (!name.is_string()) parse_fail("name", "expected string");
  s.name = name.get<std::string>();
  s.cell_size = doc.contains("cell_size") ? get_number(doc["cell_size"], "cell_size") : 0.2;
  {
    auto e = get_numbers(require(doc, "extents", ""), "extents", 3, 3);
    s.extents = {e[0], e[1], e[2]};
  }
  s.duration = doc.contains("duration") ? get_number(doc["duration"], "duration") : 120.0;

  const json& walls = get_array(doc, "walls", true);
  for (std::size_t i = 0; i < walls.size(); ++i) {
    const std::string p = "walls[" + std::to_string(i) + "].";
    const json& w = walls[i];
    if (!w.is_object()) parse_fail(p, "expected object");
    WallSegment seg;
    seg.start = get_vec2(require(w, "start", p), p + "start");
    seg.end = get_vec2(require(w, "end", p), p + "end");
    if (w.contains("thickness")) seg.thickness = get_number(w["thickness"], p + "thickness");
    if (w.contains("height")) seg.height = get_number(w["height"], p + "height");
    if (w.contains("base")) seg.base = get_number(w["base"], p + "base");
    s.walls.push_back(seg);
  }

  const json& obstacles = get_array(doc, "obstacles", false);
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const std::string p = "obstacles[" + std::to_string(i) + "].";
    const json& o = obstacles[i];
    if (!o.is_object()) parse_fail(p, "expected object");
    BoxObstacle box;
    box.center = get_vec2(require(o, "center", p), p + "center");
    box.size = get_vec2(require(o, "size", p), p + "size");
    auto z = get_numbers(require(o, "z", p), p + "z", 2, 2);
    box.z_min = z[0];
    box.z_max = z[1];
    if (o.contains("yaw")) box.yaw = get_number(o["yaw"], p + "yaw");
    s.obstacles.push_back(box);
  }

  const json& rooms = get_array(doc, "rooms", true);
  for (std::size_t i = 0; i < rooms.size(); ++i) {
    const std::string p = "rooms[" + std::to_string(i) + "].";
    const json& r = rooms[i];
    if (!r.is_object()) parse_fail(p, "expected object");
    RoomPolygon room;
    room.id = r.contains("id") ? static_cast<int>(get_number(r["id"], p + "id"))
                               : static_cast<int>(i) + 1;
    const json& poly = require(r, "polygon", p);
    if (!poly.is_array()) parse_fail(p + "polygon", "expected array");
    for (std::size_t k = 0; k < poly.size(); ++k) {
      room.polygon.push_back(get_vec2(poly[k], p + "polygon[" + std::to_string(k) + "]"));
    }
    s.rooms.push_back(std::move(room));
  }
  std::stable_sort(s.rooms.begin(), s.rooms.end(),
                   [](const RoomPolygon& a, const RoomPolygon& b) { return a.id < b.id; });

  const json& spawns = get_array(doc, "spawns", true);
  for (std::size_t i = 0; i < spawns.size(); ++i) {
    const std::string p = "spawns[" + std::to_string(i) + "]";
    auto v = get_numbers(spawns[i], p, 2, 4);
    Pose pose{v[0], v[1], v.size() > 2 ? v[2] : 1.0, v.size() > 3 ? v[3] : 0.0};
    s.spawns.push_back(pose);
  }

  const json& doors = get_array(doc, "doors", false);
  for (std::size_t i = 0; i < doors.size(); ++i) {
    s.doors.push_back(get_vec2(doors[i], "doors[" + std::to_string(i) + "]"));
  }

  validate_scenario(s);
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(ScenarioError::Kind::parse, path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return load_scenario(ss.str());
  } catch (const ScenarioError& e) {
    throw ScenarioError(e.kind(), path + ": " + e.what());
  }
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream o;
  auto v2 = [](Vec2 v) { return "[" + fmt2(v.x) + ", " + fmt2(v.y) + "]"; };
  o << "{\n";
  o << "  \"name\": " << json(s.name).dump() << ",\n";
  o << "  \"cell_size\": " << fmt2(s.cell_size) << ",\n";
  o << "  \"extents\": [" << fmt2(s.extents.x) << ", " << fmt2(s.extents.y) << ", "
    << fmt2(s.extents.z) << "],\n";
  o << "  \"duration\": " << fmt2(s.duration) << ",\n";
  o << "  \"walls\": [";
  for (std::size_t i = 0; i < s.walls.size(); ++i) {
    const auto& w = s.walls[i];
    o << (i ? ",\n" : "\n") << "    {\"start\": " << v2(w.start) << ", \"end\": " << v2(w.end)
      << ", \"thickness\": " << fmt2(w.thickness) << ", \"height\": " << fmt2(w.height)
      << ", \"base\": " << fmt2(w.base) << "}";
  }
  o << (s.walls.empty() ? "],\n" : "\n  ],\n");
  o << "  \"obstacles\": [";
  for (std::size_t i = 0; i < s.obstacles.size(); ++i) {
    const auto& b = s.obstacles[i];
    o << (i ? ",\n" : "\n") << "    {\"center\": " << v2(b.center) << ", \"size\": " << v2(b.size)
      << ", \"z\": [" << fmt2(b.z_min) << ", " << fmt2(b.z_max) << "], \"yaw\": " << fmt2(b.yaw)
      << "}";
  }
  o << (s.obstacles.empty() ? "],\n" : "\n  ],\n");
  o << "  \"rooms\": [";
  for (std::size_t i = 0; i < s.rooms.size(); ++i) {
    const auto& r = s.rooms[i];
    o << (i ? ",\n" : "\n") << "    {\"id\": " << r.id << ", \"polygon\": [";
    for (std::size_t k = 0; k < r.polygon.size(); ++k) o << (k ? ", " : "") << v2(r.polygon[k]);
    o << "]}";
  }
  o << (s.rooms.empty() ? "],\n" : "\n  ],\n");
  o << "  \"spawns\": [";
  for (std::size_t i = 0; i < s.spawns.size(); ++i) {
    const auto& p = s.spawns[i];
    o << (i ? ", " : "") << "[" << fmt2(p.x) << ", " << fmt2(p.y) << ", " << fmt2(p.z) << ", "
      << fmt2(p.yaw) << "]";
  }
  o << "],\n";
  o << "  \"doors\": [";
  for (std::size_t i = 0; i < s.doors.size(); ++i) o << (i ? ", " : "") << v2(s.doors[i]);
  o << "]\n}\n";
  return o.str();
}

GroundTruthWorld rasterize(const Scenario& s) {
  GroundTruthWorld w;
  const GridSpec g = grid_for(s);
  w.grid_ = g;
  w.room_count_ = s.room_count();
  w.doors_ = s.doors;
  w.occupancy_.assign(g.voxels(), 0);
  w.wall_column_.assign(g.columns(), 0);

  auto stamp = [&](const SolidBox& b, bool is_wall) {
    const double r = b.radius() + g.cell_size;
    const int x0 = std::max(0, g.to_index(b.center.x - r));
    const int x1 = std::min(g.nx - 1, g.to_index(b.center.x + r));
    const int y0 = std::max(0, g.to_index(b.center.y - r));
    const int y1 = std::min(g.ny - 1, g.to_index(b.center.y + r));
    const int z0 = std::max(0, g.to_index(b.z_min) - 1);
    const int z1 = std::min(g.nz - 1, g.to_index(b.z_max) + 1);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        for (int z = z0; z <= z1; ++z) {
          const Cell3 c{x, y, z};
          if (!b.contains(g.center(c))) continue;
          w.occupancy_[g.index(c)] = 1;
          if (is_wall) w.wall_column_[g.column_index({x, y})] = 1;
        }
      }
    }
  };
  for (const auto& wall : s.walls) stamp(wall_box(wall, g.height()), true);
  for (const auto& o : s.obstacles) stamp(obstacle_box(o), false);

  w.occupied_count_ = std::count(w.occupancy_.begin(), w.occupancy_.end(), std::uint8_t{1});

  w.exposed_.assign(g.voxels(), 0);
  for (int y = 0; y < g.ny; ++y) {
    for (int x = 0; x < g.nx; ++x) {
      for (int z = 0; z < g.nz; ++z) {
        const std::size_t idx = g.index({x, y, z});
        if (!w.occupancy_[idx]) continue;
        bool seen = false;
        for (int dz = -1; dz <= 1 && !seen; ++dz) {
          for (int dy = -1; dy <= 1 && !seen; ++dy) {
            for (int dx = -1; dx <= 1 && !seen; ++dx) {
              const Cell3 n{x + dx, y + dy, z + dz};
              if (g.contains(n) && !w.occupancy_[g.index(n)]) seen = true;
            }
          }
        }
        w.exposed_[idx] = seen ? 1 : 0;
      }
    }
  }

  w.room_label_.assign(g.columns(), 0);
  for (const auto& room : s.rooms) {
    double bx0 = room.polygon[0].x, bx1 = bx0, by0 = room.polygon[0].y, by1 = by0;
    for (Vec2 v : room.polygon) {
      bx0 = std::min(bx0, v.x);
      bx1 = std::max(bx1, v.x);
      by0 = std::min(by0, v.y);
      by1 = std::max(by1, v.y);
    }
    const int x0 = std::max(0, g.to_index(bx0));
    const int x1 = std::min(g.nx - 1, g.to_index(bx1));
    const int y0 = std::max(0, g.to_index(by0));
    const int y1 = std::min(g.ny - 1, g.to_index(by1));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const Cell2 c{x, y};
        const std::size_t ci = g.column_index(c);
        if (w.wall_column_[ci] || w.room_label_[ci] != 0) continue;
        if (point_in_polygon(g.center(c), room.polygon)) {
          w.room_label_[ci] = static_cast<std::int16_t>(room.id);
        }
      }
    }
  }

  // Room surfaces: obstacle voxels inside labeled columns, and wall voxels of
  // wall columns that touch a labeled column (lowest touching id wins).
  w.room_of_voxel_.assign(g.voxels(), 0);
  w.room_voxel_counts_.assign(static_cast<std::size_t>(w.room_count_), 0);
  for (int y = 0; y < g.ny; ++y) {
    for (int x = 0; x < g.nx; ++x) {
      const std::size_t ci = g.column_index({x, y});
      int owner = w.room_label_[ci];
      if (owner == 0 && w.wall_column_[ci]) {
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const Cell2 n{x + dx, y + dy};
            if (!g.contains(n)) continue;
            const int lbl = w.room_label_[g.column_index(n)];
            if (lbl != 0 && (owner == 0 || lbl < owner)) owner = lbl;
          }
        }
      }
      if (owner == 0) continue;
      for (int z = 0; z < g.nz; ++z) {
        const std::size_t idx = g.index({x, y, z});
        if (!w.occupancy_[idx]) continue;
        w.room_of_voxel_[idx] = static_cast<std::int16_t>(owner);
        ++w.room_voxel_counts_[static_cast<std::size_t>(owner - 1)];
      }
    }
  }
  return w;
}

std::int64_t GroundTruthWorld::room_voxel_count(int room_id) const {
  if (room_id < 1 || room_id > room_count_) {
    throw std::out_of_range("unknown room id " + std::to_string(room_id));
  }
  return room_voxel_counts_[static_cast<std::size_t>(room_id - 1)];
}

std::int64_t GroundTruthWorld::total_room_voxels() const {
  std::int64_t total = 0;
  for (auto c : room_voxel_counts_) total += c;
  return total;
}

std::vector<std::size_t> room_voxels(const GroundTruthWorld& w, int room_id) {
  if (room_id < 1 || room_id > w.room_count()) {
    throw std::out_of_range("unknown room id " + std::to_string(room_id));
  }
  std::vector<std::size_t> out;
  const std::size_t n = w.grid().voxels();
  for (std::size_t i = 0; i < n; ++i) {
    if (w.room_of_voxel(i) == room_id) out.push_back(i);
  }
  return out;
}

}  // namespace mrmr
