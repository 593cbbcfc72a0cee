#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mrmr/cues.hpp"
#include "mrmr/geometry.hpp"

namespace mrmr {

struct Circle {
  Vec2 center;
  double r = 0.0;
  bool reached = false;
  int id = 0;  // assigned by CircleSet; 0 means "not yet inserted"

  Vec3 center3(double z = 1.0) const { return {center.x, center.y, z}; }
};

struct CircleConfig {
  double r_thresh = 2.5;       // split threshold
  double merge_eps = 0.95;     // merge when d < merge_eps * (r1 + r2)
  double contain_ratio = 0.5;  // keep only the larger when d < contain_ratio * (r1 + r2)
  double r_min = 0.5;          // smallest sub-circle produced by a split
  double min_keep = 0.3;       // circles clamped below this radius are dropped
};

// Circles ordered by id; ids are never reused.
class CircleSet {
 public:
  const std::vector<Circle>& circles() const { return circles_; }
  std::size_t size() const { return circles_.size(); }
  bool empty() const { return circles_.empty(); }
  int next_id() const { return next_id_; }

  // Inserts a copy with a fresh id and returns the id.
  int insert(Circle c);
  bool erase(int id);
  Circle* find(int id);
  const Circle* find(int id) const;
  std::vector<Circle>& mutable_circles() { return circles_; }

 private:
  std::vector<Circle> circles_;
  int next_id_ = 1;
};

// Throws std::invalid_argument when delta <= 0.
Circle generate_circle(Vec2 center, double delta);

// Weighted-center merge: center (r1*m + r2*c_t) / (r1 + r2), radius
// (r1 + r2 + d) * d / (2 (r1 + r2)). Throws std::invalid_argument unless
// 0 < d < merge_eps * (r1 + r2). Reached is the AND of both parents.
Circle merge(const Circle& candidate, const Circle& existing, const CircleConfig& cfg = {});

// Splits along `direction` (unit): the first piece has radius r_thresh and is
// internally tangent to the original on the -direction side, the remainder
// adjoins it; oversized remainders are split again the same way.
// Throws std::invalid_argument unless c.r > r_thresh.
std::vector<Circle> split_circle(const Circle& c, Vec2 direction, const CircleConfig& cfg = {});

using SplitDirection = std::function<Vec2(const Circle&)>;

struct CircleCandidate {
  Vec2 center;
  double delta = 0.0;
};

// One decomposition pass: each candidate is checked against the current set;
// a near-concentric pair keeps only the larger circle, an overlapping pair is
// merged, an isolated candidate is appended; oversized circles are split.
// Merged and split circles re-enter the pass so no new circle ends up
// overlapping another one.
CircleSet update_circles(CircleSet set, std::span<const CircleCandidate> candidates,
                         const CircleConfig& cfg = {}, const SplitDirection& split_dir = {});

std::vector<CircleCandidate> candidates_from(std::span<const Maximum> maxima);

// Shrinks each radius to the wall distance at its center and drops circles
// whose radius falls below cfg.min_keep (or whose center left the map).
void clamp_to_free_space(CircleSet& set, const DistanceField& m, const CircleConfig& cfg = {});

// Direction of the longest free run through `center` on the filtered map,
// pointing along the longer half; ties resolve toward +x.
Vec2 longest_free_direction(const BinaryMap& map, Vec2 center, double max_len);

}  // namespace mrmr
