#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mrmr/geometry.hpp"
#include "mrmr/perception.hpp"
#include "mrmr/world.hpp"

namespace mrmr {

struct Coverage {
  std::int64_t count = 0;
  double fraction = 0.0;
};

// Union over robots of observed voxels that belong to some room.
Coverage room_coverage(std::span<const ObservedSet> observed, const GroundTruthWorld& world);

// A room counts once at least `threshold` of its voxels are covered.
// `per_room` holds covered counts for rooms 1..K in order.
int rooms_visited(std::span<const std::int64_t> per_room, const GroundTruthWorld& world,
                  double threshold = 0.5);
int rooms_visited(std::span<const ObservedSet> observed, const GroundTruthWorld& world,
                  double threshold = 0.5);

// Incremental version of the two functions above, fed with camera deltas.
class CoverageTracker {
 public:
  explicit CoverageTracker(const GroundTruthWorld& world);

  // Returns how many room voxels were newly covered.
  std::int64_t add(std::span<const std::size_t> voxels);
  std::int64_t room_voxels() const { return covered_; }
  double fraction() const;
  const std::vector<std::int64_t>& per_room() const { return per_room_; }
  int rooms_visited(double threshold) const;

 private:
  const GroundTruthWorld* world_;
  std::vector<std::uint8_t> seen_;
  std::vector<std::int64_t> per_room_;
  std::int64_t covered_ = 0;
};

struct MetricsRow {
  double t = 0.0;
  std::int64_t room_voxels = 0;
  double room_fraction = 0.0;
  int rooms_visited = 0;
  std::vector<std::int64_t> observed;  // |O_i| per robot
  std::vector<double> path_length;     // cumulative meters per robot
};

class MetricsLog {
 public:
  explicit MetricsLog(int robots = 0) : robots_(robots) {}

  int robots() const { return robots_; }
  void append(MetricsRow row);
  const std::vector<MetricsRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }
  const MetricsRow& back() const { return rows_.back(); }

  // True if collective coverage and rooms visited never decrease.
  bool monotone() const;

  // t,room_voxels,room_fraction,rooms_visited,observed_<i>...,path_<i>...
  void write_csv(std::ostream& out) const;
  // "t room_voxels" per line.
  void write_coverage_curve(std::ostream& out) const;

 private:
  int robots_;
  std::vector<MetricsRow> rows_;
};

struct DetectionScore {
  int true_positives = 0;
  int false_positives = 0;
  int false_negatives = 0;
  double precision = 1.0;
  double recall = 1.0;
  // Set when the ratio had an empty denominator and was reported as 1.
  bool precision_undefined = false;
  bool recall_undefined = false;

  DetectionScore& operator+=(const DetectionScore& o);
  void finalize();  // recomputes the ratios from the counts
};

// Greedy one-to-one matching: closest pairs first, within `radius`.
DetectionScore score_detections(std::span<const Vec2> detected, std::span<const Vec2> truth,
                                double radius = 1.0);

struct TimingStats {
  std::string tag;
  std::size_t samples = 0;
  double mean_us = 0.0;
  double p50_us = 0.0;
  double p90_us = 0.0;
  double p99_us = 0.0;
  double max_us = 0.0;
};

// Summary of wall-clock samples in microseconds. Throws std::invalid_argument
// with fewer than 30 samples.
TimingStats time_module(const std::string& tag, std::span<const double> samples_us);

}  // namespace mrmr
