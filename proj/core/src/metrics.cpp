#include "mrmr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace mrmr {

Coverage room_coverage(std::span<const ObservedSet> observed, const GroundTruthWorld& world) {
  CoverageTracker tracker(world);
  for (const auto& o : observed) {
    const auto idx = o.indices();
    tracker.add(idx);
  }
  return {tracker.room_voxels(), tracker.fraction()};
}

int rooms_visited(std::span<const std::int64_t> per_room, const GroundTruthWorld& world,
                  double threshold) {
  int n = 0;
  for (int j = 1; j <= world.room_count(); ++j) {
    const std::int64_t total = world.room_voxel_count(j);
    const std::int64_t seen = static_cast<std::size_t>(j - 1) < per_room.size() ? per_room[j - 1] : 0;
    if (total > 0 && static_cast<double>(seen) >= threshold * static_cast<double>(total)) ++n;
  }
  return n;
}

int rooms_visited(std::span<const ObservedSet> observed, const GroundTruthWorld& world,
                  double threshold) {
  CoverageTracker tracker(world);
  for (const auto& o : observed) {
    const auto idx = o.indices();
    tracker.add(idx);
  }
  return tracker.rooms_visited(threshold);
}

CoverageTracker::CoverageTracker(const GroundTruthWorld& world)
    : world_(&world),
      seen_(world.grid().voxels(), 0),
      per_room_(static_cast<std::size_t>(world.room_count()), 0) {}

std::int64_t CoverageTracker::add(std::span<const std::size_t> voxels) {
  std::int64_t added = 0;
  for (std::size_t i : voxels) {
    if (seen_[i]) continue;
    seen_[i] = 1;
    const int room = world_->room_of_voxel(i);
    if (room > 0) {
      ++per_room_[room - 1];
      ++added;
    }
  }
  covered_ += added;
  return added;
}

double CoverageTracker::fraction() const {
  const std::int64_t total = world_->total_room_voxels();
  return total > 0 ? static_cast<double>(covered_) / static_cast<double>(total) : 0.0;
}

int CoverageTracker::rooms_visited(double threshold) const {
  return mrmr::rooms_visited(per_room_, *world_, threshold);
}

void MetricsLog::append(MetricsRow row) {
  if (static_cast<int>(row.observed.size()) != robots_ ||
      static_cast<int>(row.path_length.size()) != robots_) {
    throw std::invalid_argument("metrics row has the wrong number of robots");
  }
  rows_.push_back(std::move(row));
}

bool MetricsLog::monotone() const {
  for (std::size_t i = 1; i < rows_.size(); ++i) {
    if (rows_[i].room_voxels < rows_[i - 1].room_voxels) return false;
    if (rows_[i].rooms_visited < rows_[i - 1].rooms_visited) return false;
  }
  return true;
}

void MetricsLog::write_csv(std::ostream& out) const {
  out << "t,room_voxels,room_fraction,rooms_visited";
  for (int i = 0; i < robots_; ++i) out << ",observed_" << i;
  for (int i = 0; i < robots_; ++i) out << ",path_" << i;
  out << '\n';
  char buf[64];
  for (const auto& r : rows_) {
    std::snprintf(buf, sizeof buf, "%.1f,%lld,%.6f,%d", r.t, static_cast<long long>(r.room_voxels),
                  r.room_fraction, r.rooms_visited);
    out << buf;
    for (auto o : r.observed) out << ',' << o;
    for (double p : r.path_length) {
      std::snprintf(buf, sizeof buf, ",%.3f", p);
      out << buf;
    }
    out << '\n';
  }
}

void MetricsLog::write_coverage_curve(std::ostream& out) const {
  out << "# t room_voxels\n";
  char buf[64];
  for (const auto& r : rows_) {
    std::snprintf(buf, sizeof buf, "%.1f %lld\n", r.t, static_cast<long long>(r.room_voxels));
    out << buf;
  }
}

DetectionScore& DetectionScore::operator+=(const DetectionScore& o) {
  true_positives += o.true_positives;
  false_positives += o.false_positives;
  false_negatives += o.false_negatives;
  finalize();
  return *this;
}

void DetectionScore::finalize() {
  const int det = true_positives + false_positives;
  const int truth = true_positives + false_negatives;
  precision_undefined = det == 0;
  recall_undefined = truth == 0;
  precision = det == 0 ? 1.0 : static_cast<double>(true_positives) / det;
  recall = truth == 0 ? 1.0 : static_cast<double>(true_positives) / truth;
}

DetectionScore score_detections(std::span<const Vec2> detected, std::span<const Vec2> truth,
                                double radius) {
  struct Pair {
    double d;
    std::size_t i;
    std::size_t j;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < detected.size(); ++i) {
    for (std::size_t j = 0; j < truth.size(); ++j) {
      const double d = distance(detected[i], truth[j]);
      if (d <= radius) pairs.push_back({d, i, j});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return std::tie(a.d, a.i, a.j) < std::tie(b.d, b.i, b.j);
  });
  std::vector<std::uint8_t> used_det(detected.size(), 0);
  std::vector<std::uint8_t> used_truth(truth.size(), 0);
  DetectionScore s;
  for (const auto& p : pairs) {
    if (used_det[p.i] || used_truth[p.j]) continue;
    used_det[p.i] = 1;
    used_truth[p.j] = 1;
    ++s.true_positives;
  }
  s.false_positives = static_cast<int>(detected.size()) - s.true_positives;
  s.false_negatives = static_cast<int>(truth.size()) - s.true_positives;
  s.finalize();
  return s;
}

TimingStats time_module(const std::string& tag, std::span<const double> samples_us) {
  if (samples_us.size() < 30) {
    throw std::invalid_argument("time_module needs at least 30 samples for '" + tag + "'");
  }
  std::vector<double> v(samples_us.begin(), samples_us.end());
  std::sort(v.begin(), v.end());
  auto pct = [&](double q) {
    // Nearest-rank percentile.
    const std::size_t rank = static_cast<std::size_t>(std::ceil(q * v.size()));
    return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
  };
  TimingStats s;
  s.tag = tag;
  s.samples = v.size();
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean_us = sum / v.size();
  s.p50_us = pct(0.50);
  s.p90_us = pct(0.90);
  s.p99_us = pct(0.99);
  s.max_us = v.back();
  return s;
}

}  // namespace mrmr
