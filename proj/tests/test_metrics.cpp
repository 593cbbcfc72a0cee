#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "mrmr/metrics.hpp"
#include "support.hpp"

using namespace mrmr;
using mrmr::testing::scenario_path;

namespace {

const GroundTruthWorld& env1() {
  static const GroundTruthWorld w = rasterize(load_scenario_file(scenario_path("env1.json")));
  return w;
}

}  // namespace

TEST(Coverage, EmptyObservationsGiveZero) {
  const auto& w = env1();
  std::vector<ObservedSet> obs(2, ObservedSet(w.grid().voxels()));
  const Coverage c = room_coverage(obs, w);
  EXPECT_EQ(c.count, 0);
  EXPECT_EQ(c.fraction, 0.0);
  EXPECT_EQ(rooms_visited(obs, w), 0);
}

TEST(Coverage, IdenticalSetsAreNotDoubleCounted) {
  const auto& w = env1();
  ObservedSet o(w.grid().voxels());
  o.insert(room_voxels(w, 1));
  o.insert(room_voxels(w, 2));
  const std::vector<ObservedSet> one{o}, two{o, o};
  EXPECT_EQ(room_coverage(one, w).count, room_coverage(two, w).count);
  EXPECT_EQ(room_coverage(two, w).count, w.room_voxel_count(1) + w.room_voxel_count(2));
}

TEST(Coverage, CorridorVoxelsDoNotCount) {
  const auto& w = env1();
  ObservedSet o(w.grid().voxels());
  for (std::size_t i = 0; i < w.grid().voxels(); ++i) {
    if (w.occupied_index(i) && w.room_of_voxel(i) == 0) o.insert(i);
  }
  ASSERT_GT(o.size(), 0u);
  const std::vector<ObservedSet> obs{o};
  EXPECT_EQ(room_coverage(obs, w).count, 0);
}

TEST(Coverage, TrackerAgreesWithBatchUnion) {
  const auto& w = env1();
  std::mt19937_64 rng(4);
  std::vector<std::size_t> occupied;
  for (std::size_t i = 0; i < w.grid().voxels(); ++i) {
    if (w.occupied_index(i)) occupied.push_back(i);
  }
  std::uniform_int_distribution<std::size_t> pick(0, occupied.size() - 1);
  std::vector<ObservedSet> obs(3, ObservedSet(w.grid().voxels()));
  CoverageTracker tracker(w);
  std::int64_t last = 0;
  for (int step = 0; step < 50; ++step) {
    std::vector<std::size_t> batch;
    for (int k = 0; k < 40; ++k) batch.push_back(occupied[pick(rng)]);
    std::sort(batch.begin(), batch.end());
    batch.erase(std::unique(batch.begin(), batch.end()), batch.end());
    obs[step % 3].insert(batch);
    tracker.add(batch);
    EXPECT_GE(tracker.room_voxels(), last);
    last = tracker.room_voxels();
    const Coverage c = room_coverage(obs, w);
    EXPECT_EQ(tracker.room_voxels(), c.count);
    EXPECT_DOUBLE_EQ(tracker.fraction(), c.fraction);
    EXPECT_EQ(tracker.rooms_visited(0.5), rooms_visited(obs, w));
  }
  // Union idempotence: recomputing gives the same count.
  EXPECT_EQ(room_coverage(obs, w).count, room_coverage(obs, w).count);
}

TEST(RoomsVisited, ThresholdIsInclusive) {
  const GroundTruthWorld w = rasterize(mrmr::testing::closed_room(2.0));
  const std::int64_t n = w.room_voxel_count(1);
  ASSERT_EQ(n % 2, 0);
  const std::vector<std::int64_t> half{n / 2}, less{n / 2 - 1}, all{n};
  EXPECT_EQ(rooms_visited(half, w, 0.5), 1);
  EXPECT_EQ(rooms_visited(less, w, 0.5), 0);
  EXPECT_EQ(rooms_visited(all, w, 0.5), 1);
}

TEST(RoomsVisited, OneFullyObservedRoomOfSix) {
  const auto& w = env1();
  ASSERT_EQ(w.room_count(), 6);
  ObservedSet o(w.grid().voxels());
  o.insert(room_voxels(w, 3));
  const std::vector<ObservedSet> obs{o};
  EXPECT_EQ(rooms_visited(obs, w), 1);
}

TEST(Detection, Examples) {
  const std::vector<Vec2> truth{{0, 0}, {5, 0}, {10, 0}};
  auto s = score_detections(truth, truth);
  EXPECT_EQ(s.precision, 1.0);
  EXPECT_EQ(s.recall, 1.0);

  std::vector<Vec2> extra = truth;
  extra.push_back({20, 20});
  s = score_detections(extra, truth);
  EXPECT_DOUBLE_EQ(s.precision, 3.0 / 4.0);
  EXPECT_EQ(s.recall, 1.0);
  EXPECT_EQ(s.false_positives, 1);

  s = score_detections({}, truth);
  EXPECT_EQ(s.precision, 1.0);
  EXPECT_TRUE(s.precision_undefined);
  EXPECT_EQ(s.recall, 0.0);
  EXPECT_EQ(s.false_negatives, 3);
}

TEST(Detection, MatchingIsOneToOneWithinRadius) {
  const std::vector<Vec2> truth{{0, 0}};
  const std::vector<Vec2> found{{0.2, 0}, {0.3, 0}};
  auto s = score_detections(found, truth);
  EXPECT_EQ(s.true_positives, 1);
  EXPECT_EQ(s.false_positives, 1);
  const std::vector<Vec2> edge{{1.0, 0}}, far{{1.01, 0}};
  EXPECT_EQ(score_detections(edge, truth).true_positives, 1);  // the radius is inclusive
  EXPECT_EQ(score_detections(far, truth).true_positives, 0);
}

TEST(Detection, SwappingArgumentsSwapsPrecisionAndRecall) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> pos(0.0, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Vec2> a, b;
    for (int i = int(rng() % 6); i > 0; --i) a.push_back({pos(rng), pos(rng)});
    for (int i = int(rng() % 6); i > 0; --i) b.push_back({pos(rng), pos(rng)});
    const auto ab = score_detections(a, b, 1.5);
    const auto ba = score_detections(b, a, 1.5);
    EXPECT_EQ(ab.precision, ba.recall);
    EXPECT_EQ(ab.recall, ba.precision);
    EXPECT_GE(ab.precision, 0.0);
    EXPECT_LE(ab.precision, 1.0);
  }
}

TEST(Timing, StatisticsAndMinimumSampleCount) {
  const std::vector<double> constant(100, 5.0);
  const TimingStats t = time_module("edt", constant);
  EXPECT_EQ(t.tag, "edt");
  EXPECT_EQ(t.samples, 100u);
  EXPECT_DOUBLE_EQ(t.mean_us, 5.0);
  EXPECT_DOUBLE_EQ(t.p50_us, 5.0);
  EXPECT_DOUBLE_EQ(t.max_us, 5.0);
  EXPECT_THROW(time_module("x", std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(time_module("x", std::vector<double>(29, 1.0)), std::invalid_argument);
  std::vector<double> ramp;
  for (int i = 1; i <= 100; ++i) ramp.push_back(i);
  const TimingStats r = time_module("ramp", ramp);
  EXPECT_DOUBLE_EQ(r.mean_us, 50.5);
  EXPECT_LE(r.p50_us, r.p90_us);
  EXPECT_LE(r.p90_us, r.p99_us);
  EXPECT_EQ(r.max_us, 100.0);
}

TEST(MetricsLog, CsvAndCurve) {
  MetricsLog log(2);
  log.append({0.1, 10, 0.01, 0, {5, 6}, {0.1, 0.0}});
  log.append({0.2, 12, 0.012, 1, {7, 6}, {0.2, 0.1}});
  EXPECT_TRUE(log.monotone());
  std::ostringstream csv, curve;
  log.write_csv(csv);
  log.write_coverage_curve(curve);
  const std::string text = csv.str();
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "t,room_voxels,room_fraction,rooms_visited,observed_0,observed_1,path_0,path_1");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  const std::string dat = curve.str();
  EXPECT_EQ(dat, "# t room_voxels\n0.1 10\n0.2 12\n");

  log.append({0.3, 11, 0.011, 1, {7, 6}, {0.3, 0.2}});
  EXPECT_FALSE(log.monotone());
}
