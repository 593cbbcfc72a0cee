#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mrmr/cues.hpp"
#include "mrmr/metrics.hpp"
#include "support.hpp"

using namespace mrmr;
using mrmr::testing::box_map;
using mrmr::testing::brute_force_distance;
using mrmr::testing::brute_force_saddles;
using mrmr::testing::fully_known;
using mrmr::testing::random_map;
using mrmr::testing::scenario_path;
using mrmr::testing::two_rooms_map;

namespace {

BinaryMap line_x(int w, int h, int y) {
  BinaryMap b(w, h, 0.2, 0);
  for (int x = 0; x < w; ++x) b(x, y) = 1;
  return b;
}

double nearest(Vec2 p, const std::vector<Vec3>& pts) {
  double best = 1e9;
  for (const auto& q : pts) best = std::min(best, distance(p, q.xy()));
  return best;
}

}  // namespace

TEST(Flatten, AllUnknownIsAllZero) {
  const KnownMap k(GridSpec{8, 6, 10, 0.2});
  const BinaryMap b = flatten(k, 0.0, 1.8);
  EXPECT_EQ(b.width(), 8);
  EXPECT_EQ(b.height(), 6);
  for (auto v : b.data()) EXPECT_EQ(v, 0);
}

TEST(Flatten, BandSelectsVoxels) {
  KnownMap k(GridSpec{6, 6, 15, 0.2});  // 3 m tall
  // Wall column spanning z in [0, 2.5].
  for (int z = 0; z < 13; ++z) k.mark({1, 1, z}, VoxelState::occupied);
  // Overhead obstacle at z in [2.0, 2.4] only.
  for (int z = 10; z < 12; ++z) k.mark({4, 4, z}, VoxelState::occupied);
  // Free voxels never count.
  for (int z = 0; z < 15; ++z) k.mark({2, 2, z}, VoxelState::free);
  const BinaryMap b = flatten(k, 0.0, 1.8);
  EXPECT_EQ(b(1, 1), 1);
  EXPECT_EQ(b(4, 4), 0);
  EXPECT_EQ(b(2, 2), 0);
  EXPECT_EQ(flatten(k, 2.0, 2.4)(4, 4), 1);
}

TEST(Flatten, InvalidBandThrows) {
  const KnownMap k(GridSpec{4, 4, 10, 0.2});
  EXPECT_THROW(flatten(k, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(flatten(k, 1.5, 0.5), std::invalid_argument);
  EXPECT_THROW(flatten(k, 5.0, 6.0), std::invalid_argument);
}

TEST(Median, IsolatedCellRemoved) {
  for (auto mode : {MedianMode::sequential, MedianMode::either_axis}) {
    BinaryMap b(7, 7, 0.2, 0);
    b(3, 3) = 1;
    const BinaryMap f = median_filter(b, mode);
    for (auto v : f.data()) EXPECT_EQ(v, 0);
  }
}

TEST(Median, SolidWallUnchanged) {
  for (auto mode : {MedianMode::sequential, MedianMode::either_axis}) {
    BinaryMap b(9, 9, 0.2, 0);
    for (int y = 3; y <= 5; ++y) {
      for (int x = 0; x < 9; ++x) b(x, y) = 1;
    }
    EXPECT_EQ(median_filter(b, mode), b);
  }
}

TEST(Median, OneCellGapInLineIsFilled) {
  for (auto mode : {MedianMode::sequential, MedianMode::either_axis}) {
    BinaryMap b(9, 9, 0.2, 0);
    for (int y = 3; y <= 5; ++y) {
      for (int x = 0; x < 9; ++x) b(x, y) = x == 4 ? 0 : 1;
    }
    const BinaryMap f = median_filter(b, mode);
    for (int y = 3; y <= 5; ++y) EXPECT_EQ(f(4, y), 1);
  }
}

TEST(Median, ThinLineSurvivesOnlyEitherAxis) {
  const BinaryMap b = line_x(9, 9, 4);
  EXPECT_EQ(median_filter(b, MedianMode::either_axis), b);
  const BinaryMap seq = median_filter(b, MedianMode::sequential);
  for (auto v : seq.data()) EXPECT_EQ(v, 0);
}

TEST(Median, EdgesAreReplicated) {
  // A line along the top border survives the vertical pass because the
  // row beyond the edge repeats it.
  const BinaryMap b = line_x(6, 5, 4);
  const BinaryMap f = median_filter(b, MedianMode::sequential);
  for (int x = 0; x < 6; ++x) EXPECT_EQ(f(x, 4), 1);
}

TEST(Distance, SingleOccupiedCell) {
  BinaryMap b(12, 9, 0.2, 0);
  b(0, 0) = 1;
  const DistanceField m = distance_transform(b);
  for (int j = 0; j < 9; ++j) {
    for (int i = 0; i < 12; ++i) EXPECT_DOUBLE_EQ(m(i, j), 0.2 * std::sqrt(double(i * i + j * j)));
  }
}

TEST(Distance, NoOccupiedCellGivesDiagonal) {
  const BinaryMap b(10, 5, 0.2, 0);
  const DistanceField m = distance_transform(b);
  const double diag = 0.2 * std::hypot(10.0, 5.0);
  for (double v : m.data()) EXPECT_DOUBLE_EQ(v, diag);
}

TEST(Distance, CorridorCenterline) {
  // Wall cells at rows 0 and 11: centers 2.2 m apart, free width 2.0 m.
  BinaryMap b(30, 12, 0.2, 0);
  for (int x = 0; x < 30; ++x) b(x, 0) = b(x, 11) = 1;
  const DistanceField m = distance_transform(b);
  for (int x = 0; x < 30; ++x) {
    EXPECT_NEAR(m(x, 5), 1.0, 0.1);
    EXPECT_NEAR(m(x, 6), 1.0, 0.1);
  }
}

TEST(Distance, MatchesBruteForceOnRandomMaps) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dim(1, 50);
  std::uniform_real_distribution<double> density(0.0, 0.4);
  for (int trial = 0; trial < 60; ++trial) {
    const BinaryMap b = random_map(rng, dim(rng), dim(rng), density(rng));
    const DistanceField m = distance_transform(b);
    const DistanceField oracle = brute_force_distance(b);
    for (std::size_t i = 0; i < m.size(); ++i) {
      ASSERT_NEAR(m.data()[i], oracle.data()[i], 1e-9 * std::max(1.0, oracle.data()[i]))
          << "trial " << trial;
    }
  }
}

TEST(Distance, ZeroOnOccupiedAndLipschitz) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const BinaryMap b = random_map(rng, 40, 30, 0.05);
    const DistanceField m = distance_transform(b);
    for (int y = 0; y < 30; ++y) {
      for (int x = 0; x < 40; ++x) {
        if (b(x, y)) EXPECT_EQ(m(x, y), 0.0);
        if (x + 1 < 40) EXPECT_LE(std::abs(m(x, y) - m(x + 1, y)), 0.2 * std::sqrt(2.0) + 1e-12);
        if (y + 1 < 30) EXPECT_LE(std::abs(m(x, y) - m(x, y + 1)), 0.2 * std::sqrt(2.0) + 1e-12);
      }
    }
  }
}

TEST(Hessian, QuadraticIsExact) {
  // Dyadic spacing keeps every sample and difference exactly representable.
  const double h = 0.25;
  DistanceField m(16, 12, h);
  for (int y = 0; y < 12; ++y) {
    for (int x = 0; x < 16; ++x) {
      const double px = (x - 7) * h, py = (y - 5) * h;
      m(x, y) = -(px * px + py * py);
    }
  }
  const HessianField hs = hessian(m);
  for (int y = 1; y < 11; ++y) {
    for (int x = 1; x < 15; ++x) {
      EXPECT_EQ(hs(x, y).fxx, -2.0);
      EXPECT_EQ(hs(x, y).fyy, -2.0);
      EXPECT_EQ(hs(x, y).fxy, 0.0);
    }
  }
}

TEST(Hessian, LinearRampIsZero) {
  const double h = 0.25;
  DistanceField m(10, 10, h);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 10; ++x) m(x, y) = 0.5 * x * h + 0.75 * y * h + 3.0;
  }
  const HessianField hs = hessian(m);
  for (const auto& e : hs.data()) {
    EXPECT_EQ(e.fxx, 0.0);
    EXPECT_EQ(e.fyy, 0.0);
    EXPECT_EQ(e.fxy, 0.0);
  }
}

TEST(Hessian, PointDistanceMatchesAnalytic) {
  const double h = 0.2;
  DistanceField m(61, 61, h);
  for (int y = 0; y < 61; ++y) {
    for (int x = 0; x < 61; ++x) m(x, y) = h * std::hypot(x - 30.0, y - 30.0);
  }
  const HessianField hs = hessian(m);
  for (int y = 1; y < 60; ++y) {
    for (int x = 1; x < 60; ++x) {
      const double px = (x - 30) * h, py = (y - 30) * h;
      const double r = std::hypot(px, py);
      if (r < 1.5) continue;
      const double r3 = r * r * r;
      EXPECT_NEAR(hs(x, y).fxx, py * py / r3, 0.02);
      EXPECT_NEAR(hs(x, y).fyy, px * px / r3, 0.02);
      EXPECT_NEAR(hs(x, y).fxy, -px * py / r3, 0.02);
    }
  }
}

TEST(Hessian, SymmetricAndRejectsTinyFields) {
  EXPECT_THROW(hessian(DistanceField(2, 5, 0.2)), std::invalid_argument);
  std::mt19937_64 rng(3);
  const DistanceField m = distance_transform(random_map(rng, 20, 20, 0.1));
  const HessianField a = hessian(m);
  // Transposing the field swaps fxx and fyy and keeps fxy.
  DistanceField t(20, 20, 0.2);
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 20; ++x) t(y, x) = m(x, y);
  }
  const HessianField b = hessian(t);
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 20; ++x) {
      EXPECT_NEAR(a(x, y).fxx, b(y, x).fyy, 1e-9);
      EXPECT_NEAR(a(x, y).fxy, b(y, x).fxy, 1e-9);
    }
  }
}

TEST(Cues, TwoRoomsOneDoor) {
  Vec2 door;
  const BinaryMap b = two_rooms_map(&door);
  const CuePipeline p = run_cue_pipeline(b, CueConfig{});
  ASSERT_EQ(p.cues.saddles.size(), 1u);
  EXPECT_LE(distance(p.cues.saddles[0].xy(), door), 0.2 + 1e-9);
  EXPECT_DOUBLE_EQ(p.cues.saddles[0].z, 1.0);

  for (Vec2 center : {Vec2{2.2, 2.2}, Vec2{6.4, 2.2}}) {
    bool found = false;
    for (const auto& mx : p.cues.maxima) {
      if (distance(mx.point.xy(), center) < 0.5) {
        found = true;
        EXPECT_NEAR(mx.distance, 2.0, 0.2);
      }
    }
    EXPECT_TRUE(found) << "no maximum near " << center.x << "," << center.y;
  }

  // The exhaustive critical-point search agrees there is a pass at the door.
  const auto oracle = brute_force_saddles(p.filtered, p.distance);
  bool near_door = false;
  for (Cell2 c : oracle) near_door |= distance(b.center(c), door) <= 0.3;
  EXPECT_TRUE(near_door);
}

TEST(Cues, EmptyRoomHasOneMaximumAtItsCenter) {
  const BinaryMap b = box_map(21, 21);
  const CueSet c = extract_cues(b, CueConfig{});
  EXPECT_TRUE(c.saddles.empty());
  ASSERT_EQ(c.maxima.size(), 1u);
  EXPECT_NEAR(c.maxima[0].point.x, b.center({11, 11}).x, 1e-9);
  EXPECT_NEAR(c.maxima[0].point.y, b.center({11, 11}).y, 1e-9);
}

TEST(Cues, RotatedWallDoorsFound) {
  const Scenario s = load_scenario_file(scenario_path("env8.json"));
  const GroundTruthWorld w = rasterize(s);
  const CueSet c = extract_cues(fully_known(w), CueConfig{});
  ASSERT_FALSE(s.doors.empty());
  for (Vec2 d : s.doors) EXPECT_LE(nearest(d, c.saddles), 1.5 * s.cell_size) << d.x << "," << d.y;
}

TEST(Cues, BundledMapsDetectionQuality) {
  DetectionScore total;
  for (int k = 1; k <= 8; ++k) {
    const Scenario s = load_scenario_file(scenario_path("env" + std::to_string(k) + ".json"));
    const CueSet c = extract_cues(fully_known(rasterize(s)), CueConfig{});
    std::vector<Vec2> found;
    for (const auto& p : c.saddles) found.push_back(p.xy());
    total += score_detections(found, s.doors, 1.0);
  }
  total.finalize();
  EXPECT_GE(total.precision, 0.9);
  EXPECT_GE(total.recall, 0.9);
}

TEST(Cues, ResidencyFidelityAndClusterSpacing) {
  for (int k : {1, 3, 8}) {
    const Scenario s = load_scenario_file(scenario_path("env" + std::to_string(k) + ".json"));
    const KnownMap known = fully_known(rasterize(s));
    const BinaryMap b = flatten(known, 0.0, 1.8);
    const CuePipeline p = run_cue_pipeline(b, CueConfig{});
    for (const auto& sd : p.cues.saddles) {
      EXPECT_EQ(p.filtered[p.filtered.cell_of(sd.xy())], 0);
    }
    for (const auto& mx : p.cues.maxima) {
      const Cell2 c = p.filtered.cell_of(mx.point.xy());
      EXPECT_EQ(p.filtered[c], 0);
      EXPECT_GT(mx.distance, 0.0);
      EXPECT_EQ(mx.distance, p.distance[c]);
    }
    for (std::size_t i = 0; i < p.cues.saddles.size(); ++i) {
      for (std::size_t j = i + 1; j < p.cues.saddles.size(); ++j) {
        EXPECT_GT(distance(p.cues.saddles[i].xy(), p.cues.saddles[j].xy()), 0.0);
      }
    }
  }
}

TEST(Cues, ConstantOffsetLeavesCuesUnchanged) {
  const BinaryMap b = two_rooms_map();
  const CueConfig cfg;
  const CuePipeline p = run_cue_pipeline(b, cfg);
  DistanceField shifted = p.distance;
  for (auto& v : shifted.data()) v += 0.75;
  const HessianField h2 = hessian(shifted);
  const CueSet a = classify_cues(b, p.filtered, p.distance, p.hessian, cfg);
  const CueSet c = classify_cues(b, p.filtered, shifted, h2, cfg);
  ASSERT_EQ(a.saddles.size(), c.saddles.size());
  ASSERT_EQ(a.maxima.size(), c.maxima.size());
  for (std::size_t i = 0; i < a.saddles.size(); ++i) EXPECT_EQ(a.saddles[i], c.saddles[i]);
  for (std::size_t i = 0; i < a.maxima.size(); ++i) {
    EXPECT_EQ(a.maxima[i].point, c.maxima[i].point);
    EXPECT_NEAR(c.maxima[i].distance - a.maxima[i].distance, 0.75, 1e-12);
  }
}

TEST(Cues, UnknownSpaceCountsAsFree) {
  const KnownMap k(GridSpec{20, 20, 10, 0.2});
  const CueSet c = extract_cues(k, CueConfig{});
  EXPECT_TRUE(c.saddles.empty());
  EXPECT_TRUE(c.maxima.empty());
}

TEST(Pgm, BinaryRoundTrip) {
  std::mt19937_64 rng(5);
  const BinaryMap b = random_map(rng, 23, 17, 0.3);
  std::stringstream ss;
  write_pgm(ss, b);
  EXPECT_EQ(ss.str().substr(0, 2), "P2");
  EXPECT_EQ(read_pgm_binary(ss, 0.2), b);
}

TEST(Pgm, DistanceValuesScaledAndClamped) {
  DistanceField m(2, 1, 0.2);
  m(0, 0) = 1.234;
  m(1, 0) = 1000.0;
  std::stringstream ss;
  write_pgm(ss, m);
  std::string magic;
  int w, h, maxval, a, c;
  ss >> magic >> w >> h >> maxval >> a >> c;
  EXPECT_EQ(magic, "P2");
  EXPECT_EQ(maxval, 65535);
  EXPECT_EQ(a, 123);
  EXPECT_EQ(c, 65535);
}
