#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mrmr/geometry.hpp"
#include "mrmr/grid.hpp"
#include "mrmr/perception.hpp"

namespace mrmr {

// 1 = occupied, 0 = free or unknown.
using BinaryMap = Grid2<std::uint8_t>;
// Meters to the nearest occupied cell center.
using DistanceField = Grid2<double>;

struct HessianEntry {
  double fxx = 0.0;
  double fyy = 0.0;
  double fxy = 0.0;

  double det() const { return fxx * fyy - fxy * fxy; }
};
using HessianField = Grid2<HessianEntry>;

enum class MedianMode {
  // 1x3 pass, then 3x1 pass on its output. Erases any one-cell-thick line.
  sequential,
  // A cell is kept if either directional median keeps it. Isolated cells are
  // still removed and one-cell gaps in a line still close, but a wall seen
  // from one side (a single cell thick) survives.
  either_axis,
};

struct CueConfig {
  MedianMode median = MedianMode::either_axis;
  double z_low = 0.0;
  double z_high = 1.8;
  // Thresholds are in 1/m and were tuned for 0.2 m cells.
  double det_thresh = -0.1;
  double fxx_thresh = -0.1;
  // A saddle cell must also look like a pass at this scale: around a circle
  // of this radius the field goes clearly (by the margin) above and below
  // the cell value twice each. Both in meters; the radius is about one
  // doorway width.
  double saddle_ring_radius = 0.9;
  double saddle_ring_margin = 0.3;
  // Saddle cells within this distance collapse to one cue.
  double cluster_radius = 1.0;
  // Height at which 2D cues are exported.
  double cue_z = 1.0;
};

struct Maximum {
  Vec3 point;
  double distance = 0.0;  // wall distance at the point, meters
};

struct CueSet {
  std::vector<Vec3> saddles;
  std::vector<Maximum> maxima;
};

// Column (x, y) is 1 iff a voxel with center z in [z_low, z_high] is occupied.
// Throws std::invalid_argument if the band is empty or misses the world.
BinaryMap flatten(const KnownMap& map, double z_low, double z_high);

// 1x3 (along x) and 3x1 (along y) medians with replicated edges.
BinaryMap median_filter(const BinaryMap& b, MedianMode mode = MedianMode::either_axis);

// Exact Euclidean distance transform (separable lower-envelope method).
// Without any occupied cell every value is the map diagonal length.
DistanceField distance_transform(const BinaryMap& b);

// Second derivatives by central differences with h = cell size, one-sided
// stencils on the border. Throws std::invalid_argument below 3x3.
HessianField hessian(const DistanceField& m);

// Intermediate products of one extraction pass.
struct CuePipeline {
  BinaryMap binary;
  BinaryMap filtered;
  DistanceField distance;
  HessianField hessian;
  std::vector<Cell2> saddle_cells;  // before clustering
  std::vector<Cell2> maximum_cells;
  CueSet cues;
};

// Classifies cells of an already computed field. Exposed separately so that
// offset invariance and threshold behaviour can be exercised directly.
CueSet classify_cues(const BinaryMap& binary, const BinaryMap& filtered, const DistanceField& m,
                     const HessianField& h, const CueConfig& cfg,
                     std::vector<Cell2>* saddle_cells = nullptr,
                     std::vector<Cell2>* maximum_cells = nullptr);

CuePipeline run_cue_pipeline(const BinaryMap& binary, const CueConfig& cfg);
CueSet extract_cues(const BinaryMap& binary, const CueConfig& cfg);
CueSet extract_cues(const KnownMap& map, const CueConfig& cfg);

// Plain PGM (P2); values scaled by 100 and clamped to [0, 65535].
// Row 0 of the image is the largest y.
void write_pgm(std::ostream& out, const BinaryMap& b);
void write_pgm(std::ostream& out, const DistanceField& m);
// Reads P2 or P5; a pixel is occupied when value / 100 >= 0.5.
BinaryMap read_pgm_binary(std::istream& in, double cell_size);

}  // namespace mrmr
