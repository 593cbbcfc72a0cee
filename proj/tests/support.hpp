#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mrmr/cues.hpp"
#include "mrmr/perception.hpp"
#include "mrmr/world.hpp"

namespace mrmr::testing {

std::string scenario_path(const std::string& file);
std::string golden_path(const std::string& file);
std::string read_file(const std::string& path);
// Fresh empty directory under the system temp dir; any previous contents are removed.
std::string scratch_dir(const std::string& name);

// Square room of side `side` (interior) closed by walls of `wall` thickness,
// one spawn in the middle. Extents are interior + 2 walls; height 2.0 m.
Scenario closed_room(double side, double wall = 0.2);

// Two side-by-side 4 m x 4 m rooms joined by a 1 m door, as a binary map
// with one-cell walls. `door_center` receives the door center in meters.
BinaryMap two_rooms_map(Vec2* door_center = nullptr);
// Same layout as a scenario (walls 0.4 m thick so every flattening keeps them).
Scenario two_rooms_scenario();

// Every voxel known, matching the ground truth.
KnownMap fully_known(const GroundTruthWorld& w);

// Rectangle of free cells surrounded by a one-cell wall.
BinaryMap box_map(int inner_w, int inner_h, double cell = 0.2);

BinaryMap random_map(std::mt19937_64& rng, int w, int h, double p_occupied);

// Nearest occupied cell by exhaustive search.
DistanceField brute_force_distance(const BinaryMap& b);

// Free cells that are a strict maximum of the field along one of the four
// lattice axes and a strict minimum along the perpendicular one.
std::vector<Cell2> brute_force_saddles(const BinaryMap& b, const DistanceField& m);

}  // namespace mrmr::testing
