#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "mrmr/geometry.hpp"

namespace mrmr {

// Shape and metric of a voxel lattice anchored at the world origin.
// Voxel (i, j, k) covers [i*cell, (i+1)*cell) x [j*cell, ...) x [k*cell, ...).
struct GridSpec {
  int nx = 0;
  int ny = 0;
  int nz = 0;
  double cell_size = 0.2;

  std::size_t columns() const { return static_cast<std::size_t>(nx) * ny; }
  std::size_t voxels() const { return columns() * nz; }

  bool contains(Cell2 c) const { return c.x >= 0 && c.y >= 0 && c.x < nx && c.y < ny; }
  bool contains(Cell3 c) const { return contains(Cell2{c.x, c.y}) && c.z >= 0 && c.z < nz; }

  // Columns are contiguous in z so that per-column scans stay cache friendly.
  std::size_t column_index(Cell2 c) const {
    return static_cast<std::size_t>(c.y) * nx + c.x;
  }
  std::size_t index(Cell3 c) const {
    return column_index({c.x, c.y}) * nz + c.z;
  }
  Cell3 cell_of_index(std::size_t idx) const {
    const int z = static_cast<int>(idx % nz);
    const std::size_t col = idx / nz;
    return {static_cast<int>(col % nx), static_cast<int>(col / nx), z};
  }

  double center(int i) const { return (i + 0.5) * cell_size; }
  Vec3 center(Cell3 c) const { return {center(c.x), center(c.y), center(c.z)}; }
  Vec2 center(Cell2 c) const { return {center(c.x), center(c.y)}; }

  int to_index(double v) const { return static_cast<int>(std::floor(v / cell_size)); }
  Cell2 cell_of(Vec2 p) const { return {to_index(p.x), to_index(p.y)}; }
  Cell3 cell_of(Vec3 p) const { return {to_index(p.x), to_index(p.y), to_index(p.z)}; }

  double width() const { return nx * cell_size; }
  double depth() const { return ny * cell_size; }
  double height() const { return nz * cell_size; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Dense row-major 2D raster, x fastest.
template <typename T>
class Grid2 {
 public:
  Grid2() = default;
  Grid2(int width, int height, double cell_size, T fill = T{})
      : width_(width), height_(height), cell_size_(cell_size),
        data_(static_cast<std::size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  double cell_size() const { return cell_size_; }
  std::size_t size() const { return data_.size(); }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  bool contains(Cell2 c) const { return contains(c.x, c.y); }

  T& operator()(int x, int y) {
    assert(contains(x, y));
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  const T& operator()(int x, int y) const {
    assert(contains(x, y));
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  T& operator[](Cell2 c) { return (*this)(c.x, c.y); }
  const T& operator[](Cell2 c) const { return (*this)(c.x, c.y); }

  Vec2 center(Cell2 c) const { return {(c.x + 0.5) * cell_size_, (c.y + 0.5) * cell_size_}; }
  Cell2 cell_of(Vec2 p) const {
    return {static_cast<int>(std::floor(p.x / cell_size_)),
            static_cast<int>(std::floor(p.y / cell_size_))};
  }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  friend bool operator==(const Grid2&, const Grid2&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  double cell_size_ = 0.2;
  std::vector<T> data_;
};

}  // namespace mrmr
