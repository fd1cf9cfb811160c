#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "acc/errors.hpp"

namespace acc {

struct Point {
  int x = 0;
  int y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Row-major 2-D container shared by every pixel-level type in the library.
template <typename T>
class Raster {
 public:
  using value_type = T;

  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width), height_(height) {
    if (width < 0 || height < 0) {
      throw ParameterError("raster dimensions must be non-negative");
    }
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }
  Raster(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width < 0 || height < 0 ||
        data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw ParameterError("raster data size does not match dimensions");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  // Border-replicating accessor.
  const T& clamped(int x, int y) const {
    x = x < 0 ? 0 : (x >= width_ ? width_ - 1 : x);
    y = y < 0 ? 0 : (y >= height_ ? height_ - 1 : y);
    return data_[index(x, y)];
  }

  std::span<T> pixels() { return data_; }
  std::span<const T> pixels() const { return data_; }
  std::vector<T>& storage() { return data_; }
  const std::vector<T>& storage() const { return data_; }

  template <typename U>
  bool same_shape(const Raster<U>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

using RgbImage = Raster<Rgb>;
using GrayPlane = Raster<double>;
/// Values are 0 or 1.
using BinaryMask = Raster<std::uint8_t>;
/// 0 is background (or a watershed line); positive labels are regions.
using LabelMap = Raster<std::int32_t>;
/// Euclidean distance in pixel units.
using DistanceMap = Raster<double>;

template <typename T, typename U>
void require_same_shape(const Raster<T>& a, const Raster<U>& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ParameterError(std::string(what) + ": raster dimensions differ");
  }
}

// The eight neighbours in the fixed order N, NE, E, SE, S, SW, W, NW.
inline constexpr int kNeighbor8Dx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
inline constexpr int kNeighbor8Dy[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
inline constexpr int kNeighbor4Dx[4] = {0, 1, 0, -1};
inline constexpr int kNeighbor4Dy[4] = {-1, 0, 1, 0};

}  // namespace acc
