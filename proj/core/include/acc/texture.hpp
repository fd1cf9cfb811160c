#pragma once

#include <array>
#include <vector>

#include "acc/raster.hpp"

namespace acc::texture {

struct ClaheParams {
  int tiles_x = 16;
  int tiles_y = 16;
  /// Histogram cap as a fraction of the tile's pixel count.
  double clip_limit = 0.008;
  int bins = 256;

  void validate() const;
  /// Same parameters with the tile grid shrunk so that every tile spans at
  /// least 2x2 pixels of a width x height plane.
  ClaheParams fitted_to(int width, int height) const;
};

/// Contrast-limited adaptive histogram equalization of a plane in [0,1].
/// Tile mappings use the mid-bin cumulative histogram and are blended
/// bilinearly between the four nearest tile centres.
GrayPlane clahe(const GrayPlane& plane, const ClaheParams& params);

struct Offset {
  int dx = 1;
  int dy = 0;
};

/// Co-occurrence frequencies for one pixel offset, normalized to sum 1.
class Glcm {
 public:
  Glcm(int levels, Offset offset);

  int levels() const { return levels_; }
  Offset offset() const { return offset_; }
  /// 0-based gray-level indices.
  double operator()(int i, int j) const {
    return p_[static_cast<std::size_t>(i) * levels_ + static_cast<std::size_t>(j)];
  }
  double& operator()(int i, int j) {
    return p_[static_cast<std::size_t>(i) * levels_ + static_cast<std::size_t>(j)];
  }
  double total() const;
  /// Number of (pixel, partner) pairs counted before normalization.
  std::size_t pair_count() const { return pairs_; }

 private:
  friend Glcm glcm(const GrayPlane&, Offset, int);
  int levels_;
  Offset offset_;
  std::size_t pairs_ = 0;
  std::vector<double> p_;
};

/// Uniform partition of [min, max] into `levels` bins, 0-based; min maps to
/// bin 0 and max to bin levels-1. A constant plane maps entirely to bin 0.
std::vector<int> quantize(const GrayPlane& plane, int levels);

/// Counts ordered pairs (x,y) -> (x+dx, y+dy) with the partner inside the
/// image; not symmetrized.
Glcm glcm(const GrayPlane& plane, Offset offset, int levels);

/// Haralick contrast: sum |i-j|^2 p(i,j).
double glcm_contrast(const Glcm& g);

struct GlcmParams {
  int levels = 64;
  int distance = 1;
  /// The four directions 0, 45, 90 and 135 degrees at the given distance,
  /// written as (dx, dy) with y growing downwards.
  std::array<Offset, 4> offsets() const;
};

struct ChannelSelection {
  /// 0-based index of the plane with the lowest mean contrast.
  int index = 0;
  std::array<double, 3> contrasts{};
};

/// Each plane is min-max normalized, CLAHE-enhanced (tile grid fitted to the
/// plane), and scored by the contrast averaged over the four offsets. Ties
/// resolve to the lower index.
ChannelSelection select_pc_channel(const std::array<GrayPlane, 3>& planes,
                                   const ClaheParams& clahe_params,
                                   const GlcmParams& glcm_params);

double mean_contrast(const GrayPlane& enhanced, const GlcmParams& glcm_params);

}  // namespace acc::texture
