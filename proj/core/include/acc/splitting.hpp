#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "acc/blobs.hpp"
#include "acc/raster.hpp"

namespace acc::split {

/// Edges of a pi-shaped membership function: rising on [e1,e2], 1 on
/// [e2,e3], falling on [e3,e4], 0 elsewhere. A ramp whose two edges coincide
/// degenerates to a step.
struct FuzzyPiParams {
  double e1 = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;
  double e4 = 0.0;
};

/// Spline pi membership in [0,1].
double fuzzy_pi(double u, const FuzzyPiParams& p);

struct SegParams {
  double h_min = 0.15;
  double h_max = 0.37;
  double h_step = 0.01;
  double a_min = 0.0;
  double a_max = 0.0;
  std::array<double, 4> circ_edges{0.15, 0.5, 0.9, 1.0};
  double a_thresh_factor = 0.6;
  double circ_split = 0.6;
  int max_recursion_depth = 5;
  /// Upper plateau edge of the area function: max(2 a_min, a_max) when set,
  /// a_max otherwise.
  bool area_plateau_max = true;
  /// Evaluate the h candidates concurrently; the chosen h is unaffected.
  bool parallel_sweep = false;

  void validate() const;
  std::vector<double> h_values() const;
  FuzzyPiParams area_edges() const;
  FuzzyPiParams circularity_edges() const;
};

struct ColonyShape {
  int area = 0;
  double circularity = 0.0;
};

/// (1, E, 2E, 3E-1) with E = ceil(blob_area / median_area).
FuzzyPiParams count_edges(int blob_area, double median_area);

/// Mean over colonies of mu_area * mu_circularity, times mu_count(K).
/// Empty input scores 0.
double blob_quality(std::span<const ColonyShape> colonies, int blob_area, double median_area,
                    const SegParams& params);

struct BlobSegmentation {
  int blob_id = 0;
  /// Threshold chosen for the top-level split; empty when the blob was not split.
  std::optional<double> h_opt;
  /// Colonies in the blob's bounding-box frame; 0 is background or line.
  LabelMap labels;
  double quality = 0.0;
  std::vector<ColonyShape> colonies;
  /// Q for every swept h (empty if the sweep did not run).
  std::vector<double> sweep_quality;
};

/// Median blob area (mean of the two middle values for even counts).
double median_area(const std::vector<blobs::Blob>& blobs);

/// Splits one blob by the extended-minima sweep. `gray_enhanced` is the
/// full-image enhanced grayscale plane in [0,1].
BlobSegmentation split_blob(const blobs::Blob& blob, const GrayPlane& gray_enhanced,
                            double median_area, const SegParams& params, int depth = 0);

struct Segmentation {
  /// Colony pixels; watershed lines stay 0.
  BinaryMask mask;
  /// Colonies numbered in raster order of their first pixel.
  LabelMap colonies;
  int colony_count = 0;
  std::vector<BlobSegmentation> blobs;
};

/// Splits every blob, then drops colonies under 0.5 a_min and fills holes
/// inside each colony.
Segmentation segment_image(const std::vector<blobs::Blob>& blobs, const GrayPlane& gray_enhanced,
                           const SegParams& params);

}  // namespace acc::split
