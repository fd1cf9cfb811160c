#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "acc/raster.hpp"

namespace acc::eval {

/// Ground-truth colony centre in pixel coordinates (column, row).
struct GtMark {
  double x = 0.0;
  double y = 0.0;
};

struct ConfusionCounts {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// A region holding at least one mark is a true positive, a region with none
/// is a false positive, and every mark beyond the first in a region (or on
/// background/lines) is a false negative. Marks are rounded to the nearest
/// pixel; a mark outside the raster throws InputError.
ConfusionCounts match_gt_marks(const LabelMap& labels, std::span<const GtMark> marks);

struct DetectionMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  /// Set when precision or recall is undefined or TP is zero.
  bool degenerate = false;
};

DetectionMetrics prf1(const ConfusionCounts& c);
/// Harmonic mean of a given precision/recall pair.
double f1_score(double precision, double recall);

/// sqrt(mean(((pred - gt) / gt)^2)); a zero GT count throws InputError.
double count_rmse(std::span<const std::pair<double, double>> predicted_vs_gt);

/// One mark per 8-connected component, at the component's pixel centroid.
std::vector<GtMark> marks_from_mask(const BinaryMask& mask);

using MarksByImage = std::map<std::string, std::vector<GtMark>>;

/// CSV with header `image,x,y`.
MarksByImage read_marks_csv(const std::filesystem::path& path);
std::string marks_csv(const MarksByImage& marks);

struct ImageMetrics {
  std::string image;
  ConfusionCounts counts;
  DetectionMetrics metrics;
  int pred_count = 0;
  int gt_count = 0;
};

ImageMetrics evaluate(const std::string& image, const LabelMap& labels, std::span<const GtMark> marks);

inline constexpr const char* kMetricsCsvHeader =
    "image,tp,fp,fn,precision,recall,f1,pred_count,gt_count";
std::string metrics_csv(const std::vector<ImageMetrics>& rows);

}  // namespace acc::eval
