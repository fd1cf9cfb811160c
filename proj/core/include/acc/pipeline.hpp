#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "acc/blobs.hpp"
#include "acc/evaluation.hpp"
#include "acc/pca.hpp"
#include "acc/raster.hpp"
#include "acc/reporting.hpp"
#include "acc/splitting.hpp"
#include "acc/texture.hpp"

namespace acc::pipeline {

struct PipelineConfig {
  // [io]
  std::string input;
  std::string output;
  std::string gt_marks;
  std::string gt_masks;
  // [runtime]; 0 selects the hardware concurrency.
  int threads = 1;
  // [texture]
  texture::ClaheParams clahe;
  texture::GlcmParams glcm;
  // [blobs]
  std::array<double, 2> pca_sigma{0.0, 0.0};
  int r_obrcbr = 0;
  int blob_dilate_radius = 1;
  double gaussian_half_extent = 2.0;
  // [segmentation]
  std::array<double, 2> gray_sigma{0.0, 0.0};
  texture::ClaheParams gray_ahe{16, 16, 1.0, 256};
  split::SegParams seg;

  /// Throws ParameterError on any out-of-range value.
  void validate() const;
  /// Flattened `section.key` pairs of the processing parameters (io and
  /// runtime excluded), in a fixed order.
  std::vector<std::pair<std::string, std::string>> processing_parameters() const;

  friend bool operator==(const PipelineConfig& a, const PipelineConfig& b);
};

/// Parses the INI text. r_obrcbr, a_min, a_max, pca_sigma_x/y and
/// gray_sigma_x/y are required; everything else has a default.
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);
/// Every value is written; doubles use %.17g so parsing restores them exactly.
std::string serialize_config(const PipelineConfig& cfg);

/// Every intermediate of one image.
struct Analysis {
  pca::PcDecomposition pcs;
  texture::ChannelSelection selection;
  GrayPlane suppressed;
  BinaryMask kmeans_mask;
  std::vector<blobs::Blob> blobs;
  GrayPlane gray_enhanced;
  split::Segmentation segmentation;
  std::vector<report::ColonyRecord> records;
  report::Summary summary;
};

/// Runs the three phases on an in-memory image.
Analysis process(const RgbImage& img, const PipelineConfig& cfg, const std::string& image_id);

struct ImageOutcome {
  std::filesystem::path path;
  std::string image;
  bool ok = false;
  std::string error;
  int colony_count = 0;
  int blob_count = 0;
  std::optional<eval::ImageMetrics> metrics;
};

/// Loads, processes, writes outputs and, when marks are given, evaluates.
/// Errors are captured in the outcome instead of thrown.
ImageOutcome run_image(const PipelineConfig& cfg, const std::filesystem::path& path,
                       const std::vector<eval::GtMark>* marks);

/// Images named by cfg.input: a file, a directory (image files whose stem
/// does not end in `_gt`), or a glob in the last path component. Sorted.
std::vector<std::filesystem::path> collect_inputs(const std::string& input);

/// Marks for one image from a marks CSV or a masks directory
/// (<id>_gt.png, then <id>.png).
std::optional<std::vector<eval::GtMark>> find_marks(const PipelineConfig& cfg,
                                                     const eval::MarksByImage& csv_marks,
                                                     const std::string& image_id);

struct BatchResult {
  std::vector<ImageOutcome> outcomes;
  int failures = 0;
  /// 0 when every image succeeded, 1 otherwise.
  int exit_code = 0;
};

/// Throws InputError when no image matches; writes batch_summary.csv and,
/// with ground truth, metrics.csv next to the per-image outputs.
BatchResult run_batch(const PipelineConfig& cfg);

std::string batch_summary_csv(const std::vector<ImageOutcome>& outcomes);

int resolved_threads(int requested);

}  // namespace acc::pipeline
