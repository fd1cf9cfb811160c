#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "acc/raster.hpp"

namespace acc::report {

struct ChannelStats {
  double mean = 0.0;
  /// Population standard deviation.
  double std = 0.0;
};

struct ColonyRecord {
  std::string image;
  int colony_id = 0;
  double centroid_x = 0.0;
  double centroid_y = 0.0;
  int area = 0;
  double circularity = 0.0;
  ChannelStats r, g, b, gray, pc;
};

/// One record per positive label, ordered by label. `gray` and `pc` must
/// have the image's dimensions.
std::vector<ColonyRecord> extract_colony_features(const LabelMap& labels, const RgbImage& img,
                                                  const GrayPlane& gray, const GrayPlane& pc,
                                                  const std::string& image_id);

struct Summary {
  std::string image;
  int colony_count = 0;
  int blob_count = 0;
  int split_blobs = 0;
  double h_mean = 0.0;
  double h_min = 0.0;
  double h_max = 0.0;
  /// 1-based, as printed.
  int selected_channel = 0;
  std::array<double, 3> contrasts{};
  /// Flattened configuration used for the run.
  std::vector<std::pair<std::string, std::string>> parameters;
};

inline constexpr const char* kColonyCsvHeader =
    "image,colony_id,centroid_x,centroid_y,area_px,circularity,mean_r,std_r,mean_g,std_g,"
    "mean_b,std_b,mean_gray,std_gray,mean_pc,std_pc";

std::string colonies_csv(const std::vector<ColonyRecord>& records);
std::string summary_csv(const Summary& summary);

/// Input image with the 8-connected boundary pixels of every colony painted red.
RgbImage render_overlay(const RgbImage& img, const LabelMap& colonies);

struct OutputPaths {
  std::filesystem::path colonies_csv;
  std::filesystem::path summary_csv;
  std::filesystem::path mask_png;
  std::filesystem::path overlay_png;
};

OutputPaths output_paths(const std::filesystem::path& out_dir, const std::string& image_id);

/// Writes <image>_colonies.csv, <image>_summary.csv, <image>_mask.png and
/// <image>_overlay.png. Creates `out_dir` if needed.
OutputPaths write_outputs(const std::vector<ColonyRecord>& records, const BinaryMask& segmentation,
                          const LabelMap& colonies, const RgbImage& img, const Summary& summary,
                          const std::filesystem::path& out_dir);

/// Writes `text` to `path`, replacing it.
void write_text(const std::filesystem::path& path, const std::string& text);

/// Fixed six-decimal rendering used by every CSV writer.
std::string fixed6(double v);

}  // namespace acc::report
