#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "acc/evaluation.hpp"
#include "acc/raster.hpp"

namespace acc::synth {

struct SynthSpec {
  int width = 640;
  int height = 640;
  int colonies = 30;
  /// Semi-major axis range in pixels.
  double radius_min = 8.0;
  double radius_max = 14.0;
  double eccentricity_min = 0.0;
  double eccentricity_max = 0.6;
  /// Centres of two colonies stay at least (1 - overlap) times the sum of
  /// their semi-major axes apart; 0 additionally keeps a 2 px gap.
  double overlap = 0.0;
  Rgb stain{0.42, 0.18, 0.52};
  Rgb background{0.93, 0.91, 0.88};
  /// Mean stain mixing fraction over a colony, drawn per colony.
  double darkness_min = 0.5;
  double darkness_max = 0.8;
  /// Peak-to-peak amplitude of the linear illumination ramp.
  double gradient = 0.08;
  double noise_sigma = 0.02;
  /// Darkens everything outside a centred dish circle and keeps colonies inside it.
  bool flask_ring = false;
  std::uint64_t seed = 1;
  int max_attempts = 10000;

  void validate() const;
};

struct Colony {
  double cx = 0.0;
  double cy = 0.0;
  double semi_major = 0.0;
  double semi_minor = 0.0;
  double angle = 0.0;
  double darkness = 0.0;
};

struct SynthDish {
  /// Samples are multiples of 1/255 so an 8-bit PNG round trip is exact.
  RgbImage image;
  /// Exact ellipse centres.
  std::vector<eval::GtMark> marks;
  /// Each pixel belongs to the covering colony whose normalized radius is smallest.
  LabelMap gt_labels;
  /// gt_labels > 0, minus pixels touching a lower label, so that each colony
  /// is its own 8-connected component.
  BinaryMask gt_mask;
  std::vector<Colony> colonies;
};

/// Throws InputError when a colony cannot be placed within max_attempts draws.
SynthDish generate(const SynthSpec& spec);

/// Normalized elliptic radius of (x, y) for a colony; < 1 inside.
double normalized_radius(const Colony& c, double x, double y);

/// Reads an INI file. The [synth] section holds SynthSpec keys plus
/// `images` (dish count) and `name` (file prefix); seed i of a multi-image
/// spec is seed + i.
struct SynthJob {
  SynthSpec spec;
  int images = 1;
  std::string name = "dish";
};
SynthJob read_spec(const std::filesystem::path& path);

/// Writes <name>_<i>.png, <name>_<i>_gt.png and marks.csv into out_dir.
void write_job(const SynthJob& job, const std::filesystem::path& out_dir);

std::string image_name(const SynthJob& job, int index);

}  // namespace acc::synth
