#pragma once

#include <filesystem>

#include "acc/raster.hpp"

namespace acc::imaging {

/// Reads a PNG/TIFF/JPEG file with 1, 3 or 4 channels (alpha is dropped).
/// 8-bit samples are divided by 255, 16-bit samples by 65535. Gray sources
/// are replicated into all three channels.
RgbImage load_rgb(const std::filesystem::path& path);

/// Writes an 8-bit RGB PNG; samples are clamped to [0,1] and rounded.
void save_rgb_png(const RgbImage& img, const std::filesystem::path& path);

/// Any non-zero sample is foreground.
BinaryMask load_mask(const std::filesystem::path& path);
/// Writes 0/255 8-bit single channel PNG.
void save_mask_png(const BinaryMask& mask, const std::filesystem::path& path);

/// BT.601 luma: 0.2989 r + 0.5870 g + 0.1140 b.
GrayPlane to_gray(const RgbImage& img);

GrayPlane channel(const RgbImage& img, int c);

/// Separable Gaussian smoothing with replicate padding. The kernel half-width
/// along each axis is ceil(half_extent * sigma), and the truncated kernel is
/// renormalized to unit mass.
GrayPlane gaussian_filter(const GrayPlane& plane, double sigma_x, double sigma_y,
                          double half_extent = 2.0);

/// (x - min) / (max - min); an all-constant plane maps to zeros.
GrayPlane minmax_normalize(const GrayPlane& plane);

}  // namespace acc::imaging
