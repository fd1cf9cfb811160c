#include "acc/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <vector>

namespace acc::imaging {

namespace {

double sample_max(int depth) {
  switch (depth) {
    case CV_8U: return 255.0;
    case CV_16U: return 65535.0;
    default: throw FormatError("unsupported sample depth (expected 8 or 16 bit)");
  }
}

template <typename Sample>
RgbImage convert(const cv::Mat& m, double full_scale) {
  const int channels = m.channels();
  RgbImage img(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y) {
    const Sample* row = m.ptr<Sample>(y);
    for (int x = 0; x < m.cols; ++x) {
      const Sample* px = row + static_cast<std::ptrdiff_t>(x) * channels;
      if (channels == 1) {
        const double v = px[0] / full_scale;
        img(x, y) = {v, v, v};
      } else {
        // OpenCV stores BGR(A).
        img(x, y) = {px[2] / full_scale, px[1] / full_scale, px[0] / full_scale};
      }
    }
  }
  return img;
}

cv::Mat read_raw(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw IoError("cannot read image: " + path.string());
  }
  cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED | cv::IMREAD_ANYDEPTH);
  if (m.empty()) {
    throw IoError("failed to decode image: " + path.string());
  }
  return m;
}

void write_or_throw(const std::filesystem::path& path, const cv::Mat& m) {
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), m);
  } catch (const cv::Exception& e) {
    throw IoError("cannot write " + path.string() + ": " + e.what());
  }
  if (!ok) {
    throw IoError("cannot write " + path.string());
  }
}

std::vector<double> gaussian_kernel(double sigma, double half_extent) {
  const int half = static_cast<int>(std::ceil(half_extent * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * half + 1));
  double sum = 0.0;
  for (int i = -half; i <= half; ++i) {
    const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    k[static_cast<std::size_t>(i + half)] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

}  // namespace

RgbImage load_rgb(const std::filesystem::path& path) {
  const cv::Mat m = read_raw(path);
  const int channels = m.channels();
  if (channels != 1 && channels != 3 && channels != 4) {
    throw FormatError("unsupported channel layout (" + std::to_string(channels) +
                      " channels): " + path.string());
  }
  const double full_scale = sample_max(m.depth());
  return m.depth() == CV_8U ? convert<std::uint8_t>(m, full_scale) : convert<std::uint16_t>(m, full_scale);
}

void save_rgb_png(const RgbImage& img, const std::filesystem::path& path) {
  cv::Mat m(img.height(), img.width(), CV_8UC3);
  auto to8 = [](double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  };
  for (int y = 0; y < img.height(); ++y) {
    auto* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.width(); ++x) {
      const Rgb& p = img(x, y);
      row[3 * x + 0] = to8(p.b);
      row[3 * x + 1] = to8(p.g);
      row[3 * x + 2] = to8(p.r);
    }
  }
  write_or_throw(path, m);
}

BinaryMask load_mask(const std::filesystem::path& path) {
  cv::Mat m = read_raw(path);
  const int channels = m.channels();
  if (channels != 1 && channels != 3 && channels != 4) {
    throw FormatError("unsupported channel layout for mask: " + path.string());
  }
  BinaryMask mask(m.cols, m.rows);
  const int depth = m.depth();
  if (depth != CV_8U && depth != CV_16U) {
    throw FormatError("unsupported mask depth: " + path.string());
  }
  for (int y = 0; y < m.rows; ++y) {
    for (int x = 0; x < m.cols; ++x) {
      bool on = false;
      for (int c = 0; c < std::min(channels, 3); ++c) {
        const std::size_t off = static_cast<std::size_t>(x) * channels + c;
        on = on || (depth == CV_8U ? m.ptr<std::uint8_t>(y)[off] != 0
                                   : m.ptr<std::uint16_t>(y)[off] != 0);
      }
      mask(x, y) = on ? 1 : 0;
    }
  }
  return mask;
}

void save_mask_png(const BinaryMask& mask, const std::filesystem::path& path) {
  cv::Mat m(mask.height(), mask.width(), CV_8UC1);
  for (int y = 0; y < mask.height(); ++y) {
    auto* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < mask.width(); ++x) row[x] = mask(x, y) ? 255 : 0;
  }
  write_or_throw(path, m);
}

GrayPlane to_gray(const RgbImage& img) {
  GrayPlane out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) {
    const Rgb& p = img[i];
    out[i] = 0.2989 * p.r + 0.5870 * p.g + 0.1140 * p.b;
  }
  return out;
}

GrayPlane channel(const RgbImage& img, int c) {
  GrayPlane out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) {
    out[i] = c == 0 ? img[i].r : (c == 1 ? img[i].g : img[i].b);
  }
  return out;
}

GrayPlane gaussian_filter(const GrayPlane& plane, double sigma_x, double sigma_y,
                          double half_extent) {
  if (!(sigma_x > 0.0) || !(sigma_y > 0.0)) {
    throw ParameterError("gaussian_filter: sigma must be positive");
  }
  if (!(half_extent >= 1.0)) {
    throw ParameterError("gaussian_filter: half_extent must be >= 1");
  }
  const int w = plane.width();
  const int h = plane.height();
  if (plane.empty()) return plane;

  const auto kx = gaussian_kernel(sigma_x, half_extent);
  const auto ky = gaussian_kernel(sigma_y, half_extent);
  const int hx = static_cast<int>(kx.size() / 2);
  const int hy = static_cast<int>(ky.size() / 2);

  GrayPlane tmp(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -hx; i <= hx; ++i) {
        acc += kx[static_cast<std::size_t>(i + hx)] * plane.clamped(x + i, y);
      }
      tmp(x, y) = acc;
    }
  }
  GrayPlane out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int j = -hy; j <= hy; ++j) {
        acc += ky[static_cast<std::size_t>(j + hy)] * tmp.clamped(x, y + j);
      }
      out(x, y) = acc;
    }
  }
  return out;
}

GrayPlane minmax_normalize(const GrayPlane& plane) {
  GrayPlane out(plane.width(), plane.height(), 0.0);
  if (plane.empty()) return out;
  const auto [lo, hi] = std::minmax_element(plane.pixels().begin(), plane.pixels().end());
  const double mn = *lo;
  const double range = *hi - mn;
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < plane.size(); ++i) out[i] = (plane[i] - mn) / range;
  return out;
}

}  // namespace acc::imaging
