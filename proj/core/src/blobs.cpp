#include "acc/blobs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "acc/imaging.hpp"

namespace acc::blobs {

GrayPlane suppress_background(const GrayPlane& pc_plane, int r_obrcbr, double sigma_x,
                              double sigma_y, double half_extent) {
  if (r_obrcbr < 1) throw ParameterError("suppress_background: r_obrcbr must be >= 1");
  const GrayPlane background =
      morph::open_close_by_reconstruction(pc_plane, morph::StructuringElement::disk(r_obrcbr));
  GrayPlane residual(pc_plane.width(), pc_plane.height());
  for (std::size_t i = 0; i < residual.size(); ++i) {
    residual[i] = std::abs(pc_plane[i] - background[i]);
  }
  return imaging::minmax_normalize(
      imaging::gaussian_filter(residual, sigma_x, sigma_y, half_extent));
}

PixelFeatureMatrix build_pixel_features(const GrayPlane& plane) {
  PixelFeatureMatrix z;
  z.width = plane.width();
  z.height = plane.height();
  z.columns.resize(plane.size());
  for (int y = 0; y < plane.height(); ++y) {
    for (int x = 0; x < plane.width(); ++x) {
      auto& col = z.columns[plane.index(x, y)];
      col[0] = plane(x, y);
      for (int k = 0; k < 8; ++k) {
        col[static_cast<std::size_t>(k) + 1] = plane.clamped(x + kNeighbor8Dx[k], y + kNeighbor8Dy[k]);
      }
    }
  }
  return z;
}

BinaryMask kmeans_blob_mask(const PixelFeatureMatrix& features, KmeansTrace* trace,
                            int max_iterations) {
  constexpr int kRows = PixelFeatureMatrix::kRows;
  using Centroid = std::array<double, kRows>;
  std::array<Centroid, 2> c{};
  c[0].fill(0.0);
  c[1].fill(1.0);

  const std::size_t n = features.columns.size();
  std::vector<std::uint8_t> assign(n, 0);
  bool first = true;
  int iterations = 0;
  for (int it = 0; it < max_iterations; ++it) {
    bool changed = false;
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& z = features.columns[i];
      double d0 = 0.0, d1 = 0.0;
      for (int r = 0; r < kRows; ++r) {
        const double a = z[static_cast<std::size_t>(r)] - c[0][static_cast<std::size_t>(r)];
        const double b = z[static_cast<std::size_t>(r)] - c[1][static_cast<std::size_t>(r)];
        d0 += a * a;
        d1 += b * b;
      }
      const std::uint8_t label = d1 < d0 ? 1 : 0;
      objective += label ? d1 : d0;
      if (first || label != assign[i]) changed = true;
      assign[i] = label;
    }
    if (trace) trace->objective.push_back(objective);
    first = false;
    if (!changed) break;
    ++iterations;

    std::array<Centroid, 2> sum{};
    std::array<std::size_t, 2> count{0, 0};
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = sum[assign[i]];
      for (int r = 0; r < kRows; ++r) s[static_cast<std::size_t>(r)] += features.columns[i][static_cast<std::size_t>(r)];
      ++count[assign[i]];
    }
    for (int k = 0; k < 2; ++k) {
      if (count[static_cast<std::size_t>(k)] == 0) continue;
      for (int r = 0; r < kRows; ++r) {
        c[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)] =
            sum[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)] / static_cast<double>(count[static_cast<std::size_t>(k)]);
      }
    }
  }

  auto mean_of = [](const Centroid& v) {
    double s = 0.0;
    for (double e : v) s += e;
    return s / kRows;
  };
  const std::uint8_t fg = mean_of(c[1]) >= mean_of(c[0]) ? 1 : 0;
  if (trace) {
    trace->iterations = iterations;
    trace->centroids = c;
  }
  BinaryMask mask(features.width, features.height, 0);
  for (std::size_t i = 0; i < n; ++i) mask[i] = assign[i] == fg ? 1 : 0;
  return mask;
}

double boundary_perimeter(const BinaryMask& region) {
  // Directions clockwise on screen (y down), starting east.
  static constexpr int kDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
  static constexpr int kDy[8] = {0, 1, 1, 1, 0, -1, -1, -1};
  auto on = [&](int x, int y) { return region.contains(x, y) && region(x, y) != 0; };
  auto direction_to = [](int dx, int dy) {
    for (int k = 0; k < 8; ++k) {
      if (kDx[k] == dx && kDy[k] == dy) return k;
    }
    return 0;
  };

  int sx = -1, sy = -1;
  for (int y = 0; y < region.height() && sx < 0; ++y) {
    for (int x = 0; x < region.width(); ++x) {
      if (region(x, y)) {
        sx = x;
        sy = y;
        break;
      }
    }
  }
  if (sx < 0) return 0.0;

  // Moore neighbour tracing; the west neighbour of the first raster pixel is
  // background, so it seeds the backtrack direction.
  auto step = [&](int cx, int cy, int back, int& nx, int& ny, int& nback) {
    for (int k = 1; k <= 8; ++k) {
      const int d = (back + k) % 8;
      const int tx = cx + kDx[d], ty = cy + kDy[d];
      if (on(tx, ty)) {
        const int pd = (back + k - 1) % 8;
        const int bx = cx + kDx[pd], by = cy + kDy[pd];
        nx = tx;
        ny = ty;
        nback = direction_to(bx - tx, by - ty);
        return d;
      }
    }
    return -1;
  };

  int nx = 0, ny = 0, nback = 0;
  const int first_dir = step(sx, sy, 4, nx, ny, nback);
  if (first_dir < 0) return 0.0;
  const int first_x = nx, first_y = ny;
  double length = 0.0;
  int cx = sx, cy = sy, back = 4;
  const std::size_t guard = 8 * region.size() + 16;
  for (std::size_t iter = 0; iter < guard; ++iter) {
    const int d = step(cx, cy, back, nx, ny, nback);
    if (iter > 0 && cx == sx && cy == sy && nx == first_x && ny == first_y) break;
    length += (d % 2 == 0) ? 1.0 : std::numbers::sqrt2;
    cx = nx;
    cy = ny;
    back = nback;
  }
  return length;
}

double circularity(int area, double perimeter) {
  if (area <= 0) return 0.0;
  if (!(perimeter > 0.0)) return 1.0;
  return std::clamp(4.0 * std::numbers::pi * area / (perimeter * perimeter), 0.0, 1.0);
}

double circularity(const BinaryMask& region) {
  int area = 0;
  for (auto v : region.pixels()) area += v ? 1 : 0;
  return circularity(area, boundary_perimeter(region));
}

Blob extract_region(const LabelMap& labels, int label, int id) {
  int x0 = labels.width(), y0 = labels.height(), x1 = -1, y1 = -1;
  for (int y = 0; y < labels.height(); ++y) {
    for (int x = 0; x < labels.width(); ++x) {
      if (labels(x, y) != label) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  Blob b;
  b.id = id;
  if (x1 < 0) return b;
  b.bbox = {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
  b.mask = BinaryMask(b.bbox.width, b.bbox.height, 0);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (labels(x, y) == label) {
        b.mask(x - x0, y - y0) = 1;
        ++b.area;
      }
    }
  }
  b.circularity = circularity(b.area, boundary_perimeter(b.mask));
  return b;
}

std::vector<Blob> label_regions(const LabelMap& labels, int count) {
  std::vector<BoundingBox> boxes(static_cast<std::size_t>(count) + 1);
  std::vector<int> x1(static_cast<std::size_t>(count) + 1, -1), y1(static_cast<std::size_t>(count) + 1, -1);
  for (auto& b : boxes) b = {labels.width(), labels.height(), 0, 0};
  for (int y = 0; y < labels.height(); ++y) {
    for (int x = 0; x < labels.width(); ++x) {
      const int l = labels(x, y);
      if (l <= 0) continue;
      auto& b = boxes[static_cast<std::size_t>(l)];
      b.x = std::min(b.x, x);
      b.y = std::min(b.y, y);
      x1[static_cast<std::size_t>(l)] = std::max(x1[static_cast<std::size_t>(l)], x);
      y1[static_cast<std::size_t>(l)] = std::max(y1[static_cast<std::size_t>(l)], y);
    }
  }
  std::vector<Blob> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int l = 1; l <= count; ++l) {
    Blob b;
    b.id = l;
    auto& box = boxes[static_cast<std::size_t>(l)];
    if (x1[static_cast<std::size_t>(l)] < 0) {
      out.push_back(std::move(b));
      continue;
    }
    box.width = x1[static_cast<std::size_t>(l)] - box.x + 1;
    box.height = y1[static_cast<std::size_t>(l)] - box.y + 1;
    b.bbox = box;
    b.mask = BinaryMask(box.width, box.height, 0);
    for (int y = 0; y < box.height; ++y) {
      for (int x = 0; x < box.width; ++x) {
        if (labels(box.x + x, box.y + y) == l) {
          b.mask(x, y) = 1;
          ++b.area;
        }
      }
    }
    b.circularity = circularity(b.area, boundary_perimeter(b.mask));
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<Blob> postprocess_blobs(const BinaryMask& mask, int a_min, int dilate_radius) {
  if (a_min < 1) throw ParameterError("postprocess_blobs: a_min must be >= 1");
  BinaryMask m = dilate_radius > 0
                     ? morph::dilate(mask, morph::StructuringElement::disk(dilate_radius))
                     : mask;
  m = morph::fill_holes(m);
  int count = 0;
  const LabelMap labels = morph::connected_components(m, &count);
  std::vector<Blob> kept;
  for (Blob& b : label_regions(labels, count)) {
    if (2.0 * b.area < static_cast<double>(a_min)) continue;
    b.id = static_cast<int>(kept.size()) + 1;
    kept.push_back(std::move(b));
  }
  return kept;
}

BinaryMask blob_union(const std::vector<Blob>& blobs, int width, int height) {
  BinaryMask out(width, height, 0);
  for (const Blob& b : blobs) {
    for (int y = 0; y < b.bbox.height; ++y) {
      for (int x = 0; x < b.bbox.width; ++x) {
        if (b.mask(x, y)) out(b.bbox.x + x, b.bbox.y + y) = 1;
      }
    }
  }
  return out;
}

}  // namespace acc::blobs
