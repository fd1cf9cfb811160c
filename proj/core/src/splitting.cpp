#include "acc/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "acc/morphology.hpp"

namespace acc::split {

double fuzzy_pi(double u, const FuzzyPiParams& p) {
  if (!(u >= p.e1) || !(u <= p.e4)) return 0.0;
  if (u < p.e2) {
    const double span = p.e2 - p.e1;
    const double mid = 0.5 * (p.e1 + p.e2);
    if (u <= mid) {
      const double t = (u - p.e1) / span;
      return 2.0 * t * t;
    }
    const double t = (u - p.e2) / span;
    return 1.0 - 2.0 * t * t;
  }
  if (u <= p.e3) return 1.0;
  const double span = p.e4 - p.e3;
  const double mid = 0.5 * (p.e3 + p.e4);
  if (u <= mid) {
    const double t = (u - p.e3) / span;
    return 1.0 - 2.0 * t * t;
  }
  const double t = (u - p.e4) / span;
  return 2.0 * t * t;
}

void SegParams::validate() const {
  if (!(h_min > 0.0) || !(h_min < h_max)) throw ParameterError("h range must satisfy 0 < h_min < h_max");
  if (!(h_step > 0.0)) throw ParameterError("h_step must be positive");
  if (!(a_min >= 1.0) || !(a_min < a_max)) throw ParameterError("areas must satisfy 1 <= a_min < a_max");
  const auto& c = circ_edges;
  if (!(c[0] >= 0.0 && c[0] < c[1] && c[1] < c[2] && c[2] < c[3] && c[3] <= 1.0)) {
    throw ParameterError("circularity edges must satisfy 0 <= c1 < c2 < c3 < c4 <= 1");
  }
  if (!(a_thresh_factor > 0.0)) throw ParameterError("a_thresh_factor must be positive");
  if (!(circ_split > 0.0)) throw ParameterError("circ_split must be positive");
  if (max_recursion_depth < 0) throw ParameterError("max_recursion_depth must be >= 0");
}

std::vector<double> SegParams::h_values() const {
  std::vector<double> hs;
  const int n = static_cast<int>(std::floor((h_max - h_min) / h_step + 1e-9));
  for (int i = 0; i <= n; ++i) hs.push_back(h_min + i * h_step);
  return hs;
}

FuzzyPiParams SegParams::area_edges() const {
  const double plateau_end = area_plateau_max ? std::max(2.0 * a_min, a_max) : a_max;
  return {0.5 * a_min, a_min, plateau_end, 2.0 * a_max};
}

FuzzyPiParams SegParams::circularity_edges() const {
  return {circ_edges[0], circ_edges[1], circ_edges[2], circ_edges[3]};
}

FuzzyPiParams count_edges(int blob_area, double median_area) {
  const double e = median_area > 0.0 ? std::ceil(blob_area / median_area) : 1.0;
  const double expected = std::max(1.0, e);
  return {1.0, expected, 2.0 * expected, 3.0 * expected - 1.0};
}

double blob_quality(std::span<const ColonyShape> colonies, int blob_area, double median_area,
                    const SegParams& params) {
  if (colonies.empty()) return 0.0;
  const FuzzyPiParams area = params.area_edges();
  const FuzzyPiParams circ = params.circularity_edges();
  double sum = 0.0;
  for (const ColonyShape& c : colonies) {
    sum += fuzzy_pi(c.area, area) * fuzzy_pi(c.circularity, circ);
  }
  const double count_score =
      fuzzy_pi(static_cast<double>(colonies.size()), count_edges(blob_area, median_area));
  return sum / static_cast<double>(colonies.size()) * count_score;
}

double median_area(const std::vector<blobs::Blob>& blobs) {
  if (blobs.empty()) return 0.0;
  std::vector<int> a;
  a.reserve(blobs.size());
  for (const auto& b : blobs) a.push_back(b.area);
  std::sort(a.begin(), a.end());
  const std::size_t n = a.size();
  return n % 2 ? a[n / 2] : 0.5 * (a[n / 2 - 1] + a[n / 2]);
}

namespace {

constexpr int kMargin = 4;
constexpr int kRingWidth = 3;

int area_of(const BinaryMask& m) {
  int a = 0;
  for (auto v : m.pixels()) a += v ? 1 : 0;
  return a;
}

// Distance to the nearest non-region pixel, counting pixels beyond the crop
// as outside.
DistanceMap padded_distance(const BinaryMask& region) {
  BinaryMask padded(region.width() + 2, region.height() + 2, 0);
  for (int y = 0; y < region.height(); ++y) {
    for (int x = 0; x < region.width(); ++x) padded(x + 1, y + 1) = region(x, y);
  }
  const DistanceMap d = morph::distance_transform(padded);
  DistanceMap out(region.width(), region.height());
  for (int y = 0; y < region.height(); ++y) {
    for (int x = 0; x < region.width(); ++x) out(x, y) = d(x + 1, y + 1);
  }
  return out;
}

struct Candidate {
  double quality = 0.0;
  int markers = 0;
};

struct RegionSplit {
  std::vector<BinaryMask> regions;
  std::optional<double> h_opt;
  std::vector<double> sweep;
};

class RegionSplitter {
 public:
  RegionSplitter(const GrayPlane& basins, double median, const SegParams& params)
      : basins_(basins), median_(median), params_(params), hs_(params.h_values()) {}

  RegionSplit split(const BinaryMask& region, int depth) const {
    RegionSplit out;
    const int area = area_of(region);
    const double circ = blobs::circularity(area, blobs::boundary_perimeter(region));
    if (area <= params_.a_thresh_factor * median_ || circ >= params_.circ_split) {
      out.regions.push_back(region);
      return out;
    }

    GrayPlane plane(region.width(), region.height(), 1.0);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < region.size(); ++i) {
      if (!region[i]) continue;
      lo = std::min(lo, basins_[i]);
      hi = std::max(hi, basins_[i]);
    }
    if (!(hi > lo)) {
      out.regions.push_back(region);
      return out;
    }
    for (std::size_t i = 0; i < region.size(); ++i) {
      if (region[i]) plane[i] = (basins_[i] - lo) / (hi - lo);
    }
    GrayPlane topography = padded_distance(region);
    for (double& v : topography.storage()) v = -v;

    const ColonyShape whole{area, circ};
    auto evaluate = [&](double h, LabelMap* labels_out, int* count_out) {
      BinaryMask markers = morph::extended_minima(plane, h);
      for (std::size_t i = 0; i < markers.size(); ++i) markers[i] = markers[i] && region[i];
      int count = 0;
      morph::connected_components(markers, &count);
      Candidate c;
      c.markers = count;
      if (count <= 1) {
        c.quality = blob_quality(std::span(&whole, 1), area, median_, params_);
        return c;
      }
      LabelMap labels = morph::marker_watershed(topography, markers, region);
      std::vector<ColonyShape> shapes;
      for (const auto& r : blobs::label_regions(labels, count)) {
        shapes.push_back({r.area, r.circularity});
      }
      c.quality = blob_quality(shapes, area, median_, params_);
      if (labels_out) *labels_out = std::move(labels);
      if (count_out) *count_out = count;
      return c;
    };

    std::vector<Candidate> sweep(hs_.size());
    if (params_.parallel_sweep) {
      std::vector<std::future<Candidate>> jobs;
      jobs.reserve(hs_.size());
      for (double h : hs_) {
        jobs.push_back(std::async(std::launch::async, [&, h] { return evaluate(h, nullptr, nullptr); }));
      }
      for (std::size_t i = 0; i < jobs.size(); ++i) sweep[i] = jobs[i].get();
    } else {
      for (std::size_t i = 0; i < hs_.size(); ++i) sweep[i] = evaluate(hs_[i], nullptr, nullptr);
    }

    std::size_t best = 0;
    bool any_split = false;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      out.sweep.push_back(sweep[i].quality);
      any_split = any_split || sweep[i].markers > 1;
      if (sweep[i].quality > sweep[best].quality) best = i;
    }
    if (!any_split || sweep[best].markers <= 1) {
      out.regions.push_back(region);
      return out;
    }

    LabelMap labels;
    int count = 0;
    evaluate(hs_[best], &labels, &count);
    out.h_opt = hs_[best];
    for (const auto& child : blobs::label_regions(labels, count)) {
      BinaryMask child_mask(region.width(), region.height(), 0);
      for (int y = 0; y < child.bbox.height; ++y) {
        for (int x = 0; x < child.bbox.width; ++x) {
          if (child.mask(x, y)) child_mask(child.bbox.x + x, child.bbox.y + y) = 1;
        }
      }
      if (depth + 1 <= params_.max_recursion_depth) {
        RegionSplit sub = split(child_mask, depth + 1);
        for (auto& r : sub.regions) out.regions.push_back(std::move(r));
      } else {
        out.regions.push_back(std::move(child_mask));
      }
    }
    return out;
  }

 private:
  const GrayPlane& basins_;
  double median_;
  const SegParams& params_;
  std::vector<double> hs_;
};

}  // namespace

BlobSegmentation split_blob(const blobs::Blob& blob, const GrayPlane& gray_enhanced,
                            double median_area, const SegParams& params, int depth) {
  params.validate();
  const int x0 = std::max(0, blob.bbox.x - kMargin);
  const int y0 = std::max(0, blob.bbox.y - kMargin);
  const int x1 = std::min(gray_enhanced.width(), blob.bbox.x + blob.bbox.width + kMargin);
  const int y1 = std::min(gray_enhanced.height(), blob.bbox.y + blob.bbox.height + kMargin);
  if (x0 >= x1 || y0 >= y1 || blob.mask.width() != blob.bbox.width ||
      blob.mask.height() != blob.bbox.height) {
    throw InputError("split_blob: blob does not fit the gray plane");
  }
  const int cw = x1 - x0, ch = y1 - y0;
  const int ox = blob.bbox.x - x0, oy = blob.bbox.y - y0;

  BinaryMask region(cw, ch, 0);
  GrayPlane basins(cw, ch);
  for (int y = 0; y < ch; ++y) {
    for (int x = 0; x < cw; ++x) basins(x, y) = gray_enhanced(x0 + x, y0 + y);
  }
  for (int y = 0; y < blob.bbox.height; ++y) {
    for (int x = 0; x < blob.bbox.width; ++x) region(ox + x, oy + y) = blob.mask(x, y);
  }

  // Colonies must be basins: invert when the blob is brighter than its ring.
  const BinaryMask grown = morph::dilate(region, morph::StructuringElement::disk(kRingWidth));
  double inside = 0.0, ring = 0.0;
  int n_inside = 0, n_ring = 0;
  for (std::size_t i = 0; i < region.size(); ++i) {
    if (region[i]) {
      inside += basins[i];
      ++n_inside;
    } else if (grown[i]) {
      ring += basins[i];
      ++n_ring;
    }
  }
  if (n_inside > 0 && n_ring > 0 && inside / n_inside > ring / n_ring) {
    for (double& v : basins.storage()) v = 1.0 - v;
  }

  const double median = median_area > 0.0 ? median_area : static_cast<double>(blob.area);
  const RegionSplitter splitter(basins, median, params);
  RegionSplit result = splitter.split(region, depth);

  BlobSegmentation seg;
  seg.blob_id = blob.id;
  seg.h_opt = result.h_opt;
  seg.sweep_quality = std::move(result.sweep);
  seg.labels = LabelMap(blob.bbox.width, blob.bbox.height, 0);
  std::int32_t next = 0;
  for (const BinaryMask& r : result.regions) {
    ++next;
    int a = 0;
    for (int y = 0; y < blob.bbox.height; ++y) {
      for (int x = 0; x < blob.bbox.width; ++x) {
        if (r(ox + x, oy + y)) {
          seg.labels(x, y) = next;
          ++a;
        }
      }
    }
    seg.colonies.push_back({a, blobs::circularity(a, blobs::boundary_perimeter(r))});
  }
  seg.quality = blob_quality(seg.colonies, blob.area, median, params);
  return seg;
}

Segmentation segment_image(const std::vector<blobs::Blob>& blob_list, const GrayPlane& gray_enhanced,
                           const SegParams& params) {
  params.validate();
  const int w = gray_enhanced.width();
  const int h = gray_enhanced.height();
  Segmentation out;
  LabelMap provisional(w, h, 0);
  const double median = median_area(blob_list);

  std::int32_t next = 0;
  struct Box {
    int x0, y0, x1, y1;
  };
  std::vector<Box> boxes{{0, 0, -1, -1}};
  std::vector<int> areas{0};
  for (const blobs::Blob& blob : blob_list) {
    BlobSegmentation seg = split_blob(blob, gray_enhanced, median, params);
    const std::int32_t base = next;
    for (std::size_t c = 0; c < seg.colonies.size(); ++c) {
      boxes.push_back({w, h, -1, -1});
      areas.push_back(0);
    }
    next += static_cast<std::int32_t>(seg.colonies.size());
    for (int y = 0; y < blob.bbox.height; ++y) {
      for (int x = 0; x < blob.bbox.width; ++x) {
        const std::int32_t l = seg.labels(x, y);
        if (l <= 0) continue;
        const std::int32_t id = base + l;
        const int gx = blob.bbox.x + x, gy = blob.bbox.y + y;
        provisional(gx, gy) = id;
        Box& b = boxes[static_cast<std::size_t>(id)];
        b.x0 = std::min(b.x0, gx);
        b.y0 = std::min(b.y0, gy);
        b.x1 = std::max(b.x1, gx);
        b.y1 = std::max(b.y1, gy);
        ++areas[static_cast<std::size_t>(id)];
      }
    }
    out.blobs.push_back(std::move(seg));
  }

  for (std::int32_t id = 1; id <= next; ++id) {
    const Box& b = boxes[static_cast<std::size_t>(id)];
    if (areas[static_cast<std::size_t>(id)] == 0) continue;
    if (2.0 * areas[static_cast<std::size_t>(id)] < params.a_min) {
      for (int y = b.y0; y <= b.y1; ++y) {
        for (int x = b.x0; x <= b.x1; ++x) {
          if (provisional(x, y) == id) provisional(x, y) = 0;
        }
      }
      continue;
    }
    // Fill holes inside the colony on a one-pixel padded box.
    const int bw = b.x1 - b.x0 + 3, bh = b.y1 - b.y0 + 3;
    BinaryMask local(bw, bh, 0);
    for (int y = b.y0; y <= b.y1; ++y) {
      for (int x = b.x0; x <= b.x1; ++x) local(x - b.x0 + 1, y - b.y0 + 1) = provisional(x, y) == id;
    }
    const BinaryMask filled = morph::fill_holes(local);
    for (int y = b.y0; y <= b.y1; ++y) {
      for (int x = b.x0; x <= b.x1; ++x) {
        if (filled(x - b.x0 + 1, y - b.y0 + 1) && provisional(x, y) == 0) provisional(x, y) = id;
      }
    }
  }

  std::vector<std::int32_t> remap(static_cast<std::size_t>(next) + 1, 0);
  out.colonies = LabelMap(w, h, 0);
  out.mask = BinaryMask(w, h, 0);
  std::int32_t final_count = 0;
  for (std::size_t i = 0; i < provisional.size(); ++i) {
    const std::int32_t id = provisional[i];
    if (id <= 0) continue;
    if (remap[static_cast<std::size_t>(id)] == 0) remap[static_cast<std::size_t>(id)] = ++final_count;
    out.colonies[i] = remap[static_cast<std::size_t>(id)];
    out.mask[i] = 1;
  }
  out.colony_count = final_count;
  return out;
}

}  // namespace acc::split
