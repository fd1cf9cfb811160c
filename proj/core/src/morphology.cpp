#include "acc/morphology.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <queue>

namespace acc::morph {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sliding-window extreme over one row answered from a sparse table.
class RowExtremeTable {
 public:
  RowExtremeTable(std::span<const double> row, int max_half, bool take_min)
      : width_(static_cast<int>(row.size())), take_min_(take_min) {
    const int span = 2 * max_half + 1;
    levels_ = std::bit_width(static_cast<unsigned>(std::max(span, 1)));
    table_.resize(static_cast<std::size_t>(levels_) * width_);
    std::copy(row.begin(), row.end(), table_.begin());
    for (int k = 1; k < levels_; ++k) {
      const int step = 1 << (k - 1);
      const double* prev = &table_[static_cast<std::size_t>(k - 1) * width_];
      double* cur = &table_[static_cast<std::size_t>(k) * width_];
      for (int x = 0; x < width_; ++x) {
        const int x2 = std::min(x + step, width_ - 1);
        cur[x] = pick(prev[x], prev[x2]);
      }
    }
  }

  // Extreme over [x - half, x + half] clipped to the row.
  double query(int x, int half) const {
    const int lo = std::max(0, x - half);
    const int hi = std::min(width_ - 1, x + half);
    const int len = hi - lo + 1;
    const int k = std::bit_width(static_cast<unsigned>(len)) - 1;
    const double* lvl = &table_[static_cast<std::size_t>(k) * width_];
    return pick(lvl[lo], lvl[hi - (1 << k) + 1]);
  }

 private:
  double pick(double a, double b) const { return take_min_ ? std::min(a, b) : std::max(a, b); }

  int width_;
  bool take_min_;
  int levels_ = 1;
  std::vector<double> table_;
};

GrayPlane flat_filter(const GrayPlane& plane, const StructuringElement& se, bool take_min) {
  const int w = plane.width();
  const int h = plane.height();
  GrayPlane out(w, h);
  if (plane.empty()) return out;
  const int r = se.radius;
  // Ring of per-row sparse tables covering rows y - r .. y + r.
  std::deque<RowExtremeTable> ring;
  int first_row = 0;
  auto row_span = [&](int yy) {
    return std::span<const double>(plane.storage().data() + plane.index(0, yy),
                                   static_cast<std::size_t>(w));
  };
  const double neutral = take_min ? kInf : -kInf;
  for (int y = 0; y < h; ++y) {
    const int lo = std::max(0, y - r);
    const int hi = std::min(h - 1, y + r);
    while (!ring.empty() && first_row < lo) {
      ring.pop_front();
      ++first_row;
    }
    if (ring.empty()) first_row = lo;
    while (first_row + static_cast<int>(ring.size()) <= hi) {
      ring.emplace_back(row_span(first_row + static_cast<int>(ring.size())), r, take_min);
    }
    for (int x = 0; x < w; ++x) {
      double acc = neutral;
      for (int yy = lo; yy <= hi; ++yy) {
        const int hw = se.half_width(yy - y);
        if (hw < 0) continue;
        const double v = ring[static_cast<std::size_t>(yy - first_row)].query(x, hw);
        acc = take_min ? std::min(acc, v) : std::max(acc, v);
      }
      out(x, y) = acc;
    }
  }
  return out;
}

// Vincent's hybrid reconstruction by dilation.
GrayPlane reconstruct_dilate_impl(GrayPlane f, const GrayPlane& g) {
  const int w = f.width();
  const int h = f.height();
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::min(f[i], g[i]);

  // Raster-order predecessors: W, NW, N, NE.
  static constexpr int kPx[4] = {-1, -1, 0, 1};
  static constexpr int kPy[4] = {0, -1, -1, -1};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double m = f(x, y);
      for (int k = 0; k < 4; ++k) {
        const int nx = x + kPx[k], ny = y + kPy[k];
        if (f.contains(nx, ny)) m = std::max(m, f(nx, ny));
      }
      f(x, y) = std::min(m, g(x, y));
    }
  }
  std::deque<std::size_t> fifo;
  for (int y = h - 1; y >= 0; --y) {
    for (int x = w - 1; x >= 0; --x) {
      double m = f(x, y);
      for (int k = 0; k < 4; ++k) {
        const int nx = x - kPx[k], ny = y - kPy[k];
        if (f.contains(nx, ny)) m = std::max(m, f(nx, ny));
      }
      const double v = std::min(m, g(x, y));
      f(x, y) = v;
      for (int k = 0; k < 4; ++k) {
        const int nx = x - kPx[k], ny = y - kPy[k];
        if (f.contains(nx, ny) && f(nx, ny) < v && f(nx, ny) < g(nx, ny)) {
          fifo.push_back(f.index(x, y));
          break;
        }
      }
    }
  }
  while (!fifo.empty()) {
    const std::size_t p = fifo.front();
    fifo.pop_front();
    const int px = static_cast<int>(p % static_cast<std::size_t>(w));
    const int py = static_cast<int>(p / static_cast<std::size_t>(w));
    for (int k = 0; k < 8; ++k) {
      const int nx = px + kNeighbor8Dx[k], ny = py + kNeighbor8Dy[k];
      if (!f.contains(nx, ny)) continue;
      const std::size_t q = f.index(nx, ny);
      if (f[q] < f[p] && g[q] != f[q]) {
        f[q] = std::min(f[p], g[q]);
        fifo.push_back(q);
      }
    }
  }
  return f;
}

GrayPlane negated(const GrayPlane& p) {
  GrayPlane out(p.width(), p.height());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = -p[i];
  return out;
}

}  // namespace

std::vector<Point> StructuringElement::offsets() const {
  std::vector<Point> out;
  for (int dy = -radius; dy <= radius; ++dy) {
    const int hw = half_width(dy);
    for (int dx = -hw; dx <= hw; ++dx) out.push_back({dx, dy});
  }
  return out;
}

int StructuringElement::half_width(int dy) const {
  if (dy < -radius || dy > radius) return -1;
  if (shape == Shape::Square) return radius;
  const long long rem = static_cast<long long>(radius) * radius - static_cast<long long>(dy) * dy;
  int hw = static_cast<int>(std::sqrt(static_cast<double>(rem)));
  while (static_cast<long long>(hw + 1) * (hw + 1) <= rem) ++hw;
  while (static_cast<long long>(hw) * hw > rem) --hw;
  return hw;
}

GrayPlane erode(const GrayPlane& plane, const StructuringElement& se) {
  return flat_filter(plane, se, true);
}

GrayPlane dilate(const GrayPlane& plane, const StructuringElement& se) {
  return flat_filter(plane, se, false);
}

GrayPlane reconstruct_by_dilation(const GrayPlane& marker, const GrayPlane& mask) {
  require_same_shape(marker, mask, "reconstruct_by_dilation");
  return reconstruct_dilate_impl(marker, mask);
}

GrayPlane reconstruct_by_erosion(const GrayPlane& marker, const GrayPlane& mask) {
  require_same_shape(marker, mask, "reconstruct_by_erosion");
  return negated(reconstruct_dilate_impl(negated(marker), negated(mask)));
}

GrayPlane open_close_by_reconstruction(const GrayPlane& plane, const StructuringElement& se) {
  if (se.radius < 1) {
    throw ParameterError("open_close_by_reconstruction: radius must be >= 1");
  }
  if (se.radius > std::min(plane.width(), plane.height())) {
    throw ParameterError("open_close_by_reconstruction: radius exceeds image size");
  }
  const GrayPlane opened = reconstruct_by_dilation(erode(plane, se), plane);
  return reconstruct_by_erosion(dilate(opened, se), opened);
}

BinaryMask regional_minima(const GrayPlane& plane) {
  const int w = plane.width();
  BinaryMask out(plane.width(), plane.height(), 0);
  std::vector<std::uint8_t> seen(plane.size(), 0);
  std::vector<std::size_t> region;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < plane.size(); ++start) {
    if (seen[start]) continue;
    const double v = plane[start];
    bool is_min = true;
    region.clear();
    stack.assign(1, start);
    seen[start] = 1;
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      region.push_back(p);
      const int px = static_cast<int>(p % static_cast<std::size_t>(w));
      const int py = static_cast<int>(p / static_cast<std::size_t>(w));
      for (int k = 0; k < 8; ++k) {
        const int nx = px + kNeighbor8Dx[k], ny = py + kNeighbor8Dy[k];
        if (!plane.contains(nx, ny)) continue;
        const std::size_t q = plane.index(nx, ny);
        const double nv = plane[q];
        if (nv < v) {
          is_min = false;
        } else if (nv == v && !seen[q]) {
          seen[q] = 1;
          stack.push_back(q);
        }
      }
    }
    if (is_min) {
      for (std::size_t p : region) out[p] = 1;
    }
  }
  return out;
}

BinaryMask extended_minima(const GrayPlane& plane, double h) {
  if (!(h > 0.0)) {
    throw ParameterError("extended_minima: h must be positive");
  }
  GrayPlane raised(plane.width(), plane.height());
  for (std::size_t i = 0; i < plane.size(); ++i) raised[i] = plane[i] + h;
  return regional_minima(reconstruct_by_erosion(raised, plane));
}

namespace {

// Squared distance lower envelope (Felzenszwalb & Huttenlocher) over the
// finite samples of f; positions without a finite sample keep +inf.
void edt_1d(std::span<const double> f, std::span<double> d, std::vector<int>& v,
            std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  v.resize(static_cast<std::size_t>(n));
  z.resize(static_cast<std::size_t>(n) + 1);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    auto intersect = [&](int p) {
      return ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
    };
    // z[0] is -inf, so the loop stops at k == 0 at the latest.
    double s = intersect(v[static_cast<std::size_t>(k)]);
    while (s <= z[static_cast<std::size_t>(k)]) {
      --k;
      s = intersect(v[static_cast<std::size_t>(k)]);
    }
    ++k;
    v[static_cast<std::size_t>(k)] = q;
    z[static_cast<std::size_t>(k)] = s;
    z[static_cast<std::size_t>(k) + 1] = kInf;
  }
  if (k < 0) {
    std::fill(d.begin(), d.end(), kInf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[static_cast<std::size_t>(j) + 1] < q) ++j;
    const int p = v[static_cast<std::size_t>(j)];
    d[q] = double(q - p) * (q - p) + f[p];
  }
}

}  // namespace

DistanceMap distance_transform(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  DistanceMap sq(w, h);
  for (std::size_t i = 0; i < mask.size(); ++i) sq[i] = mask[i] ? kInf : 0.0;

  std::vector<int> v;
  std::vector<double> z;
  std::vector<double> col_in(static_cast<std::size_t>(h)), col_out(static_cast<std::size_t>(h));
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) col_in[static_cast<std::size_t>(y)] = sq(x, y);
    edt_1d(col_in, col_out, v, z);
    for (int y = 0; y < h; ++y) sq(x, y) = col_out[static_cast<std::size_t>(y)];
  }
  std::vector<double> row_in(static_cast<std::size_t>(w)), row_out(static_cast<std::size_t>(w));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) row_in[static_cast<std::size_t>(x)] = sq(x, y);
    edt_1d(row_in, row_out, v, z);
    for (int x = 0; x < w; ++x) sq(x, y) = std::sqrt(row_out[static_cast<std::size_t>(x)]);
  }
  return sq;
}

LabelMap connected_components(const BinaryMask& mask, int* count) {
  const int w = mask.width();
  LabelMap labels(mask.width(), mask.height(), 0);
  std::int32_t next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < mask.size(); ++start) {
    if (!mask[start] || labels[start] != 0) continue;
    ++next;
    labels[start] = next;
    stack.assign(1, start);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      const int px = static_cast<int>(p % static_cast<std::size_t>(w));
      const int py = static_cast<int>(p / static_cast<std::size_t>(w));
      for (int k = 0; k < 8; ++k) {
        const int nx = px + kNeighbor8Dx[k], ny = py + kNeighbor8Dy[k];
        if (!mask.contains(nx, ny)) continue;
        const std::size_t q = mask.index(nx, ny);
        if (mask[q] && labels[q] == 0) {
          labels[q] = next;
          stack.push_back(q);
        }
      }
    }
  }
  if (count) *count = next;
  return labels;
}

LabelMap marker_watershed(const GrayPlane& topography, const BinaryMask& markers,
                          const BinaryMask& domain) {
  require_same_shape(topography, markers, "marker_watershed");
  require_same_shape(topography, domain, "marker_watershed");
  for (std::size_t i = 0; i < markers.size(); ++i) {
    if (markers[i] && !domain[i]) {
      throw InputError("marker_watershed: markers must lie inside the domain");
    }
  }
  const int w = topography.width();
  LabelMap labels = connected_components(markers);

  struct Entry {
    double key;
    std::uint64_t seq;
    std::size_t index;
  };
  auto later = [](const Entry& a, const Entry& b) {
    return a.key != b.key ? a.key > b.key : a.seq > b.seq;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(later)> queue(later);
  // 0 untouched, 1 queued, 2 final.
  std::vector<std::uint8_t> state(topography.size(), 0);
  std::vector<double> level(topography.size(), -kInf);
  std::uint64_t seq = 0;

  auto push_neighbors = [&](std::size_t p) {
    const int px = static_cast<int>(p % static_cast<std::size_t>(w));
    const int py = static_cast<int>(p / static_cast<std::size_t>(w));
    for (int k = 0; k < 8; ++k) {
      const int nx = px + kNeighbor8Dx[k], ny = py + kNeighbor8Dy[k];
      if (!topography.contains(nx, ny)) continue;
      const std::size_t q = topography.index(nx, ny);
      if (!domain[q] || state[q] != 0) continue;
      state[q] = 1;
      level[q] = std::max(topography[q], level[p]);
      queue.push({level[q], seq++, q});
    }
  };

  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > 0) state[i] = 2;
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > 0) push_neighbors(i);
  }
  while (!queue.empty()) {
    const Entry e = queue.top();
    queue.pop();
    const std::size_t p = e.index;
    const int px = static_cast<int>(p % static_cast<std::size_t>(w));
    const int py = static_cast<int>(p / static_cast<std::size_t>(w));
    std::int32_t found = 0;
    bool conflict = false;
    for (int k = 0; k < 8; ++k) {
      const int nx = px + kNeighbor8Dx[k], ny = py + kNeighbor8Dy[k];
      if (!topography.contains(nx, ny)) continue;
      const std::size_t q = topography.index(nx, ny);
      if (state[q] != 2 || labels[q] == 0) continue;
      if (found == 0) {
        found = labels[q];
      } else if (labels[q] != found) {
        conflict = true;
      }
    }
    state[p] = 2;
    if (conflict || found == 0) {
      labels[p] = 0;
      continue;
    }
    labels[p] = found;
    push_neighbors(p);
  }
  return labels;
}

BinaryMask fill_holes(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<std::uint8_t> outside(mask.size(), 0);
  std::vector<std::size_t> stack;
  auto seed = [&](int x, int y) {
    const std::size_t i = mask.index(x, y);
    if (!mask[i] && !outside[i]) {
      outside[i] = 1;
      stack.push_back(i);
    }
  };
  for (int x = 0; x < w; ++x) {
    seed(x, 0);
    seed(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    seed(0, y);
    seed(w - 1, y);
  }
  while (!stack.empty()) {
    const std::size_t p = stack.back();
    stack.pop_back();
    const int px = static_cast<int>(p % static_cast<std::size_t>(w));
    const int py = static_cast<int>(p / static_cast<std::size_t>(w));
    for (int k = 0; k < 4; ++k) {
      const int nx = px + kNeighbor4Dx[k], ny = py + kNeighbor4Dy[k];
      if (mask.contains(nx, ny)) seed(nx, ny);
    }
  }
  BinaryMask out(w, h);
  for (std::size_t i = 0; i < mask.size(); ++i) out[i] = outside[i] ? 0 : 1;
  return out;
}

BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se) {
  const auto offsets = se.offsets();
  BinaryMask out(mask.width(), mask.height(), 0);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y)) continue;
      for (const Point& o : offsets) {
        if (out.contains(x + o.x, y + o.y)) out(x + o.x, y + o.y) = 1;
      }
    }
  }
  return out;
}

BinaryMask erode(const BinaryMask& mask, const StructuringElement& se) {
  const auto offsets = se.offsets();
  BinaryMask out(mask.width(), mask.height(), 0);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      bool all = true;
      for (const Point& o : offsets) {
        if (mask.contains(x + o.x, y + o.y) && !mask(x + o.x, y + o.y)) {
          all = false;
          break;
        }
      }
      out(x, y) = all ? 1 : 0;
    }
  }
  return out;
}

}  // namespace acc::morph
