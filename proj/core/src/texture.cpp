#include "acc/texture.hpp"

#include <algorithm>
#include <cmath>

#include "acc/imaging.hpp"

namespace acc::texture {

void ClaheParams::validate() const {
  if (tiles_x < 1 || tiles_y < 1) throw ParameterError("clahe: tile grid must be >= 1");
  if (!(clip_limit > 0.0) || clip_limit > 1.0) {
    throw ParameterError("clahe: clip_limit must be in (0, 1]");
  }
  if (bins < 2) throw ParameterError("clahe: bins must be >= 2");
}

ClaheParams ClaheParams::fitted_to(int width, int height) const {
  ClaheParams p = *this;
  p.tiles_x = std::clamp(std::min(tiles_x, width / 2), 1, std::max(1, tiles_x));
  p.tiles_y = std::clamp(std::min(tiles_y, height / 2), 1, std::max(1, tiles_y));
  return p;
}

namespace {

struct TileAxis {
  std::vector<int> start;   // size tiles + 1
  std::vector<double> centre;
};

TileAxis make_axis(int extent, int tiles) {
  TileAxis a;
  a.start.resize(static_cast<std::size_t>(tiles) + 1);
  for (int t = 0; t <= tiles; ++t) {
    a.start[static_cast<std::size_t>(t)] =
        static_cast<int>(static_cast<long long>(t) * extent / tiles);
  }
  a.centre.resize(static_cast<std::size_t>(tiles));
  for (int t = 0; t < tiles; ++t) {
    a.centre[static_cast<std::size_t>(t)] =
        0.5 * (a.start[static_cast<std::size_t>(t)] + a.start[static_cast<std::size_t>(t) + 1] - 1);
  }
  return a;
}

// Lower tile index and weight of the upper tile for coordinate v.
std::pair<int, double> locate(const TileAxis& a, int v) {
  const int tiles = static_cast<int>(a.centre.size());
  if (tiles == 1 || v <= a.centre.front()) return {0, 0.0};
  if (v >= a.centre.back()) return {tiles - 1, 0.0};
  int t = 0;
  while (t + 1 < tiles && a.centre[static_cast<std::size_t>(t) + 1] <= v) ++t;
  const double c0 = a.centre[static_cast<std::size_t>(t)];
  const double c1 = a.centre[static_cast<std::size_t>(t) + 1];
  return {t, (v - c0) / (c1 - c0)};
}

std::vector<double> tile_mapping(std::vector<double> hist, double count, double clip_fraction) {
  const std::size_t bins = hist.size();
  const double clip = std::max(clip_fraction * count, count / static_cast<double>(bins));
  double excess = 0.0;
  for (double& h : hist) {
    if (h > clip) {
      excess += h - clip;
      h = clip;
    }
  }
  if (excess > 0.0) {
    const double share = excess / static_cast<double>(bins);
    for (double& h : hist) h += share;
    // One more clipping round; the overflow goes to bins still under the cap.
    double overflow = 0.0;
    std::size_t under = 0;
    for (double& h : hist) {
      if (h > clip) {
        overflow += h - clip;
        h = clip;
      } else if (h < clip) {
        ++under;
      }
    }
    if (overflow > 0.0 && under > 0) {
      const double extra = overflow / static_cast<double>(under);
      for (double& h : hist) {
        if (h < clip) h += extra;
      }
    }
  }
  std::vector<double> lut(bins);
  double cdf = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    lut[b] = (cdf + 0.5 * hist[b]) / count;
    cdf += hist[b];
  }
  return lut;
}

}  // namespace

GrayPlane clahe(const GrayPlane& plane, const ClaheParams& params) {
  params.validate();
  const int w = plane.width();
  const int h = plane.height();
  if (w / params.tiles_x < 2 || h / params.tiles_y < 2) {
    throw ParameterError("clahe: tiles must span at least 2x2 pixels");
  }
  const int bins = params.bins;
  auto bin_of = [bins](double v) {
    const int b = static_cast<int>(std::floor(std::clamp(v, 0.0, 1.0) * bins));
    return std::min(b, bins - 1);
  };

  const TileAxis ax = make_axis(w, params.tiles_x);
  const TileAxis ay = make_axis(h, params.tiles_y);
  std::vector<std::vector<double>> luts(static_cast<std::size_t>(params.tiles_x) * params.tiles_y);
  for (int ty = 0; ty < params.tiles_y; ++ty) {
    for (int tx = 0; tx < params.tiles_x; ++tx) {
      std::vector<double> hist(static_cast<std::size_t>(bins), 0.0);
      const int x0 = ax.start[static_cast<std::size_t>(tx)], x1 = ax.start[static_cast<std::size_t>(tx) + 1];
      const int y0 = ay.start[static_cast<std::size_t>(ty)], y1 = ay.start[static_cast<std::size_t>(ty) + 1];
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) hist[static_cast<std::size_t>(bin_of(plane(x, y)))] += 1.0;
      }
      const double count = static_cast<double>(x1 - x0) * (y1 - y0);
      luts[static_cast<std::size_t>(ty) * params.tiles_x + tx] =
          tile_mapping(std::move(hist), count, params.clip_limit);
    }
  }

  GrayPlane out(w, h);
  for (int y = 0; y < h; ++y) {
    const auto [ty, wy] = locate(ay, y);
    const int ty1 = std::min(ty + 1, params.tiles_y - 1);
    for (int x = 0; x < w; ++x) {
      const auto [tx, wx] = locate(ax, x);
      const int tx1 = std::min(tx + 1, params.tiles_x - 1);
      const std::size_t b = static_cast<std::size_t>(bin_of(plane(x, y)));
      auto lut = [&](int i, int j) {
        return luts[static_cast<std::size_t>(j) * params.tiles_x + i][b];
      };
      const double top = (1.0 - wx) * lut(tx, ty) + wx * lut(tx1, ty);
      const double bottom = (1.0 - wx) * lut(tx, ty1) + wx * lut(tx1, ty1);
      out(x, y) = std::clamp((1.0 - wy) * top + wy * bottom, 0.0, 1.0);
    }
  }
  return out;
}

Glcm::Glcm(int levels, Offset offset)
    : levels_(levels), offset_(offset),
      p_(static_cast<std::size_t>(levels) * static_cast<std::size_t>(levels), 0.0) {
  if (levels < 2) throw ParameterError("glcm: levels must be >= 2");
}

double Glcm::total() const {
  double s = 0.0;
  for (double v : p_) s += v;
  return s;
}

std::vector<int> quantize(const GrayPlane& plane, int levels) {
  if (levels < 2) throw ParameterError("quantize: levels must be >= 2");
  std::vector<int> q(plane.size(), 0);
  if (plane.empty()) return q;
  const auto [lo, hi] = std::minmax_element(plane.pixels().begin(), plane.pixels().end());
  const double mn = *lo;
  const double range = *hi - mn;
  if (!(range > 0.0)) return q;
  for (std::size_t i = 0; i < plane.size(); ++i) {
    const int b = static_cast<int>(std::floor((plane[i] - mn) / range * levels));
    q[i] = std::clamp(b, 0, levels - 1);
  }
  return q;
}

Glcm glcm(const GrayPlane& plane, Offset offset, int levels) {
  Glcm g(levels, offset);
  const auto q = quantize(plane, levels);
  const int w = plane.width();
  const int h = plane.height();
  const int x0 = std::max(0, -offset.dx), x1 = std::min(w, w - offset.dx);
  const int y0 = std::max(0, -offset.dy), y1 = std::min(h, h - offset.dy);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const int i = q[plane.index(x, y)];
      const int j = q[plane.index(x + offset.dx, y + offset.dy)];
      g(i, j) += 1.0;
      ++g.pairs_;
    }
  }
  if (g.pairs_ > 0) {
    const double n = static_cast<double>(g.pairs_);
    for (double& v : g.p_) v /= n;
  }
  return g;
}

double glcm_contrast(const Glcm& g) {
  double c = 0.0;
  for (int i = 0; i < g.levels(); ++i) {
    for (int j = 0; j < g.levels(); ++j) {
      const double d = static_cast<double>(i - j);
      c += d * d * g(i, j);
    }
  }
  return c;
}

std::array<Offset, 4> GlcmParams::offsets() const {
  const int d = distance;
  // Row/column offsets [0,d], [-d,d], [-d,0], [-d,-d].
  return {Offset{d, 0}, Offset{d, -d}, Offset{0, -d}, Offset{-d, -d}};
}

double mean_contrast(const GrayPlane& enhanced, const GlcmParams& glcm_params) {
  double sum = 0.0;
  const auto offs = glcm_params.offsets();
  for (const Offset& o : offs) sum += glcm_contrast(glcm(enhanced, o, glcm_params.levels));
  return sum / static_cast<double>(offs.size());
}

ChannelSelection select_pc_channel(const std::array<GrayPlane, 3>& planes,
                                   const ClaheParams& clahe_params,
                                   const GlcmParams& glcm_params) {
  require_same_shape(planes[0], planes[1], "select_pc_channel");
  require_same_shape(planes[0], planes[2], "select_pc_channel");
  const ClaheParams fitted = clahe_params.fitted_to(planes[0].width(), planes[0].height());
  ChannelSelection sel;
  for (int k = 0; k < 3; ++k) {
    const GrayPlane enhanced = clahe(imaging::minmax_normalize(planes[static_cast<std::size_t>(k)]), fitted);
    sel.contrasts[static_cast<std::size_t>(k)] = mean_contrast(enhanced, glcm_params);
  }
  for (int k = 1; k < 3; ++k) {
    if (sel.contrasts[static_cast<std::size_t>(k)] < sel.contrasts[static_cast<std::size_t>(sel.index)]) sel.index = k;
  }
  return sel;
}

}  // namespace acc::texture
