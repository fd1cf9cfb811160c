#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "acc/morphology.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace acc;
using morph::StructuringElement;

TEST(StructuringElement, DiskOffsetsAreExact) {
  for (int r = 0; r <= 9; ++r) {
    const auto offs = StructuringElement::disk(r).offsets();
    int expected = 0;
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) expected += dx * dx + dy * dy <= r * r;
    }
    EXPECT_EQ(static_cast<int>(offs.size()), expected) << "radius " << r;
    for (const Point& p : offs) EXPECT_LE(p.x * p.x + p.y * p.y, r * r);
  }
}

TEST(ErodeDilate, MatchBruteForce) {
  testgen::Gen gen(21);
  for (int trial = 0; trial < 30; ++trial) {
    const GrayPlane p = gen.plane(gen.uniform_int(1, 24), gen.uniform_int(1, 24));
    const int r = gen.uniform_int(0, 7);
    EXPECT_EQ(morph::erode(p, StructuringElement::disk(r)), oracle::disk_filter(p, r, true));
    EXPECT_EQ(morph::dilate(p, StructuringElement::disk(r)), oracle::disk_filter(p, r, false));
  }
}

TEST(Reconstruction, MatchesIteratedGeodesicDilation) {
  testgen::Gen gen(22);
  for (int trial = 0; trial < 40; ++trial) {
    const int w = gen.uniform_int(1, 18), h = gen.uniform_int(1, 18);
    const GrayPlane mask = gen.stepped_plane(w, h, 6);
    GrayPlane marker = mask;
    for (double& v : marker.storage()) v -= gen.coin(0.8) ? 1.0 : gen.uniform(0.0, 0.5);
    EXPECT_EQ(morph::reconstruct_by_dilation(marker, mask), oracle::reconstruct_dilation(marker, mask));
    GrayPlane above = mask;
    for (double& v : above.storage()) v += gen.coin(0.8) ? 1.0 : gen.uniform(0.0, 0.5);
    EXPECT_EQ(morph::reconstruct_by_erosion(above, mask), oracle::reconstruct_erosion(above, mask));
  }
}

TEST(Reconstruction, IsIdempotentAndBounded) {
  testgen::Gen gen(23);
  for (int trial = 0; trial < 20; ++trial) {
    const GrayPlane mask = gen.plane(15, 12);
    GrayPlane marker = mask;
    for (double& v : marker.storage()) v *= gen.uniform(0.0, 1.0);
    const GrayPlane r = morph::reconstruct_by_dilation(marker, mask);
    for (std::size_t i = 0; i < r.size(); ++i) {
      EXPECT_LE(marker[i], r[i]);
      EXPECT_LE(r[i], mask[i]);
    }
    EXPECT_EQ(morph::reconstruct_by_dilation(r, mask), r);
  }
}

TEST(OpenClose, RejectsBadRadius) {
  const GrayPlane p(10, 6, 0.5);
  EXPECT_THROW(morph::open_close_by_reconstruction(p, StructuringElement::disk(0)), ParameterError);
  EXPECT_THROW(morph::open_close_by_reconstruction(p, StructuringElement::disk(7)), ParameterError);
  EXPECT_NO_THROW(morph::open_close_by_reconstruction(p, StructuringElement::disk(6)));
}

TEST(OpenClose, RemovesSmallBrightSpot) {
  GrayPlane p(21, 21, 0.2);
  p(10, 10) = 0.9;
  const GrayPlane out = morph::open_close_by_reconstruction(p, StructuringElement::disk(2));
  for (double v : out.pixels()) EXPECT_DOUBLE_EQ(v, 0.2);
}

TEST(RegionalMinima, MatchesFixedPointOracle) {
  testgen::Gen gen(24);
  for (int trial = 0; trial < 60; ++trial) {
    const GrayPlane p = gen.stepped_plane(gen.uniform_int(1, 16), gen.uniform_int(1, 16), gen.uniform_int(2, 5));
    EXPECT_EQ(morph::regional_minima(p), oracle::regional_minima(p));
  }
}

TEST(ExtendedMinima, Examples) {
  // Two basins of depth 0.5 and 0.1 in a flat plateau.
  GrayPlane p(7, 1, std::vector<double>{1.0, 0.5, 1.0, 1.0, 0.9, 1.0, 1.0});
  const BinaryMask shallow = morph::extended_minima(p, 0.05);
  EXPECT_EQ(shallow, BinaryMask(7, 1, std::vector<std::uint8_t>{0, 1, 0, 0, 1, 0, 0}));
  const BinaryMask deep = morph::extended_minima(p, 0.3);
  EXPECT_EQ(deep, BinaryMask(7, 1, std::vector<std::uint8_t>{0, 1, 0, 0, 0, 0, 0}));
  EXPECT_THROW(morph::extended_minima(p, 0.0), ParameterError);
}

TEST(ExtendedMinima, MatchesDefinitionalOracle) {
  testgen::Gen gen(25);
  for (int trial = 0; trial < 60; ++trial) {
    const GrayPlane p = gen.coin() ? gen.plane(gen.uniform_int(1, 16), gen.uniform_int(1, 16))
                                   : gen.stepped_plane(gen.uniform_int(1, 16), gen.uniform_int(1, 16), 8);
    const double h = gen.uniform(0.01, 0.6);
    EXPECT_EQ(morph::extended_minima(p, h), oracle::extended_minima(p, h));
  }
}

TEST(DistanceTransform, MatchesBruteForce) {
  testgen::Gen gen(26);
  for (int trial = 0; trial < 30; ++trial) {
    const BinaryMask m = gen.mask(gen.uniform_int(1, 20), gen.uniform_int(1, 20), gen.uniform(0.3, 0.97));
    const DistanceMap fast = morph::distance_transform(m);
    const GrayPlane slow = oracle::brute_edt(m);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (std::isinf(slow[i])) {
        EXPECT_TRUE(std::isinf(fast[i]));
      } else {
        EXPECT_NEAR(fast[i], slow[i], 1e-12);
      }
    }
  }
}

TEST(DistanceTransform, SpecialCases) {
  const DistanceMap none = morph::distance_transform(BinaryMask(4, 3, 0));
  for (double v : none.pixels()) EXPECT_EQ(v, 0.0);
  const DistanceMap all = morph::distance_transform(BinaryMask(4, 3, 1));
  for (double v : all.pixels()) EXPECT_TRUE(std::isinf(v));
  BinaryMask one(5, 5, 1);
  one(0, 0) = 0;
  EXPECT_DOUBLE_EQ(morph::distance_transform(one)(4, 4), std::sqrt(32.0));
}

TEST(Watershed, TwoBasinsGetALine) {
  GrayPlane topo(9, 1, std::vector<double>{0, 1, 2, 3, 4, 3, 2, 1, 0});
  BinaryMask markers(9, 1, 0);
  markers(0, 0) = markers(8, 0) = 1;
  const LabelMap l = morph::marker_watershed(topo, markers, BinaryMask(9, 1, 1));
  EXPECT_EQ(l, LabelMap(9, 1, std::vector<std::int32_t>{1, 1, 1, 1, 0, 2, 2, 2, 2}));
}

TEST(Watershed, PropertiesOnRandomInputs) {
  testgen::Gen gen(27);
  for (int trial = 0; trial < 40; ++trial) {
    const int w = gen.uniform_int(3, 20), h = gen.uniform_int(3, 20);
    const GrayPlane topo = gen.plane(w, h);
    const BinaryMask domain = gen.mask(w, h, 0.85);
    BinaryMask markers(w, h, 0);
    for (std::size_t i = 0; i < markers.size(); ++i) markers[i] = domain[i] && gen.coin(0.05);
    int n = 0;
    const LabelMap cc = morph::connected_components(markers, &n);
    const LabelMap l = morph::marker_watershed(topo, markers, domain);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (!domain(x, y)) EXPECT_EQ(l(x, y), 0);
        if (markers(x, y)) EXPECT_EQ(l(x, y), cc(x, y));
        EXPECT_LE(l(x, y), n);
        if (l(x, y) <= 0) continue;
        for (int k = 0; k < 8; ++k) {
          const int nx = x + kNeighbor8Dx[k], ny = y + kNeighbor8Dy[k];
          if (l.contains(nx, ny) && l(nx, ny) > 0) EXPECT_EQ(l(nx, ny), l(x, y));
        }
      }
    }
  }
}

TEST(Watershed, MarkerOutsideDomainIsRejected) {
  BinaryMask markers(3, 3, 0), domain(3, 3, 1);
  markers(0, 0) = 1;
  domain(0, 0) = 0;
  EXPECT_THROW(morph::marker_watershed(GrayPlane(3, 3, 0.0), markers, domain), InputError);
}

TEST(ConnectedComponents, CountMatchesBfsAndOrderIsRaster) {
  testgen::Gen gen(28);
  for (int trial = 0; trial < 40; ++trial) {
    const BinaryMask m = gen.mask(gen.uniform_int(1, 25), gen.uniform_int(1, 25), gen.uniform(0.1, 0.6));
    int n = 0;
    const LabelMap l = morph::connected_components(m, &n);
    EXPECT_EQ(n, oracle::bfs_component_count(m));
    std::int32_t next = 1;
    for (std::size_t i = 0; i < l.size(); ++i) {
      EXPECT_EQ(l[i] > 0, m[i] != 0);
      if (l[i] == next) ++next;
      EXPECT_LT(l[i], next);
    }
  }
}

TEST(FillHoles, FillsEnclosedOnly) {
  BinaryMask m(7, 7, 0);
  for (int i = 1; i <= 5; ++i) m(i, 1) = m(i, 5) = m(1, i) = m(5, i) = 1;
  m(6, 3) = 0;
  const BinaryMask f = morph::fill_holes(m);
  for (int y = 2; y <= 4; ++y) {
    for (int x = 2; x <= 4; ++x) EXPECT_EQ(f(x, y), 1);
  }
  EXPECT_EQ(f(0, 0), 0);
  // A gap that only touches diagonally still encloses under 4-connected background.
  BinaryMask d(5, 5, 0);
  d(1, 2) = d(2, 1) = d(3, 2) = d(2, 3) = 1;
  EXPECT_EQ(morph::fill_holes(d)(2, 2), 1);
}
