#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "acc/imaging.hpp"
#include "acc/reporting.hpp"

using namespace acc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

TEST(Fixed6, Formatting) {
  EXPECT_EQ(report::fixed6(0.5), "0.500000");
  EXPECT_EQ(report::fixed6(-1e-9), "0.000000");
  EXPECT_EQ(report::fixed6(2.0 / 3.0), "0.666667");
}

TEST(ColonyFeatures, StatisticsPerLabel) {
  LabelMap labels(4, 2, std::vector<std::int32_t>{1, 1, 0, 2, 1, 1, 0, 0});
  RgbImage img(4, 2);
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 4; ++x) img(x, y) = {0.1 * x, 0.2, y * 0.5};
  }
  const GrayPlane gray = imaging::to_gray(img);
  const GrayPlane pc(4, 2, 0.25);
  const auto recs = report::extract_colony_features(labels, img, gray, pc, "img");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].colony_id, 1);
  EXPECT_EQ(recs[0].area, 4);
  EXPECT_DOUBLE_EQ(recs[0].centroid_x, 0.5);
  EXPECT_DOUBLE_EQ(recs[0].centroid_y, 0.5);
  EXPECT_NEAR(recs[0].r.mean, 0.05, 1e-15);
  EXPECT_NEAR(recs[0].r.std, 0.05, 1e-15);
  EXPECT_DOUBLE_EQ(recs[0].g.std, 0.0);
  EXPECT_NEAR(recs[0].b.mean, 0.25, 1e-15);
  EXPECT_DOUBLE_EQ(recs[0].pc.mean, 0.25);
  EXPECT_EQ(recs[1].area, 1);
  EXPECT_DOUBLE_EQ(recs[1].centroid_x, 3.0);
  EXPECT_DOUBLE_EQ(recs[1].circularity, 1.0);
}

TEST(ColonyCsv, HeaderAndRoundTrip) {
  report::ColonyRecord r;
  r.image = "dish";
  r.colony_id = 3;
  r.centroid_x = 10.25;
  r.centroid_y = 4.5;
  r.area = 321;
  r.circularity = 0.875;
  r.r = {0.5, 0.125};
  const std::string csv = report::colonies_csv({r});
  std::stringstream ss(csv);
  std::string header, row;
  std::getline(ss, header);
  std::getline(ss, row);
  EXPECT_EQ(header, report::kColonyCsvHeader);
  const auto cells = split_csv_line(row);
  ASSERT_EQ(cells.size(), split_csv_line(header).size());
  EXPECT_EQ(cells[0], "dish");
  EXPECT_EQ(std::stoi(cells[1]), 3);
  EXPECT_DOUBLE_EQ(std::stod(cells[2]), 10.25);
  EXPECT_EQ(std::stoi(cells[4]), 321);
  EXPECT_DOUBLE_EQ(std::stod(cells[5]), 0.875);
  EXPECT_DOUBLE_EQ(std::stod(cells[6]), 0.5);
  EXPECT_DOUBLE_EQ(std::stod(cells[7]), 0.125);
}

TEST(ColonyCsv, EmptyHasHeaderOnly) {
  EXPECT_EQ(report::colonies_csv({}), std::string(report::kColonyCsvHeader) + "\n");
}

TEST(SummaryCsv, KeysAndQuoting) {
  report::Summary s;
  s.image = "a";
  s.colony_count = 12;
  s.selected_channel = 2;
  s.parameters = {{"x", "1"}, {"list", "1,2"}};
  const std::string csv = report::summary_csv(s);
  EXPECT_NE(csv.find("colony_count,12\n"), std::string::npos);
  EXPECT_NE(csv.find("selected_channel,2\n"), std::string::npos);
  EXPECT_NE(csv.find("param.x,1\n"), std::string::npos);
  EXPECT_NE(csv.find("param.list,\"1,2\"\n"), std::string::npos);
}

TEST(Overlay, PaintsBoundaryOnly) {
  LabelMap labels(5, 5, 0);
  for (int y = 1; y <= 3; ++y) {
    for (int x = 1; x <= 3; ++x) labels(x, y) = 1;
  }
  const RgbImage img(5, 5, Rgb{0.5, 0.5, 0.5});
  const RgbImage out = report::render_overlay(img, labels);
  EXPECT_EQ(out(1, 1), (Rgb{1, 0, 0}));
  EXPECT_EQ(out(2, 2), (Rgb{0.5, 0.5, 0.5}));
  EXPECT_EQ(out(0, 0), (Rgb{0.5, 0.5, 0.5}));
}

TEST(WriteOutputs, CreatesDirectoryAndFiles) {
  const fs::path dir = fs::temp_directory_path() / "acc_test_reporting" / "nested";
  fs::remove_all(dir.parent_path());
  LabelMap labels(6, 6, 0);
  labels(2, 2) = labels(3, 2) = 1;
  BinaryMask mask(6, 6, 0);
  mask(2, 2) = mask(3, 2) = 1;
  const RgbImage img(6, 6, Rgb{0.2, 0.4, 0.6});
  report::Summary s;
  s.image = "dish7";
  const auto paths = report::write_outputs({}, mask, labels, img, s, dir);
  EXPECT_TRUE(fs::exists(paths.colonies_csv));
  EXPECT_EQ(paths.mask_png.filename(), "dish7_mask.png");
  EXPECT_EQ(imaging::load_mask(paths.mask_png), mask);
  EXPECT_EQ(slurp(paths.summary_csv), report::summary_csv(s));
  EXPECT_EQ(imaging::load_rgb(paths.overlay_png)(2, 2), (Rgb{1, 0, 0}));
}
