#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "acc/evaluation.hpp"
#include "support/gen.hpp"

using namespace acc;
namespace fs = std::filesystem;

TEST(MatchMarks, Examples) {
  LabelMap l(10, 1, std::vector<std::int32_t>{1, 1, 0, 2, 2, 0, 3, 3, 0, 0});
  // Region 1 gets two marks, region 2 one, region 3 none, one mark on background.
  const std::vector<eval::GtMark> marks{{0.2, 0}, {1.4, 0}, {3.6, 0}, {8.9, 0.3}};
  const auto c = eval::match_gt_marks(l, marks);
  EXPECT_EQ(c, (eval::ConfusionCounts{2, 1, 2}));
  EXPECT_THROW(eval::match_gt_marks(l, std::vector<eval::GtMark>{{10.6, 0}}), InputError);
  EXPECT_THROW(eval::match_gt_marks(l, std::vector<eval::GtMark>{{-0.6, 0}}), InputError);
}

TEST(MatchMarks, ConfusionIdentities) {
  testgen::Gen gen(71);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = gen.uniform_int(1, 20), h = gen.uniform_int(1, 20);
    const int regions = gen.uniform_int(0, 6);
    LabelMap l(w, h, 0);
    for (auto& v : l.storage()) v = gen.uniform_int(0, regions);
    std::int32_t present = 0;
    for (auto v : l.pixels()) present = std::max(present, v);
    std::vector<eval::GtMark> marks(static_cast<std::size_t>(gen.uniform_int(0, 10)));
    for (auto& m : marks) m = {gen.uniform(-0.49, w - 0.51), gen.uniform(-0.49, h - 0.51)};
    const auto c = eval::match_gt_marks(l, marks);
    EXPECT_EQ(c.tp + c.fp, present);
    EXPECT_EQ(c.tp + c.fn, static_cast<int>(marks.size()));
    EXPECT_GE(c.fn, 0);
  }
}

TEST(Prf1, CountsAndDegenerateCases) {
  const auto m = eval::prf1({8, 2, 2});
  EXPECT_DOUBLE_EQ(m.precision, 0.8);
  EXPECT_DOUBLE_EQ(m.recall, 0.8);
  EXPECT_NEAR(m.f1, 0.8, 1e-15);
  EXPECT_FALSE(m.degenerate);
  EXPECT_TRUE(eval::prf1({0, 0, 5}).degenerate);
  EXPECT_TRUE(eval::prf1({0, 3, 0}).degenerate);
  EXPECT_DOUBLE_EQ(eval::prf1({0, 3, 4}).f1, 0.0);
  EXPECT_NEAR(eval::f1_score(1.0, 0.5), 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(eval::f1_score(0.0, 0.5), 0.0);
}

TEST(CountRmse, Examples) {
  const std::vector<std::pair<double, double>> exact{{10, 10}, {5, 5}};
  EXPECT_DOUBLE_EQ(eval::count_rmse(exact), 0.0);
  const std::vector<std::pair<double, double>> off{{9, 10}, {22, 20}};
  EXPECT_NEAR(eval::count_rmse(off), std::sqrt((0.01 + 0.01) / 2.0), 1e-15);
  const std::vector<std::pair<double, double>> bad{{1, 0}};
  EXPECT_THROW(eval::count_rmse(bad), InputError);
}

TEST(MarksFromMask, CentroidsPerComponent) {
  BinaryMask m(6, 3, 0);
  m(0, 0) = m(1, 0) = 1;
  m(4, 1) = m(4, 2) = m(5, 2) = 1;
  const auto marks = eval::marks_from_mask(m);
  ASSERT_EQ(marks.size(), 2u);
  EXPECT_DOUBLE_EQ(marks[0].x, 0.5);
  EXPECT_DOUBLE_EQ(marks[0].y, 0.0);
  EXPECT_NEAR(marks[1].x, 13.0 / 3.0, 1e-15);
  EXPECT_NEAR(marks[1].y, 5.0 / 3.0, 1e-15);
}

TEST(MarksCsv, RoundTripAndErrors) {
  const fs::path dir = fs::temp_directory_path() / "acc_test_eval";
  fs::create_directories(dir);
  eval::MarksByImage marks{{"a", {{1.5, 2.25}, {3, 4}}}, {"b", {{0.125, 9}}}};
  {
    std::ofstream(dir / "marks.csv") << eval::marks_csv(marks);
  }
  const auto back = eval::read_marks_csv(dir / "marks.csv");
  ASSERT_EQ(back.size(), 2u);
  ASSERT_EQ(back.at("a").size(), 2u);
  EXPECT_DOUBLE_EQ(back.at("a")[0].y, 2.25);
  EXPECT_DOUBLE_EQ(back.at("b")[0].x, 0.125);
  {
    std::ofstream(dir / "bad.csv") << "image,x,y\na,1,oops\n";
  }
  EXPECT_THROW(eval::read_marks_csv(dir / "bad.csv"), FormatError);
  EXPECT_THROW(eval::read_marks_csv(dir / "absent.csv"), IoError);
}

TEST(MetricsCsv, Layout) {
  LabelMap l(3, 1, std::vector<std::int32_t>{1, 0, 2});
  const auto m = eval::evaluate("x", l, std::vector<eval::GtMark>{{0, 0}});
  EXPECT_EQ(m.pred_count, 2);
  EXPECT_EQ(m.gt_count, 1);
  EXPECT_EQ(eval::metrics_csv({m}),
            std::string(eval::kMetricsCsvHeader) + "\nx,1,1,0,0.500000,1.000000,0.666667,2,1\n");
}
