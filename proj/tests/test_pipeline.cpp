#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "acc/imaging.hpp"
#include "acc/pipeline.hpp"
#include "acc/synth.hpp"

using namespace acc;
namespace fs = std::filesystem;

namespace {

const char* kMinimalConfig =
    "[blobs]\npca_sigma_x = 2\npca_sigma_y = 2\nr_obrcbr = 30\n"
    "[segmentation]\ngray_sigma_x = 2\ngray_sigma_y = 2\na_min = 100\na_max = 1000\n";

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("acc_test_pipeline_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Config, DefaultsAndRequiredKeys) {
  const auto c = pipeline::parse_config(kMinimalConfig);
  EXPECT_EQ(c.r_obrcbr, 30);
  EXPECT_DOUBLE_EQ(c.seg.h_min, 0.15);
  EXPECT_DOUBLE_EQ(c.seg.h_max, 0.37);
  EXPECT_DOUBLE_EQ(c.seg.circ_split, 0.6);
  EXPECT_EQ(c.clahe.tiles_x, 16);
  EXPECT_EQ(c.glcm.levels, 64);
  EXPECT_EQ(c.threads, 1);
  EXPECT_THROW(pipeline::parse_config("[blobs]\nr_obrcbr = 3\n"), ParameterError);
  EXPECT_THROW(pipeline::parse_config(std::string(kMinimalConfig) + "[runtime]\nthreads = lots\n"), FormatError);
  EXPECT_THROW(pipeline::parse_config(std::string(kMinimalConfig) + "[texture]\nglcm_levels = x\n"), FormatError);
  EXPECT_THROW(pipeline::parse_config(std::string(kMinimalConfig) + "[texture]\nclahe_clip_limit = 2\n"),
               ParameterError);
  EXPECT_EQ(pipeline::parse_config(std::string(kMinimalConfig) + "[runtime]\nthreads = auto\n").threads, 0);
}

TEST(Config, SerializeParseRoundTrip) {
  auto c = pipeline::parse_config(kMinimalConfig);
  c.input = "in/dir";
  c.output = "out";
  c.gt_marks = "m.csv";
  c.threads = 0;
  c.pca_sigma = {0.1, 1.0 / 3.0};
  c.seg.h_step = 0.007;
  c.seg.circ_edges = {0.1, 0.45, 0.85, 0.99};
  c.seg.parallel_sweep = true;
  c.gray_ahe.clip_limit = 0.3;
  const auto back = pipeline::parse_config(pipeline::serialize_config(c));
  EXPECT_TRUE(back == c);
  EXPECT_EQ(pipeline::serialize_config(back), pipeline::serialize_config(c));
}

TEST(Process, SyntheticDishCount) {
  synth::SynthSpec s;
  s.width = 320;
  s.height = 320;
  s.colonies = 25;
  s.seed = 42;
  const auto dish = synth::generate(s);
  const auto cfg = pipeline::parse_config(kMinimalConfig);
  const auto a = pipeline::process(dish.image, cfg, "d");
  EXPECT_NEAR(a.summary.colony_count, 25, 1);
  EXPECT_EQ(a.records.size(), static_cast<std::size_t>(a.summary.colony_count));
  EXPECT_EQ(a.summary.selected_channel, a.selection.index + 1);
}

TEST(Process, BlankDishHasNoColonies) {
  const RgbImage blank(120, 100, Rgb{0.9, 0.9, 0.88});
  const auto a = pipeline::process(blank, pipeline::parse_config(kMinimalConfig), "blank");
  EXPECT_EQ(a.summary.colony_count, 0);
  EXPECT_EQ(report::colonies_csv(a.records), std::string(report::kColonyCsvHeader) + "\n");
}

TEST(CollectInputs, DirectoryFileAndGlob) {
  const fs::path dir = fresh_dir("collect");
  for (const char* n : {"b.png", "a.tif", "a_gt.png", "notes.txt", "c.JPG"}) std::ofstream(dir / n) << "x";
  const auto all = pipeline::collect_inputs(dir.string());
  ASSERT_EQ(all.size(), 3u);
  EXPECT_EQ(all[0].filename(), "a.tif");
  EXPECT_EQ(all[2].filename(), "c.JPG");
  EXPECT_EQ(pipeline::collect_inputs((dir / "b.png").string()).size(), 1u);
  EXPECT_EQ(pipeline::collect_inputs((dir / "*.png").string()).size(), 2u);
  EXPECT_TRUE(pipeline::collect_inputs((dir / "zzz").string()).empty());
}

TEST(Batch, CorruptFileDoesNotAbort) {
  const fs::path dir = fresh_dir("corrupt");
  synth::SynthSpec s;
  s.width = 200;
  s.height = 200;
  s.colonies = 8;
  imaging::save_rgb_png(synth::generate(s).image, dir / "good.png");
  std::ofstream(dir / "broken.png") << "garbage";
  auto cfg = pipeline::parse_config(kMinimalConfig);
  cfg.input = dir.string();
  cfg.output = (dir / "out" / "deeper").string();
  const auto r = pipeline::run_batch(cfg);
  EXPECT_EQ(r.failures, 1);
  EXPECT_EQ(r.exit_code, 1);
  const std::string summary = slurp(dir / "out" / "deeper" / "batch_summary.csv");
  EXPECT_NE(summary.find("broken,failed"), std::string::npos);
  EXPECT_NE(summary.find("good,ok"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "out" / "deeper" / "good_colonies.csv"));
}

TEST(Batch, EmptyInputIsAnError) {
  const fs::path dir = fresh_dir("empty");
  auto cfg = pipeline::parse_config(kMinimalConfig);
  cfg.input = dir.string();
  cfg.output = (dir / "out").string();
  EXPECT_THROW(pipeline::run_batch(cfg), InputError);
}

TEST(Batch, ThreadCountDoesNotChangeOutputs) {
  const fs::path dir = fresh_dir("threads");
  synth::SynthJob job;
  job.images = 4;
  job.spec.width = 240;
  job.spec.height = 240;
  job.spec.colonies = 15;
  job.spec.overlap = 0.1;
  synth::write_job(job, dir / "in");
  auto cfg = pipeline::parse_config(kMinimalConfig);
  cfg.input = (dir / "in").string();
  cfg.gt_marks = (dir / "in" / "marks.csv").string();
  cfg.threads = 1;
  cfg.output = (dir / "t1").string();
  ASSERT_EQ(pipeline::run_batch(cfg).exit_code, 0);
  cfg.threads = 4;
  cfg.output = (dir / "t4").string();
  ASSERT_EQ(pipeline::run_batch(cfg).exit_code, 0);
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(dir / "t1")) {
    EXPECT_EQ(slurp(e.path()), slurp(dir / "t4" / e.path().filename())) << e.path();
    ++compared;
  }
  EXPECT_EQ(compared, 4u * 4u + 2u);
}

TEST(FindMarks, CsvThenMasks) {
  const fs::path dir = fresh_dir("marks");
  BinaryMask m(10, 10, 0);
  m(2, 2) = m(7, 7) = 1;
  imaging::save_mask_png(m, dir / "img_gt.png");
  pipeline::PipelineConfig cfg;
  cfg.gt_masks = dir.string();
  const auto from_mask = pipeline::find_marks(cfg, {}, "img");
  ASSERT_TRUE(from_mask.has_value());
  EXPECT_EQ(from_mask->size(), 2u);
  EXPECT_FALSE(pipeline::find_marks(cfg, {}, "other").has_value());
  cfg.gt_marks = "given";
  const eval::MarksByImage csv{{"img", {{1, 1}}}};
  EXPECT_EQ(pipeline::find_marks(cfg, csv, "img")->size(), 1u);
}
