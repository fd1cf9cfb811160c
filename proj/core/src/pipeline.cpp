#include "acc/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "acc/imaging.hpp"

namespace acc::pipeline {

namespace pt = boost::property_tree;

namespace {

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool is_image_file(const std::filesystem::path& p) {
  static const std::array<std::string, 5> kExt{".png", ".tif", ".tiff", ".jpg", ".jpeg"};
  const std::string ext = lower(p.extension().string());
  return std::find(kExt.begin(), kExt.end(), ext) != kExt.end();
}

bool is_gt_file(const std::filesystem::path& p) {
  const std::string stem = p.stem().string();
  return stem.size() >= 3 && stem.compare(stem.size() - 3, 3, "_gt") == 0;
}

std::regex glob_regex(const std::string& pattern) {
  std::string re;
  for (char c : pattern) {
    switch (c) {
      case '*': re += "[^/]*"; break;
      case '?': re += "[^/]"; break;
      case '.': case '(': case ')': case '[': case ']': case '{': case '}':
      case '+': case '^': case '$': case '|': case '\\':
        re += '\\';
        re += c;
        break;
      default: re += c;
    }
  }
  return std::regex(re);
}

template <typename T>
T require(const pt::ptree& tree, const std::string& key) {
  const auto v = tree.get_optional<T>(key);
  if (!v) {
    if (tree.get_optional<std::string>(key)) throw FormatError("config: malformed value for " + key);
    throw ParameterError("config: missing required key " + key);
  }
  return *v;
}

template <typename T>
T optional(const pt::ptree& tree, const std::string& key, T fallback) {
  if (!tree.get_optional<std::string>(key)) return fallback;
  const auto v = tree.get_optional<T>(key);
  if (!v) throw FormatError("config: malformed value for " + key);
  return *v;
}

}  // namespace

void PipelineConfig::validate() const {
  if (threads < 0) throw ParameterError("threads must be >= 0");
  clahe.validate();
  gray_ahe.validate();
  if (glcm.levels < 2) throw ParameterError("glcm levels must be >= 2");
  if (glcm.distance < 1) throw ParameterError("glcm distance must be >= 1");
  if (!(pca_sigma[0] > 0.0) || !(pca_sigma[1] > 0.0)) throw ParameterError("pca sigma must be positive");
  if (!(gray_sigma[0] > 0.0) || !(gray_sigma[1] > 0.0)) throw ParameterError("gray sigma must be positive");
  if (!(gaussian_half_extent >= 1.0)) throw ParameterError("gaussian half extent must be >= 1");
  if (r_obrcbr < 1) throw ParameterError("r_obrcbr must be >= 1");
  if (blob_dilate_radius < 0) throw ParameterError("blob dilate radius must be >= 0");
  seg.validate();
}

bool operator==(const PipelineConfig& a, const PipelineConfig& b) {
  auto clahe_eq = [](const texture::ClaheParams& x, const texture::ClaheParams& y) {
    return x.tiles_x == y.tiles_x && x.tiles_y == y.tiles_y && x.clip_limit == y.clip_limit &&
           x.bins == y.bins;
  };
  const auto& s = a.seg;
  const auto& t = b.seg;
  return a.input == b.input && a.output == b.output && a.gt_marks == b.gt_marks &&
         a.gt_masks == b.gt_masks && a.threads == b.threads && clahe_eq(a.clahe, b.clahe) &&
         a.glcm.levels == b.glcm.levels && a.glcm.distance == b.glcm.distance &&
         a.pca_sigma == b.pca_sigma && a.r_obrcbr == b.r_obrcbr &&
         a.blob_dilate_radius == b.blob_dilate_radius &&
         a.gaussian_half_extent == b.gaussian_half_extent && a.gray_sigma == b.gray_sigma &&
         clahe_eq(a.gray_ahe, b.gray_ahe) && s.h_min == t.h_min && s.h_max == t.h_max &&
         s.h_step == t.h_step && s.a_min == t.a_min && s.a_max == t.a_max &&
         s.circ_edges == t.circ_edges && s.a_thresh_factor == t.a_thresh_factor &&
         s.circ_split == t.circ_split && s.max_recursion_depth == t.max_recursion_depth &&
         s.area_plateau_max == t.area_plateau_max && s.parallel_sweep == t.parallel_sweep;
}

std::vector<std::pair<std::string, std::string>> PipelineConfig::processing_parameters() const {
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  return {
      {"texture.clahe_tiles_x", std::to_string(clahe.tiles_x)},
      {"texture.clahe_tiles_y", std::to_string(clahe.tiles_y)},
      {"texture.clahe_clip_limit", g17(clahe.clip_limit)},
      {"texture.clahe_bins", std::to_string(clahe.bins)},
      {"texture.glcm_levels", std::to_string(glcm.levels)},
      {"texture.glcm_distance", std::to_string(glcm.distance)},
      {"blobs.pca_sigma_x", g17(pca_sigma[0])},
      {"blobs.pca_sigma_y", g17(pca_sigma[1])},
      {"blobs.r_obrcbr", std::to_string(r_obrcbr)},
      {"blobs.dilate_radius", std::to_string(blob_dilate_radius)},
      {"blobs.gaussian_half_extent", g17(gaussian_half_extent)},
      {"segmentation.gray_sigma_x", g17(gray_sigma[0])},
      {"segmentation.gray_sigma_y", g17(gray_sigma[1])},
      {"segmentation.ahe_tiles_x", std::to_string(gray_ahe.tiles_x)},
      {"segmentation.ahe_tiles_y", std::to_string(gray_ahe.tiles_y)},
      {"segmentation.ahe_clip_limit", g17(gray_ahe.clip_limit)},
      {"segmentation.ahe_bins", std::to_string(gray_ahe.bins)},
      {"segmentation.a_min", g17(seg.a_min)},
      {"segmentation.a_max", g17(seg.a_max)},
      {"segmentation.h_min", g17(seg.h_min)},
      {"segmentation.h_max", g17(seg.h_max)},
      {"segmentation.h_step", g17(seg.h_step)},
      {"segmentation.circ_c1", g17(seg.circ_edges[0])},
      {"segmentation.circ_c2", g17(seg.circ_edges[1])},
      {"segmentation.circ_c3", g17(seg.circ_edges[2])},
      {"segmentation.circ_c4", g17(seg.circ_edges[3])},
      {"segmentation.a_thresh_factor", g17(seg.a_thresh_factor)},
      {"segmentation.circ_split", g17(seg.circ_split)},
      {"segmentation.max_recursion_depth", std::to_string(seg.max_recursion_depth)},
      {"segmentation.area_plateau_max", b(seg.area_plateau_max)},
      {"segmentation.parallel_sweep", b(seg.parallel_sweep)},
  };
}

PipelineConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  PipelineConfig c;
  c.input = optional<std::string>(tree, "io.input", "");
  c.output = optional<std::string>(tree, "io.output", "");
  c.gt_marks = optional<std::string>(tree, "io.gt_marks", "");
  c.gt_masks = optional<std::string>(tree, "io.gt_masks", "");
  const std::string threads = optional<std::string>(tree, "runtime.threads", "1");
  if (threads == "auto") {
    c.threads = 0;
  } else {
    try {
      std::size_t used = 0;
      c.threads = std::stoi(threads, &used);
      if (used != threads.size()) throw std::invalid_argument(threads);
    } catch (const std::exception&) {
      throw FormatError("config: malformed value for runtime.threads");
    }
  }

  c.clahe.tiles_x = optional(tree, "texture.clahe_tiles_x", c.clahe.tiles_x);
  c.clahe.tiles_y = optional(tree, "texture.clahe_tiles_y", c.clahe.tiles_y);
  c.clahe.clip_limit = optional(tree, "texture.clahe_clip_limit", c.clahe.clip_limit);
  c.clahe.bins = optional(tree, "texture.clahe_bins", c.clahe.bins);
  c.glcm.levels = optional(tree, "texture.glcm_levels", c.glcm.levels);
  c.glcm.distance = optional(tree, "texture.glcm_distance", c.glcm.distance);

  c.pca_sigma = {require<double>(tree, "blobs.pca_sigma_x"), require<double>(tree, "blobs.pca_sigma_y")};
  c.r_obrcbr = require<int>(tree, "blobs.r_obrcbr");
  c.blob_dilate_radius = optional(tree, "blobs.dilate_radius", c.blob_dilate_radius);
  c.gaussian_half_extent = optional(tree, "blobs.gaussian_half_extent", c.gaussian_half_extent);

  c.gray_sigma = {require<double>(tree, "segmentation.gray_sigma_x"),
                  require<double>(tree, "segmentation.gray_sigma_y")};
  c.gray_ahe.tiles_x = optional(tree, "segmentation.ahe_tiles_x", c.gray_ahe.tiles_x);
  c.gray_ahe.tiles_y = optional(tree, "segmentation.ahe_tiles_y", c.gray_ahe.tiles_y);
  c.gray_ahe.clip_limit = optional(tree, "segmentation.ahe_clip_limit", c.gray_ahe.clip_limit);
  c.gray_ahe.bins = optional(tree, "segmentation.ahe_bins", c.gray_ahe.bins);
  auto& s = c.seg;
  s.a_min = require<double>(tree, "segmentation.a_min");
  s.a_max = require<double>(tree, "segmentation.a_max");
  s.h_min = optional(tree, "segmentation.h_min", s.h_min);
  s.h_max = optional(tree, "segmentation.h_max", s.h_max);
  s.h_step = optional(tree, "segmentation.h_step", s.h_step);
  for (int k = 0; k < 4; ++k) {
    auto& e = s.circ_edges[static_cast<std::size_t>(k)];
    e = optional(tree, "segmentation.circ_c" + std::to_string(k + 1), e);
  }
  s.a_thresh_factor = optional(tree, "segmentation.a_thresh_factor", s.a_thresh_factor);
  s.circ_split = optional(tree, "segmentation.circ_split", s.circ_split);
  s.max_recursion_depth = optional(tree, "segmentation.max_recursion_depth", s.max_recursion_depth);
  s.area_plateau_max = optional(tree, "segmentation.area_plateau_max", s.area_plateau_max);
  s.parallel_sweep = optional(tree, "segmentation.parallel_sweep", s.parallel_sweep);
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const PipelineConfig& cfg) {
  std::string s = "[io]\n";
  s += "input = " + cfg.input + "\n";
  s += "output = " + cfg.output + "\n";
  s += "gt_marks = " + cfg.gt_marks + "\n";
  s += "gt_masks = " + cfg.gt_masks + "\n";
  s += "\n[runtime]\n";
  s += "threads = " + (cfg.threads == 0 ? std::string("auto") : std::to_string(cfg.threads)) + "\n";
  std::string section;
  for (const auto& [key, value] : cfg.processing_parameters()) {
    const auto dot = key.find('.');
    const std::string sec = key.substr(0, dot);
    if (sec != section) {
      section = sec;
      s += "\n[" + sec + "]\n";
    }
    s += key.substr(dot + 1) + " = " + value + "\n";
  }
  return s;
}

Analysis process(const RgbImage& img, const PipelineConfig& cfg, const std::string& image_id) {
  cfg.validate();
  if (img.empty()) throw InputError("empty image");
  Analysis a;

  // Phase I: principal component planes and texture-based channel choice.
  a.pcs = pca::decompose(img);
  a.selection = texture::select_pc_channel(a.pcs.planes, cfg.clahe, cfg.glcm);
  const GrayPlane& pc = a.pcs.planes[static_cast<std::size_t>(a.selection.index)];

  // Phase II: background suppression, two-class clustering, blob cleanup.
  a.suppressed = blobs::suppress_background(pc, cfg.r_obrcbr, cfg.pca_sigma[0], cfg.pca_sigma[1],
                                            cfg.gaussian_half_extent);
  a.kmeans_mask = blobs::kmeans_blob_mask(blobs::build_pixel_features(a.suppressed));
  a.blobs = blobs::postprocess_blobs(a.kmeans_mask, static_cast<int>(std::lround(cfg.seg.a_min)),
                                     cfg.blob_dilate_radius);

  // Phase III: enhanced grayscale and per-blob splitting.
  const GrayPlane gray = imaging::to_gray(img);
  GrayPlane smoothed = imaging::gaussian_filter(gray, cfg.gray_sigma[0], cfg.gray_sigma[1],
                                                cfg.gaussian_half_extent);
  smoothed = imaging::minmax_normalize(smoothed);
  a.gray_enhanced = imaging::minmax_normalize(
      texture::clahe(smoothed, cfg.gray_ahe.fitted_to(img.width(), img.height())));
  a.segmentation = split::segment_image(a.blobs, a.gray_enhanced, cfg.seg);

  a.records = report::extract_colony_features(a.segmentation.colonies, img, gray, pc, image_id);
  report::Summary& s = a.summary;
  s.image = image_id;
  s.colony_count = a.segmentation.colony_count;
  s.blob_count = static_cast<int>(a.blobs.size());
  double h_sum = 0.0;
  for (const auto& b : a.segmentation.blobs) {
    if (!b.h_opt) continue;
    const double h = *b.h_opt;
    s.h_min = s.split_blobs == 0 ? h : std::min(s.h_min, h);
    s.h_max = s.split_blobs == 0 ? h : std::max(s.h_max, h);
    h_sum += h;
    ++s.split_blobs;
  }
  if (s.split_blobs > 0) s.h_mean = h_sum / s.split_blobs;
  s.selected_channel = a.selection.index + 1;
  s.contrasts = a.selection.contrasts;
  s.parameters = cfg.processing_parameters();
  return a;
}

ImageOutcome run_image(const PipelineConfig& cfg, const std::filesystem::path& path,
                       const std::vector<eval::GtMark>* marks) {
  ImageOutcome out;
  out.path = path;
  out.image = path.stem().string();
  try {
    const RgbImage img = imaging::load_rgb(path);
    const Analysis a = process(img, cfg, out.image);
    report::write_outputs(a.records, a.segmentation.mask, a.segmentation.colonies, img, a.summary,
                          cfg.output);
    out.colony_count = a.summary.colony_count;
    out.blob_count = a.summary.blob_count;
    if (marks) out.metrics = eval::evaluate(out.image, a.segmentation.colonies, *marks);
    out.ok = true;
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

std::vector<std::filesystem::path> collect_inputs(const std::string& input) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  if (input.empty()) return files;
  const fs::path p(input);
  std::error_code ec;
  if (fs::is_regular_file(p, ec)) {
    files.push_back(p);
  } else if (fs::is_directory(p, ec)) {
    for (const auto& e : fs::directory_iterator(p)) {
      if (e.is_regular_file() && is_image_file(e.path()) && !is_gt_file(e.path())) files.push_back(e.path());
    }
  } else if (p.filename().string().find_first_of("*?") != std::string::npos) {
    const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    const std::regex re = glob_regex(p.filename().string());
    if (fs::is_directory(dir, ec)) {
      for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && std::regex_match(e.path().filename().string(), re)) {
          files.push_back(e.path());
        }
      }
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::optional<std::vector<eval::GtMark>> find_marks(const PipelineConfig& cfg,
                                                     const eval::MarksByImage& csv_marks,
                                                     const std::string& image_id) {
  if (!cfg.gt_marks.empty()) {
    const auto it = csv_marks.find(image_id);
    if (it != csv_marks.end()) return it->second;
  }
  if (!cfg.gt_masks.empty()) {
    for (const std::string& name : {image_id + "_gt.png", image_id + ".png"}) {
      const std::filesystem::path p = std::filesystem::path(cfg.gt_masks) / name;
      if (std::filesystem::is_regular_file(p)) return eval::marks_from_mask(imaging::load_mask(p));
    }
  }
  if (!cfg.gt_marks.empty()) return std::vector<eval::GtMark>{};
  return std::nullopt;
}

int resolved_threads(int requested) {
  if (requested > 0) return requested;
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

std::string batch_summary_csv(const std::vector<ImageOutcome>& outcomes) {
  std::string s = "image,status,colony_count,blob_count,error\n";
  for (const auto& o : outcomes) {
    std::string err = o.error;
    std::replace(err.begin(), err.end(), '\n', ' ');
    std::replace(err.begin(), err.end(), '"', '\'');
    s += o.image + ',' + (o.ok ? "ok" : "failed") + ',' + std::to_string(o.colony_count) + ',' +
         std::to_string(o.blob_count) + ',' + (err.empty() ? "" : '"' + err + '"') + '\n';
  }
  return s;
}

BatchResult run_batch(const PipelineConfig& cfg) {
  cfg.validate();
  const auto files = collect_inputs(cfg.input);
  if (files.empty()) throw InputError("no input images match '" + cfg.input + "'");
  if (cfg.output.empty()) throw ParameterError("no output directory given");
  std::error_code ec;
  std::filesystem::create_directories(cfg.output, ec);
  if (ec || !std::filesystem::is_directory(cfg.output)) {
    throw IoError("cannot create output directory " + cfg.output);
  }
  eval::MarksByImage csv_marks;
  if (!cfg.gt_marks.empty()) csv_marks = eval::read_marks_csv(cfg.gt_marks);

  // Ground truth is resolved up front so that workers only touch their own slot.
  std::vector<std::optional<std::vector<eval::GtMark>>> marks(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    try {
      marks[i] = find_marks(cfg, csv_marks, files[i].stem().string());
    } catch (const Error&) {
      marks[i].reset();
    }
  }

  BatchResult result;
  result.outcomes.resize(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      result.outcomes[i] = run_image(cfg, files[i], marks[i] ? &*marks[i] : nullptr);
    }
  };
  const int n = std::min(resolved_threads(cfg.threads), static_cast<int>(files.size()));
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
  }

  std::vector<eval::ImageMetrics> metrics;
  for (const auto& o : result.outcomes) {
    if (!o.ok) ++result.failures;
    if (o.metrics) metrics.push_back(*o.metrics);
  }
  const std::filesystem::path out(cfg.output);
  report::write_text(out / "batch_summary.csv", batch_summary_csv(result.outcomes));
  if (!metrics.empty()) report::write_text(out / "metrics.csv", eval::metrics_csv(metrics));
  result.exit_code = result.failures == 0 ? 0 : 1;
  return result;
}

}  // namespace acc::pipeline
