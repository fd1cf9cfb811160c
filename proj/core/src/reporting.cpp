#include "acc/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "acc/blobs.hpp"
#include "acc/imaging.hpp"

namespace acc::report {

namespace {

ChannelStats finish(const std::vector<double>& values) {
  ChannelStats s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / static_cast<double>(values.size()));
  return s;
}

}  // namespace

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::vector<ColonyRecord> extract_colony_features(const LabelMap& labels, const RgbImage& img,
                                                  const GrayPlane& gray, const GrayPlane& pc,
                                                  const std::string& image_id) {
  require_same_shape(labels, img, "extract_colony_features");
  require_same_shape(labels, gray, "extract_colony_features");
  require_same_shape(labels, pc, "extract_colony_features");
  std::int32_t count = 0;
  for (auto l : labels.pixels()) count = std::max(count, l);

  // Pixel lists per label, in raster order, for two-pass statistics.
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(count) + 1);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > 0) members[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  const auto regions = blobs::label_regions(labels, count);

  std::vector<ColonyRecord> out;
  for (std::int32_t l = 1; l <= count; ++l) {
    const auto& px = members[static_cast<std::size_t>(l)];
    if (px.empty()) continue;
    ColonyRecord rec;
    rec.image = image_id;
    rec.colony_id = l;
    rec.area = static_cast<int>(px.size());
    rec.circularity = regions[static_cast<std::size_t>(l) - 1].circularity;
    double sx = 0.0, sy = 0.0;
    std::vector<double> vr, vg, vb, vgray, vpc;
    for (std::size_t i : px) {
      sx += static_cast<double>(i % static_cast<std::size_t>(labels.width()));
      sy += static_cast<double>(i / static_cast<std::size_t>(labels.width()));
      vr.push_back(img[i].r);
      vg.push_back(img[i].g);
      vb.push_back(img[i].b);
      vgray.push_back(gray[i]);
      vpc.push_back(pc[i]);
    }
    rec.centroid_x = sx / static_cast<double>(px.size());
    rec.centroid_y = sy / static_cast<double>(px.size());
    rec.r = finish(vr);
    rec.g = finish(vg);
    rec.b = finish(vb);
    rec.gray = finish(vgray);
    rec.pc = finish(vpc);
    out.push_back(std::move(rec));
  }
  return out;
}

std::string colonies_csv(const std::vector<ColonyRecord>& records) {
  std::string s = kColonyCsvHeader;
  s += '\n';
  for (const auto& r : records) {
    s += r.image + ',' + std::to_string(r.colony_id) + ',' + fixed6(r.centroid_x) + ',' +
         fixed6(r.centroid_y) + ',' + std::to_string(r.area) + ',' + fixed6(r.circularity);
    for (const ChannelStats* c : {&r.r, &r.g, &r.b, &r.gray, &r.pc}) {
      s += ',' + fixed6(c->mean) + ',' + fixed6(c->std);
    }
    s += '\n';
  }
  return s;
}

std::string summary_csv(const Summary& summary) {
  std::string s = "key,value\n";
  auto row = [&](const std::string& k, const std::string& v) {
    s += k + ',' + (v.find(',') != std::string::npos ? '"' + v + '"' : v) + '\n';
  };
  row("image", summary.image);
  row("colony_count", std::to_string(summary.colony_count));
  row("blob_count", std::to_string(summary.blob_count));
  row("split_blobs", std::to_string(summary.split_blobs));
  row("h_opt_mean", fixed6(summary.h_mean));
  row("h_opt_min", fixed6(summary.h_min));
  row("h_opt_max", fixed6(summary.h_max));
  row("selected_channel", std::to_string(summary.selected_channel));
  for (int k = 0; k < 3; ++k) {
    row("contrast_pc" + std::to_string(k + 1), fixed6(summary.contrasts[static_cast<std::size_t>(k)]));
  }
  for (const auto& [k, v] : summary.parameters) row("param." + k, v);
  return s;
}

RgbImage render_overlay(const RgbImage& img, const LabelMap& colonies) {
  require_same_shape(img, colonies, "render_overlay");
  RgbImage out = img;
  for (int y = 0; y < colonies.height(); ++y) {
    for (int x = 0; x < colonies.width(); ++x) {
      const std::int32_t l = colonies(x, y);
      if (l <= 0) continue;
      bool edge = false;
      for (int k = 0; k < 8 && !edge; ++k) {
        const int nx = x + kNeighbor8Dx[k], ny = y + kNeighbor8Dy[k];
        edge = !colonies.contains(nx, ny) || colonies(nx, ny) != l;
      }
      if (edge) out(x, y) = {1.0, 0.0, 0.0};
    }
  }
  return out;
}

OutputPaths output_paths(const std::filesystem::path& out_dir, const std::string& image_id) {
  return {out_dir / (image_id + "_colonies.csv"), out_dir / (image_id + "_summary.csv"),
          out_dir / (image_id + "_mask.png"), out_dir / (image_id + "_overlay.png")};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  if (!f) throw IoError("failed writing " + path.string());
}

OutputPaths write_outputs(const std::vector<ColonyRecord>& records, const BinaryMask& segmentation,
                          const LabelMap& colonies, const RgbImage& img, const Summary& summary,
                          const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw IoError("cannot create output directory " + out_dir.string());
  }
  const OutputPaths paths = output_paths(out_dir, summary.image);
  write_text(paths.colonies_csv, colonies_csv(records));
  write_text(paths.summary_csv, summary_csv(summary));
  imaging::save_mask_png(segmentation, paths.mask_png);
  imaging::save_rgb_png(render_overlay(img, colonies), paths.overlay_png);
  return paths;
}

}  // namespace acc::report
