#include "acc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "acc/morphology.hpp"
#include "acc/reporting.hpp"

namespace acc::eval {

namespace {

int region_count(const LabelMap& labels) {
  std::int32_t n = 0;
  for (auto l : labels.pixels()) n = std::max(n, l);
  return n;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

ConfusionCounts match_gt_marks(const LabelMap& labels, std::span<const GtMark> marks) {
  const int regions = region_count(labels);
  std::vector<int> hits(static_cast<std::size_t>(regions) + 1, 0);
  for (const GtMark& m : marks) {
    const long px = std::lround(m.x);
    const long py = std::lround(m.y);
    if (!std::isfinite(m.x) || !std::isfinite(m.y) ||
        !labels.contains(static_cast<int>(px), static_cast<int>(py))) {
      throw InputError("ground-truth mark outside the image");
    }
    ++hits[static_cast<std::size_t>(labels(static_cast<int>(px), static_cast<int>(py)))];
  }
  ConfusionCounts c;
  for (int r = 1; r <= regions; ++r) {
    if (hits[static_cast<std::size_t>(r)] > 0) {
      ++c.tp;
    } else {
      ++c.fp;
    }
  }
  c.fn = static_cast<int>(marks.size()) - c.tp;
  return c;
}

double f1_score(double precision, double recall) {
  if (!(precision > 0.0) || !(recall > 0.0)) return 0.0;
  return 2.0 / (1.0 / precision + 1.0 / recall);
}

DetectionMetrics prf1(const ConfusionCounts& c) {
  DetectionMetrics m;
  const int predicted = c.tp + c.fp;
  const int actual = c.tp + c.fn;
  if (predicted > 0) m.precision = static_cast<double>(c.tp) / predicted;
  if (actual > 0) m.recall = static_cast<double>(c.tp) / actual;
  m.degenerate = predicted == 0 || actual == 0 || c.tp == 0;
  m.f1 = m.degenerate ? 0.0 : f1_score(m.precision, m.recall);
  return m;
}

double count_rmse(std::span<const std::pair<double, double>> predicted_vs_gt) {
  if (predicted_vs_gt.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [pred, gt] : predicted_vs_gt) {
    if (!(gt > 0.0)) throw InputError("count_rmse: ground-truth count must be positive");
    const double e = (pred - gt) / gt;
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(predicted_vs_gt.size()));
}

std::vector<GtMark> marks_from_mask(const BinaryMask& mask) {
  int count = 0;
  const LabelMap labels = morph::connected_components(mask, &count);
  std::vector<double> sx(static_cast<std::size_t>(count) + 1, 0.0), sy(sx.size(), 0.0);
  std::vector<long> n(sx.size(), 0);
  for (int y = 0; y < labels.height(); ++y) {
    for (int x = 0; x < labels.width(); ++x) {
      const auto l = static_cast<std::size_t>(labels(x, y));
      if (l == 0) continue;
      sx[l] += x;
      sy[l] += y;
      ++n[l];
    }
  }
  std::vector<GtMark> marks;
  for (std::size_t l = 1; l < sx.size(); ++l) {
    marks.push_back({sx[l] / static_cast<double>(n[l]), sy[l] / static_cast<double>(n[l])});
  }
  return marks;
}

MarksByImage read_marks_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read marks file " + path.string());
  MarksByImage out;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string image, xs, ys;
    std::getline(ss, image, ',');
    std::getline(ss, xs, ',');
    std::getline(ss, ys, ',');
    image = trim(image);
    if (lineno == 1 && image == "image") continue;
    try {
      out[image].push_back({std::stod(xs), std::stod(ys)});
    } catch (const std::exception&) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": malformed mark row");
    }
  }
  return out;
}

std::string marks_csv(const MarksByImage& marks) {
  std::string s = "image,x,y\n";
  for (const auto& [image, list] : marks) {
    for (const GtMark& m : list) s += image + ',' + report::fixed6(m.x) + ',' + report::fixed6(m.y) + '\n';
  }
  return s;
}

ImageMetrics evaluate(const std::string& image, const LabelMap& labels, std::span<const GtMark> marks) {
  ImageMetrics m;
  m.image = image;
  m.counts = match_gt_marks(labels, marks);
  m.metrics = prf1(m.counts);
  m.pred_count = m.counts.tp + m.counts.fp;
  m.gt_count = static_cast<int>(marks.size());
  return m;
}

std::string metrics_csv(const std::vector<ImageMetrics>& rows) {
  std::string s = kMetricsCsvHeader;
  s += '\n';
  for (const auto& r : rows) {
    s += r.image + ',' + std::to_string(r.counts.tp) + ',' + std::to_string(r.counts.fp) + ',' +
         std::to_string(r.counts.fn) + ',' + report::fixed6(r.metrics.precision) + ',' +
         report::fixed6(r.metrics.recall) + ',' + report::fixed6(r.metrics.f1) + ',' +
         std::to_string(r.pred_count) + ',' + std::to_string(r.gt_count) + '\n';
  }
  return s;
}

}  // namespace acc::eval
