#include "acc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "acc/imaging.hpp"
#include "acc/reporting.hpp"

namespace acc::synth {

namespace {

double quantize8(double v) { return std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0; }

double dish_radius(const SynthSpec& s) { return 0.48 * std::min(s.width, s.height); }

bool in_range(double v, double lo, double hi) { return v >= lo && v <= hi; }

template <typename T>
T read_key(const boost::property_tree::ptree& t, const char* key, T fallback) {
  const auto child = t.get_child_optional(key);
  if (!child) return fallback;
  const auto v = child->get_value_optional<T>();
  if (!v) throw FormatError(std::string("synth: malformed value for ") + key + ": " + child->data());
  return *v;
}

}  // namespace

void SynthSpec::validate() const {
  if (width < 1 || height < 1) throw ParameterError("synth: image size must be positive");
  if (colonies < 0) throw ParameterError("synth: colony count must be non-negative");
  if (!(radius_min >= 1.0) || radius_max < radius_min) throw ParameterError("synth: bad radius range");
  if (!(eccentricity_min >= 0.0) || eccentricity_max < eccentricity_min || eccentricity_max >= 1.0) {
    throw ParameterError("synth: eccentricity range must lie in [0,1)");
  }
  if (!in_range(overlap, 0.0, 0.9)) throw ParameterError("synth: overlap must lie in [0,0.9]");
  if (!(darkness_min > 0.0) || darkness_max < darkness_min || darkness_max > 0.8) {
    throw ParameterError("synth: darkness range must lie in (0,0.8]");
  }
  if (!in_range(gradient, 0.0, 0.5)) throw ParameterError("synth: gradient must lie in [0,0.5]");
  if (!(noise_sigma >= 0.0)) throw ParameterError("synth: noise sigma must be non-negative");
  if (max_attempts < 1) throw ParameterError("synth: max_attempts must be positive");
  for (const Rgb& c : {stain, background}) {
    if (!in_range(c.r, 0, 1) || !in_range(c.g, 0, 1) || !in_range(c.b, 0, 1)) {
      throw ParameterError("synth: colours must lie in [0,1]");
    }
  }
}

double normalized_radius(const Colony& c, double x, double y) {
  const double dx = x - c.cx, dy = y - c.cy;
  const double ca = std::cos(c.angle), sa = std::sin(c.angle);
  const double u = (dx * ca + dy * sa) / c.semi_major;
  const double v = (-dx * sa + dy * ca) / c.semi_minor;
  return std::sqrt(u * u + v * v);
}

SynthDish generate(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  SynthDish dish;
  const double cx0 = 0.5 * (spec.width - 1), cy0 = 0.5 * (spec.height - 1);
  for (int k = 0; k < spec.colonies; ++k) {
    Colony c;
    c.semi_major = uniform(spec.radius_min, spec.radius_max);
    const double e = uniform(spec.eccentricity_min, spec.eccentricity_max);
    c.semi_minor = c.semi_major * std::sqrt(1.0 - e * e);
    c.angle = uniform(0.0, std::numbers::pi);
    c.darkness = uniform(spec.darkness_min, spec.darkness_max);
    const double margin = c.semi_major + 2.0;
    if (spec.width - 1 < 2.0 * margin || spec.height - 1 < 2.0 * margin) {
      throw InputError("synth: colony does not fit the image");
    }
    bool placed = false;
    for (int attempt = 0; attempt < spec.max_attempts && !placed; ++attempt) {
      c.cx = uniform(margin, spec.width - 1 - margin);
      c.cy = uniform(margin, spec.height - 1 - margin);
      if (spec.flask_ring && std::hypot(c.cx - cx0, c.cy - cy0) + margin > dish_radius(spec)) continue;
      placed = std::all_of(dish.colonies.begin(), dish.colonies.end(), [&](const Colony& o) {
        const double reach = c.semi_major + o.semi_major;
        const double need = spec.overlap > 0.0 ? (1.0 - spec.overlap) * reach : reach + 2.0;
        return std::hypot(c.cx - o.cx, c.cy - o.cy) >= need;
      });
    }
    if (!placed) {
      throw InputError("synth: could not place colony " + std::to_string(k + 1) + " of " +
                       std::to_string(spec.colonies));
    }
    dish.colonies.push_back(c);
    dish.marks.push_back({c.cx, c.cy});
  }

  const int w = spec.width, h = spec.height;
  dish.gt_labels = LabelMap(w, h, 0);
  GrayPlane alpha(w, h, 0.0);
  GrayPlane best_rho(w, h, 1.0);
  for (std::size_t k = 0; k < dish.colonies.size(); ++k) {
    const Colony& c = dish.colonies[k];
    const int x0 = std::max(0, static_cast<int>(std::floor(c.cx - c.semi_major)));
    const int x1 = std::min(w - 1, static_cast<int>(std::ceil(c.cx + c.semi_major)));
    const int y0 = std::max(0, static_cast<int>(std::floor(c.cy - c.semi_major)));
    const int y1 = std::min(h - 1, static_cast<int>(std::ceil(c.cy + c.semi_major)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double rho = normalized_radius(c, x, y);
        if (rho >= 1.0) continue;
        // The radial profile averages to 0.8 over the ellipse, so the mean
        // mixing fraction equals the colony's darkness.
        const double a = c.darkness * (0.6 + 0.4 * (1.0 - rho * rho)) / 0.8;
        alpha(x, y) = std::max(alpha(x, y), a);
        if (rho < best_rho(x, y)) {
          best_rho(x, y) = rho;
          dish.gt_labels(x, y) = static_cast<std::int32_t>(k + 1);
        }
      }
    }
  }

  dish.gt_mask = BinaryMask(w, h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::int32_t l = dish.gt_labels(x, y);
      if (l == 0) continue;
      bool touches_lower = false;
      for (int n = 0; n < 8 && !touches_lower; ++n) {
        const int nx = x + kNeighbor8Dx[n], ny = y + kNeighbor8Dy[n];
        if (!dish.gt_labels.contains(nx, ny)) continue;
        const std::int32_t o = dish.gt_labels(nx, ny);
        touches_lower = o > 0 && o < l;
      }
      dish.gt_mask(x, y) = touches_lower ? 0 : 1;
    }
  }

  std::normal_distribution<double> noise(0.0, 1.0);
  dish.image = RgbImage(w, h);
  const double r_dish = dish_radius(spec);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double shade = 1.0 + spec.gradient * ((w > 1 ? x / (w - 1.0) : 0.0) + (h > 1 ? y / (h - 1.0) : 0.0) - 1.0) / 2.0;
      if (spec.flask_ring) {
        const double t = std::clamp((std::hypot(x - cx0, y - cy0) - r_dish) / 4.0, 0.0, 1.0);
        shade *= 1.0 - 0.25 * t;
      }
      const double a = alpha(x, y);
      auto mix = [&](double bg, double st) {
        const double v = shade * (bg + (st - bg) * a);
        return quantize8(spec.noise_sigma > 0.0 ? v + spec.noise_sigma * noise(rng) : v);
      };
      Rgb& p = dish.image(x, y);
      p.r = mix(spec.background.r, spec.stain.r);
      p.g = mix(spec.background.g, spec.stain.g);
      p.b = mix(spec.background.b, spec.stain.b);
    }
  }
  return dish;
}

SynthJob read_spec(const std::filesystem::path& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    if (!std::filesystem::exists(path)) throw IoError("cannot read synth spec " + path.string());
    throw FormatError(e.what());
  }
  SynthJob job;
  SynthSpec& s = job.spec;
  try {
    const pt::ptree& t = tree.get_child("synth");
    job.images = read_key(t, "images", job.images);
    job.name = read_key(t, "name", job.name);
    s.width = read_key(t, "width", s.width);
    s.height = read_key(t, "height", s.height);
    s.colonies = read_key(t, "colonies", s.colonies);
    s.radius_min = read_key(t, "radius_min", s.radius_min);
    s.radius_max = read_key(t, "radius_max", s.radius_max);
    s.eccentricity_min = read_key(t, "eccentricity_min", s.eccentricity_min);
    s.eccentricity_max = read_key(t, "eccentricity_max", s.eccentricity_max);
    s.overlap = read_key(t, "overlap", s.overlap);
    s.darkness_min = read_key(t, "darkness_min", s.darkness_min);
    s.darkness_max = read_key(t, "darkness_max", s.darkness_max);
    s.gradient = read_key(t, "gradient", s.gradient);
    s.noise_sigma = read_key(t, "noise_sigma", s.noise_sigma);
    s.flask_ring = read_key(t, "flask_ring", s.flask_ring);
    s.seed = read_key(t, "seed", s.seed);
    s.max_attempts = read_key(t, "max_attempts", s.max_attempts);
    s.stain = {read_key(t, "stain_r", s.stain.r), read_key(t, "stain_g", s.stain.g), read_key(t, "stain_b", s.stain.b)};
    s.background = {read_key(t, "background_r", s.background.r), read_key(t, "background_g", s.background.g),
                    read_key(t, "background_b", s.background.b)};
  } catch (const pt::ptree_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (job.images < 1) throw ParameterError("synth: images must be positive");
  s.validate();
  return job;
}

std::string image_name(const SynthJob& job, int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_%03d", index);
  return job.name + buf;
}

void write_job(const SynthJob& job, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw IoError("cannot create output directory " + out_dir.string());
  }
  eval::MarksByImage marks;
  for (int i = 0; i < job.images; ++i) {
    SynthSpec spec = job.spec;
    spec.seed = job.spec.seed + static_cast<std::uint64_t>(i);
    const SynthDish dish = generate(spec);
    const std::string name = image_name(job, i);
    imaging::save_rgb_png(dish.image, out_dir / (name + ".png"));
    imaging::save_mask_png(dish.gt_mask, out_dir / (name + "_gt.png"));
    marks[name] = dish.marks;
  }
  report::write_text(out_dir / "marks.csv", eval::marks_csv(marks));
}

}  // namespace acc::synth
