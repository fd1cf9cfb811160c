#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acc/evaluation.hpp"
#include "acc/imaging.hpp"
#include "acc/morphology.hpp"
#include "acc/pipeline.hpp"
#include "acc/reporting.hpp"
#include "acc/synth.hpp"

namespace fs = std::filesystem;
using namespace acc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitUsage = 2;

struct RunArgs {
  std::string config;
  std::string input;
  std::string output;
  std::string gt_marks;
  std::string gt_masks;
  std::optional<int> threads;
};

struct EvalArgs {
  std::string masks;
  std::string gt_marks;
  std::string gt_masks;
  std::string output;
};

struct SynthArgs {
  std::string spec;
  std::string out;
};

void print_batch_report(const pipeline::BatchResult& r) {
  std::vector<eval::ImageMetrics> metrics;
  std::vector<std::pair<double, double>> counts;
  for (const auto& o : r.outcomes) {
    if (!o.ok) {
      std::cerr << "failed: " << o.path.string() << ": " << o.error << "\n";
      continue;
    }
    std::cout << o.image << ": " << o.colony_count << " colonies\n";
    if (o.metrics) {
      metrics.push_back(*o.metrics);
      if (o.metrics->gt_count > 0) counts.emplace_back(o.metrics->pred_count, o.metrics->gt_count);
    }
  }
  if (!metrics.empty()) {
    double f1 = 0.0;
    for (const auto& m : metrics) f1 += m.metrics.f1;
    std::cout << "mean F1 " << report::fixed6(f1 / metrics.size()) << " over " << metrics.size()
              << " images";
    if (!counts.empty()) std::cout << ", count RMSE " << report::fixed6(eval::count_rmse(counts));
    std::cout << "\n";
  }
  std::cout << r.outcomes.size() - r.failures << "/" << r.outcomes.size() << " images processed\n";
}

int cmd_run(const RunArgs& a) {
  pipeline::PipelineConfig cfg = pipeline::load_config(a.config);
  if (!a.input.empty()) cfg.input = a.input;
  if (!a.output.empty()) cfg.output = a.output;
  if (!a.gt_marks.empty()) cfg.gt_marks = a.gt_marks;
  if (!a.gt_masks.empty()) cfg.gt_masks = a.gt_masks;
  if (a.threads) cfg.threads = *a.threads;
  cfg.validate();
  if (cfg.input.empty()) throw ParameterError("no input given (config io.input or --input)");
  const auto result = pipeline::run_batch(cfg);
  print_batch_report(result);
  return result.exit_code == 0 ? kExitOk : kExitPartial;
}

int cmd_eval(const EvalArgs& a) {
  if (a.gt_marks.empty() && a.gt_masks.empty()) throw ParameterError("eval needs --gt-marks or --gt-masks");
  pipeline::PipelineConfig lookup;
  lookup.gt_marks = a.gt_marks;
  lookup.gt_masks = a.gt_masks;
  eval::MarksByImage csv_marks;
  if (!a.gt_marks.empty()) csv_marks = eval::read_marks_csv(a.gt_marks);

  std::vector<fs::path> masks;
  for (const auto& e : fs::directory_iterator(a.masks)) {
    const std::string name = e.path().filename().string();
    if (e.is_regular_file() && name.size() > 9 && name.ends_with("_mask.png")) masks.push_back(e.path());
  }
  std::sort(masks.begin(), masks.end());
  if (masks.empty()) throw InputError("no *_mask.png files in " + a.masks);

  std::vector<eval::ImageMetrics> rows;
  std::vector<std::pair<double, double>> counts;
  int missing = 0;
  for (const auto& p : masks) {
    const std::string stem = p.stem().string();
    const std::string id = stem.substr(0, stem.size() - 5);
    const auto marks = pipeline::find_marks(lookup, csv_marks, id);
    if (!marks) {
      std::cerr << "no ground truth for " << id << "\n";
      ++missing;
      continue;
    }
    const LabelMap labels = morph::connected_components(imaging::load_mask(p), nullptr);
    rows.push_back(eval::evaluate(id, labels, *marks));
    if (rows.back().gt_count > 0) counts.emplace_back(rows.back().pred_count, rows.back().gt_count);
  }
  const std::string csv = eval::metrics_csv(rows);
  if (a.output.empty()) {
    std::cout << csv;
  } else {
    report::write_text(a.output, csv);
  }
  if (!counts.empty()) std::cerr << "count RMSE " << report::fixed6(eval::count_rmse(counts)) << "\n";
  return missing == 0 ? kExitOk : kExitPartial;
}

int cmd_synth(const SynthArgs& a) {
  const synth::SynthJob job = synth::read_spec(a.spec);
  synth::write_job(job, a.out);
  std::cout << "wrote " << job.images << " dishes to " << a.out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Automated colony counting for clonogenic assay scans"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Segment and count colonies in a batch of images");
  run_cmd->add_option("--config", run.config, "Configuration file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--input", run.input, "Image file, directory or glob");
  run_cmd->add_option("--output", run.output, "Output directory");
  run_cmd->add_option("--gt-marks", run.gt_marks, "Ground-truth marks CSV (image,x,y)");
  run_cmd->add_option("--gt-masks", run.gt_masks, "Directory of ground-truth masks");
  run_cmd->add_option("--threads", run.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score saved *_mask.png files against ground truth");
  eval_cmd->add_option("--masks", ev.masks, "Directory holding *_mask.png")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--gt-marks", ev.gt_marks, "Ground-truth marks CSV");
  eval_cmd->add_option("--gt-masks", ev.gt_masks, "Directory of ground-truth masks");
  eval_cmd->add_option("--output", ev.output, "Metrics CSV path (stdout if omitted)");

  SynthArgs sy;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic dishes with ground truth");
  synth_cmd->add_option("--spec", sy.spec, "Synthetic dish spec (INI)")->required()->check(CLI::ExistingFile);
  synth_cmd->add_option("--out", sy.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*eval_cmd) return cmd_eval(ev);
    if (*synth_cmd) return cmd_synth(sy);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartial;
  }
  return kExitUsage;
}
