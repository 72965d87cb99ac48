// Command-line front end: track / eval / synth / presets.
// Exit codes: 0 success, 1 input error, 2 config error.

#include "mot/errors.hpp"
#include "mot/io.hpp"
#include "mot/metrics.hpp"
#include "mot/pipeline.hpp"
#include "mot/synth.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

int run_track(const std::string& dets, const std::string& ego,
              const std::string& config_path, const std::string& preset_name,
              const std::string& out, bool stationary_ego,
              std::optional<double> max_range) {
  mot::PipelineConfig cfg;
  if (!config_path.empty()) {
    cfg = mot::config_from_json_file(config_path);
  } else {
    cfg = mot::preset(preset_name);
  }
  if (stationary_ego) cfg.ego_mode = mot::EgoMode::Stationary;
  if (cfg.ego_mode == mot::EgoMode::ProvidedPoses && ego.empty()) {
    throw mot::InputError("--ego is required unless --stationary-ego is set");
  }
  if (max_range && *max_range <= 0.0) {
    throw mot::ConfigError("--max-range must be positive");
  }

  mot::ParseOptions opts;
  opts.max_range = max_range;
  opts.stationary_ego = cfg.ego_mode == mot::EgoMode::Stationary;
  const mot::SequenceBundle bundle =
      mot::parse_sequence(dets, ego, std::nullopt, opts);

  const auto results = mot::run_sequence(bundle.frames, cfg);
  mot::write_results(results, out);
  std::cout << "tracked " << bundle.frames.size() << " frames, wrote "
            << results.size() << " rows to " << out << "\n";
  return 0;
}

int run_eval(const std::string& gt, const std::string& hyp, double alpha,
             bool alpha_set, bool sweep, const std::string& match,
             const std::string& report_path) {
  mot::MatchConfig cfg;
  if (match == "iou") {
    cfg.mode = mot::MatchMode::IoU;
    cfg.alpha = alpha_set ? alpha : 0.5;
  } else if (match == "center") {
    cfg.mode = mot::MatchMode::Center;
    cfg.alpha = alpha_set ? alpha : 2.0;
  } else {
    throw mot::ConfigError("--match must be 'iou' or 'center'");
  }

  const auto gt_rows = mot::parse_ground_truth(gt);
  const auto hyp_rows = mot::parse_results(hyp);
  const mot::EvalReport report =
      mot::evaluate(gt_rows, hyp_rows, cfg, sweep);
  std::cout << mot::report_to_table_text(report);
  mot::write_report_json(report, report_path);
  return 0;
}

int run_synth(std::uint64_t seed, const std::string& profile,
              const std::string& out_dir, int objects, int frames) {
  mot::ScenarioSpec spec;
  spec.seed = seed;
  spec.n_objects = objects;
  spec.frames = frames;
  spec.speed_min = 0.0;
  spec.speed_max = 2.0;
  if (profile == "perfect") {
    spec.noise = mot::perfect_profile();
  } else if (profile == "lidar") {
    spec.noise = mot::lidar_profile();
  } else if (profile == "radar") {
    spec.noise = mot::radar_profile();
  } else {
    throw mot::ConfigError(
        "--profile must be 'lidar', 'radar' or 'perfect'");
  }

  const mot::Scenario scenario = mot::generate_scenario(spec);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  const std::vector<std::string> comments = {
      "seed: " + std::to_string(seed), "profile: " + profile};
  mot::write_detections(scenario.bundle.frames, dir / "detections.csv",
                        comments);
  mot::write_ground_truth(*scenario.bundle.ground_truth,
                          dir / "ground_truth.csv", comments);
  mot::write_ego_poses(scenario.poses, dir / "ego_poses.csv", comments);
  std::cout << "wrote scenario (seed " << seed << ", profile " << profile
            << ") to " << out_dir << "\n";
  return 0;
}

int run_presets() {
  std::printf("%-12s %-14s %-8s %-10s %-10s %s\n", "preset", "preprocessing",
              "motion", "similarity", "assignment", "lifecycle");
  for (const std::string& name : mot::preset_names()) {
    const mot::PipelineConfig cfg = mot::preset(name);
    const char* pre = cfg.preprocessing.mode == mot::PreprocessMode::Nms
                          ? "nms"
                          : "score";
    const char* motion = cfg.motion == mot::MotionKind::CA
                             ? "kf_ca"
                             : (cfg.motion == mot::MotionKind::LoM ? "lom"
                                                                   : "kf_cv");
    const char* assigner =
        cfg.assignment == mot::AssignerKind::Hungarian
            ? "hungarian"
            : (cfg.assignment == mot::AssignerKind::Greedy ? "greedy"
                                                           : "pcgda");
    const char* lifecycle =
        cfg.lifecycle.policy == mot::LifecyclePolicy::TwoStage
            ? "two_stage"
            : "count_based";
    std::printf("%-12s %-14s %-8s %-10s %-10s %s\n", name.c_str(), pre,
                motion, mot::metric_name(cfg.similarity.metric).c_str(),
                assigner, lifecycle);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"3D multi-object tracking engine"};
  app.require_subcommand(1);

  // track
  auto* track = app.add_subcommand("track", "run a tracking pipeline");
  std::string dets, ego, config_path, preset_name, out;
  bool stationary_ego = false;
  double max_range_value = 0.0;
  track->add_option("--dets", dets, "detections CSV")->required();
  track->add_option("--ego", ego, "ego pose CSV");
  auto* cfg_opt = track->add_option("--config", config_path,
                                    "pipeline config JSON");
  auto* preset_opt =
      track->add_option("--preset", preset_name, "named pipeline preset");
  cfg_opt->excludes(preset_opt);
  track->add_option("--out", out, "output results CSV")->required();
  track->add_flag("--stationary-ego", stationary_ego,
                  "assume a stationary ego vehicle");
  auto* range_opt = track->add_option("--max-range", max_range_value,
                                      "drop detections beyond this radius");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate results against labels");
  std::string gt, hyp, match = "iou", report_path;
  double alpha = 0.5;
  bool sweep = false;
  eval->add_option("--gt", gt, "ground-truth CSV")->required();
  eval->add_option("--hyp", hyp, "hypothesis results CSV")->required();
  auto* alpha_opt = eval->add_option("--alpha", alpha,
                                     "matching threshold (IoU) or cap (m)");
  eval->add_flag("--alpha-sweep", sweep, "also sweep alpha 0.05..0.95");
  eval->add_option("--match", match, "matching overlap: iou|center");
  eval->add_option("--report", report_path, "output report JSON")->required();

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic scenario");
  std::uint64_t seed = 0;
  std::string profile, out_dir;
  int objects = 5, frames = 60;
  synth->add_option("--seed", seed, "RNG seed")->required();
  synth->add_option("--profile", profile, "noise profile: lidar|radar|perfect")
      ->required();
  synth->add_option("--out-dir", out_dir, "output directory")->required();
  synth->add_option("--objects", objects, "number of objects");
  synth->add_option("--frames", frames, "number of frames");

  // presets
  auto* presets = app.add_subcommand("presets", "list the pipeline presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad invocation is a config error
  }

  try {
    if (track->parsed()) {
      if (config_path.empty() && preset_name.empty()) {
        throw mot::ConfigError("track requires --config or --preset");
      }
      std::optional<double> max_range;
      if (range_opt->count() > 0) max_range = max_range_value;
      return run_track(dets, ego, config_path, preset_name, out,
                       stationary_ego, max_range);
    }
    if (eval->parsed()) {
      return run_eval(gt, hyp, alpha, alpha_opt->count() > 0, sweep, match,
                      report_path);
    }
    if (synth->parsed()) {
      return run_synth(seed, profile, out_dir, objects, frames);
    }
    if (presets->parsed()) return run_presets();
  } catch (const mot::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
