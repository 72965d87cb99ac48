#pragma once

#include "mot/association.hpp"
#include "mot/lifecycle.hpp"
#include "mot/motion.hpp"
#include "mot/types.hpp"

#include <string>
#include <vector>

namespace mot {

enum class PreprocessMode { ScoreThreshold, Nms };

struct PreprocessConfig {
  PreprocessMode mode = PreprocessMode::ScoreThreshold;
  PerClass<double> score_threshold{0.3, 0.2, 0.2};  // keep score >= tau
  double nms_iou_threshold = 0.5;
  double nms_score_floor = 0.01;
};

enum class AssignerKind { Hungarian, Greedy, Pcgda };

enum class EgoMode { ProvidedPoses, Stationary };

/// One choice per pipeline stage plus the numeric parameters. The named
/// presets are returned by preset().
struct PipelineConfig {
  PreprocessConfig preprocessing;
  MotionKind motion = MotionKind::CV;
  NoiseConfig noise;
  TrackInitConfig init;
  SimilarityConfig similarity;
  AssignerKind assignment = AssignerKind::Hungarian;
  PcgdaConfig pcgda;
  LifecycleConfig lifecycle;
  EgoMode ego_mode = EgoMode::ProvidedPoses;
  double frame_period = 0.1;  // seconds between consecutive frame indices
  bool emit_raw_detection = false;  // emit the matched detection, not the posterior
  bool emit_predictions = false;    // also emit coasting (missed) tracks

  void validate() const;  // throws ConfigError on out-of-range parameters
};

/// Named presets: one per pipeline column of the comparison.
///   ab3dmot     {score, kf_cv, iou,  hungarian, count_based}
///   ab3dmot_mh  {score, kf_cv, maha, greedy,    count_based}
///   castrack    {score, kf_ca, apc,  pcgda,     count_based}
///   simpletrack {nms,   kf_cv, giou, hungarian, two_stage}
///   centerpoint {score, lom,   lom,  greedy,    count_based}
/// Unknown names throw ConfigError listing the valid presets.
PipelineConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Score-threshold or per-class NMS filtering of raw detections.
std::vector<Box3D> preprocess(const std::vector<Box3D>& detections,
                              const PreprocessConfig& cfg);

struct TrackOutput {
  int frame = 0;
  long long track_id = 0;
  Box3D box;
};

/// Sequential per-frame tracker. Frames must arrive in increasing
/// frame_index order. Deterministic: no RNG in the tracking path.
class Tracker {
 public:
  explicit Tracker(PipelineConfig cfg);

  /// One frame: preprocess -> ego-compensate -> predict -> similarity ->
  /// assign (+ rescue) -> update -> lifecycle -> births -> emit confirmed.
  std::vector<TrackOutput> step(const FrameBundle& frame);

  const std::vector<Track>& tracks() const { return tracks_; }
  long long next_id() const { return next_id_; }

 private:
  PipelineConfig cfg_;
  KalmanModel model_;
  std::vector<Track> tracks_;
  long long next_id_ = 1;
  int last_frame_index_ = 0;
  bool has_prev_ = false;
  EgoPose prev_pose_;
  bool warned_missing_velocity_ = false;
};

/// Fold of Tracker::step over a frame list; rows sorted by (frame, id).
std::vector<TrackOutput> run_sequence(const std::vector<FrameBundle>& frames,
                                      const PipelineConfig& cfg);

/// Output rows as labeled boxes (evaluation input).
std::vector<LabeledBox> to_labeled(const std::vector<TrackOutput>& rows);

}  // namespace mot
