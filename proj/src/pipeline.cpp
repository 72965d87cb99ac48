#include "mot/pipeline.hpp"

#include "mot/errors.hpp"
#include "mot/geometry.hpp"

#include <algorithm>
#include <iostream>
#include <utility>

namespace mot {

void PipelineConfig::validate() const {
  auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in01(preprocessing.score_threshold.car) ||
      !in01(preprocessing.score_threshold.pedestrian) ||
      !in01(preprocessing.score_threshold.cyclist)) {
    throw ConfigError("preprocessing.score_threshold must be in [0, 1]");
  }
  if (!in01(preprocessing.nms_iou_threshold)) {
    throw ConfigError("preprocessing.nms_iou_threshold must be in [0, 1]");
  }
  if (!in01(preprocessing.nms_score_floor)) {
    throw ConfigError("preprocessing.nms_score_floor must be in [0, 1]");
  }
  if (!in01(similarity.iou_gate)) {
    throw ConfigError("similarity.iou_gate must be in [0, 1]");
  }
  if (similarity.giou_gate < -1.0 || similarity.giou_gate > 1.0) {
    throw ConfigError("similarity.giou_gate must be in [-1, 1]");
  }
  if (similarity.center_gate.car <= 0.0 ||
      similarity.center_gate.pedestrian <= 0.0 ||
      similarity.center_gate.cyclist <= 0.0) {
    throw ConfigError("similarity.center_gate radii must be positive");
  }
  if (similarity.maha_gate <= 0.0) {
    throw ConfigError("similarity.maha_gate must be positive");
  }
  if (similarity.p_d <= 0.0 || similarity.p_d > 1.0) {
    throw ConfigError("similarity.p_d must be in (0, 1]");
  }
  if ((similarity.apc_weights.array() < 0.0).any()) {
    throw ConfigError("similarity.apc_weights must be non-negative");
  }
  if (similarity.apc_gate_radius <= 0.0) {
    throw ConfigError("similarity.apc_gate_radius must be positive");
  }
  if (pcgda.r_min <= 0.0 || pcgda.r_max < pcgda.r_min) {
    throw ConfigError("pcgda radii must satisfy 0 < r_min <= r_max");
  }
  if (lifecycle.max_age < 1) throw ConfigError("lifecycle.max_age must be >= 1");
  if (lifecycle.min_hits < 1) {
    throw ConfigError("lifecycle.min_hits must be >= 1");
  }
  if (!(lifecycle.low_score_floor >= 0.0 &&
        lifecycle.low_score_floor < lifecycle.high_score_threshold &&
        lifecycle.high_score_threshold <= 1.0)) {
    throw ConfigError(
        "lifecycle requires 0 <= low_score_floor < high_score_threshold <= 1");
  }
  if (frame_period <= 0.0) throw ConfigError("frame_period must be positive");
}

PipelineConfig preset(const std::string& name) {
  PipelineConfig cfg;
  if (name == "ab3dmot") {
    cfg.similarity.metric = Metric::IoU;
    cfg.assignment = AssignerKind::Hungarian;
  } else if (name == "ab3dmot_mh") {
    cfg.similarity.metric = Metric::Maha;
    cfg.assignment = AssignerKind::Greedy;
  } else if (name == "castrack") {
    cfg.motion = MotionKind::CA;
    cfg.similarity.metric = Metric::APC;
    cfg.assignment = AssignerKind::Pcgda;
  } else if (name == "simpletrack") {
    cfg.preprocessing.mode = PreprocessMode::Nms;
    cfg.similarity.metric = Metric::GIoU;
    cfg.assignment = AssignerKind::Hungarian;
    cfg.lifecycle.policy = LifecyclePolicy::TwoStage;
  } else if (name == "centerpoint") {
    cfg.motion = MotionKind::LoM;
    cfg.similarity.metric = Metric::LoM;
    cfg.assignment = AssignerKind::Greedy;
  } else {
    std::string valid;
    for (const auto& p : preset_names()) valid += " " + p;
    throw ConfigError("unknown preset '" + name + "'; valid presets:" + valid);
  }
  return cfg;
}

std::vector<std::string> preset_names() {
  return {"ab3dmot", "ab3dmot_mh", "castrack", "simpletrack", "centerpoint"};
}

std::vector<Box3D> preprocess(const std::vector<Box3D>& detections,
                              const PreprocessConfig& cfg) {
  std::vector<Box3D> out;
  if (cfg.mode == PreprocessMode::ScoreThreshold) {
    for (const Box3D& d : detections) {
      if (d.score >= cfg.score_threshold[d.class_id]) out.push_back(d);
    }
    return out;
  }
  // NMS mode: per-class suppression above a minimal score floor.
  for (int c = 0; c < kNumClasses; ++c) {
    std::vector<Box3D> cls;
    for (const Box3D& d : detections) {
      if (static_cast<int>(d.class_id) == c && d.score >= cfg.nms_score_floor) {
        cls.push_back(d);
      }
    }
    std::vector<Box3D> kept = nms_bev(cls, cfg.nms_iou_threshold);
    out.insert(out.end(), kept.begin(), kept.end());
  }
  return out;
}

Tracker::Tracker(PipelineConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  model_.kind = cfg_.motion == MotionKind::CA ? MotionKind::CA : MotionKind::CV;
  model_.noise = cfg_.noise;
}

std::vector<TrackOutput> Tracker::step(const FrameBundle& frame) {
  if (has_prev_ && frame.frame_index <= last_frame_index_) {
    throw InputError("out-of-order frame index " +
                     std::to_string(frame.frame_index) + " after " +
                     std::to_string(last_frame_index_));
  }
  const double dt =
      has_prev_ ? (frame.frame_index - last_frame_index_) * cfg_.frame_period
                : cfg_.frame_period;

  // 1. Pre-processing.
  std::vector<Box3D> dets = preprocess(frame.detections, cfg_.preprocessing);

  if (cfg_.motion == MotionKind::LoM && !warned_missing_velocity_) {
    for (const Box3D& d : dets) {
      if (!d.velocity) {
        std::cerr << "warning: lom motion configured but detections carry no "
                     "velocity; degrading to kf_cv center distance\n";
        warned_missing_velocity_ = true;
        break;
      }
    }
  }

  // 2. Ego compensation of carried-over tracks.
  if (cfg_.ego_mode == EgoMode::ProvidedPoses && has_prev_) {
    for (Track& t : tracks_) ego_compensate(t, prev_pose_, frame.ego);
  }

  // 3. Prediction.
  for (Track& t : tracks_) kf_predict(t, model_, dt);

  // 4. Similarity and assignment, with the optional low-score rescue band.
  const bool two_stage = cfg_.lifecycle.policy == LifecyclePolicy::TwoStage;
  std::vector<Box3D> high, low;
  if (two_stage) {
    for (const Box3D& d : dets) {
      if (d.score >= cfg_.lifecycle.high_score_threshold) {
        high.push_back(d);
      } else if (d.score >= cfg_.lifecycle.low_score_floor) {
        low.push_back(d);
      }
    }
  } else {
    high = dets;
  }

  const SimilarityMatrix sim =
      build_similarity(tracks_, high, cfg_.similarity, model_, dt);
  Assignment assign;
  switch (cfg_.assignment) {
    case AssignerKind::Hungarian:
      assign = hungarian_assign(sim);
      break;
    case AssignerKind::Greedy:
      assign = greedy_assign(sim);
      break;
    case AssignerKind::Pcgda: {
      std::vector<double> scores;
      scores.reserve(tracks_.size());
      for (const Track& t : tracks_) scores.push_back(t.score);
      assign = pcgda_assign(sim, scores, cfg_.pcgda);
      break;
    }
  }

  std::vector<const Box3D*> matched_det(tracks_.size(), nullptr);
  std::vector<char> rescued(tracks_.size(), 0);
  for (const auto& [ti, dj] : assign.matches) {
    matched_det[static_cast<std::size_t>(ti)] = &high[static_cast<std::size_t>(dj)];
  }
  if (two_stage && !low.empty() && !assign.unmatched_tracks.empty()) {
    const Assignment rescue =
        rescue_stage(tracks_, assign.unmatched_tracks, low, cfg_.similarity,
                     model_, dt);
    for (const auto& [local_ti, dj] : rescue.matches) {
      const int ti = assign.unmatched_tracks[static_cast<std::size_t>(local_ti)];
      matched_det[static_cast<std::size_t>(ti)] = &low[static_cast<std::size_t>(dj)];
      rescued[static_cast<std::size_t>(ti)] = 1;
    }
  }

  // 5. Update matched tracks, then lifecycle.
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    Track& t = tracks_[i];
    if (matched_det[i] != nullptr &&
        (!rescued[i] || cfg_.lifecycle.rescue_updates_state)) {
      kf_update(t, model_, *matched_det[i]);
    }
    TrackOutcome outcome = TrackOutcome::missed();
    if (matched_det[i] != nullptr) {
      outcome = rescued[i] ? TrackOutcome::rescued(*matched_det[i])
                           : TrackOutcome::matched(*matched_det[i]);
    }
    advance(t, outcome, cfg_.lifecycle, frame.frame_index);
  }

  // 6. Emit confirmed carried-over tracks (matched_det is indexed by the
  // pre-birth track list).
  std::vector<TrackOutput> outputs;
  auto emit = [&](const Track& t, const Box3D* raw) {
    if (t.status != TrackStatus::Confirmed) return;
    if (t.misses > 0 && !cfg_.emit_predictions) return;
    TrackOutput row;
    row.frame = frame.frame_index;
    row.track_id = t.id;
    row.box = (cfg_.emit_raw_detection && raw != nullptr && t.misses == 0)
                  ? *raw
                  : box_from_track(t);
    outputs.push_back(row);
  };
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    emit(tracks_[i], matched_det[i]);
  }

  // 7. Births from unmatched stage-1 detections only.
  for (int dj : assign.unmatched_detections) {
    Track born = init_track(high[static_cast<std::size_t>(dj)], next_id_++,
                            model_.kind, cfg_.init, cfg_.lifecycle.min_hits);
    emit(born, &high[static_cast<std::size_t>(dj)]);
    tracks_.push_back(std::move(born));
  }

  // 8. Remove dead tracks and refresh the one-frame anchors.
  std::erase_if(tracks_, [](const Track& t) { return !t.alive(); });
  for (Track& t : tracks_) t.prev_center = t.center2d();

  std::sort(outputs.begin(), outputs.end(),
            [](const TrackOutput& a, const TrackOutput& b) {
              return a.track_id < b.track_id;
            });

  prev_pose_ = frame.ego;
  last_frame_index_ = frame.frame_index;
  has_prev_ = true;
  return outputs;
}

std::vector<TrackOutput> run_sequence(const std::vector<FrameBundle>& frames,
                                      const PipelineConfig& cfg) {
  Tracker tracker(cfg);
  std::vector<TrackOutput> rows;
  for (const FrameBundle& frame : frames) {
    std::vector<TrackOutput> out = tracker.step(frame);
    rows.insert(rows.end(), out.begin(), out.end());
  }
  std::sort(rows.begin(), rows.end(),
            [](const TrackOutput& a, const TrackOutput& b) {
              return a.frame != b.frame ? a.frame < b.frame
                                        : a.track_id < b.track_id;
            });
  return rows;
}

std::vector<LabeledBox> to_labeled(const std::vector<TrackOutput>& rows) {
  std::vector<LabeledBox> out;
  out.reserve(rows.size());
  for (const TrackOutput& r : rows) {
    out.push_back({r.frame, r.track_id, r.box});
  }
  return out;
}

}  // namespace mot
