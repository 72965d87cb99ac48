#pragma once

#include "mot/association.hpp"
#include "mot/types.hpp"

namespace mot {

enum class LifecyclePolicy { CountBased, TwoStage };

struct LifecycleConfig {
  LifecyclePolicy policy = LifecyclePolicy::CountBased;
  int max_age = 3;    // track dies when misses > max_age
  int min_hits = 1;   // confirmed when hits >= min_hits
  double low_score_floor = 0.1;       // two-stage second band lower bound
  double high_score_threshold = 0.5;  // two-stage band split
  bool rescue_updates_state = true;   // rescue runs a Kalman update
};

/// Per-frame outcome for one track.
struct TrackOutcome {
  enum class Kind { Matched, Missed, Rescued } kind = Kind::Missed;
  const Box3D* detection = nullptr;  // Matched / Rescued

  static TrackOutcome matched(const Box3D& d) {
    return {Kind::Matched, &d};
  }
  static TrackOutcome missed() { return {Kind::Missed, nullptr}; }
  static TrackOutcome rescued(const Box3D& d) {
    return {Kind::Rescued, &d};
  }
};

/// Applies one frame's outcome to the lifecycle counters:
///   matched -> hits+1, misses=0, confirmed once hits >= min_hits
///   missed  -> misses+1, dead once misses > max_age
///   rescued -> misses=0, hits unchanged (rescue sustains life, does not
///              confirm)
/// age increments in every case; the matched/rescued score is smoothed in.
/// Calling advance twice for the same frame throws std::logic_error.
void advance(Track& track, const TrackOutcome& outcome,
             const LifecycleConfig& cfg, int frame_index);

/// Second association pass of the two-stage policy over stage-1 leftovers
/// only. Matches are returned in local index space: (position within
/// unmatched_track_indices, index within low_score_detections).
Assignment rescue_stage(const std::vector<Track>& tracks,
                        const std::vector<int>& unmatched_track_indices,
                        const std::vector<Box3D>& low_score_detections,
                        const SimilarityConfig& sim_cfg,
                        const KalmanModel& model, double dt);

}  // namespace mot
