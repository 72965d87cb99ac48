#include "mot/lifecycle.hpp"

#include <stdexcept>
#include <string>

namespace mot {

void advance(Track& track, const TrackOutcome& outcome,
             const LifecycleConfig& cfg, int frame_index) {
  if (track.last_advance_frame == frame_index) {
    throw std::logic_error("track " + std::to_string(track.id) +
                           " advanced twice in frame " +
                           std::to_string(frame_index));
  }
  track.last_advance_frame = frame_index;
  track.age += 1;

  switch (outcome.kind) {
    case TrackOutcome::Kind::Matched:
      track.hits += 1;
      track.misses = 0;
      smooth_score(track, outcome.detection->score);
      if (outcome.detection->feature) track.feature = outcome.detection->feature;
      if (track.status == TrackStatus::Tentative &&
          track.hits >= cfg.min_hits) {
        track.status = TrackStatus::Confirmed;
      }
      break;
    case TrackOutcome::Kind::Rescued:
      // Rescue sustains life but does not confirm.
      track.misses = 0;
      smooth_score(track, outcome.detection->score);
      break;
    case TrackOutcome::Kind::Missed:
      track.misses += 1;
      if (track.misses > cfg.max_age) track.status = TrackStatus::Dead;
      break;
  }
}

Assignment rescue_stage(const std::vector<Track>& tracks,
                        const std::vector<int>& unmatched_track_indices,
                        const std::vector<Box3D>& low_score_detections,
                        const SimilarityConfig& sim_cfg,
                        const KalmanModel& model, double dt) {
  std::vector<Track> leftovers;
  leftovers.reserve(unmatched_track_indices.size());
  for (int idx : unmatched_track_indices) {
    leftovers.push_back(tracks[static_cast<std::size_t>(idx)]);
  }
  const SimilarityMatrix m =
      build_similarity(leftovers, low_score_detections, sim_cfg, model, dt);
  return hungarian_assign(m);
}

}  // namespace mot
