#pragma once

#include "mot/io.hpp"
#include "mot/types.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace mot {

/// Detection corruption profile. fp_rate is a per-slot Bernoulli probability
/// of spawning a clutter object per frame (fp_slots independent slots), each
/// spawn living fp_persistence_{min..max} frames: single-frame clutter for a
/// radar-like stream, multi-frame for a lidar-like one.
struct NoiseSpec {
  double pos_sigma = 0.0;   // meters, detection center jitter (x, y)
  double yaw_sigma = 0.0;   // radians
  double fn_rate = 0.0;     // per-object miss probability per frame
  double fp_rate = 0.0;     // per-slot clutter spawn probability per frame
  int fp_slots = 3;
  int fp_persistence_min = 1;
  int fp_persistence_max = 1;
};

NoiseSpec perfect_profile();
NoiseSpec lidar_profile();
NoiseSpec radar_profile();

/// World-frame ego trajectory: constant speed along an initial heading with
/// a constant yaw rate.
struct EgoSpec {
  double speed = 0.0;     // m/s
  double heading = 0.0;   // radians
  double yaw_rate = 0.0;  // rad/s
};

/// Seeded synthetic scenario. Objects move with a CV or CA law in the world
/// frame; detections and ground truth are emitted in each frame's ego frame.
struct ScenarioSpec {
  int n_objects = 4;
  int frames = 40;
  int first_class = 0;  // class cycle offset: 0 car, 1 pedestrian, 2 cyclist
  MotionKind motion = MotionKind::CV;
  double speed_min = 0.0;  // m/s
  double speed_max = 2.0;
  double accel_min = 0.0;  // m/s^2 along heading (CA only)
  double accel_max = 0.0;
  std::vector<std::vector<std::pair<int, int>>> occlusions;  // per object, [start, end)
  NoiseSpec noise;
  EgoSpec ego;
  double frame_period = 0.1;
  bool detector_velocity = true;  // detections carry the true velocity
  double scene_half_extent = 25.0;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

struct Scenario {
  SequenceBundle bundle;       // frames with detections + ego, ground_truth set
  std::vector<EgoPose> poses;  // the true (uncorrupted) ego poses
};

/// Deterministic under a fixed seed. Ground truth covers every frame of
/// every object (occlusion hides detections, not labels); detections are
/// ground truth with Gaussian pose noise, Bernoulli misses and clutter.
Scenario generate_scenario(const ScenarioSpec& spec);

/// Exhaustive permutation minimum of a square cost matrix; the test oracle
/// for the Hungarian solver. Rejects n > 6 (std::invalid_argument).
std::pair<std::vector<int>, double> oracle_min_cost_assignment(
    const MatX& cost);

struct McIouEstimate {
  double iou = 0.0;
  double standard_error = 0.0;
  long long samples = 0;
};

/// Monte-Carlo rotated-IoU estimate: uniform samples over the joint axis-
/// aligned bounding region, intersection and union areas by hit counting.
/// Requires samples >= 1e5.
McIouEstimate oracle_iou_mc(const Box3D& a, const Box3D& b,
                            long long samples, std::uint64_t seed = 12345);

}  // namespace mot
