#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace mot {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

constexpr double kPi = 3.14159265358979323846;

/// Wraps an angle into (-pi, pi]. Idempotent.
double normalize_yaw(double yaw);

enum class ClassId : int { Car = 0, Pedestrian = 1, Cyclist = 2 };
constexpr int kNumClasses = 3;

std::string class_name(ClassId c);
std::optional<ClassId> class_from_name(const std::string& name);

/// Per-class parameter triple (car, pedestrian, cyclist).
template <typename T>
struct PerClass {
  T car{};
  T pedestrian{};
  T cyclist{};

  T& operator[](ClassId c) {
    switch (c) {
      case ClassId::Car: return car;
      case ClassId::Pedestrian: return pedestrian;
      default: return cyclist;
    }
  }
  const T& operator[](ClassId c) const {
    return const_cast<PerClass&>(*this)[c];
  }
};

/// Oriented 3D bounding box: the unit of detection and track output.
/// Center in meters, length along the heading (yaw), BEV overlap is taken
/// on the (x, y) footprint.
struct Box3D {
  double cx = 0.0;
  double cy = 0.0;
  double cz = 0.0;
  double length = 1.0;
  double width = 1.0;
  double height = 1.0;
  double yaw = 0.0;  // radians, (-pi, pi]
  ClassId class_id = ClassId::Car;
  double score = 1.0;                    // [0, 1]
  std::optional<Vec2> velocity;          // m/s, detector-supplied (ego-frame axes)
  std::optional<VecX> feature;           // appearance vector, unitless

  Vec2 center2d() const { return {cx, cy}; }
  bool valid() const {
    return length > 0.0 && width > 0.0 && height > 0.0 && score >= 0.0 &&
           score <= 1.0;
  }
};

/// World-frame pose of the ego vehicle at one frame.
struct EgoPose {
  int frame_index = 0;
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
};

enum class TrackStatus { Tentative, Confirmed, Dead };

/// Kalman state layout. CV uses the first 9 entries, CA appends (ax, ay).
/// Observation picks the first 7.
namespace state {
constexpr int kX = 0;
constexpr int kY = 1;
constexpr int kZ = 2;
constexpr int kYaw = 3;
constexpr int kL = 4;
constexpr int kW = 5;
constexpr int kH = 6;
constexpr int kVx = 7;
constexpr int kVy = 8;
constexpr int kAx = 9;
constexpr int kAy = 10;
constexpr int kDimCV = 9;
constexpr int kDimCA = 11;
constexpr int kObsDim = 7;
}  // namespace state

/// Persistent object hypothesis: filtered state plus lifecycle counters.
struct Track {
  long long id = -1;
  ClassId class_id = ClassId::Car;
  VecX mean;  // [x y z yaw l w h vx vy (ax ay)]
  MatX cov;
  int hits = 1;
  int misses = 0;
  int age = 0;                // frames since birth
  double score = 0.0;         // exponentially smoothed detection score
  TrackStatus status = TrackStatus::Tentative;
  Vec2 prev_center{0.0, 0.0}; // BEV center at the previous frame
  std::optional<VecX> feature;  // appearance vector of the last matched detection
  int last_advance_frame = std::numeric_limits<int>::min();

  Vec2 center2d() const { return {mean(state::kX), mean(state::kY)}; }
  Vec2 velocity2d() const { return {mean(state::kVx), mean(state::kVy)}; }
  bool alive() const { return status != TrackStatus::Dead; }
};

/// All detections of one timestamp plus the ego pose at that timestamp.
struct FrameBundle {
  int frame_index = 0;
  std::vector<Box3D> detections;
  EgoPose ego;
};

/// One output (or ground-truth) box with identity at a frame.
struct LabeledBox {
  int frame = 0;
  long long track_id = 0;
  Box3D box;
};

enum class MotionKind { CV, CA, LoM };

inline int state_dim(MotionKind kind) {
  return kind == MotionKind::CA ? state::kDimCA : state::kDimCV;
}

/// Birth-state configuration (diagonal initial covariance).
struct TrackInitConfig {
  double pos_var = 1.0;    // m^2
  double vel_var = 10.0;   // (m/s)^2
  double size_var = 0.1;
  double yaw_var = 0.1;
  double acc_var = 10.0;   // (m/s^2)^2, CA only
};

/// Builds a track from an unmatched detection. Velocity components come from
/// the detection when present, otherwise zero; acceleration starts at zero.
Track init_track(const Box3D& d, long long id, MotionKind kind,
                 const TrackInitConfig& cfg, int min_hits);

/// Reads the box back out of the filtered state (class and smoothed score
/// come from the track).
Box3D box_from_track(const Track& t);

/// Observation vector [cx cy cz yaw l w h] of a detection.
Eigen::Matrix<double, state::kObsDim, 1> observation_of(const Box3D& d);

/// score <- max(old * 0.9, detection score)
void smooth_score(Track& t, double detection_score);

}  // namespace mot
