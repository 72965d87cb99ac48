#pragma once

#include "mot/types.hpp"

namespace mot {

/// Diagonal process / observation noise. Q entries are per predict step,
/// R entries per observation component.
struct NoiseConfig {
  double q_pos = 0.01;
  double q_size = 0.01;
  double q_yaw = 0.01;
  double q_vel = 0.1;
  double q_acc = 0.5;
  double r_pos = 0.1;
  double r_size = 0.1;
  double r_yaw = 0.3;
};

/// Linear motion model: CV or CA on the horizontal plane, random walk on
/// z, yaw and dimensions. LoM tracks state with the CV filter; the
/// back-projected association distance lives in lom_distance().
struct KalmanModel {
  MotionKind kind = MotionKind::CV;
  NoiseConfig noise;

  int state_dim() const { return mot::state_dim(kind); }

  MatX transition(double dt) const;      // A(dt); A(0) = I
  MatX observation() const;              // H, 7 x state_dim
  MatX process_noise() const;            // Q, diagonal
  MatX observation_noise() const;        // R, diagonal
};

/// mu <- A mu, Sigma <- A Sigma A^T + Q. Yaw re-normalized.
void kf_predict(Track& track, const KalmanModel& model, double dt);

/// Standard Kalman update (Joseph form) against the detection's observation
/// vector. The yaw innovation is wrapped, and a pi-flip is applied to the
/// detection yaw when |innovation| > pi/2 (orientation-ambiguous detectors).
/// Throws ConfigError when the innovation covariance is singular.
void kf_update(Track& track, const KalmanModel& model, const Box3D& d);

/// Re-expresses the track (pose, velocity, covariance, prev_center) in the
/// current ego frame via the SE(2) delta between consecutive poses.
/// z and dimensions are untouched; identical poses are the identity.
void ego_compensate(Track& track, const EgoPose& pose_prev,
                    const EgoPose& pose_curr);

/// L2 distance between the track's last center and the detection center
/// back-projected by -velocity * dt. Without a detection velocity this is
/// the plain center distance to the track's last center.
double lom_distance(const Track& track, const Box3D& d, double dt);

/// Innovation covariance S = H Sigma H^T + R for the track's current
/// (predicted) state. Exposed for the probabilistic association distances.
Eigen::Matrix<double, state::kObsDim, state::kObsDim> innovation_covariance(
    const Track& track, const KalmanModel& model);

}  // namespace mot
