#include "mot/motion.hpp"

#include "mot/errors.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <string>

namespace mot {

MatX KalmanModel::transition(double dt) const {
  const int n = state_dim();
  MatX a = MatX::Identity(n, n);
  a(state::kX, state::kVx) = dt;
  a(state::kY, state::kVy) = dt;
  if (kind == MotionKind::CA) {
    const double half_dt2 = 0.5 * dt * dt;
    a(state::kX, state::kAx) = half_dt2;
    a(state::kY, state::kAy) = half_dt2;
    a(state::kVx, state::kAx) = dt;
    a(state::kVy, state::kAy) = dt;
  }
  return a;
}

MatX KalmanModel::observation() const {
  MatX h = MatX::Zero(state::kObsDim, state_dim());
  h.leftCols(state::kObsDim).setIdentity();
  return h;
}

MatX KalmanModel::process_noise() const {
  const int n = state_dim();
  VecX diag(n);
  diag(state::kX) = noise.q_pos;
  diag(state::kY) = noise.q_pos;
  diag(state::kZ) = noise.q_pos;
  diag(state::kYaw) = noise.q_yaw;
  diag(state::kL) = noise.q_size;
  diag(state::kW) = noise.q_size;
  diag(state::kH) = noise.q_size;
  diag(state::kVx) = noise.q_vel;
  diag(state::kVy) = noise.q_vel;
  if (kind == MotionKind::CA) {
    diag(state::kAx) = noise.q_acc;
    diag(state::kAy) = noise.q_acc;
  }
  return diag.asDiagonal();
}

MatX KalmanModel::observation_noise() const {
  VecX diag(state::kObsDim);
  diag(state::kX) = noise.r_pos;
  diag(state::kY) = noise.r_pos;
  diag(state::kZ) = noise.r_pos;
  diag(state::kYaw) = noise.r_yaw;
  diag(state::kL) = noise.r_size;
  diag(state::kW) = noise.r_size;
  diag(state::kH) = noise.r_size;
  return diag.asDiagonal();
}

void kf_predict(Track& track, const KalmanModel& model, double dt) {
  const MatX a = model.transition(dt);
  track.mean = a * track.mean;
  track.mean(state::kYaw) = normalize_yaw(track.mean(state::kYaw));
  track.cov = a * track.cov * a.transpose() + model.process_noise();
  track.cov = 0.5 * (track.cov + track.cov.transpose()).eval();
}

Eigen::Matrix<double, state::kObsDim, state::kObsDim> innovation_covariance(
    const Track& track, const KalmanModel& model) {
  const MatX h = model.observation();
  MatX s = h * track.cov * h.transpose() + model.observation_noise();
  s = 0.5 * (s + s.transpose()).eval();
  return s;
}

namespace {

Eigen::LDLT<MatX> factor_innovation(const MatX& s, long long track_id) {
  Eigen::LDLT<MatX> ldlt(s);
  const VecX d = ldlt.vectorD();
  const double max_d = d.maxCoeff();
  if (!ldlt.isPositive() || max_d <= 0.0 ||
      d.minCoeff() <= 1e-12 * max_d) {
    throw ConfigError(
        "singular innovation covariance for track " +
        std::to_string(track_id) +
        ": ill-conditioned R/Q configuration");
  }
  return ldlt;
}

}  // namespace

void kf_update(Track& track, const KalmanModel& model, const Box3D& d) {
  const MatX h = model.observation();
  const MatX r = model.observation_noise();
  const MatX s = innovation_covariance(track, model);
  const auto ldlt = factor_innovation(s, track.id);

  VecX innovation = observation_of(d) - h * track.mean;
  double yaw_innov = normalize_yaw(innovation(state::kYaw));
  // Detectors are orientation-ambiguous: a near-pi innovation means the
  // detection yaw is flipped, not that the object turned around.
  if (std::abs(yaw_innov) > 0.5 * kPi) {
    yaw_innov = normalize_yaw(yaw_innov + kPi);
  }
  innovation(state::kYaw) = yaw_innov;

  const MatX gain = ldlt.solve(h * track.cov).transpose();  // K = P H^T S^-1
  track.mean += gain * innovation;
  track.mean(state::kYaw) = normalize_yaw(track.mean(state::kYaw));

  const int n = model.state_dim();
  const MatX ikh = MatX::Identity(n, n) - gain * h;
  track.cov = ikh * track.cov * ikh.transpose() +
              gain * r * gain.transpose();  // Joseph form
  track.cov = 0.5 * (track.cov + track.cov.transpose()).eval();
}

void ego_compensate(Track& track, const EgoPose& pose_prev,
                    const EgoPose& pose_curr) {
  const double dtheta = pose_prev.yaw - pose_curr.yaw;
  const double c = std::cos(dtheta);
  const double s = std::sin(dtheta);
  Eigen::Matrix2d rot;
  rot << c, -s, s, c;

  const double cc = std::cos(pose_curr.yaw);
  const double sc = std::sin(pose_curr.yaw);
  Eigen::Matrix2d rot_curr_inv;
  rot_curr_inv << cc, sc, -sc, cc;
  const Vec2 shift = rot_curr_inv * Vec2(pose_prev.x - pose_curr.x,
                                         pose_prev.y - pose_curr.y);

  const Vec2 pos = rot * track.center2d() + shift;
  track.mean(state::kX) = pos.x();
  track.mean(state::kY) = pos.y();
  track.mean(state::kYaw) = normalize_yaw(track.mean(state::kYaw) + dtheta);

  const Vec2 vel = rot * track.velocity2d();
  track.mean(state::kVx) = vel.x();
  track.mean(state::kVy) = vel.y();

  const int n = static_cast<int>(track.mean.size());
  if (n > state::kAy) {
    const Vec2 acc =
        rot * Vec2(track.mean(state::kAx), track.mean(state::kAy));
    track.mean(state::kAx) = acc.x();
    track.mean(state::kAy) = acc.y();
  }
  track.prev_center = rot * track.prev_center + shift;

  MatX jac = MatX::Identity(n, n);
  jac.block<2, 2>(state::kX, state::kX) = rot;
  jac.block<2, 2>(state::kVx, state::kVx) = rot;
  if (n > state::kAy) jac.block<2, 2>(state::kAx, state::kAx) = rot;
  track.cov = jac * track.cov * jac.transpose();
  track.cov = 0.5 * (track.cov + track.cov.transpose()).eval();
}

double lom_distance(const Track& track, const Box3D& d, double dt) {
  Vec2 back = d.center2d();
  if (d.velocity) back -= *d.velocity * dt;
  return (back - track.prev_center).norm();
}

}  // namespace mot
