#include "mot/types.hpp"

#include <algorithm>
#include <cmath>

namespace mot {

double normalize_yaw(double yaw) {
  yaw = std::fmod(yaw, 2.0 * kPi);
  if (yaw <= -kPi) {
    yaw += 2.0 * kPi;
  } else if (yaw > kPi) {
    yaw -= 2.0 * kPi;
  }
  return yaw;
}

std::string class_name(ClassId c) {
  switch (c) {
    case ClassId::Car: return "car";
    case ClassId::Pedestrian: return "pedestrian";
    default: return "cyclist";
  }
}

std::optional<ClassId> class_from_name(const std::string& name) {
  if (name == "car") return ClassId::Car;
  if (name == "pedestrian") return ClassId::Pedestrian;
  if (name == "cyclist") return ClassId::Cyclist;
  return std::nullopt;
}

Track init_track(const Box3D& d, long long id, MotionKind kind,
                 const TrackInitConfig& cfg, int min_hits) {
  const int n = state_dim(kind);
  Track t;
  t.id = id;
  t.class_id = d.class_id;
  t.mean = VecX::Zero(n);
  t.mean(state::kX) = d.cx;
  t.mean(state::kY) = d.cy;
  t.mean(state::kZ) = d.cz;
  t.mean(state::kYaw) = normalize_yaw(d.yaw);
  t.mean(state::kL) = d.length;
  t.mean(state::kW) = d.width;
  t.mean(state::kH) = d.height;
  if (d.velocity) {
    t.mean(state::kVx) = (*d.velocity)(0);
    t.mean(state::kVy) = (*d.velocity)(1);
  }

  VecX diag(n);
  diag(state::kX) = cfg.pos_var;
  diag(state::kY) = cfg.pos_var;
  diag(state::kZ) = cfg.pos_var;
  diag(state::kYaw) = cfg.yaw_var;
  diag(state::kL) = cfg.size_var;
  diag(state::kW) = cfg.size_var;
  diag(state::kH) = cfg.size_var;
  diag(state::kVx) = cfg.vel_var;
  diag(state::kVy) = cfg.vel_var;
  if (kind == MotionKind::CA) {
    diag(state::kAx) = cfg.acc_var;
    diag(state::kAy) = cfg.acc_var;
  }
  t.cov = diag.asDiagonal();

  t.hits = 1;
  t.misses = 0;
  t.age = 0;
  t.score = d.score;
  t.status = min_hits <= 1 ? TrackStatus::Confirmed : TrackStatus::Tentative;
  t.prev_center = d.center2d();
  t.feature = d.feature;
  return t;
}

Box3D box_from_track(const Track& t) {
  Box3D b;
  b.cx = t.mean(state::kX);
  b.cy = t.mean(state::kY);
  b.cz = t.mean(state::kZ);
  b.yaw = normalize_yaw(t.mean(state::kYaw));
  b.length = t.mean(state::kL);
  b.width = t.mean(state::kW);
  b.height = t.mean(state::kH);
  b.class_id = t.class_id;
  b.score = t.score;
  b.velocity = t.velocity2d();
  return b;
}

Eigen::Matrix<double, state::kObsDim, 1> observation_of(const Box3D& d) {
  Eigen::Matrix<double, state::kObsDim, 1> z;
  z << d.cx, d.cy, d.cz, d.yaw, d.length, d.width, d.height;
  return z;
}

void smooth_score(Track& t, double detection_score) {
  t.score = std::max(t.score * 0.9, detection_score);
}

}  // namespace mot
