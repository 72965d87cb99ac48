#include "mot/synth.hpp"

#include "mot/errors.hpp"
#include "mot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace mot {

NoiseSpec perfect_profile() { return NoiseSpec{}; }

NoiseSpec lidar_profile() {
  NoiseSpec n;
  n.pos_sigma = 0.08;
  n.yaw_sigma = 0.02;
  n.fn_rate = 0.1;
  n.fp_rate = 0.3;
  n.fp_slots = 3;
  n.fp_persistence_min = 3;
  n.fp_persistence_max = 5;
  return n;
}

NoiseSpec radar_profile() {
  NoiseSpec n;
  n.pos_sigma = 0.25;
  n.yaw_sigma = 0.05;
  n.fn_rate = 0.3;
  n.fp_rate = 0.3;
  n.fp_slots = 3;
  n.fp_persistence_min = 1;
  n.fp_persistence_max = 1;
  return n;
}

void ScenarioSpec::validate() const {
  if (n_objects < 0 || frames < 1) {
    throw ConfigError("scenario needs n_objects >= 0 and frames >= 1");
  }
  auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (!rate_ok(noise.fn_rate) || !rate_ok(noise.fp_rate)) {
    throw ConfigError("noise rates must be in [0, 1]");
  }
  if (noise.pos_sigma < 0.0 || noise.yaw_sigma < 0.0) {
    throw ConfigError("noise sigmas must be non-negative");
  }
  if (noise.fp_slots < 0 || noise.fp_persistence_min < 1 ||
      noise.fp_persistence_max < noise.fp_persistence_min) {
    throw ConfigError("invalid clutter persistence configuration");
  }
  if (frame_period <= 0.0) throw ConfigError("frame_period must be positive");
  if (speed_max < speed_min || accel_max < accel_min) {
    throw ConfigError("speed/accel ranges must be non-degenerate");
  }
}

namespace {

struct ClassPrior {
  double length, width, height, z;
};

ClassPrior prior_of(ClassId c) {
  switch (c) {
    case ClassId::Car: return {4.2, 1.8, 1.6, 0.8};
    case ClassId::Pedestrian: return {0.7, 0.7, 1.7, 0.9};
    default: return {1.8, 0.6, 1.7, 0.9};
  }
}

struct WorldObject {
  ClassId class_id;
  ClassPrior size;
  Vec2 pos;
  Vec2 vel;
  Vec2 acc;
  double yaw;
};

Vec2 to_ego(const Vec2& world, const EgoPose& pose) {
  const double c = std::cos(pose.yaw);
  const double s = std::sin(pose.yaw);
  const Vec2 d(world.x() - pose.x, world.y() - pose.y);
  return {c * d.x() + s * d.y(), -s * d.x() + c * d.y()};
}

struct Clutter {
  Vec2 pos;
  ClassId class_id;
  ClassPrior size;
  double yaw;
  double score;
  int ttl;
};

bool occluded(const ScenarioSpec& spec, int object, int frame) {
  if (object >= static_cast<int>(spec.occlusions.size())) return false;
  for (const auto& [start, end] : spec.occlusions[object]) {
    if (frame >= start && frame < end) return true;
  }
  return false;
}

}  // namespace

Scenario generate_scenario(const ScenarioSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const double margin = 5.0;
  const double extent = std::max(spec.scene_half_extent - margin, 1.0);
  std::uniform_real_distribution<double> place(-extent, extent);
  std::uniform_real_distribution<double> angle(-kPi, kPi);

  // Dimensions are drawn once per object around the class prior and stay
  // constant over the object's lifetime.
  auto sample_size = [&](ClassId cls) {
    ClassPrior p = prior_of(cls);
    p.length *= 0.9 + 0.2 * unit(rng);
    p.width *= 0.9 + 0.2 * unit(rng);
    p.height *= 0.9 + 0.2 * unit(rng);
    return p;
  };

  std::vector<WorldObject> objects;
  for (int i = 0; i < spec.n_objects; ++i) {
    WorldObject o;
    o.class_id =
        static_cast<ClassId>((spec.first_class + i) % kNumClasses);
    o.size = sample_size(o.class_id);
    o.pos = Vec2(place(rng), place(rng));
    o.yaw = angle(rng);
    const double speed =
        spec.speed_min + (spec.speed_max - spec.speed_min) * unit(rng);
    o.vel = speed * Vec2(std::cos(o.yaw), std::sin(o.yaw));
    double accel = 0.0;
    if (spec.motion == MotionKind::CA) {
      accel = spec.accel_min + (spec.accel_max - spec.accel_min) * unit(rng);
    }
    o.acc = accel * Vec2(std::cos(o.yaw), std::sin(o.yaw));
    objects.push_back(o);
  }

  Scenario scenario;
  scenario.bundle.sequence_id = "synth-" + std::to_string(spec.seed);
  scenario.bundle.ground_truth.emplace();
  std::vector<Clutter> clutter;

  double ego_heading = spec.ego.heading;
  Vec2 ego_pos(0.0, 0.0);
  const double dt = spec.frame_period;

  for (int f = 0; f < spec.frames; ++f) {
    EgoPose pose{f, ego_pos.x(), ego_pos.y(), normalize_yaw(ego_heading)};
    scenario.poses.push_back(pose);

    FrameBundle fb;
    fb.frame_index = f;
    fb.ego = pose;

    const double ec = std::cos(pose.yaw);
    const double es = std::sin(pose.yaw);

    for (std::size_t i = 0; i < objects.size(); ++i) {
      const WorldObject& o = objects[i];
      // Ground-truth row in the ego frame; labels exist even when the
      // sensor misses the object.
      Box3D gt_box;
      gt_box.class_id = o.class_id;
      const Vec2 p = to_ego(o.pos, pose);
      gt_box.cx = p.x();
      gt_box.cy = p.y();
      gt_box.cz = o.size.z;
      gt_box.length = o.size.length;
      gt_box.width = o.size.width;
      gt_box.height = o.size.height;
      gt_box.yaw = normalize_yaw(o.yaw - pose.yaw);
      gt_box.score = 1.0;
      gt_box.velocity =
          Vec2(ec * o.vel.x() + es * o.vel.y(),
               -es * o.vel.x() + ec * o.vel.y());  // world vel in ego axes
      scenario.bundle.ground_truth->push_back(
          {f, static_cast<long long>(i + 1), gt_box});

      const bool miss = occluded(spec, static_cast<int>(i), f) ||
                        (spec.noise.fn_rate > 0.0 &&
                         unit(rng) < spec.noise.fn_rate);
      if (miss) continue;

      Box3D det = gt_box;
      if (spec.noise.pos_sigma > 0.0) {
        det.cx += spec.noise.pos_sigma * gauss(rng);
        det.cy += spec.noise.pos_sigma * gauss(rng);
        det.cz += 0.5 * spec.noise.pos_sigma * gauss(rng);
      }
      if (spec.noise.yaw_sigma > 0.0) {
        det.yaw = normalize_yaw(det.yaw + spec.noise.yaw_sigma * gauss(rng));
      }
      if (spec.noise.pos_sigma > 0.0 || spec.noise.fn_rate > 0.0) {
        det.score = 0.75 + 0.25 * unit(rng);
      }
      if (!spec.detector_velocity) det.velocity.reset();
      fb.detections.push_back(std::move(det));
    }

    // Clutter: spawn per slot, keep each spawn alive for its persistence.
    for (int slot = 0; slot < spec.noise.fp_slots; ++slot) {
      if (spec.noise.fp_rate > 0.0 && unit(rng) < spec.noise.fp_rate) {
        Clutter c;
        c.pos = Vec2(place(rng), place(rng));
        c.class_id = static_cast<ClassId>(
            static_cast<int>(unit(rng) * kNumClasses) % kNumClasses);
        c.size = sample_size(c.class_id);
        c.yaw = angle(rng);
        c.score = 0.3 + 0.4 * unit(rng);
        c.ttl = spec.noise.fp_persistence_min;
        if (spec.noise.fp_persistence_max > spec.noise.fp_persistence_min) {
          c.ttl += static_cast<int>(
              unit(rng) * (spec.noise.fp_persistence_max -
                           spec.noise.fp_persistence_min + 1));
          c.ttl = std::min(c.ttl, spec.noise.fp_persistence_max);
        }
        clutter.push_back(c);
      }
    }
    for (Clutter& c : clutter) {
      Box3D det;
      det.class_id = c.class_id;
      const Vec2 p = to_ego(c.pos, pose);
      det.cx = p.x();
      det.cy = p.y();
      det.cz = c.size.z;
      det.length = c.size.length;
      det.width = c.size.width;
      det.height = c.size.height;
      det.yaw = normalize_yaw(c.yaw - pose.yaw);
      det.score = c.score;
      if (spec.detector_velocity) det.velocity = Vec2(0.0, 0.0);
      fb.detections.push_back(std::move(det));
      c.ttl -= 1;
    }
    std::erase_if(clutter, [](const Clutter& c) { return c.ttl <= 0; });

    scenario.bundle.frames.push_back(std::move(fb));

    // Integrate object and ego motion to the next frame.
    for (WorldObject& o : objects) {
      o.pos += o.vel * dt + 0.5 * dt * dt * o.acc;
      o.vel += o.acc * dt;
    }
    ego_pos += spec.ego.speed * dt *
               Vec2(std::cos(ego_heading), std::sin(ego_heading));
    ego_heading += spec.ego.yaw_rate * dt;
  }
  return scenario;
}

std::pair<std::vector<int>, double> oracle_min_cost_assignment(
    const MatX& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) {
    throw std::invalid_argument("oracle requires a square matrix");
  }
  if (n > 6) {
    throw std::invalid_argument("oracle limited to n <= 6");
  }
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::vector<int> best = perm;
  double best_total = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += cost(i, perm[i]);
    if (total < best_total) {
      best_total = total;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (n == 0) best_total = 0.0;
  return {best, best_total};
}

McIouEstimate oracle_iou_mc(const Box3D& a, const Box3D& b,
                            long long samples, std::uint64_t seed) {
  if (samples < 100000) {
    throw std::invalid_argument("oracle_iou_mc needs at least 1e5 samples");
  }
  // Joint axis-aligned bounding region of both footprints.
  const Polygon2D fa = box_footprint(a);
  const Polygon2D fb = box_footprint(b);
  double lo_x = fa.vertices[0].x(), hi_x = lo_x;
  double lo_y = fa.vertices[0].y(), hi_y = lo_y;
  for (const Polygon2D* poly : {&fa, &fb}) {
    for (const Vec2& v : poly->vertices) {
      lo_x = std::min(lo_x, v.x());
      hi_x = std::max(hi_x, v.x());
      lo_y = std::min(lo_y, v.y());
      hi_y = std::max(hi_y, v.y());
    }
  }

  auto inside = [](const Box3D& box, double x, double y) {
    const double c = std::cos(box.yaw);
    const double s = std::sin(box.yaw);
    const double dx = x - box.cx;
    const double dy = y - box.cy;
    const double lx = c * dx + s * dy;
    const double ly = -s * dx + c * dy;
    return std::abs(lx) <= 0.5 * box.length && std::abs(ly) <= 0.5 * box.width;
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(lo_x, hi_x), uy(lo_y, hi_y);
  long long hit_inter = 0, hit_union = 0;
  for (long long k = 0; k < samples; ++k) {
    const double x = ux(rng);
    const double y = uy(rng);
    const bool in_a = inside(a, x, y);
    const bool in_b = inside(b, x, y);
    if (in_a || in_b) ++hit_union;
    if (in_a && in_b) ++hit_inter;
  }

  McIouEstimate est;
  est.samples = samples;
  if (hit_union == 0) return est;
  const double p_i = static_cast<double>(hit_inter) /
                     static_cast<double>(samples);
  const double p_u = static_cast<double>(hit_union) /
                     static_cast<double>(samples);
  est.iou = p_i / p_u;
  // Binomial error on the intersection fraction propagated through the
  // (high-precision) union denominator.
  est.standard_error =
      std::sqrt(p_i * (1.0 - p_i) / static_cast<double>(samples)) / p_u;
  return est;
}

}  // namespace mot
