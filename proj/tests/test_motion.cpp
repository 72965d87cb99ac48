#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mot/errors.hpp"
#include "mot/motion.hpp"

#include <random>

using namespace mot;

namespace {

Box3D make_box(double cx = 0.0, double cy = 0.0) {
  Box3D b;
  b.cx = cx;
  b.cy = cy;
  b.length = 4.0;
  b.width = 2.0;
  b.height = 1.5;
  b.score = 0.9;
  return b;
}

Track make_track(MotionKind kind, double cx = 0.0, double cy = 0.0) {
  return init_track(make_box(cx, cy), 1, kind, {}, 1);
}

KalmanModel make_model(MotionKind kind) {
  KalmanModel m;
  m.kind = kind;
  return m;
}

}  // namespace

TEST_CASE("CV predict moves the position linearly") {
  Track t = make_track(MotionKind::CV);
  t.mean(state::kVx) = 1.0;
  t.mean(state::kVy) = 2.0;
  kf_predict(t, make_model(MotionKind::CV), 0.5);
  CHECK(t.mean(state::kX) == doctest::Approx(0.5));
  CHECK(t.mean(state::kY) == doctest::Approx(1.0));
}

TEST_CASE("CA predict applies x + v dt + a dt^2 / 2") {
  Track t = make_track(MotionKind::CA);
  t.mean(state::kVx) = 1.0;
  t.mean(state::kAx) = 2.0;
  kf_predict(t, make_model(MotionKind::CA), 1.0);
  CHECK(t.mean(state::kX) == doctest::Approx(2.0));
  CHECK(t.mean(state::kVx) == doctest::Approx(3.0));
}

TEST_CASE("predict propagates the pos-vel covariance block") {
  // Sigma = I, Q = 0, dt = 1: the (x, vx) block of A Sigma A^T must be
  // [[2, 1], [1, 1]].
  Track t = make_track(MotionKind::CV);
  t.cov = MatX::Identity(state::kDimCV, state::kDimCV);
  KalmanModel m = make_model(MotionKind::CV);
  m.noise = NoiseConfig{0, 0, 0, 0, 0, 0.1, 0.1, 0.3};
  kf_predict(t, m, 1.0);
  CHECK(t.cov(state::kX, state::kX) == doctest::Approx(2.0));
  CHECK(t.cov(state::kX, state::kVx) == doctest::Approx(1.0));
  CHECK(t.cov(state::kVx, state::kX) == doctest::Approx(1.0));
  CHECK(t.cov(state::kVx, state::kVx) == doctest::Approx(1.0));
}

TEST_CASE("predict with dt = 0 is the identity on the mean and adds Q") {
  Track t = make_track(MotionKind::CV, 3.0, -2.0);
  t.mean(state::kVx) = 5.0;
  const VecX mean_before = t.mean;
  const MatX cov_before = t.cov;
  const KalmanModel m = make_model(MotionKind::CV);
  kf_predict(t, m, 0.0);
  CHECK((t.mean - mean_before).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((t.cov - cov_before - m.process_noise()).lpNorm<Eigen::Infinity>() <
        1e-15);
}

TEST_CASE("mean prediction is a semigroup: two dt steps equal one 2dt step") {
  for (MotionKind kind : {MotionKind::CV, MotionKind::CA}) {
    // Dyadic inputs keep the float arithmetic exact.
    Track twice = make_track(kind, 1.0, -2.5);
    twice.mean(state::kVx) = 1.5;
    twice.mean(state::kVy) = -0.75;
    if (kind == MotionKind::CA) {
      twice.mean(state::kAx) = 0.5;
      twice.mean(state::kAy) = -0.25;
    }
    Track once = twice;
    const KalmanModel m = make_model(kind);
    kf_predict(twice, m, 0.5);
    kf_predict(twice, m, 0.5);
    kf_predict(once, m, 1.0);
    CHECK((twice.mean - once.mean).lpNorm<Eigen::Infinity>() == 0.0);
  }

  // And to 1e-12 on random values.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    Track twice = make_track(MotionKind::CA, u(rng), u(rng));
    twice.mean(state::kVx) = u(rng);
    twice.mean(state::kVy) = u(rng);
    twice.mean(state::kAx) = u(rng);
    twice.mean(state::kAy) = u(rng);
    Track once = twice;
    const double dt = std::abs(u(rng)) + 0.01;
    const KalmanModel m = make_model(MotionKind::CA);
    kf_predict(twice, m, dt);
    kf_predict(twice, m, dt);
    kf_predict(once, m, 2.0 * dt);
    CHECK((twice.mean - once.mean).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("covariance stays symmetric over 1000 predict/update cycles") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  Track t = make_track(MotionKind::CA);
  const KalmanModel m = make_model(MotionKind::CA);
  for (int i = 0; i < 1000; ++i) {
    kf_predict(t, m, 0.1);
    Box3D d = make_box(t.mean(state::kX) + jitter(rng),
                       t.mean(state::kY) + jitter(rng));
    kf_update(t, m, d);
    CHECK((t.cov - t.cov.transpose()).lpNorm<Eigen::Infinity>() < 1e-9);
    CHECK(t.cov.diagonal().minCoeff() >= 0.0);
  }
}

TEST_CASE("update with tiny R pins the posterior to the detection") {
  Track t = make_track(MotionKind::CV);
  KalmanModel m = make_model(MotionKind::CV);
  m.noise.r_pos = 0.0;
  m.noise.r_size = 0.0;
  m.noise.r_yaw = 0.0;
  kf_predict(t, m, 0.1);
  const Box3D d = make_box(2.0, -1.0);
  kf_update(t, m, d);
  CHECK(t.mean(state::kX) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(t.mean(state::kY) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("update with huge R keeps the prior") {
  Track t = make_track(MotionKind::CV, 1.0, 1.0);
  KalmanModel m = make_model(MotionKind::CV);
  m.noise.r_pos = 1e9;
  m.noise.r_size = 1e9;
  m.noise.r_yaw = 1e9;
  const VecX prior = t.mean;
  kf_update(t, m, make_box(50.0, -50.0));
  CHECK((t.mean - prior).lpNorm<Eigen::Infinity>() < 1e-3);
}

TEST_CASE("scalar update case: unit prior and unit observation variance") {
  // prior mean 0, prior var 1, obs 2, obs var 1 -> posterior mean 1, var 0.5
  Track t = make_track(MotionKind::CV, 0.0, 0.0);
  t.cov = MatX::Identity(state::kDimCV, state::kDimCV);
  KalmanModel m = make_model(MotionKind::CV);
  m.noise.r_pos = 1.0;
  m.noise.r_size = 1.0;
  m.noise.r_yaw = 1.0;
  const Box3D d = make_box(2.0, 0.0);  // all other components equal the prior
  kf_update(t, m, d);
  CHECK(t.mean(state::kX) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.cov(state::kX, state::kX) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("update throws on a singular innovation covariance") {
  Track t = make_track(MotionKind::CV);
  t.cov.setZero();
  KalmanModel m = make_model(MotionKind::CV);
  m.noise.r_pos = 0.0;
  m.noise.r_size = 0.0;
  m.noise.r_yaw = 0.0;
  CHECK_THROWS_AS(kf_update(t, m, make_box()), ConfigError);
}

TEST_CASE("yaw innovation is wrapped and pi-flips are corrected") {
  Track t = make_track(MotionKind::CV);
  t.mean(state::kYaw) = 0.1;
  KalmanModel m = make_model(MotionKind::CV);
  Box3D d = make_box();
  d.yaw = normalize_yaw(0.1 + kPi);  // flipped detector orientation
  kf_update(t, m, d);
  // Posterior yaw stays near 0.1 instead of rotating toward pi.
  CHECK(std::abs(normalize_yaw(t.mean(state::kYaw) - 0.1)) < 0.05);
}

TEST_CASE("ego_compensate with identical poses is the identity") {
  Track t = make_track(MotionKind::CV, 5.0, 2.0);
  const VecX mean = t.mean;
  const MatX cov = t.cov;
  const EgoPose pose{0, 10.0, -3.0, 0.7};
  ego_compensate(t, pose, pose);
  CHECK((t.mean - mean).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((t.cov - cov).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("ego advancing 1 m shifts a forward track back by 1 m") {
  Track t = make_track(MotionKind::CV, 5.0, 0.0);
  ego_compensate(t, EgoPose{0, 0.0, 0.0, 0.0}, EgoPose{1, 1.0, 0.0, 0.0});
  CHECK(t.mean(state::kX) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(t.mean(state::kY) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("ego yaw +90 degrees rotates the track into the new frame") {
  Track t = make_track(MotionKind::CV, 1.0, 0.0);
  t.mean(state::kYaw) = 0.3;
  ego_compensate(t, EgoPose{0, 0.0, 0.0, 0.0},
                 EgoPose{1, 0.0, 0.0, kPi / 2.0});
  CHECK(t.mean(state::kX) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(t.mean(state::kY) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(t.mean(state::kYaw) == doctest::Approx(0.3 - kPi / 2.0));
}

TEST_CASE("a stationary world object has constant world coordinates") {
  // Seeded ego trajectory; compensation applied per frame must keep the
  // ego-frame representation consistent with re-projecting the fixed world
  // point (tolerance 1e-9 m).
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Vec2 world(7.0, -4.0);

  std::vector<EgoPose> poses;
  double x = 0.0, y = 0.0, yaw = 0.0;
  for (int f = 0; f < 50; ++f) {
    poses.push_back({f, x, y, yaw});
    x += 0.2 + 0.05 * u(rng);
    y += 0.1 * u(rng);
    yaw += 0.05 * u(rng);
  }

  auto to_ego = [&](const EgoPose& p) {
    const double c = std::cos(p.yaw), s = std::sin(p.yaw);
    const Vec2 d(world.x() - p.x, world.y() - p.y);
    return Vec2(c * d.x() + s * d.y(), -s * d.x() + c * d.y());
  };

  const Vec2 start = to_ego(poses[0]);
  Track t = make_track(MotionKind::CV, start.x(), start.y());
  for (std::size_t k = 1; k < poses.size(); ++k) {
    ego_compensate(t, poses[k - 1], poses[k]);
    const Vec2 expected = to_ego(poses[k]);
    CHECK((t.center2d() - expected).norm() < 1e-9);
  }
}

TEST_CASE("lom_distance back-projects by the detection velocity") {
  Track t = make_track(MotionKind::CV, 0.0, 0.0);  // prev_center = (0, 0)
  Box3D d = make_box(1.0, 0.0);
  d.velocity = Vec2(1.0, 0.0);
  CHECK(lom_distance(t, d, 1.0) == doctest::Approx(0.0));

  Box3D far = make_box(2.0, 0.0);
  far.velocity = Vec2(1.0, 0.0);
  CHECK(lom_distance(t, far, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("lom_distance without velocity falls back to the center distance") {
  Track t = make_track(MotionKind::CV, 0.0, 0.0);
  Box3D d = make_box(3.0, 4.0);
  CHECK(lom_distance(t, d, 1.0) == doctest::Approx(5.0));
  d.velocity = Vec2(0.0, 0.0);
  CHECK(lom_distance(t, d, 1.0) == doctest::Approx(5.0));
}
