#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mot/types.hpp"

#include <random>
#include <set>

using namespace mot;

namespace {

Box3D make_box(double cx = 0.0, double cy = 0.0) {
  Box3D b;
  b.cx = cx;
  b.cy = cy;
  b.length = 4.0;
  b.width = 2.0;
  b.height = 1.5;
  b.score = 0.8;
  return b;
}

}  // namespace

TEST_CASE("normalize_yaw maps into (-pi, pi] and is idempotent") {
  CHECK(normalize_yaw(0.0) == doctest::Approx(0.0));
  CHECK(normalize_yaw(kPi) == doctest::Approx(kPi));
  CHECK(normalize_yaw(-kPi) == doctest::Approx(kPi));
  CHECK(normalize_yaw(3.0 * kPi) == doctest::Approx(kPi));
  CHECK(normalize_yaw(2.0 * kPi) == doctest::Approx(0.0));

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-10.0 * kPi, 10.0 * kPi);
  for (int i = 0; i < 10000; ++i) {
    const double theta = u(rng);
    const double once = normalize_yaw(theta);
    CHECK(once > -kPi);
    CHECK(once <= kPi);
    CHECK(normalize_yaw(once) == once);  // idempotent, bit-exact
  }
}

TEST_CASE("init_track defaults velocity to zero") {
  const Track t = init_track(make_box(), 1, MotionKind::CV, {}, 1);
  CHECK(t.mean(state::kVx) == 0.0);
  CHECK(t.mean(state::kVy) == 0.0);
  CHECK(t.hits == 1);
  CHECK(t.misses == 0);
  CHECK(t.mean.size() == state::kDimCV);
}

TEST_CASE("init_track copies a detector velocity through") {
  Box3D d = make_box();
  d.velocity = Vec2(3.0, -1.0);
  const Track t = init_track(d, 1, MotionKind::CA, {}, 1);
  CHECK(t.mean(state::kVx) == 3.0);
  CHECK(t.mean(state::kVy) == -1.0);
  CHECK(t.mean(state::kAx) == 0.0);
  CHECK(t.mean(state::kAy) == 0.0);
  CHECK(t.mean.size() == state::kDimCA);
}

TEST_CASE("init_track confirmation depends on min_hits") {
  CHECK(init_track(make_box(), 1, MotionKind::CV, {}, 1).status ==
        TrackStatus::Confirmed);
  CHECK(init_track(make_box(), 1, MotionKind::CV, {}, 2).status ==
        TrackStatus::Tentative);
}

TEST_CASE("init_track sets the configured diagonal covariance") {
  TrackInitConfig cfg;
  cfg.pos_var = 2.0;
  cfg.vel_var = 7.0;
  const Track t = init_track(make_box(), 1, MotionKind::CV, cfg, 1);
  CHECK(t.cov(state::kX, state::kX) == 2.0);
  CHECK(t.cov(state::kVy, state::kVy) == 7.0);
  CHECK(t.cov(state::kX, state::kY) == 0.0);
}

TEST_CASE("successive ids are strictly increasing and unique") {
  std::set<long long> ids;
  long long next = 1;
  long long prev = 0;
  for (int i = 0; i < 100; ++i) {
    const Track t = init_track(make_box(), next++, MotionKind::CV, {}, 1);
    CHECK(t.id > prev);
    prev = t.id;
    CHECK(ids.insert(t.id).second);
  }
}

TEST_CASE("score smoothing takes max(old * 0.9, detection)") {
  Track t = init_track(make_box(), 1, MotionKind::CV, {}, 1);
  t.score = 1.0;
  smooth_score(t, 0.2);
  CHECK(t.score == doctest::Approx(0.9));
  smooth_score(t, 0.95);
  CHECK(t.score == doctest::Approx(0.95));
}

TEST_CASE("box_from_track round-trips the observed fields") {
  Box3D d = make_box(2.0, -3.0);
  d.yaw = 1.2;
  const Track t = init_track(d, 5, MotionKind::CV, {}, 1);
  const Box3D back = box_from_track(t);
  CHECK(back.cx == d.cx);
  CHECK(back.cy == d.cy);
  CHECK(back.length == d.length);
  CHECK(back.yaw == doctest::Approx(d.yaw));
  CHECK(back.class_id == d.class_id);
  CHECK(back.score == d.score);
}
