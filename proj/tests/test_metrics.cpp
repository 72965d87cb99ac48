#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mot/errors.hpp"
#include "mot/metrics.hpp"

#include "test_support.hpp"

#include <map>
#include <random>

using namespace mot;
using mot::testing::hota_oracle;
using mot::testing::row;

namespace {

// A randomized small scenario: gt objects on a grid, hypothesis ids that
// occasionally split, miss or add clutter.
struct RandomScenario {
  std::vector<LabeledBox> gt;
  std::vector<LabeledBox> hyp;
};

RandomScenario random_scenario(std::uint64_t seed, int objects, int frames) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RandomScenario s;
  for (int obj = 0; obj < objects; ++obj) {
    long long hyp_id = 100 + obj;
    for (int f = 0; f < frames; ++f) {
      const double x = obj * 20.0 + 0.05 * f;
      s.gt.push_back(row(f, obj + 1, x));
      if (u(rng) < 0.15) continue;            // missed detection
      if (u(rng) < 0.08) hyp_id += 1000;      // id split
      const double dx = u(rng) < 0.1 ? 5.0 : 0.2 * u(rng);  // sometimes off
      s.hyp.push_back(row(f, hyp_id, x + dx));
    }
  }
  // clutter track
  for (int f = 0; f < frames; f += 3) {
    s.hyp.push_back(row(f, 999, -50.0));
  }
  return s;
}

}  // namespace

TEST_CASE("identical gt and hyp match perfectly") {
  std::vector<LabeledBox> gt, hyp;
  for (int f = 0; f < 5; ++f) {
    gt.push_back(row(f, 1, 0.0));
    gt.push_back(row(f, 2, 30.0));
    hyp.push_back(row(f, 7, 0.0));
    hyp.push_back(row(f, 8, 30.0));
  }
  const auto matches = match_sequence(gt, hyp, MatchConfig{});
  for (const auto& fm : matches) {
    CHECK(fm.pairs.size() == 2);
    CHECK(fm.unmatched_gt.empty());
    CHECK(fm.unmatched_hyp.empty());
  }
  const ClearScores c = clear_scores(matches);
  CHECK(*c.mota == doctest::Approx(1.0));
  CHECK(*c.motp == doctest::Approx(1.0));
  CHECK(c.ids == 0);
  const HotaScores h = hota_scores(matches);
  CHECK(h.deta == doctest::Approx(1.0));
  CHECK(h.assa == doctest::Approx(1.0));
  CHECK(h.hota == doctest::Approx(1.0));
}

TEST_CASE("empty hypothesis leaves every gt unmatched") {
  std::vector<LabeledBox> gt;
  for (int f = 0; f < 4; ++f) gt.push_back(row(f, 1, 0.0));
  const auto matches = match_sequence(gt, {}, MatchConfig{});
  long long fn = 0;
  for (const auto& fm : matches) {
    CHECK(fm.pairs.empty());
    fn += static_cast<long long>(fm.unmatched_gt.size());
  }
  CHECK(fn == 4);
  const HotaScores h = hota_scores(matches);
  CHECK(h.zero_tp);
  CHECK(h.assa == 0.0);
  CHECK(h.hota == 0.0);
}

TEST_CASE("one hypothesis overlapping two gts goes to the higher overlap") {
  // 2x1 assignment: the hyp sits exactly on gt 2 but only brushes gt 1.
  std::vector<LabeledBox> gt{row(0, 1, 0.0), row(0, 2, 0.8)};
  std::vector<LabeledBox> hyp{row(0, 9, 0.8)};
  MatchConfig cfg;
  cfg.alpha = 0.2;
  const auto matches = match_sequence(gt, hyp, cfg);
  REQUIRE(matches.size() == 1);
  REQUIRE(matches[0].pairs.size() == 1);
  CHECK(matches[0].pairs[0].gt_id == 2);
  CHECK(matches[0].pairs[0].overlap == doctest::Approx(1.0));
  CHECK(matches[0].unmatched_gt == std::vector<long long>{1});
}

TEST_CASE("the continuity rule keeps a gt with its previous hypothesis") {
  // Two hypotheses hover around one gt; the one matched first keeps the gt
  // while it stays above the threshold even if the other is slightly better
  // later.
  std::vector<LabeledBox> gt{row(0, 1, 0.0), row(1, 1, 0.0)};
  std::vector<LabeledBox> hyp{
      row(0, 7, 0.1),   // frame 0: only hyp 7 -> matched
      row(1, 7, 0.3),   // frame 1: hyp 7 still above alpha
      row(1, 8, 0.0),   // hyp 8 is now the better overlap
  };
  const auto matches = match_sequence(gt, hyp, MatchConfig{});
  REQUIRE(matches.size() == 2);
  REQUIRE(matches[1].pairs.size() == 1);
  CHECK(matches[1].pairs[0].hyp_id == 7);  // continuity beats overlap
  const ClearScores c = clear_scores(matches);
  CHECK(c.ids == 0);
}

TEST_CASE("clear_scores arithmetic") {
  SUBCASE("FP=1, FN=1, IDS=0 over 10 gt boxes gives MOTA 0.8") {
    // 5 frames x 2 objects = 10 gt; drop one hyp frame, add one clutter row.
    std::vector<LabeledBox> gt, hyp;
    for (int f = 0; f < 5; ++f) {
      gt.push_back(row(f, 1, 0.0));
      gt.push_back(row(f, 2, 30.0));
      if (!(f == 2)) hyp.push_back(row(f, 7, 0.0));  // one FN
      hyp.push_back(row(f, 8, 30.0));
    }
    hyp.push_back(row(4, 9, -50.0));  // one FP
    const ClearScores c = clear_scores(match_sequence(gt, hyp, MatchConfig{}));
    CHECK(c.num_gt == 10);
    CHECK(c.fp_t == 1);
    CHECK(c.fn_t == 1);
    CHECK(c.ids == 0);
    CHECK(*c.mota == doctest::Approx(0.8));
  }

  SUBCASE("MOTA can go negative: FP=15, FN=5, num_gt=10 gives -1.0") {
    std::vector<LabeledBox> gt, hyp;
    for (int f = 0; f < 10; ++f) gt.push_back(row(f, 1, 0.0));
    // 5 frames missed, 5 matched; 15 clutter hypotheses spread over frames.
    for (int f = 0; f < 5; ++f) hyp.push_back(row(f, 7, 0.0));
    int added = 0;
    for (int f = 0; f < 10 && added < 15; ++f) {
      for (int k = 0; k < 2 && added < 15; ++k, ++added) {
        hyp.push_back(row(f, 50 + added, -40.0 - 10.0 * k));
      }
    }
    REQUIRE(added == 15);
    const ClearScores c = clear_scores(match_sequence(gt, hyp, MatchConfig{}));
    CHECK(c.fp_t == 15);
    CHECK(c.fn_t == 5);
    CHECK(*c.mota == doctest::Approx(-1.0));
  }
}

TEST_CASE("an identity switch is counted when the matched hyp id changes") {
  std::vector<LabeledBox> gt, hyp;
  for (int f = 0; f < 6; ++f) {
    gt.push_back(row(f, 1, 0.0));
    hyp.push_back(row(f, f < 3 ? 7 : 8, 0.0));
  }
  const ClearScores c = clear_scores(match_sequence(gt, hyp, MatchConfig{}));
  CHECK(c.ids == 1);
  // A switch survives a gap: ids compare against the most recent match.
  std::vector<LabeledBox> gap_hyp;
  for (int f = 0; f < 6; ++f) {
    if (f == 2 || f == 3) continue;
    gap_hyp.push_back(row(f, f < 3 ? 7 : 8, 0.0));
  }
  const ClearScores g = clear_scores(match_sequence(gt, gap_hyp, MatchConfig{}));
  CHECK(g.ids == 1);
}

TEST_CASE("hota on the id-split fixture: DetA 1, AssA 0.5, HOTA sqrt(0.5)") {
  std::vector<LabeledBox> gt, hyp;
  for (int f = 0; f < 10; ++f) {
    gt.push_back(row(f, 1, 0.0));
    hyp.push_back(row(f, f < 5 ? 7 : 8, 0.0));
  }
  const HotaScores h = hota_scores(match_sequence(gt, hyp, MatchConfig{}));
  CHECK(h.deta == doctest::Approx(1.0));
  CHECK(h.assa == doctest::Approx(0.5));
  CHECK(h.hota == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
}

TEST_CASE("deta counts: TP=5, FN=3, FP=2 gives 0.5") {
  std::vector<LabeledBox> gt, hyp;
  for (int f = 0; f < 8; ++f) gt.push_back(row(f, 1, 0.0));
  for (int f = 0; f < 5; ++f) hyp.push_back(row(f, 7, 0.0));
  hyp.push_back(row(0, 8, -50.0));
  hyp.push_back(row(1, 8, -50.0));
  const HotaScores h = hota_scores(match_sequence(gt, hyp, MatchConfig{}));
  CHECK(h.tp == 5);
  CHECK(h.fn == 3);
  CHECK(h.fp == 2);
  CHECK(h.deta == doctest::Approx(0.5));
}

TEST_CASE("hota_scores equals the exhaustive oracle on random scenarios") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const RandomScenario s = random_scenario(seed, 1 + seed % 5, 20);
    const auto matches = match_sequence(s.gt, s.hyp, MatchConfig{});
    const HotaScores fast = hota_scores(matches);
    const auto slow = hota_oracle(matches);
    CHECK(fast.deta == doctest::Approx(slow.deta).epsilon(1e-12));
    CHECK(fast.assa == doctest::Approx(slow.assa).epsilon(1e-12));
    CHECK(fast.hota == doctest::Approx(slow.hota).epsilon(1e-12));
    // HOTA identity at a single alpha.
    CHECK(fast.hota == doctest::Approx(std::sqrt(fast.deta * fast.assa))
                           .epsilon(1e-12));
  }
}

TEST_CASE("metrics are invariant under hypothesis id relabeling") {
  const RandomScenario s = random_scenario(77, 4, 20);
  std::vector<LabeledBox> relabeled = s.hyp;
  std::map<long long, long long> perm;
  for (auto& r : relabeled) {
    if (!perm.count(r.track_id)) {
      perm[r.track_id] = 77777 - static_cast<long long>(perm.size()) * 13;
    }
    r.track_id = perm[r.track_id];
  }
  const auto base = match_sequence(s.gt, s.hyp, MatchConfig{});
  const auto swapped = match_sequence(s.gt, relabeled, MatchConfig{});
  const HotaScores h1 = hota_scores(base), h2 = hota_scores(swapped);
  CHECK(h1.deta == doctest::Approx(h2.deta).epsilon(1e-12));
  CHECK(h1.assa == doctest::Approx(h2.assa).epsilon(1e-12));
  const ClearScores c1 = clear_scores(base), c2 = clear_scores(swapped);
  CHECK(*c1.mota == doctest::Approx(*c2.mota).epsilon(1e-12));
  CHECK(c1.ids == c2.ids);
}

TEST_CASE("adding a pure-clutter track lowers DetA and MOTA, not AssA") {
  std::vector<LabeledBox> gt, hyp;
  for (int f = 0; f < 10; ++f) {
    gt.push_back(row(f, 1, 0.0));
    gt.push_back(row(f, 2, 30.0));
    hyp.push_back(row(f, 7, 0.0));
    hyp.push_back(row(f, f < 5 ? 8 : 9, 30.0));  // one split for texture
  }
  const auto before = match_sequence(gt, hyp, MatchConfig{});
  std::vector<LabeledBox> polluted = hyp;
  for (int f = 0; f < 10; ++f) polluted.push_back(row(f, 99, -60.0));
  const auto after = match_sequence(gt, polluted, MatchConfig{});

  const HotaScores h_before = hota_scores(before);
  const HotaScores h_after = hota_scores(after);
  CHECK(h_after.deta < h_before.deta);
  CHECK(h_after.assa == doctest::Approx(h_before.assa).epsilon(1e-12));
  const ClearScores c_before = clear_scores(before);
  const ClearScores c_after = clear_scores(after);
  CHECK(*c_after.mota < *c_before.mota);
}

TEST_CASE("duplicate (frame, id) rows are rejected") {
  std::vector<LabeledBox> gt{row(0, 1, 0.0), row(0, 1, 5.0)};
  CHECK_THROWS_AS(match_sequence(gt, {}, MatchConfig{}), InputError);
  std::vector<LabeledBox> hyp{row(3, 2, 0.0), row(3, 2, 1.0)};
  CHECK_THROWS_AS(match_sequence({}, hyp, MatchConfig{}), InputError);
}

TEST_CASE("center-distance matching uses the cap as threshold") {
  std::vector<LabeledBox> gt{row(0, 1, 0.0)};
  std::vector<LabeledBox> near{row(0, 7, 1.0)};
  std::vector<LabeledBox> far{row(0, 7, 3.0)};
  MatchConfig cfg;
  cfg.mode = MatchMode::Center;
  cfg.alpha = 2.0;
  const auto hit = match_sequence(gt, near, cfg);
  REQUIRE(hit[0].pairs.size() == 1);
  CHECK(hit[0].pairs[0].overlap == doctest::Approx(0.5));  // 1 - 1/2
  const auto miss = match_sequence(gt, far, cfg);
  CHECK(miss[0].pairs.empty());
}

TEST_CASE("evaluate pools classes and reports per-class rows") {
  std::vector<LabeledBox> gt, hyp;
  for (int f = 0; f < 5; ++f) {
    gt.push_back(row(f, 1, 0.0, 0.0, ClassId::Car));
    gt.push_back(row(f, 2, 30.0, 0.0, ClassId::Pedestrian));
    hyp.push_back(row(f, 7, 0.0, 0.0, ClassId::Car));
    // Pedestrian never tracked.
  }
  const EvalReport rep = evaluate(gt, hyp, MatchConfig{});
  CHECK(rep.per_class.at(ClassId::Car).hota.deta == doctest::Approx(1.0));
  CHECK(rep.per_class.at(ClassId::Pedestrian).hota.zero_tp);
  CHECK(rep.per_class.at(ClassId::Cyclist).clear.num_gt == 0);
  CHECK_FALSE(rep.per_class.at(ClassId::Cyclist).clear.mota.has_value());
  CHECK(rep.overall.hota.tp == 5);
  CHECK(rep.overall.hota.fn == 5);
  CHECK(rep.overall.clear.num_gt == 10);
}

TEST_CASE("a class-mismatched pair never matches even with full overlap") {
  std::vector<LabeledBox> gt{row(0, 1, 0.0, 0.0, ClassId::Car)};
  std::vector<LabeledBox> hyp{row(0, 7, 0.0, 0.0, ClassId::Cyclist)};
  const auto matches = match_sequence(gt, hyp, MatchConfig{});
  CHECK(matches[0].pairs.empty());
  CHECK(matches[0].unmatched_gt.size() == 1);
  CHECK(matches[0].unmatched_hyp.size() == 1);
}

TEST_CASE("alpha sweep fills the curve and its average") {
  const RandomScenario s = random_scenario(5, 3, 15);
  const EvalReport rep = evaluate(s.gt, s.hyp, MatchConfig{}, true);
  REQUIRE(rep.alpha_curve.size() == 19);
  CHECK(rep.alpha_curve.front().alpha == doctest::Approx(0.05));
  CHECK(rep.alpha_curve.back().alpha == doctest::Approx(0.95));
  REQUIRE(rep.hota_alpha_average.has_value());
  double mean = 0.0;
  for (const auto& p : rep.alpha_curve) mean += p.hota;
  CHECK(*rep.hota_alpha_average == doctest::Approx(mean / 19.0));
  // DetA is non-increasing in alpha: fewer pairs stay admissible.
  for (std::size_t i = 1; i < rep.alpha_curve.size(); ++i) {
    CHECK(rep.alpha_curve[i].deta <= rep.alpha_curve[i - 1].deta + 1e-12);
  }
}
