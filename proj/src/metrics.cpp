#include "mot/metrics.hpp"

#include "mot/association.hpp"
#include "mot/errors.hpp"
#include "mot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

namespace mot {

namespace {

using FrameRows = std::map<int, std::vector<const LabeledBox*>>;

FrameRows group_by_frame(const std::vector<LabeledBox>& rows,
                         const char* label) {
  FrameRows grouped;
  std::set<std::pair<int, long long>> seen;
  for (const LabeledBox& r : rows) {
    if (!seen.insert({r.frame, r.track_id}).second) {
      throw InputError(std::string(label) + " contains duplicate (frame=" +
                       std::to_string(r.frame) + ", id=" +
                       std::to_string(r.track_id) + ")");
    }
    grouped[r.frame].push_back(&r);
  }
  return grouped;
}

// Similarity in [0, 1] or -1 when the pair is inadmissible at the threshold.
double pair_overlap(const LabeledBox& gt, const LabeledBox& hyp,
                    const MatchConfig& cfg) {
  if (gt.box.class_id != hyp.box.class_id) return -1.0;
  if (cfg.mode == MatchMode::IoU) {
    const double v = iou_bev(gt.box, hyp.box);
    return v >= cfg.alpha ? v : -1.0;
  }
  const double dist = l2_center(gt.box, hyp.box);
  return dist <= cfg.alpha ? 1.0 - dist / cfg.alpha : -1.0;
}

}  // namespace

std::vector<FrameMatch> match_sequence(const std::vector<LabeledBox>& gt,
                                       const std::vector<LabeledBox>& hyp,
                                       const MatchConfig& cfg) {
  if (cfg.mode == MatchMode::IoU && (cfg.alpha <= 0.0 || cfg.alpha >= 1.0)) {
    throw ConfigError("IoU matching threshold must be in (0, 1)");
  }
  if (cfg.mode == MatchMode::Center && cfg.alpha <= 0.0) {
    throw ConfigError("center matching distance cap must be positive");
  }
  const FrameRows gt_rows = group_by_frame(gt, "ground truth");
  const FrameRows hyp_rows = group_by_frame(hyp, "hypothesis");

  std::set<int> frames;
  for (const auto& [f, _] : gt_rows) frames.insert(f);
  for (const auto& [f, _] : hyp_rows) frames.insert(f);

  std::map<long long, long long> last_hyp_of_gt;  // CLEAR continuity memory
  std::vector<FrameMatch> result;
  static const std::vector<const LabeledBox*> kEmpty;

  for (int f : frames) {
    auto git = gt_rows.find(f);
    auto hit = hyp_rows.find(f);
    const auto& g = git != gt_rows.end() ? git->second : kEmpty;
    const auto& h = hit != hyp_rows.end() ? hit->second : kEmpty;

    FrameMatch fm;
    fm.frame = f;
    std::vector<char> g_used(g.size(), 0), h_used(h.size(), 0);

    // Continuity pass: keep an existing gt-hyp pairing while it stays
    // above the threshold.
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto prev = last_hyp_of_gt.find(g[i]->track_id);
      if (prev == last_hyp_of_gt.end()) continue;
      for (std::size_t j = 0; j < h.size(); ++j) {
        if (h_used[j] || h[j]->track_id != prev->second) continue;
        const double ov = pair_overlap(*g[i], *h[j], cfg);
        if (ov >= 0.0) {
          fm.pairs.push_back({g[i]->track_id, h[j]->track_id, ov});
          g_used[i] = 1;
          h_used[j] = 1;
        }
        break;
      }
    }

    // Hungarian pass over the rest, maximizing total overlap.
    std::vector<std::size_t> gi, hj;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!g_used[i]) gi.push_back(i);
    }
    for (std::size_t j = 0; j < h.size(); ++j) {
      if (!h_used[j]) hj.push_back(j);
    }
    if (!gi.empty() && !hj.empty()) {
      const Eigen::Index n =
          static_cast<Eigen::Index>(std::max(gi.size(), hj.size()));
      // Costs are 1 - overlap in [0, 1]; a sentinel of n + 2 already makes
      // the solver prefer any admissible pair over leaving one out, without
      // pushing the dual potentials beyond the problem's scale.
      MatX cost = MatX::Constant(n, n, static_cast<double>(n) + 2.0);
      MatX overlap = MatX::Constant(n, n, -1.0);
      bool any = false;
      for (std::size_t a = 0; a < gi.size(); ++a) {
        for (std::size_t b = 0; b < hj.size(); ++b) {
          const double ov = pair_overlap(*g[gi[a]], *h[hj[b]], cfg);
          if (ov >= 0.0) {
            cost(a, b) = 1.0 - ov;
            overlap(a, b) = ov;
            any = true;
          }
        }
      }
      if (any) {
        const std::vector<int> row_to_col = solve_min_cost_square(cost);
        for (std::size_t a = 0; a < gi.size(); ++a) {
          const int b = row_to_col[static_cast<int>(a)];
          if (b >= 0 && b < static_cast<int>(hj.size()) &&
              overlap(a, b) >= 0.0) {
            fm.pairs.push_back({g[gi[a]]->track_id, h[hj[b]]->track_id,
                                overlap(a, b)});
            g_used[gi[a]] = 1;
            h_used[hj[b]] = 1;
          }
        }
      }
    }

    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!g_used[i]) fm.unmatched_gt.push_back(g[i]->track_id);
    }
    for (std::size_t j = 0; j < h.size(); ++j) {
      if (!h_used[j]) fm.unmatched_hyp.push_back(h[j]->track_id);
    }
    for (const auto& p : fm.pairs) last_hyp_of_gt[p.gt_id] = p.hyp_id;
    result.push_back(std::move(fm));
  }
  return result;
}

ClearScores clear_scores(const std::vector<FrameMatch>& matches) {
  ClearScores s;
  std::map<long long, long long> last_hyp_of_gt;
  for (const FrameMatch& fm : matches) {
    s.fp_t += static_cast<long long>(fm.unmatched_hyp.size());
    s.fn_t += static_cast<long long>(fm.unmatched_gt.size());
    s.num_gt += static_cast<long long>(fm.pairs.size() + fm.unmatched_gt.size());
    for (const auto& p : fm.pairs) {
      s.num_matches += 1;
      s.overlap_sum += p.overlap;
      auto it = last_hyp_of_gt.find(p.gt_id);
      if (it != last_hyp_of_gt.end() && it->second != p.hyp_id) s.ids += 1;
      last_hyp_of_gt[p.gt_id] = p.hyp_id;
    }
  }
  if (s.num_gt > 0) {
    s.mota = 1.0 - static_cast<double>(s.fp_t + s.fn_t + s.ids) /
                       static_cast<double>(s.num_gt);
  }
  if (s.num_matches > 0) {
    s.motp = s.overlap_sum / static_cast<double>(s.num_matches);
  }
  return s;
}

HotaScores hota_scores(const std::vector<FrameMatch>& matches) {
  HotaScores s;
  std::map<std::pair<long long, long long>, long long> pair_tp;
  std::map<long long, long long> gt_tp, gt_fn, hyp_tp, hyp_fp;
  std::vector<std::pair<long long, long long>> tps;

  for (const FrameMatch& fm : matches) {
    for (const auto& p : fm.pairs) {
      pair_tp[{p.gt_id, p.hyp_id}] += 1;
      gt_tp[p.gt_id] += 1;
      hyp_tp[p.hyp_id] += 1;
      tps.emplace_back(p.gt_id, p.hyp_id);
    }
    for (long long g : fm.unmatched_gt) gt_fn[g] += 1;
    for (long long h : fm.unmatched_hyp) hyp_fp[h] += 1;
    s.fn += static_cast<long long>(fm.unmatched_gt.size());
    s.fp += static_cast<long long>(fm.unmatched_hyp.size());
  }
  s.tp = static_cast<long long>(tps.size());

  if (s.tp + s.fn + s.fp > 0) {
    s.deta = static_cast<double>(s.tp) /
             static_cast<double>(s.tp + s.fn + s.fp);
  }
  if (s.tp == 0) {
    s.zero_tp = true;
    return s;  // AssA and HOTA reported as zero
  }

  double assa_sum = 0.0;
  for (const auto& [g, h] : tps) {
    const long long tpa = pair_tp[{g, h}];
    const long long fna = (gt_tp[g] - tpa) + (gt_fn.count(g) ? gt_fn[g] : 0);
    const long long fpa = (hyp_tp[h] - tpa) + (hyp_fp.count(h) ? hyp_fp[h] : 0);
    assa_sum += static_cast<double>(tpa) /
                static_cast<double>(tpa + fna + fpa);
  }
  s.assa = assa_sum / static_cast<double>(s.tp);
  s.hota = std::sqrt(s.deta * s.assa);
  return s;
}

EvalReport evaluate(const std::vector<LabeledBox>& gt,
                    const std::vector<LabeledBox>& hyp,
                    const MatchConfig& cfg, bool alpha_sweep) {
  EvalReport report;
  report.config = cfg;

  for (int c = 0; c < kNumClasses; ++c) {
    const ClassId cls = static_cast<ClassId>(c);
    std::vector<LabeledBox> gt_c, hyp_c;
    for (const LabeledBox& r : gt) {
      if (r.box.class_id == cls) gt_c.push_back(r);
    }
    for (const LabeledBox& r : hyp) {
      if (r.box.class_id == cls) hyp_c.push_back(r);
    }
    const auto matches = match_sequence(gt_c, hyp_c, cfg);
    report.per_class[cls] = {clear_scores(matches), hota_scores(matches)};
  }

  // Matching is class-gated, so the pooled run decomposes exactly into the
  // per-class runs.
  const auto pooled = match_sequence(gt, hyp, cfg);
  report.overall = {clear_scores(pooled), hota_scores(pooled)};

  if (alpha_sweep && cfg.mode == MatchMode::IoU) {
    double hota_sum = 0.0;
    for (int k = 1; k <= 19; ++k) {
      MatchConfig sweep_cfg = cfg;
      sweep_cfg.alpha = 0.05 * k;
      const HotaScores h = hota_scores(match_sequence(gt, hyp, sweep_cfg));
      report.alpha_curve.push_back({sweep_cfg.alpha, h.deta, h.assa, h.hota});
      hota_sum += h.hota;
    }
    report.hota_alpha_average = hota_sum / 19.0;
  }
  return report;
}

}  // namespace mot
