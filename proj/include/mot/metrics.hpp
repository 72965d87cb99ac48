#pragma once

#include "mot/types.hpp"

#include <map>
#include <optional>
#include <vector>

namespace mot {

enum class MatchMode { IoU, Center };

/// Ground-truth / hypothesis matching parameters. In IoU mode alpha is the
/// minimum BEV IoU in (0, 1); in Center mode it is the distance cap in
/// meters and the recorded overlap is 1 - dist / cap.
struct MatchConfig {
  MatchMode mode = MatchMode::IoU;
  double alpha = 0.5;
};

/// Per-frame one-to-one pairing; every pair's overlap is >= the threshold.
struct FrameMatch {
  int frame = 0;
  struct Pair {
    long long gt_id;
    long long hyp_id;
    double overlap;
  };
  std::vector<Pair> pairs;
  std::vector<long long> unmatched_gt;
  std::vector<long long> unmatched_hyp;
};

/// Per-frame Hungarian matching maximizing total overlap among admissible
/// pairs, with the CLEAR continuity rule: a ground-truth object keeps its
/// previous hypothesis while that pair stays above the threshold, before the
/// rest is re-optimized. Throws InputError on duplicate (frame, id) rows.
std::vector<FrameMatch> match_sequence(const std::vector<LabeledBox>& gt,
                                       const std::vector<LabeledBox>& hyp,
                                       const MatchConfig& cfg);

struct ClearScores {
  std::optional<double> mota;  // absent when num_gt == 0
  std::optional<double> motp;  // mean matched overlap, absent when c == 0
  long long ids = 0;
  long long fp_t = 0;
  long long fn_t = 0;
  long long num_gt = 0;
  long long num_matches = 0;
  double overlap_sum = 0.0;
};

/// MOTA = 1 - (FP + FN + IDS) / num_gt; an identity switch is counted when a
/// ground-truth id's matched hypothesis differs from its most recent
/// previously matched hypothesis. MOTP is the mean matched overlap.
ClearScores clear_scores(const std::vector<FrameMatch>& matches);

struct HotaScores {
  double deta = 0.0;
  double assa = 0.0;
  double hota = 0.0;
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  bool zero_tp = false;
};

/// DetA = TP / (TP + FN + FP); AssA is the mean over TPs of
/// TPA / (TPA + FNA + FPA); HOTA = sqrt(DetA * AssA).
HotaScores hota_scores(const std::vector<FrameMatch>& matches);

struct ClassReport {
  ClearScores clear;
  HotaScores hota;
};

struct AlphaPoint {
  double alpha;
  double deta;
  double assa;
  double hota;
};

struct EvalReport {
  MatchConfig config;
  std::map<ClassId, ClassReport> per_class;
  ClassReport overall;  // classes pooled (matching is always class-gated)
  std::vector<AlphaPoint> alpha_curve;       // optional sweep (IoU mode)
  std::optional<double> hota_alpha_average;  // mean HOTA over the sweep
};

/// Full evaluation: per-class matching, CLEAR and HOTA scores, pooled
/// overall row, optional alpha sweep over {0.05, 0.10, ..., 0.95}.
EvalReport evaluate(const std::vector<LabeledBox>& gt,
                    const std::vector<LabeledBox>& hyp,
                    const MatchConfig& cfg, bool alpha_sweep = false);

}  // namespace mot
