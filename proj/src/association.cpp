#include "mot/association.hpp"

#include "mot/errors.hpp"
#include "mot/geometry.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mot {

std::string metric_name(Metric m) {
  switch (m) {
    case Metric::IoU: return "iou";
    case Metric::GIoU: return "giou";
    case Metric::L2: return "l2";
    case Metric::LoM: return "lom";
    case Metric::Maha: return "maha";
    case Metric::ALL: return "a_ll";
    default: return "apc";
  }
}

std::optional<Metric> metric_from_name(const std::string& name) {
  if (name == "iou") return Metric::IoU;
  if (name == "giou") return Metric::GIoU;
  if (name == "l2") return Metric::L2;
  if (name == "lom") return Metric::LoM;
  if (name == "maha") return Metric::Maha;
  if (name == "a_ll") return Metric::ALL;
  if (name == "apc") return Metric::APC;
  return std::nullopt;
}

namespace {

Eigen::LDLT<MatX> factor_spd(const MatX& s, long long track_id) {
  Eigen::LDLT<MatX> ldlt(s);
  const VecX d = ldlt.vectorD();
  const double max_d = d.size() > 0 ? d.maxCoeff() : 0.0;
  if (!ldlt.isPositive() || max_d <= 0.0 ||
      d.minCoeff() <= 1e-12 * max_d) {
    throw ConfigError(
        "singular innovation covariance for track " +
        std::to_string(track_id) +
        ": ill-conditioned R/Q configuration");
  }
  return ldlt;
}

double log_det(const Eigen::LDLT<MatX>& ldlt) {
  return ldlt.vectorD().array().log().sum();
}

VecX residual_of(const Box3D& d, const Track& track,
                 const KalmanModel& model) {
  VecX r = observation_of(d) - model.observation() * track.mean;
  r(state::kYaw) = normalize_yaw(r(state::kYaw));
  return r;
}

constexpr double kEps = 1e-9;

}  // namespace

double mahalanobis_sq_residual(const VecX& residual, const MatX& S) {
  const auto ldlt = factor_spd(S, -1);
  return residual.dot(ldlt.solve(residual));
}

double all_from_mahalanobis(double maha_sq, double log_det_s, int n,
                            double p_d, bool printed_sign) {
  const double det_term = printed_sign ? -log_det_s : log_det_s;
  return maha_sq + det_term + n * std::log(2.0 * kPi) - 2.0 * std::log(p_d);
}

double mahalanobis_sq(const Box3D& d, const Track& track,
                      const KalmanModel& model) {
  const MatX s = innovation_covariance(track, model);
  const auto ldlt = factor_spd(s, track.id);
  const VecX r = residual_of(d, track, model);
  return r.dot(ldlt.solve(r));
}

double all_dist_sq(const Box3D& d, const Track& track,
                   const KalmanModel& model, double p_d, bool printed_sign) {
  const MatX s = innovation_covariance(track, model);
  const auto ldlt = factor_spd(s, track.id);
  const VecX r = residual_of(d, track, model);
  const double maha = r.dot(ldlt.solve(r));
  return all_from_mahalanobis(maha, log_det(ldlt), state::kObsDim, p_d,
                              printed_sign);
}

double apc_cost(const Box3D& d, const Track& track, const Vec3& weights,
                double dt) {
  const Box3D tb = box_from_track(track);

  // Geometry: center distance normalized by the mean BEV diagonal, plus the
  // relative dimension difference.
  const double diag_d = std::hypot(d.length, d.width);
  const double diag_t = std::hypot(tb.length, tb.width);
  const double center_term =
      (d.center2d() - tb.center2d()).norm() / (0.5 * (diag_d + diag_t) + kEps);
  const double size_term =
      (std::abs(d.length - tb.length) + std::abs(d.width - tb.width) +
       std::abs(d.height - tb.height)) /
      (tb.length + tb.width + tb.height + kEps);
  const double geometry = center_term + size_term;

  // Appearance: cosine distance against the track's remembered feature,
  // zero when either side is missing.
  double appearance = 0.0;
  if (d.feature && track.feature && d.feature->size() == track.feature->size()) {
    const double nd = d.feature->norm();
    const double nt = track.feature->norm();
    if (nd > kEps && nt > kEps) {
      appearance = 1.0 - d.feature->dot(*track.feature) / (nd * nt);
    }
  }

  // Motion: angle plus magnitude mismatch between the track velocity and
  // the displacement implied by the detection since the last frame.
  const Vec2 v_track = track.velocity2d();
  const Vec2 v_implied = (d.center2d() - track.prev_center) / std::max(dt, kEps);
  const double n_t = v_track.norm();
  const double n_i = v_implied.norm();
  double angle_term = 0.0;
  if (n_t > kEps && n_i > kEps) {
    const double cosang =
        std::clamp(v_track.dot(v_implied) / (n_t * n_i), -1.0, 1.0);
    angle_term = std::acos(cosang) / kPi;
  }
  const double mag_term = std::abs(n_t - n_i) / (n_t + n_i + kEps);
  const double motion = angle_term + mag_term;

  return weights(0) * geometry + weights(1) * appearance + weights(2) * motion;
}

SimilarityMatrix build_similarity(const std::vector<Track>& tracks,
                                  const std::vector<Box3D>& detections,
                                  const SimilarityConfig& cfg,
                                  const KalmanModel& model, double dt) {
  const Eigen::Index nt = static_cast<Eigen::Index>(tracks.size());
  const Eigen::Index nd = static_cast<Eigen::Index>(detections.size());
  SimilarityMatrix m;
  m.metric = cfg.metric;
  m.cost = MatX::Constant(nt, nd, kGatedCost);
  m.admissible.setConstant(nt, nd, false);
  m.center_dist = MatX::Zero(nt, nd);

  // Per-track innovation factorization, shared across detections.
  struct TrackCtx {
    Eigen::LDLT<MatX> ldlt;
    double log_det_s = 0.0;
  };
  std::vector<TrackCtx> ctx;
  const bool probabilistic =
      cfg.metric == Metric::Maha || cfg.metric == Metric::ALL;
  if (probabilistic) {
    ctx.reserve(tracks.size());
    for (const Track& t : tracks) {
      TrackCtx c;
      c.ldlt = factor_spd(innovation_covariance(t, model), t.id);
      c.log_det_s = log_det(c.ldlt);
      ctx.push_back(std::move(c));
    }
  }

  for (Eigen::Index i = 0; i < nt; ++i) {
    const Track& t = tracks[i];
    const Box3D tb = box_from_track(t);
    for (Eigen::Index j = 0; j < nd; ++j) {
      const Box3D& d = detections[j];
      m.center_dist(i, j) = l2_center(tb, d);
      if (t.class_id != d.class_id) continue;  // cross-class always gated

      double cost = kGatedCost;
      bool admissible = false;
      switch (cfg.metric) {
        case Metric::IoU: {
          const double v = iou_bev(tb, d);
          admissible = v >= cfg.iou_gate;
          cost = 1.0 - v;
          break;
        }
        case Metric::GIoU: {
          const double v = giou_bev(tb, d);
          admissible = v >= cfg.giou_gate;
          cost = 1.0 - v;
          break;
        }
        case Metric::L2: {
          const double v = m.center_dist(i, j);
          admissible = v <= cfg.center_gate[t.class_id];
          cost = v;
          break;
        }
        case Metric::LoM: {
          const double v = lom_distance(t, d, dt);
          admissible = v <= cfg.center_gate[t.class_id];
          cost = v;
          break;
        }
        case Metric::Maha: {
          const VecX r = residual_of(d, t, model);
          const double v = r.dot(ctx[i].ldlt.solve(r));
          admissible = v <= cfg.maha_gate;
          cost = v;
          break;
        }
        case Metric::ALL: {
          const VecX r = residual_of(d, t, model);
          const double maha = r.dot(ctx[i].ldlt.solve(r));
          const double p_d = cfg.all_per_detection_pd
                                 ? std::clamp(d.score, 1e-6, 1.0)
                                 : cfg.p_d;
          // A-LL has no scale-free gate of its own; gate on the
          // Mahalanobis component and rank by the full distance.
          admissible = maha <= cfg.maha_gate;
          cost = all_from_mahalanobis(maha, ctx[i].log_det_s, state::kObsDim,
                                      p_d, cfg.all_printed_sign);
          break;
        }
        case Metric::APC: {
          admissible = m.center_dist(i, j) <= cfg.apc_gate_radius;
          cost = apc_cost(d, t, cfg.apc_weights, dt);
          break;
        }
      }
      if (admissible) {
        m.cost(i, j) = cost;
        m.admissible(i, j) = true;
      }
    }
  }
  return m;
}

std::vector<int> solve_min_cost_square(const MatX& cost) {
  // Kuhn-Munkres with row/column potentials, O(n^3).
  const int n = static_cast<int>(cost.rows());
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = std::numeric_limits<double>::infinity();
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j]) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

namespace {

Assignment finalize(const SimilarityMatrix& m,
                    std::vector<std::pair<int, int>> matches) {
  Assignment a;
  std::vector<char> track_used(m.rows(), 0), det_used(m.cols(), 0);
  for (const auto& [i, j] : matches) {
    track_used[i] = 1;
    det_used[j] = 1;
  }
  a.matches = std::move(matches);
  std::sort(a.matches.begin(), a.matches.end());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (!track_used[i]) a.unmatched_tracks.push_back(static_cast<int>(i));
  }
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (!det_used[j]) a.unmatched_detections.push_back(static_cast<int>(j));
  }
  return a;
}

}  // namespace

Assignment hungarian_assign(const SimilarityMatrix& m) {
  const Eigen::Index nt = m.rows();
  const Eigen::Index nd = m.cols();
  if (nt == 0 || nd == 0 || !m.admissible.any()) return finalize(m, {});

  // Pad with a sentinel at the problem's own scale: large enough that the
  // solver fills admissible pairs first, small enough that the dual
  // potentials cannot leak rounding into the reduced costs (an astronomical
  // sentinel quantizes sub-ulp cost differences away).
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index i = 0; i < nt; ++i) {
    for (Eigen::Index j = 0; j < nd; ++j) {
      if (m.admissible(i, j)) {
        lo = std::min(lo, m.cost(i, j));
        hi = std::max(hi, m.cost(i, j));
      }
    }
  }
  const Eigen::Index n = std::max(nt, nd);
  const double big = hi + static_cast<double>(n) * (hi - lo) + 1.0;
  MatX padded = MatX::Constant(n, n, big);
  for (Eigen::Index i = 0; i < nt; ++i) {
    for (Eigen::Index j = 0; j < nd; ++j) {
      if (m.admissible(i, j)) padded(i, j) = m.cost(i, j);
    }
  }
  const std::vector<int> row_to_col = solve_min_cost_square(padded);

  std::vector<std::pair<int, int>> matches;
  for (Eigen::Index i = 0; i < nt; ++i) {
    const int j = row_to_col[static_cast<int>(i)];
    if (j >= 0 && j < nd && m.admissible(i, j)) {
      matches.emplace_back(static_cast<int>(i), j);
    }
  }
  return finalize(m, std::move(matches));
}

Assignment greedy_assign(const SimilarityMatrix& m) {
  std::vector<char> track_used(m.rows(), 0), det_used(m.cols(), 0);
  std::vector<std::pair<int, int>> matches;
  for (;;) {
    double best = kGatedCost;
    int bi = -1, bj = -1;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (track_used[i]) continue;
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (det_used[j] || !m.admissible(i, j)) continue;
        if (m.cost(i, j) < best) {  // strict: ties keep (lower i, lower j)
          best = m.cost(i, j);
          bi = static_cast<int>(i);
          bj = static_cast<int>(j);
        }
      }
    }
    if (bi < 0) break;
    track_used[bi] = 1;
    det_used[bj] = 1;
    matches.emplace_back(bi, bj);
  }
  return finalize(m, std::move(matches));
}

Assignment pcgda_assign(const SimilarityMatrix& m,
                        const std::vector<double>& track_scores,
                        const PcgdaConfig& cfg) {
  SimilarityMatrix gated = m;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double s = std::clamp(track_scores[static_cast<std::size_t>(i)],
                                0.0, 1.0);
    const double radius = cfg.r_min + (cfg.r_max - cfg.r_min) * (1.0 - s);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (gated.admissible(i, j) && m.center_dist(i, j) > radius) {
        gated.admissible(i, j) = false;
        gated.cost(i, j) = kGatedCost;
      }
    }
  }
  return greedy_assign(gated);
}

}  // namespace mot
