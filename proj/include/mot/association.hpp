#pragma once

#include "mot/motion.hpp"
#include "mot/types.hpp"

#include <utility>
#include <vector>

namespace mot {

enum class Metric { IoU, GIoU, L2, LoM, Maha, ALL, APC };

std::string metric_name(Metric m);
std::optional<Metric> metric_from_name(const std::string& name);

/// Gated-out entries carry this sentinel, larger than any admissible cost.
constexpr double kGatedCost = 1e15;

/// Gates and weights for build_similarity. Overlap metrics become costs as
/// (1 - value); distance metrics are used directly.
struct SimilarityConfig {
  Metric metric = Metric::IoU;
  double iou_gate = 0.1;    // admissible iff iou >= gate
  double giou_gate = -0.5;  // admissible iff giou >= gate
  PerClass<double> center_gate{4.0, 1.0, 2.0};  // meters, L2/LoM
  double maha_gate = 11.0;  // squared Mahalanobis, also gates A-LL
  double p_d = 1.0;         // constant detection probability for A-LL
  bool all_per_detection_pd = false;  // use detection score as P_D
  bool all_printed_sign = false;      // +ln det(S^-1) instead of +ln det(S)
  Vec3 apc_weights{1.0, 1.0, 1.0};    // geometry, appearance, motion
  double apc_gate_radius = 5.0;       // meters, APC pre-gate
};

/// tracks x detections costs (lower = better) plus the admissibility mask
/// and the raw BEV center distances (PCGDA search radii, APC gate).
struct SimilarityMatrix {
  MatX cost;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> admissible;
  MatX center_dist;
  Metric metric = Metric::IoU;

  Eigen::Index rows() const { return cost.rows(); }
  Eigen::Index cols() const { return cost.cols(); }
};

struct Assignment {
  std::vector<std::pair<int, int>> matches;  // (track_index, detection_index)
  std::vector<int> unmatched_tracks;
  std::vector<int> unmatched_detections;
};

/// r^T S^-1 r for an explicit residual. Throws ConfigError on singular S.
double mahalanobis_sq_residual(const VecX& residual, const MatX& S);

/// A-LL from its parts: maha + ln det(S) + n ln(2 pi) - 2 ln(p_d).
/// printed_sign flips the determinant term to +ln det(S^-1).
double all_from_mahalanobis(double maha_sq, double log_det_s, int n,
                            double p_d, bool printed_sign = false);

/// Squared Mahalanobis distance between a detection and the track's
/// predicted observation, yaw residual wrapped. Requires the track to be
/// predicted for the current frame.
double mahalanobis_sq(const Box3D& d, const Track& track,
                      const KalmanModel& model);

/// Association log-likelihood distance (squared Mahalanobis plus the
/// log-determinant and detection-probability terms).
double all_dist_sq(const Box3D& d, const Track& track,
                   const KalmanModel& model, double p_d,
                   bool printed_sign = false);

/// Aggregated pairwise cost: w_g * geometry + w_a * appearance + w_m * motion.
/// Geometry combines normalized center distance and size difference;
/// appearance is the cosine distance of feature vectors (0 when either is
/// absent); motion compares the track velocity with the displacement implied
/// by the detection over dt.
double apc_cost(const Box3D& d, const Track& track, const Vec3& weights,
                double dt);

/// Builds the cost matrix for the configured metric. Class-mismatched pairs
/// are always gated out. Empty inputs produce an empty matrix.
SimilarityMatrix build_similarity(const std::vector<Track>& tracks,
                                  const std::vector<Box3D>& detections,
                                  const SimilarityConfig& cfg,
                                  const KalmanModel& model, double dt);

/// Minimum-total-cost matching over admissible pairs (rectangular matrices
/// padded internally); gate-violating matches are stripped after solving.
Assignment hungarian_assign(const SimilarityMatrix& m);

/// Repeatedly takes the globally lowest-cost admissible pair; ties broken by
/// (lower track index, lower detection index).
Assignment greedy_assign(const SimilarityMatrix& m);

struct PcgdaConfig {
  double r_min = 1.0;  // meters, search radius at track score 1
  double r_max = 5.0;  // meters, search radius at track score 0
};

/// Prediction-confidence-guided greedy assignment: pair (i, j) is admissible
/// only if its center distance is within r(s_i) = r_min + (r_max - r_min) *
/// (1 - s_i), so higher-confidence tracks search tighter radii.
Assignment pcgda_assign(const SimilarityMatrix& m,
                        const std::vector<double>& track_scores,
                        const PcgdaConfig& cfg);

/// Row-to-column solution of a dense square min-cost assignment
/// (Kuhn-Munkres with potentials). Exposed for the solvers and tests.
std::vector<int> solve_min_cost_square(const MatX& cost);

}  // namespace mot
