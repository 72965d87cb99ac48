#pragma once

#include "mot/metrics.hpp"
#include "mot/pipeline.hpp"
#include "mot/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mot {

/// One tracking sequence: ordered frames plus optional per-frame labels.
struct SequenceBundle {
  std::string sequence_id;
  std::vector<FrameBundle> frames;
  std::optional<std::vector<LabeledBox>> ground_truth;
};

struct ParseOptions {
  std::optional<double> max_range;  // drop detections beyond this BEV radius
  bool stationary_ego = false;      // synthesize identity poses
};

/// Maximum annotated range of the reference recordings, available as a
/// named filter profile.
constexpr double kDefaultMaxRangeMeters = 52.6;

// --- File formats (CSV, one header line, '#' comments, 17 significant
// digits for floats) ---
//   detections:  frame,class,cx,cy,cz,length,width,height,yaw,score,vx,vy,features
//                (vx, vy, features may be empty; features is ';'-separated)
//   ground truth: detections format with track_id inserted after class
//   ego poses:   frame,x,y,yaw
//   results:     frame,track_id,class,cx,cy,cz,length,width,height,yaw,score

std::vector<FrameBundle> parse_detections(const std::filesystem::path& path);
std::vector<LabeledBox> parse_ground_truth(const std::filesystem::path& path);
std::vector<EgoPose> parse_ego_poses(const std::filesystem::path& path);
std::vector<LabeledBox> parse_results(const std::filesystem::path& path);

/// Assembles detections + ego poses (+ optional ground truth) into a
/// validated bundle. Every frame needs an ego pose unless stationary_ego.
SequenceBundle parse_sequence(const std::filesystem::path& detection_path,
                              const std::filesystem::path& ego_path,
                              const std::optional<std::filesystem::path>& gt_path,
                              const ParseOptions& opts = {});

/// One row per (frame, track), sorted by (frame, track_id); byte-deterministic.
void write_results(const std::vector<TrackOutput>& results,
                   const std::filesystem::path& path);

void write_detections(const std::vector<FrameBundle>& frames,
                      const std::filesystem::path& path,
                      const std::vector<std::string>& header_comments = {});
void write_ground_truth(const std::vector<LabeledBox>& gt,
                        const std::filesystem::path& path,
                        const std::vector<std::string>& header_comments = {});
void write_ego_poses(const std::vector<EgoPose>& poses,
                     const std::filesystem::path& path,
                     const std::vector<std::string>& header_comments = {});

/// JSON document mirroring PipelineConfig field names exactly; unknown keys
/// are rejected (ConfigError). Missing keys keep their default (or preset)
/// values.
PipelineConfig config_from_json_file(const std::filesystem::path& path);
PipelineConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const PipelineConfig& cfg);

std::string report_to_json_text(const EvalReport& report);
std::string report_to_table_text(const EvalReport& report);
void write_report_json(const EvalReport& report,
                       const std::filesystem::path& path);

/// Doubles serialized with 17 significant digits (exact round-trip).
std::string format_double(double v);

}  // namespace mot
