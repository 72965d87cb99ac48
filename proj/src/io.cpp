#include "mot/io.hpp"

#include "mot/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace mot {

using nlohmann::json;

namespace {

constexpr const char* kDetectionHeader =
    "frame,class,cx,cy,cz,length,width,height,yaw,score,vx,vy,features";
constexpr const char* kGroundTruthHeader =
    "frame,class,track_id,cx,cy,cz,length,width,height,yaw,score,vx,vy,"
    "features";
constexpr const char* kEgoHeader = "frame,x,y,yaw";
constexpr const char* kResultHeader =
    "frame,track_id,class,cx,cy,cz,length,width,height,yaw,score";

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

struct LineContext {
  const std::filesystem::path& path;
  int line_no;

  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError(path.string() + ":" + std::to_string(line_no) + ": " +
                     msg);
  }
};

double parse_field_double(const std::string& s, const char* name,
                          const LineContext& ctx) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || s.empty()) {
    ctx.fail(std::string("field '") + name + "': invalid number '" + s + "'");
  }
  return v;
}

long long parse_field_int(const std::string& s, const char* name,
                          const LineContext& ctx) {
  long long v = 0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || s.empty()) {
    ctx.fail(std::string("field '") + name + "': invalid integer '" + s +
             "'");
  }
  return v;
}

ClassId parse_field_class(const std::string& s, const LineContext& ctx) {
  const auto c = class_from_name(s);
  if (!c) ctx.fail("field 'class': unknown class '" + s + "'");
  return *c;
}

// Shared box columns: cx cy cz length width height yaw score [vx vy features]
Box3D parse_box_fields(const std::vector<std::string>& f, std::size_t offset,
                       ClassId cls, const LineContext& ctx,
                       bool with_optional) {
  Box3D b;
  b.class_id = cls;
  b.cx = parse_field_double(f[offset + 0], "cx", ctx);
  b.cy = parse_field_double(f[offset + 1], "cy", ctx);
  b.cz = parse_field_double(f[offset + 2], "cz", ctx);
  b.length = parse_field_double(f[offset + 3], "length", ctx);
  b.width = parse_field_double(f[offset + 4], "width", ctx);
  b.height = parse_field_double(f[offset + 5], "height", ctx);
  b.yaw = parse_field_double(f[offset + 6], "yaw", ctx);
  b.score = parse_field_double(f[offset + 7], "score", ctx);
  if (b.yaw > kPi || b.yaw <= -kPi) {
    // Radians only; a degree-valued file fails here instead of being
    // silently wrapped.
    ctx.fail("field 'yaw': must be radians in (-pi, pi]");
  }
  if (b.length <= 0.0) ctx.fail("field 'length': must be positive");
  if (b.width <= 0.0) ctx.fail("field 'width': must be positive");
  if (b.height <= 0.0) ctx.fail("field 'height': must be positive");
  if (b.score < 0.0 || b.score > 1.0) {
    ctx.fail("field 'score': must be in [0, 1]");
  }
  if (!with_optional) return b;

  const std::string& vx = f[offset + 8];
  const std::string& vy = f[offset + 9];
  if (vx.empty() != vy.empty()) {
    ctx.fail("fields 'vx'/'vy': must both be present or both empty");
  }
  if (!vx.empty()) {
    b.velocity = Vec2(parse_field_double(vx, "vx", ctx),
                      parse_field_double(vy, "vy", ctx));
  }
  const std::string& feat = f[offset + 10];
  if (!feat.empty()) {
    std::vector<double> vals;
    std::string cur;
    std::stringstream ss(feat);
    while (std::getline(ss, cur, ';')) {
      vals.push_back(parse_field_double(trim(cur), "features", ctx));
    }
    if (vals.empty()) ctx.fail("field 'features': empty list");
    VecX fv(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) {
      fv(static_cast<Eigen::Index>(i)) = vals[i];
    }
    b.feature = fv;
  }
  return b;
}

/// Iterates data lines of a CSV file: skips '#' comments and blank lines,
/// checks the single header line, then calls fn(fields, ctx) per row.
template <typename Fn>
void for_each_row(const std::filesystem::path& path, const char* header,
                  std::size_t n_fields, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    LineContext ctx{path, line_no};
    if (!header_seen) {
      if (t != header) {
        ctx.fail(std::string("expected header '") + header + "'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = split_csv(t);
    if (fields.size() != n_fields) {
      ctx.fail("expected " + std::to_string(n_fields) + " fields, got " +
               std::to_string(fields.size()));
    }
    fn(fields, ctx);
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<FrameBundle> parse_detections(const std::filesystem::path& path) {
  std::map<int, std::vector<Box3D>> by_frame;
  for_each_row(path, kDetectionHeader, 13,
               [&](const std::vector<std::string>& f, const LineContext& ctx) {
                 const int frame =
                     static_cast<int>(parse_field_int(f[0], "frame", ctx));
                 const ClassId cls = parse_field_class(f[1], ctx);
                 by_frame[frame].push_back(
                     parse_box_fields(f, 2, cls, ctx, true));
               });
  std::vector<FrameBundle> frames;
  for (auto& [idx, dets] : by_frame) {
    FrameBundle fb;
    fb.frame_index = idx;
    fb.detections = std::move(dets);
    fb.ego.frame_index = idx;
    frames.push_back(std::move(fb));
  }
  return frames;
}

std::vector<LabeledBox> parse_ground_truth(const std::filesystem::path& path) {
  std::vector<LabeledBox> rows;
  std::set<std::pair<int, long long>> seen;
  for_each_row(path, kGroundTruthHeader, 14,
               [&](const std::vector<std::string>& f, const LineContext& ctx) {
                 LabeledBox r;
                 r.frame = static_cast<int>(parse_field_int(f[0], "frame", ctx));
                 const ClassId cls = parse_field_class(f[1], ctx);
                 r.track_id = parse_field_int(f[2], "track_id", ctx);
                 if (!seen.insert({r.frame, r.track_id}).second) {
                   ctx.fail("duplicate (frame, track_id) = (" +
                            std::to_string(r.frame) + ", " +
                            std::to_string(r.track_id) + ")");
                 }
                 r.box = parse_box_fields(f, 3, cls, ctx, true);
                 rows.push_back(std::move(r));
               });
  return rows;
}

std::vector<EgoPose> parse_ego_poses(const std::filesystem::path& path) {
  std::vector<EgoPose> poses;
  for_each_row(path, kEgoHeader, 4,
               [&](const std::vector<std::string>& f, const LineContext& ctx) {
                 EgoPose p;
                 p.frame_index =
                     static_cast<int>(parse_field_int(f[0], "frame", ctx));
                 p.x = parse_field_double(f[1], "x", ctx);
                 p.y = parse_field_double(f[2], "y", ctx);
                 p.yaw = parse_field_double(f[3], "yaw", ctx);
                 if (!poses.empty() &&
                     p.frame_index <= poses.back().frame_index) {
                   ctx.fail("frame indices must be strictly increasing");
                 }
                 poses.push_back(p);
               });
  return poses;
}

std::vector<LabeledBox> parse_results(const std::filesystem::path& path) {
  std::vector<LabeledBox> rows;
  std::set<std::pair<int, long long>> seen;
  for_each_row(path, kResultHeader, 11,
               [&](const std::vector<std::string>& f, const LineContext& ctx) {
                 LabeledBox r;
                 r.frame = static_cast<int>(parse_field_int(f[0], "frame", ctx));
                 r.track_id = parse_field_int(f[1], "track_id", ctx);
                 if (!seen.insert({r.frame, r.track_id}).second) {
                   ctx.fail("duplicate (frame, track_id) = (" +
                            std::to_string(r.frame) + ", " +
                            std::to_string(r.track_id) + ")");
                 }
                 const ClassId cls = parse_field_class(f[2], ctx);
                 r.box = parse_box_fields(f, 3, cls, ctx, false);
                 rows.push_back(std::move(r));
               });
  return rows;
}

SequenceBundle parse_sequence(const std::filesystem::path& detection_path,
                              const std::filesystem::path& ego_path,
                              const std::optional<std::filesystem::path>& gt_path,
                              const ParseOptions& opts) {
  SequenceBundle bundle;
  bundle.sequence_id = detection_path.stem().string();

  std::vector<FrameBundle> det_frames = parse_detections(detection_path);
  if (opts.max_range) {
    const double r2 = *opts.max_range * *opts.max_range;
    for (FrameBundle& fb : det_frames) {
      std::erase_if(fb.detections, [&](const Box3D& d) {
        return d.center2d().squaredNorm() > r2;
      });
    }
  }

  if (opts.stationary_ego) {
    // Identity poses over the detection frame range.
    if (!det_frames.empty()) {
      const int lo = det_frames.front().frame_index;
      const int hi = det_frames.back().frame_index;
      std::map<int, FrameBundle> by_frame;
      for (FrameBundle& fb : det_frames) by_frame[fb.frame_index] = std::move(fb);
      for (int f = lo; f <= hi; ++f) {
        FrameBundle fb;
        auto it = by_frame.find(f);
        if (it != by_frame.end()) {
          fb = std::move(it->second);
        } else {
          fb.frame_index = f;
        }
        fb.ego = EgoPose{f, 0.0, 0.0, 0.0};
        bundle.frames.push_back(std::move(fb));
      }
    }
  } else {
    const std::vector<EgoPose> poses = parse_ego_poses(ego_path);
    std::map<int, std::vector<Box3D>> dets_by_frame;
    for (FrameBundle& fb : det_frames) {
      dets_by_frame[fb.frame_index] = std::move(fb.detections);
    }
    std::set<int> pose_frames;
    for (const EgoPose& p : poses) pose_frames.insert(p.frame_index);
    for (const auto& [f, _] : dets_by_frame) {
      if (!pose_frames.count(f)) {
        throw InputError("missing ego pose for frame " + std::to_string(f) +
                         " in '" + ego_path.string() + "'");
      }
    }
    for (const EgoPose& p : poses) {
      FrameBundle fb;
      fb.frame_index = p.frame_index;
      fb.ego = p;
      auto it = dets_by_frame.find(p.frame_index);
      if (it != dets_by_frame.end()) fb.detections = std::move(it->second);
      bundle.frames.push_back(std::move(fb));
    }
  }

  if (gt_path) bundle.ground_truth = parse_ground_truth(*gt_path);
  return bundle;
}

namespace {

void write_box_fields(std::ostream& out, const Box3D& b, bool with_optional) {
  out << format_double(b.cx) << ',' << format_double(b.cy) << ','
      << format_double(b.cz) << ',' << format_double(b.length) << ','
      << format_double(b.width) << ',' << format_double(b.height) << ','
      << format_double(b.yaw) << ',' << format_double(b.score);
  if (!with_optional) return;
  out << ',';
  if (b.velocity) {
    out << format_double((*b.velocity)(0)) << ','
        << format_double((*b.velocity)(1));
  } else {
    out << ',';
  }
  out << ',';
  if (b.feature) {
    for (Eigen::Index i = 0; i < b.feature->size(); ++i) {
      if (i > 0) out << ';';
      out << format_double((*b.feature)(i));
    }
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // LF everywhere
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

void write_comments(std::ofstream& out,
                    const std::vector<std::string>& comments) {
  for (const std::string& c : comments) out << "# " << c << '\n';
}

}  // namespace

void write_results(const std::vector<TrackOutput>& results,
                   const std::filesystem::path& path) {
  std::vector<TrackOutput> rows = results;
  std::sort(rows.begin(), rows.end(),
            [](const TrackOutput& a, const TrackOutput& b) {
              return a.frame != b.frame ? a.frame < b.frame
                                        : a.track_id < b.track_id;
            });
  auto out = open_out(path);
  out << kResultHeader << '\n';
  for (const TrackOutput& r : rows) {
    out << r.frame << ',' << r.track_id << ',' << class_name(r.box.class_id)
        << ',';
    write_box_fields(out, r.box, false);
    out << '\n';
  }
}

void write_detections(const std::vector<FrameBundle>& frames,
                      const std::filesystem::path& path,
                      const std::vector<std::string>& header_comments) {
  auto out = open_out(path);
  write_comments(out, header_comments);
  out << kDetectionHeader << '\n';
  for (const FrameBundle& fb : frames) {
    for (const Box3D& d : fb.detections) {
      out << fb.frame_index << ',' << class_name(d.class_id) << ',';
      write_box_fields(out, d, true);
      out << '\n';
    }
  }
}

void write_ground_truth(const std::vector<LabeledBox>& gt,
                        const std::filesystem::path& path,
                        const std::vector<std::string>& header_comments) {
  std::vector<LabeledBox> rows = gt;
  std::sort(rows.begin(), rows.end(),
            [](const LabeledBox& a, const LabeledBox& b) {
              return a.frame != b.frame ? a.frame < b.frame
                                        : a.track_id < b.track_id;
            });
  auto out = open_out(path);
  write_comments(out, header_comments);
  out << kGroundTruthHeader << '\n';
  for (const LabeledBox& r : rows) {
    out << r.frame << ',' << class_name(r.box.class_id) << ',' << r.track_id
        << ',';
    write_box_fields(out, r.box, true);
    out << '\n';
  }
}

void write_ego_poses(const std::vector<EgoPose>& poses,
                     const std::filesystem::path& path,
                     const std::vector<std::string>& header_comments) {
  auto out = open_out(path);
  write_comments(out, header_comments);
  out << kEgoHeader << '\n';
  for (const EgoPose& p : poses) {
    out << p.frame_index << ',' << format_double(p.x) << ','
        << format_double(p.y) << ',' << format_double(p.yaw) << '\n';
  }
}

// --- configuration JSON ---

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& ctx) {
  if (!j.is_object()) throw ConfigError(ctx + ": expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError(ctx + ": unknown key '" + key + "'");
    }
  }
}

double get_number(const json& j, const char* key, double fallback,
                  const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) {
    throw ConfigError(ctx + "." + key + ": expected a number");
  }
  return j[key].get<double>();
}

int get_int(const json& j, const char* key, int fallback,
            const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) {
    throw ConfigError(ctx + "." + key + ": expected an integer");
  }
  return j[key].get<int>();
}

bool get_bool(const json& j, const char* key, bool fallback,
              const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) {
    throw ConfigError(ctx + "." + key + ": expected a boolean");
  }
  return j[key].get<bool>();
}

std::string get_string(const json& j, const char* key,
                       const std::string& fallback, const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) {
    throw ConfigError(ctx + "." + key + ": expected a string");
  }
  return j[key].get<std::string>();
}

PerClass<double> get_per_class(const json& j, const char* key,
                               PerClass<double> fallback,
                               const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  const json& p = j[key];
  check_keys(p, {"car", "pedestrian", "cyclist"}, ctx + "." + key);
  fallback.car = get_number(p, "car", fallback.car, ctx);
  fallback.pedestrian = get_number(p, "pedestrian", fallback.pedestrian, ctx);
  fallback.cyclist = get_number(p, "cyclist", fallback.cyclist, ctx);
  return fallback;
}

}  // namespace

PipelineConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid config JSON: ") + e.what());
  }
  PipelineConfig cfg;
  check_keys(j,
             {"preprocessing", "motion", "noise", "init", "similarity",
              "assignment", "pcgda", "lifecycle", "ego_mode", "frame_period",
              "emit_raw_detection", "emit_predictions"},
             "config");

  if (j.contains("preprocessing")) {
    const json& p = j["preprocessing"];
    check_keys(p,
               {"mode", "score_threshold", "nms_iou_threshold",
                "nms_score_floor"},
               "preprocessing");
    const std::string mode = get_string(p, "mode", "score_threshold",
                                        "preprocessing");
    if (mode == "score_threshold") {
      cfg.preprocessing.mode = PreprocessMode::ScoreThreshold;
    } else if (mode == "nms") {
      cfg.preprocessing.mode = PreprocessMode::Nms;
    } else {
      throw ConfigError("preprocessing.mode: expected 'score_threshold' or "
                        "'nms', got '" + mode + "'");
    }
    cfg.preprocessing.score_threshold = get_per_class(
        p, "score_threshold", cfg.preprocessing.score_threshold,
        "preprocessing");
    cfg.preprocessing.nms_iou_threshold = get_number(
        p, "nms_iou_threshold", cfg.preprocessing.nms_iou_threshold,
        "preprocessing");
    cfg.preprocessing.nms_score_floor = get_number(
        p, "nms_score_floor", cfg.preprocessing.nms_score_floor,
        "preprocessing");
  }

  if (j.contains("motion")) {
    const std::string m = get_string(j, "motion", "kf_cv", "config");
    if (m == "kf_cv") {
      cfg.motion = MotionKind::CV;
    } else if (m == "kf_ca") {
      cfg.motion = MotionKind::CA;
    } else if (m == "lom") {
      cfg.motion = MotionKind::LoM;
    } else {
      throw ConfigError("motion: expected 'kf_cv', 'kf_ca' or 'lom', got '" +
                        m + "'");
    }
  }

  if (j.contains("noise")) {
    const json& p = j["noise"];
    check_keys(p,
               {"q_pos", "q_size", "q_yaw", "q_vel", "q_acc", "r_pos",
                "r_size", "r_yaw"},
               "noise");
    cfg.noise.q_pos = get_number(p, "q_pos", cfg.noise.q_pos, "noise");
    cfg.noise.q_size = get_number(p, "q_size", cfg.noise.q_size, "noise");
    cfg.noise.q_yaw = get_number(p, "q_yaw", cfg.noise.q_yaw, "noise");
    cfg.noise.q_vel = get_number(p, "q_vel", cfg.noise.q_vel, "noise");
    cfg.noise.q_acc = get_number(p, "q_acc", cfg.noise.q_acc, "noise");
    cfg.noise.r_pos = get_number(p, "r_pos", cfg.noise.r_pos, "noise");
    cfg.noise.r_size = get_number(p, "r_size", cfg.noise.r_size, "noise");
    cfg.noise.r_yaw = get_number(p, "r_yaw", cfg.noise.r_yaw, "noise");
  }

  if (j.contains("init")) {
    const json& p = j["init"];
    check_keys(p, {"pos_var", "vel_var", "size_var", "yaw_var", "acc_var"},
               "init");
    cfg.init.pos_var = get_number(p, "pos_var", cfg.init.pos_var, "init");
    cfg.init.vel_var = get_number(p, "vel_var", cfg.init.vel_var, "init");
    cfg.init.size_var = get_number(p, "size_var", cfg.init.size_var, "init");
    cfg.init.yaw_var = get_number(p, "yaw_var", cfg.init.yaw_var, "init");
    cfg.init.acc_var = get_number(p, "acc_var", cfg.init.acc_var, "init");
  }

  if (j.contains("similarity")) {
    const json& p = j["similarity"];
    check_keys(p,
               {"metric", "iou_gate", "giou_gate", "center_gate", "maha_gate",
                "p_d", "all_per_detection_pd", "all_printed_sign",
                "apc_weights", "apc_gate_radius"},
               "similarity");
    if (p.contains("metric")) {
      const std::string m = get_string(p, "metric", "iou", "similarity");
      const auto metric = metric_from_name(m);
      if (!metric) {
        throw ConfigError("similarity.metric: unknown metric '" + m + "'");
      }
      cfg.similarity.metric = *metric;
    }
    cfg.similarity.iou_gate =
        get_number(p, "iou_gate", cfg.similarity.iou_gate, "similarity");
    cfg.similarity.giou_gate =
        get_number(p, "giou_gate", cfg.similarity.giou_gate, "similarity");
    cfg.similarity.center_gate = get_per_class(
        p, "center_gate", cfg.similarity.center_gate, "similarity");
    cfg.similarity.maha_gate =
        get_number(p, "maha_gate", cfg.similarity.maha_gate, "similarity");
    cfg.similarity.p_d = get_number(p, "p_d", cfg.similarity.p_d, "similarity");
    cfg.similarity.all_per_detection_pd =
        get_bool(p, "all_per_detection_pd", cfg.similarity.all_per_detection_pd,
                 "similarity");
    cfg.similarity.all_printed_sign = get_bool(
        p, "all_printed_sign", cfg.similarity.all_printed_sign, "similarity");
    if (p.contains("apc_weights")) {
      const json& w = p["apc_weights"];
      if (!w.is_array() || w.size() != 3) {
        throw ConfigError("similarity.apc_weights: expected an array of 3");
      }
      for (int i = 0; i < 3; ++i) {
        if (!w[i].is_number()) {
          throw ConfigError("similarity.apc_weights: expected numbers");
        }
        cfg.similarity.apc_weights(i) = w[i].get<double>();
      }
    }
    cfg.similarity.apc_gate_radius = get_number(
        p, "apc_gate_radius", cfg.similarity.apc_gate_radius, "similarity");
  }

  if (j.contains("assignment")) {
    const std::string a = get_string(j, "assignment", "hungarian", "config");
    if (a == "hungarian") {
      cfg.assignment = AssignerKind::Hungarian;
    } else if (a == "greedy") {
      cfg.assignment = AssignerKind::Greedy;
    } else if (a == "pcgda") {
      cfg.assignment = AssignerKind::Pcgda;
    } else {
      throw ConfigError(
          "assignment: expected 'hungarian', 'greedy' or 'pcgda', got '" + a +
          "'");
    }
  }

  if (j.contains("pcgda")) {
    const json& p = j["pcgda"];
    check_keys(p, {"r_min", "r_max"}, "pcgda");
    cfg.pcgda.r_min = get_number(p, "r_min", cfg.pcgda.r_min, "pcgda");
    cfg.pcgda.r_max = get_number(p, "r_max", cfg.pcgda.r_max, "pcgda");
  }

  if (j.contains("lifecycle")) {
    const json& p = j["lifecycle"];
    check_keys(p,
               {"policy", "max_age", "min_hits", "low_score_floor",
                "high_score_threshold", "rescue_updates_state"},
               "lifecycle");
    const std::string pol = get_string(p, "policy", "count_based",
                                       "lifecycle");
    if (pol == "count_based") {
      cfg.lifecycle.policy = LifecyclePolicy::CountBased;
    } else if (pol == "two_stage") {
      cfg.lifecycle.policy = LifecyclePolicy::TwoStage;
    } else {
      throw ConfigError("lifecycle.policy: expected 'count_based' or "
                        "'two_stage', got '" + pol + "'");
    }
    cfg.lifecycle.max_age = get_int(p, "max_age", cfg.lifecycle.max_age,
                                    "lifecycle");
    cfg.lifecycle.min_hits = get_int(p, "min_hits", cfg.lifecycle.min_hits,
                                     "lifecycle");
    cfg.lifecycle.low_score_floor = get_number(
        p, "low_score_floor", cfg.lifecycle.low_score_floor, "lifecycle");
    cfg.lifecycle.high_score_threshold =
        get_number(p, "high_score_threshold",
                   cfg.lifecycle.high_score_threshold, "lifecycle");
    cfg.lifecycle.rescue_updates_state =
        get_bool(p, "rescue_updates_state", cfg.lifecycle.rescue_updates_state,
                 "lifecycle");
  }

  if (j.contains("ego_mode")) {
    const std::string e = get_string(j, "ego_mode", "provided_poses",
                                     "config");
    if (e == "provided_poses") {
      cfg.ego_mode = EgoMode::ProvidedPoses;
    } else if (e == "stationary") {
      cfg.ego_mode = EgoMode::Stationary;
    } else {
      throw ConfigError(
          "ego_mode: expected 'provided_poses' or 'stationary', got '" + e +
          "'");
    }
  }

  cfg.frame_period = get_number(j, "frame_period", cfg.frame_period, "config");
  cfg.emit_raw_detection =
      get_bool(j, "emit_raw_detection", cfg.emit_raw_detection, "config");
  cfg.emit_predictions =
      get_bool(j, "emit_predictions", cfg.emit_predictions, "config");

  cfg.validate();
  return cfg;
}

PipelineConfig config_from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

std::string config_to_json_text(const PipelineConfig& cfg) {
  json j;
  j["preprocessing"] = {
      {"mode", cfg.preprocessing.mode == PreprocessMode::Nms
                   ? "nms"
                   : "score_threshold"},
      {"score_threshold",
       {{"car", cfg.preprocessing.score_threshold.car},
        {"pedestrian", cfg.preprocessing.score_threshold.pedestrian},
        {"cyclist", cfg.preprocessing.score_threshold.cyclist}}},
      {"nms_iou_threshold", cfg.preprocessing.nms_iou_threshold},
      {"nms_score_floor", cfg.preprocessing.nms_score_floor}};
  j["motion"] = cfg.motion == MotionKind::CA
                    ? "kf_ca"
                    : (cfg.motion == MotionKind::LoM ? "lom" : "kf_cv");
  j["noise"] = {{"q_pos", cfg.noise.q_pos},   {"q_size", cfg.noise.q_size},
                {"q_yaw", cfg.noise.q_yaw},   {"q_vel", cfg.noise.q_vel},
                {"q_acc", cfg.noise.q_acc},   {"r_pos", cfg.noise.r_pos},
                {"r_size", cfg.noise.r_size}, {"r_yaw", cfg.noise.r_yaw}};
  j["init"] = {{"pos_var", cfg.init.pos_var},
               {"vel_var", cfg.init.vel_var},
               {"size_var", cfg.init.size_var},
               {"yaw_var", cfg.init.yaw_var},
               {"acc_var", cfg.init.acc_var}};
  j["similarity"] = {
      {"metric", metric_name(cfg.similarity.metric)},
      {"iou_gate", cfg.similarity.iou_gate},
      {"giou_gate", cfg.similarity.giou_gate},
      {"center_gate",
       {{"car", cfg.similarity.center_gate.car},
        {"pedestrian", cfg.similarity.center_gate.pedestrian},
        {"cyclist", cfg.similarity.center_gate.cyclist}}},
      {"maha_gate", cfg.similarity.maha_gate},
      {"p_d", cfg.similarity.p_d},
      {"all_per_detection_pd", cfg.similarity.all_per_detection_pd},
      {"all_printed_sign", cfg.similarity.all_printed_sign},
      {"apc_weights",
       {cfg.similarity.apc_weights(0), cfg.similarity.apc_weights(1),
        cfg.similarity.apc_weights(2)}},
      {"apc_gate_radius", cfg.similarity.apc_gate_radius}};
  j["assignment"] = cfg.assignment == AssignerKind::Hungarian
                        ? "hungarian"
                        : (cfg.assignment == AssignerKind::Greedy ? "greedy"
                                                                  : "pcgda");
  j["pcgda"] = {{"r_min", cfg.pcgda.r_min}, {"r_max", cfg.pcgda.r_max}};
  j["lifecycle"] = {
      {"policy", cfg.lifecycle.policy == LifecyclePolicy::TwoStage
                     ? "two_stage"
                     : "count_based"},
      {"max_age", cfg.lifecycle.max_age},
      {"min_hits", cfg.lifecycle.min_hits},
      {"low_score_floor", cfg.lifecycle.low_score_floor},
      {"high_score_threshold", cfg.lifecycle.high_score_threshold},
      {"rescue_updates_state", cfg.lifecycle.rescue_updates_state}};
  j["ego_mode"] = cfg.ego_mode == EgoMode::Stationary ? "stationary"
                                                      : "provided_poses";
  j["frame_period"] = cfg.frame_period;
  j["emit_raw_detection"] = cfg.emit_raw_detection;
  j["emit_predictions"] = cfg.emit_predictions;
  return j.dump(2) + "\n";
}

// --- evaluation report output ---

namespace {

json scores_to_json(const ClassReport& r) {
  json j;
  j["mota"] = r.clear.mota ? json(*r.clear.mota) : json(nullptr);
  j["motp"] = r.clear.motp ? json(*r.clear.motp) : json(nullptr);
  j["ids"] = r.clear.ids;
  j["fp_t"] = r.clear.fp_t;
  j["fn_t"] = r.clear.fn_t;
  j["num_gt"] = r.clear.num_gt;
  j["deta"] = r.hota.deta;
  j["assa"] = r.hota.assa;
  j["hota"] = r.hota.hota;
  j["tp"] = r.hota.tp;
  j["fp"] = r.hota.fp;
  j["fn"] = r.hota.fn;
  j["zero_tp"] = r.hota.zero_tp;
  return j;
}

std::string pct(std::optional<double> v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", *v * 100.0);
  return buf;
}

}  // namespace

std::string report_to_json_text(const EvalReport& report) {
  json j;
  j["match"] = report.config.mode == MatchMode::IoU ? "iou" : "center";
  j["alpha"] = report.config.alpha;
  for (const auto& [cls, r] : report.per_class) {
    j["per_class"][class_name(cls)] = scores_to_json(r);
  }
  j["overall"] = scores_to_json(report.overall);
  if (!report.alpha_curve.empty()) {
    json curve = json::array();
    for (const AlphaPoint& p : report.alpha_curve) {
      curve.push_back({{"alpha", p.alpha},
                       {"deta", p.deta},
                       {"assa", p.assa},
                       {"hota", p.hota}});
    }
    j["alpha_curve"] = curve;
    j["hota_alpha_average"] = *report.hota_alpha_average;
  }
  return j.dump(2) + "\n";
}

std::string report_to_table_text(const EvalReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-12s %8s %8s %8s %8s %8s %6s %6s %6s %8s\n",
                "class", "HOTA[%]", "DetA[%]", "AssA[%]", "MOTA[%]",
                "MOTP[%]", "IDS", "FP", "FN", "num_gt");
  out << line;
  auto row = [&](const std::string& name, const ClassReport& r) {
    std::snprintf(line, sizeof(line),
                  "%-12s %8s %8s %8s %8s %8s %6lld %6lld %6lld %8lld\n",
                  name.c_str(), pct(r.hota.hota).c_str(),
                  pct(r.hota.deta).c_str(), pct(r.hota.assa).c_str(),
                  pct(r.clear.mota).c_str(), pct(r.clear.motp).c_str(),
                  r.clear.ids, r.clear.fp_t, r.clear.fn_t, r.clear.num_gt);
    out << line;
  };
  for (const auto& [cls, r] : report.per_class) row(class_name(cls), r);
  row("overall", report.overall);
  if (report.hota_alpha_average) {
    std::snprintf(line, sizeof(line),
                  "HOTA averaged over alpha sweep: %.2f%%\n",
                  *report.hota_alpha_average * 100.0);
    out << line;
  }
  return out.str();
}

void write_report_json(const EvalReport& report,
                       const std::filesystem::path& path) {
  auto out = open_out(path);
  out << report_to_json_text(report);
}

}  // namespace mot
