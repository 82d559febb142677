#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "freqkf/core.hpp"
#include "freqkf/kalman.hpp"
#include "freqkf/metrics.hpp"

namespace freqkf::io {

using json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

// Motion files.
//
// Structured (.json):
//   {"format_version": 1, "fps": 50, "joint_names": [...],
//    "frames": [[[x, y, z], ...J...], ...T...]}
// Flat (.csv): optional "# key=value" metadata lines (format_version, fps,
// joint_names separated by ';'), then the header "frame,joint,x,y,z" and one
// row per (frame, joint) in frame-major order.
enum class MotionFormat { Json, Csv };

MotionFormat format_for_path(const std::filesystem::path& path);

json motion_to_json(const MotionSequence& motion);
MotionSequence motion_from_json(const json& doc);
std::string motion_to_csv(const MotionSequence& motion);
MotionSequence motion_from_csv(std::string_view text);

std::string serialize_motion(const MotionSequence& motion, MotionFormat format);
MotionSequence parse_motion(std::string_view text, MotionFormat format);

MotionSequence read_motion(const std::filesystem::path& path);
void write_motion(const std::filesystem::path& path, const MotionSequence& motion);

// Motion files in a directory (.json/.csv), sorted by file name.
std::vector<std::filesystem::path> list_motion_files(const std::filesystem::path& dir);

// Constraint/skeleton file:
//   {"format_version": 1, "joint_count": 17, "joint_names": [...],
//    "parents": [-1, 0, ...], "limb_pairs": [[0, 1], ...],
//    "constraints": [
//      {"name": "LElbow", "type": "bone_bone", "vec1": [tail, head],
//       "vec2": [tail, head], "cos_min": -1, "cos_max": 0.95},
//      {"name": "LLeg2HipPlane", "type": "bone_plane", "vec1": [tail, head],
//       "plane": [a, b, c], "cos_min": -0.5, "cos_max": 0.5}]}
// Joint references may be indices or names listed in joint_names. Without
// explicit limb_pairs, limbs are derived from parents.
Skeleton skeleton_from_json(const json& doc);
json skeleton_to_json(const Skeleton& skeleton);
Skeleton read_skeleton(const std::filesystem::path& path);

// Parts map: {"format_version": 1, "joint_to_part": {"LWrist": "Wrist", ...}}.
// Keys are joint names (or decimal indices). Parts are ordered by their first
// member joint; joints absent from the map are left out.
PartGrouping grouping_from_json(const json& doc, const MotionSequence& motion);
PartGrouping read_parts_map(const std::filesystem::path& path, const MotionSequence& motion);

json config_to_json(const RefinementConfig& config);
// Fields missing from `doc` keep the value they have in `base`.
RefinementConfig config_from_json(const json& doc, RefinementConfig base = {});

json channel_report_to_json(const ChannelReport& report);
std::string channel_reports_csv(std::span<const ChannelReport> reports);

json metric_report_to_json(const MetricReport& report);
json jitter_report_to_json(const JitterReport& report);
std::string jitter_report_csv(const JitterReport& report);

}  // namespace freqkf::io
