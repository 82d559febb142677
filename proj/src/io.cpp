#include "freqkf/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

namespace freqkf::io {

namespace fs = std::filesystem;

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::Io, "read failed for '" + path.string() + "'");
  return ss.str();
}

void write_text_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

MotionFormat format_for_path(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".csv" ? MotionFormat::Csv : MotionFormat::Json;
}

namespace {

// Plain frame,joint,x,y,z files carry no rate.
constexpr double kDefaultCsvFps = 50.0;

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::Parse, what); }

double parse_number(std::string_view text, const std::string& where) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    parse_error(where + ": '" + std::string(text) + "' is not a number");
  }
  return value;
}

std::size_t parse_index(std::string_view text, const std::string& where) {
  const double v = parse_number(text, where);
  if (!(v >= 0.0) || v != std::floor(v)) parse_error(where + ": expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void check_version(const json& doc, const char* what) {
  if (!doc.is_object()) parse_error(std::string(what) + ": expected a JSON object");
  if (doc.contains("format_version")) {
    if (!doc["format_version"].is_number_integer() || doc["format_version"].get<int>() != kFormatVersion) {
      parse_error(std::string(what) + ": unsupported format_version");
    }
  }
}

template <typename T>
T get_or(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    parse_error(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

json motion_to_json(const MotionSequence& motion) {
  require_valid(motion);
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["fps"] = motion.fps();
  if (!motion.joint_names().empty()) doc["joint_names"] = motion.joint_names();
  json frames = json::array();
  for (std::size_t t = 0; t < motion.frames(); ++t) {
    json pose = json::array();
    for (std::size_t j = 0; j < motion.joints(); ++j) {
      pose.push_back(json::array({motion.at(t, j, 0), motion.at(t, j, 1), motion.at(t, j, 2)}));
    }
    frames.push_back(std::move(pose));
  }
  doc["frames"] = std::move(frames);
  return doc;
}

MotionSequence motion_from_json(const json& doc) {
  check_version(doc, "motion file");
  const double fps = get_or<double>(doc, "fps", 0.0);
  const auto names = get_or<std::vector<std::string>>(doc, "joint_names", {});
  if (!doc.contains("frames") || !doc["frames"].is_array()) parse_error("motion file: missing 'frames' array");
  const json& frames = doc["frames"];
  if (frames.empty()) parse_error("motion file: no frames");
  if (!frames[0].is_array()) parse_error("motion file: frame 0 is not an array");
  const std::size_t joints = frames[0].size();
  std::vector<double> data;
  data.reserve(frames.size() * joints * kAxes);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const json& pose = frames[t];
    if (!pose.is_array() || pose.size() != joints) {
      std::ostringstream msg;
      msg << "motion file: frame " << t << " does not have " << joints << " joints";
      throw Error(ErrorCode::ShapeMismatch, msg.str());
    }
    for (std::size_t j = 0; j < joints; ++j) {
      const json& p = pose[j];
      if (!p.is_array() || p.size() != kAxes) {
        std::ostringstream msg;
        msg << "motion file: frame " << t << ", joint " << j << " is not an [x, y, z] triple";
        throw Error(ErrorCode::ShapeMismatch, msg.str());
      }
      for (const json& v : p) {
        if (!v.is_number()) parse_error("motion file: coordinate is not a number");
        data.push_back(v.get<double>());
      }
    }
  }
  MotionSequence motion(frames.size(), joints, std::move(data), fps, names);
  require_valid(motion);
  return motion;
}

std::string motion_to_csv(const MotionSequence& motion) {
  require_valid(motion);
  std::string out;
  out += "# format_version=" + std::to_string(kFormatVersion) + "\n";
  out += "# fps=" + format_double(motion.fps()) + "\n";
  if (!motion.joint_names().empty()) {
    out += "# joint_names=";
    for (std::size_t j = 0; j < motion.joints(); ++j) {
      if (j) out += ';';
      out += motion.joint_names()[j];
    }
    out += '\n';
  }
  out += "frame,joint,x,y,z\n";
  for (std::size_t t = 0; t < motion.frames(); ++t) {
    for (std::size_t j = 0; j < motion.joints(); ++j) {
      out += std::to_string(t) + ',' + std::to_string(j);
      for (std::size_t d = 0; d < kAxes; ++d) out += ',' + format_double(motion.at(t, j, d));
      out += '\n';
    }
  }
  return out;
}

MotionSequence motion_from_csv(std::string_view text) {
  double fps = kDefaultCsvFps;
  std::vector<std::string> names;
  bool header_seen = false;
  // rows[t][j] -> xyz
  std::vector<std::vector<std::array<double, 3>>> rows;
  std::vector<std::vector<bool>> present;
  std::size_t line_no = 0;

  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const std::string where = "csv line " + std::to_string(line_no);
    if (line.front() == '#') {
      line.remove_prefix(1);
      while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) continue;
      const std::string_view key = line.substr(0, eq);
      const std::string_view value = line.substr(eq + 1);
      if (key == "fps") {
        fps = parse_number(value, where);
      } else if (key == "joint_names") {
        for (std::string_view n : split(value, ';')) names.emplace_back(n);
      } else if (key == "format_version") {
        if (parse_index(value, where) != static_cast<std::size_t>(kFormatVersion)) {
          parse_error(where + ": unsupported format_version");
        }
      }
      continue;
    }
    if (!header_seen) {
      std::string h(line);
      h.erase(std::remove(h.begin(), h.end(), ' '), h.end());
      if (h != "frame,joint,x,y,z") parse_error(where + ": expected header 'frame,joint,x,y,z'");
      header_seen = true;
      continue;
    }
    const auto cols = split(line, ',');
    if (cols.size() != 5) parse_error(where + ": expected 5 columns");
    const std::size_t t = parse_index(cols[0], where);
    const std::size_t j = parse_index(cols[1], where);
    if (t >= rows.size()) {
      rows.resize(t + 1);
      present.resize(t + 1);
    }
    if (j >= rows[t].size()) {
      rows[t].resize(j + 1);
      present[t].resize(j + 1, false);
    }
    if (present[t][j]) parse_error(where + ": duplicate (frame, joint) row");
    present[t][j] = true;
    for (std::size_t d = 0; d < kAxes; ++d) rows[t][j][d] = parse_number(cols[2 + d], where);
  }
  if (!header_seen) parse_error("csv: missing header row");
  if (rows.empty()) parse_error("csv: no data rows");
  const std::size_t joints = rows[0].size();
  std::vector<double> data;
  data.reserve(rows.size() * joints * kAxes);
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const bool complete = rows[t].size() == joints &&
                          std::all_of(present[t].begin(), present[t].end(), [](bool b) { return b; });
    if (!complete) {
      throw Error(ErrorCode::ShapeMismatch,
                  "csv: frame " + std::to_string(t) + " does not have " + std::to_string(joints) + " joints");
    }
    for (const auto& p : rows[t]) data.insert(data.end(), p.begin(), p.end());
  }
  MotionSequence motion(rows.size(), joints, std::move(data), fps, std::move(names));
  require_valid(motion);
  return motion;
}

std::string serialize_motion(const MotionSequence& motion, MotionFormat format) {
  if (format == MotionFormat::Csv) return motion_to_csv(motion);
  return motion_to_json(motion).dump(1) + "\n";
}

MotionSequence parse_motion(std::string_view text, MotionFormat format) {
  if (format == MotionFormat::Csv) return motion_from_csv(text);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    parse_error(std::string("motion file: ") + e.what());
  }
  return motion_from_json(doc);
}

MotionSequence read_motion(const fs::path& path) {
  try {
    return parse_motion(read_text_file(path), format_for_path(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_motion(const fs::path& path, const MotionSequence& motion) {
  write_text_file(path, serialize_motion(motion, format_for_path(path)));
}

std::vector<fs::path> list_motion_files(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::Io, "'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext == ".json" || ext == ".csv") files.push_back(entry.path());
  }
  if (ec) throw Error(ErrorCode::Io, "cannot list '" + dir.string() + "': " + ec.message());
  std::sort(files.begin(), files.end());
  return files;
}

namespace {

std::size_t joint_ref(const json& v, const std::vector<std::string>& names, std::size_t joint_count,
                      const std::string& where) {
  if (v.is_number_integer() && v.get<long long>() >= 0) {
    const auto idx = v.get<std::size_t>();
    if (idx >= joint_count) parse_error(where + ": joint index out of range");
    return idx;
  }
  if (v.is_string()) {
    const auto it = std::find(names.begin(), names.end(), v.get<std::string>());
    if (it == names.end()) parse_error(where + ": unknown joint '" + v.get<std::string>() + "'");
    return static_cast<std::size_t>(it - names.begin());
  }
  parse_error(where + ": joint reference must be an index or a name");
}

std::pair<std::size_t, std::size_t> joint_pair(const json& v, const std::vector<std::string>& names,
                                               std::size_t n, const std::string& where) {
  if (!v.is_array() || v.size() != 2) parse_error(where + ": expected a [tail, head] pair");
  return {joint_ref(v[0], names, n, where), joint_ref(v[1], names, n, where)};
}

}  // namespace

Skeleton skeleton_from_json(const json& doc) {
  check_version(doc, "constraint file");
  Skeleton sk;
  sk.joint_names = get_or<std::vector<std::string>>(doc, "joint_names", {});
  sk.joint_count = get_or<std::size_t>(doc, "joint_count", sk.joint_names.size());
  if (sk.joint_count == 0) parse_error("constraint file: joint_count missing");
  sk.parents = get_or<std::vector<int>>(doc, "parents", {});
  if (doc.contains("limb_pairs")) {
    for (const json& p : doc["limb_pairs"]) {
      sk.limb_pairs.push_back(joint_pair(p, sk.joint_names, sk.joint_count, "limb_pairs"));
    }
  } else {
    for (const auto& [a, b] : Skeleton::limbs_from_parents(sk.parents)) {
      if (a >= sk.joint_count || b >= sk.joint_count) parse_error("parents: index out of range");
      sk.limb_pairs.emplace_back(a, b);
    }
  }
  if (doc.contains("constraints")) {
    if (!doc["constraints"].is_array()) parse_error("constraint file: 'constraints' must be an array");
    for (const json& c : doc["constraints"]) {
      AngleConstraint ac;
      ac.name = get_or<std::string>(c, "name", "");
      const std::string where = "constraint '" + ac.name + "'";
      const std::string type = get_or<std::string>(c, "type", "bone_bone");
      if (!c.contains("vec1")) parse_error(where + ": missing vec1");
      ac.vec1 = joint_pair(c["vec1"], sk.joint_names, sk.joint_count, where);
      if (type == "bone_bone") {
        ac.kind = AngleConstraint::Kind::BoneBone;
        if (!c.contains("vec2")) parse_error(where + ": missing vec2");
        ac.vec2 = joint_pair(c["vec2"], sk.joint_names, sk.joint_count, where);
      } else if (type == "bone_plane") {
        ac.kind = AngleConstraint::Kind::BonePlane;
        if (!c.contains("plane") || !c["plane"].is_array() || c["plane"].size() != 3) {
          parse_error(where + ": bone_plane needs a 3-joint 'plane'");
        }
        for (std::size_t i = 0; i < 3; ++i) {
          ac.plane[i] = joint_ref(c["plane"][i], sk.joint_names, sk.joint_count, where);
        }
      } else {
        parse_error(where + ": unknown type '" + type + "'");
      }
      ac.cos_min = get_or<double>(c, "cos_min", -1.0);
      ac.cos_max = get_or<double>(c, "cos_max", 1.0);
      sk.angle_constraints.push_back(std::move(ac));
    }
  }
  validate_skeleton(sk);
  return sk;
}

json skeleton_to_json(const Skeleton& skeleton) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["joint_count"] = skeleton.joint_count;
  if (!skeleton.joint_names.empty()) doc["joint_names"] = skeleton.joint_names;
  if (!skeleton.parents.empty()) doc["parents"] = skeleton.parents;
  json limbs = json::array();
  for (const auto& [a, b] : skeleton.limb_pairs) limbs.push_back({a, b});
  doc["limb_pairs"] = std::move(limbs);
  json constraints = json::array();
  for (const AngleConstraint& c : skeleton.angle_constraints) {
    json e;
    e["name"] = c.name;
    e["vec1"] = {c.vec1.first, c.vec1.second};
    if (c.kind == AngleConstraint::Kind::BoneBone) {
      e["type"] = "bone_bone";
      e["vec2"] = {c.vec2.first, c.vec2.second};
    } else {
      e["type"] = "bone_plane";
      e["plane"] = {c.plane[0], c.plane[1], c.plane[2]};
    }
    e["cos_min"] = c.cos_min;
    e["cos_max"] = c.cos_max;
    constraints.push_back(std::move(e));
  }
  doc["constraints"] = std::move(constraints);
  return doc;
}

Skeleton read_skeleton(const fs::path& path) {
  try {
    return skeleton_from_json(json::parse(read_text_file(path)));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
  }
}

PartGrouping grouping_from_json(const json& doc, const MotionSequence& motion) {
  check_version(doc, "parts map");
  if (!doc.contains("joint_to_part") || !doc["joint_to_part"].is_object()) {
    parse_error("parts map: missing 'joint_to_part' object");
  }
  const auto& names = motion.joint_names();
  std::vector<std::optional<std::string>> part_of(motion.joints());
  for (const auto& [key, value] : doc["joint_to_part"].items()) {
    if (!value.is_string()) parse_error("parts map: part for '" + key + "' is not a string");
    std::size_t j = motion.joints();
    const auto it = std::find(names.begin(), names.end(), key);
    if (it != names.end()) {
      j = static_cast<std::size_t>(it - names.begin());
    } else {
      std::size_t idx = 0;
      const auto res = std::from_chars(key.data(), key.data() + key.size(), idx);
      if (res.ec == std::errc() && res.ptr == key.data() + key.size()) j = idx;
    }
    if (j >= motion.joints()) parse_error("parts map: unknown joint '" + key + "'");
    part_of[j] = value.get<std::string>();
  }
  PartGrouping g;
  for (std::size_t j = 0; j < motion.joints(); ++j) {
    if (!part_of[j]) continue;
    const auto it = std::find(g.parts.begin(), g.parts.end(), *part_of[j]);
    if (it == g.parts.end()) {
      g.parts.push_back(*part_of[j]);
      g.members.push_back({j});
    } else {
      g.members[static_cast<std::size_t>(it - g.parts.begin())].push_back(j);
    }
  }
  return g;
}

PartGrouping read_parts_map(const fs::path& path, const MotionSequence& motion) {
  try {
    return grouping_from_json(json::parse(read_text_file(path)), motion);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
  }
}

json config_to_json(const RefinementConfig& config) {
  json doc;
  doc["mode"] = std::string(to_string(config.mode));
  doc["k0"] = config.k0;
  doc["q0"] = config.q0;
  doc["r0"] = config.r0;
  doc["lambda_q"] = config.lambda_q;
  doc["lambda_r"] = config.lambda_r;
  doc["epsilon"] = config.epsilon;
  doc["gamma"] = config.gamma;
  doc["include_dc"] = config.include_dc;
  return doc;
}

RefinementConfig config_from_json(const json& doc, RefinementConfig base) {
  if (!doc.is_object()) parse_error("config: expected a JSON object");
  if (doc.contains("mode")) {
    const auto mode = parse_refinement_mode(get_or<std::string>(doc, "mode", ""));
    if (!mode) parse_error("config: unknown mode");
    base.mode = *mode;
  }
  base.k0 = get_or<std::size_t>(doc, "k0", base.k0);
  base.q0 = get_or<double>(doc, "q0", base.q0);
  base.r0 = get_or<double>(doc, "r0", base.r0);
  base.lambda_q = get_or<double>(doc, "lambda_q", base.lambda_q);
  base.lambda_r = get_or<double>(doc, "lambda_r", base.lambda_r);
  base.epsilon = get_or<double>(doc, "epsilon", base.epsilon);
  base.gamma = get_or<double>(doc, "gamma", base.gamma);
  base.include_dc = get_or<bool>(doc, "include_dc", base.include_dc);
  return base;
}

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string optional_csv(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

json channel_report_to_json(const ChannelReport& r) {
  json doc;
  doc["joint"] = r.joint_index;
  doc["axis"] = std::string(to_string(r.axis));
  doc["rho"] = r.rho;
  doc["snr_est"] = r.snr_est;
  doc["q"] = optional_number(r.q);
  doc["r"] = optional_number(r.r);
  doc["steady_state_p"] = optional_number(r.steady_state_p);
  doc["steady_state_k"] = optional_number(r.steady_state_k);
  doc["energy_total"] = r.energy_total;
  doc["energy_high"] = r.energy_high;
  doc["energy_high_refined"] = r.energy_high_refined;
  return doc;
}

std::string channel_reports_csv(std::span<const ChannelReport> reports) {
  std::string out =
      "joint,axis,rho,snr_est,q,r,steady_state_p,steady_state_k,energy_total,energy_high,"
      "energy_high_refined\n";
  for (const ChannelReport& r : reports) {
    out += std::to_string(r.joint_index) + ',' + std::string(to_string(r.axis)) + ',' +
           format_double(r.rho) + ',' + format_double(r.snr_est) + ',' + optional_csv(r.q) + ',' +
           optional_csv(r.r) + ',' + optional_csv(r.steady_state_p) + ',' +
           optional_csv(r.steady_state_k) + ',' + format_double(r.energy_total) + ',' +
           format_double(r.energy_high) + ',' + format_double(r.energy_high_refined) + '\n';
  }
  return out;
}

json metric_report_to_json(const MetricReport& report) {
  json doc;
  doc["format_version"] = kFormatVersion;
  json metrics = json::object();
  if (report.apd) metrics["apd"] = *report.apd;
  if (report.ade) metrics["ade"] = *report.ade;
  if (report.fde) metrics["fde"] = *report.fde;
  if (report.mmade) metrics["mmade"] = *report.mmade;
  if (report.mmfde) metrics["mmfde"] = *report.mmfde;
  if (report.per_joint_jerk) metrics["per_joint_jerk"] = *report.per_joint_jerk;
  doc["metrics"] = std::move(metrics);
  doc["samples"] = report.samples;
  doc["gt_set_size"] = report.gt_set_size;
  doc["frames"] = report.frames;
  doc["joints"] = report.joints;
  return doc;
}

json jitter_report_to_json(const JitterReport& report) {
  json doc;
  doc["format_version"] = kFormatVersion;
  json rows = json::array();
  for (const JitterRow& r : report.rows) {
    rows.push_back({{"part", r.label},
                    {"base", r.base},
                    {"refined", r.refined},
                    {"reduction_pct", optional_number(r.reduction_pct)}});
  }
  doc["rows"] = std::move(rows);
  doc["mean_base"] = report.mean_base;
  doc["mean_refined"] = report.mean_refined;
  doc["mean_reduction_pct"] = optional_number(report.mean_reduction_pct);
  return doc;
}

std::string jitter_report_csv(const JitterReport& report) {
  std::string out = "body_part,base,refined,reduction_pct\n";
  for (const JitterRow& r : report.rows) {
    out += r.label + ',' + format_double(r.base) + ',' + format_double(r.refined) + ',' +
           optional_csv(r.reduction_pct) + '\n';
  }
  out += "Average," + format_double(report.mean_base) + ',' + format_double(report.mean_refined) +
         ',' + optional_csv(report.mean_reduction_pct) + '\n';
  return out;
}

}  // namespace freqkf::io
