#include "freqkf/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "freqkf/io.hpp"
#include "freqkf/kalman.hpp"
#include "freqkf/metrics.hpp"
#include "freqkf/physics.hpp"
#include "freqkf/svg.hpp"
#include "freqkf/synth.hpp"

namespace freqkf::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

// Thrown for flag combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io:
    case ErrorCode::Parse:
      return kIo;
    case ErrorCode::ShapeMismatch:
    case ErrorCode::ChannelCountMismatch:
    case ErrorCode::LengthMismatch:
    case ErrorCode::MisalignedPairs:
    case ErrorCode::TooShort:
      return kShape;
    case ErrorCode::NonFinite:
    case ErrorCode::DegenerateChannel:
      return kNumerical;
    default:
      return kUsage;
  }
}

// Any failure while loading an input file is an input problem.
MotionSequence load_motion(const fs::path& path) {
  try {
    return io::read_motion(path);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io || e.code() == ErrorCode::Parse) throw;
    throw Error(ErrorCode::Parse, e.what());
  }
}

std::vector<MotionSequence> load_dir(const fs::path& dir) {
  std::vector<MotionSequence> out;
  for (const fs::path& p : io::list_motion_files(dir)) out.push_back(load_motion(p));
  return out;
}

json load_json(const fs::path& path) {
  try {
    return json::parse(io::read_text_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
  }
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    io::write_text_file(path, text);
  }
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove(item.begin(), item.end(), ' '), item.end());
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError(what + ": '" + text + "' is not a number");
  }
}

bool all_finite(const MotionSequence& m) {
  const auto d = m.data();
  return std::all_of(d.begin(), d.end(), [](double v) { return std::isfinite(v); });
}

double mse(const MotionSequence& a, const MotionSequence& b) {
  return squared_distance(a, b) / static_cast<double>(a.data().size());
}

std::optional<double> mean_jerk(const MotionSequence& m) {
  if (m.frames() < 4) return std::nullopt;
  const auto profile = jerk_profile(m);
  double acc = 0.0;
  for (double v : profile) acc += v;
  return acc / static_cast<double>(profile.size());
}

// Refinement flags shared by refine, steady-state and compare. Values given on
// the command line override a --config file, which overrides the defaults.
struct ConfigFlags {
  RefinementConfig values;
  std::string mode = std::string(to_string(RefinementMode::Adaptive));
  std::string config_file;
  bool exclude_dc = false;
  std::vector<std::pair<CLI::Option*, std::function<void(RefinementConfig&)>>> setters;

  void add(CLI::App* app, bool with_mode, bool with_filter_flags) {
    auto bind = [&](CLI::Option* opt, auto member) {
      setters.emplace_back(opt, [this, member](RefinementConfig& c) { c.*member = values.*member; });
    };
    if (with_mode) {
      setters.emplace_back(
          app->add_option("--mode", mode, "adaptive | fixed-kalman | fixed-suppress")->capture_default_str(),
          [this](RefinementConfig& c) {
            const auto m = parse_refinement_mode(mode);
            if (!m) throw UsageError("unknown --mode '" + mode + "'");
            c.mode = *m;
          });
    }
    if (with_filter_flags) {
      bind(app->add_option("--k0", values.k0, "first high-frequency bin")->capture_default_str(),
           &RefinementConfig::k0);
      bind(app->add_option("--gamma", values.gamma, "fixed-suppress factor")->capture_default_str(),
           &RefinementConfig::gamma);
      setters.emplace_back(app->add_flag("--exclude-dc", exclude_dc, "leave the DC bin out of rho"),
                           [](RefinementConfig& c) { c.include_dc = false; });
    }
    bind(app->add_option("--q0", values.q0, "base process variance")->capture_default_str(),
         &RefinementConfig::q0);
    bind(app->add_option("--r0", values.r0, "base observation variance")->capture_default_str(),
         &RefinementConfig::r0);
    bind(app->add_option("--lambda-q", values.lambda_q, "process variance SNR gain")->capture_default_str(),
         &RefinementConfig::lambda_q);
    bind(app->add_option("--lambda-r", values.lambda_r, "observation variance SNR gain")
             ->capture_default_str(),
         &RefinementConfig::lambda_r);
    bind(app->add_option("--epsilon", values.epsilon, "stabilising epsilon")->capture_default_str(),
         &RefinementConfig::epsilon);
    app->add_option("--config", config_file, "config JSON (or a refine report) to start from");
  }

  RefinementConfig resolve() const {
    RefinementConfig c;
    if (!config_file.empty()) {
      const json doc = load_json(config_file);
      c = io::config_from_json(doc.contains("config") ? doc["config"] : doc);
    }
    for (const auto& [opt, set] : setters) {
      if (opt->count() > 0) set(c);
    }
    validate_config(c);
    return c;
  }
};

// synth

struct SynthArgs {
  std::string kind = "sinusoid_mix";
  std::size_t frames = 100;
  std::size_t joints = 17;
  double fps = 50.0;
  std::uint64_t seed = 0;
  double noise_ratio = 0.0;
  double noise_sigma = 0.0;
  std::size_t k0 = 10;
  std::size_t band_limit = 10;
  int degree = 3;
  std::string out;
};

fs::path sibling(const fs::path& path, const std::string& tag, const std::string& ext) {
  return path.parent_path() / (path.stem().string() + "." + tag + ext);
}

int run_synth(const SynthArgs& a, CLI::App* app, std::ostream& out) {
  SynthSpec spec;
  const auto kind = parse_synth_kind(a.kind);
  if (!kind) throw UsageError("unknown --kind '" + a.kind + "'");
  spec.kind = *kind;
  spec.frames = a.frames;
  spec.joints = a.joints;
  spec.fps = a.fps;
  spec.seed = a.seed;
  spec.band_limit = a.band_limit;
  spec.polynomial_degree = a.degree;
  const bool ratio = app->get_option("--noise-ratio")->count() > 0;
  const bool sigma = app->get_option("--noise-sigma")->count() > 0;
  if (ratio) spec.noise = HighBandNoise{a.k0, a.noise_ratio};
  if (sigma) spec.noise = WhiteNoise{a.noise_sigma};
  validate_spec(spec);

  const SynthResult result = generate(spec);
  const fs::path clean_path = a.out;
  io::write_motion(clean_path, result.clean);
  json side;
  side["format_version"] = io::kFormatVersion;
  json s;
  s["kind"] = std::string(to_string(spec.kind));
  s["frames"] = spec.frames;
  s["joints"] = spec.joints;
  s["fps"] = spec.fps;
  s["seed"] = spec.seed;
  s["band_limit"] = spec.band_limit;
  if (spec.kind == SynthKind::Polynomial) s["polynomial_degree"] = spec.polynomial_degree;
  if (ratio) s["noise"] = {{"type", "high_band"}, {"k0", a.k0}, {"target_ratio", a.noise_ratio}};
  else if (sigma) s["noise"] = {{"type", "white"}, {"sigma", a.noise_sigma}};
  else s["noise"] = {{"type", "none"}};
  side["spec"] = std::move(s);
  side["rng"] = std::string(kRngDescription);
  side["clean"] = clean_path.filename().string();
  if (result.noisy) {
    const fs::path noisy_path = sibling(clean_path, "noisy", clean_path.extension().string());
    io::write_motion(noisy_path, *result.noisy);
    side["noisy"] = noisy_path.filename().string();
  }
  side["rho_k0"] = result.rho_k0;
  side["rho_of"] = result.noisy ? "noisy" : "clean";
  json channels = json::array();
  for (std::size_t c = 0; c < result.rho.size(); ++c) {
    json row;
    row["joint"] = c / kAxes;
    row["axis"] = std::string(to_string(kAllAxes[c % kAxes]));
    row["rho"] = result.rho[c];
    if (!result.noise_energy.empty()) row["noise_energy"] = result.noise_energy[c];
    channels.push_back(std::move(row));
  }
  side["channels"] = std::move(channels);
  const fs::path side_path = sibling(clean_path, "rho", ".json");
  io::write_text_file(side_path, dump(side));
  out << "wrote " << clean_path.string();
  if (result.noisy) out << ", " << sibling(clean_path, "noisy", clean_path.extension().string()).string();
  out << ", " << side_path.string() << "\n";
  return kOk;
}

// refine

struct RefineArgs {
  std::string input;
  std::string output;
  std::string report;
  std::string report_csv;
  std::size_t threads = 1;
  bool timing = false;
  std::string plot;
  std::size_t plot_joint = 0;
  std::string plot_reference;
  ConfigFlags flags;
};

std::string trajectory_svg(const MotionSequence& input, const MotionSequence& refined,
                           const std::optional<MotionSequence>& reference, std::size_t joint) {
  if (joint >= input.joints()) throw UsageError("--plot-joint out of range");
  std::string doc;
  std::vector<std::string> charts;
  for (Axis axis : kAllAxes) {
    svg::Chart chart;
    chart.title = "joint " + std::to_string(joint) + " " + std::string(to_string(axis));
    chart.x_label = "frame";
    chart.y_label = "position";
    chart.height = 260;
    std::vector<double> frames(input.frames());
    for (std::size_t t = 0; t < frames.size(); ++t) frames[t] = static_cast<double>(t);
    chart.series.push_back({"input", "#1f77b4", false, frames, channel_series(input, joint, axis)});
    chart.series.push_back({"refined", "#d62728", false, frames, channel_series(refined, joint, axis)});
    if (reference) {
      chart.series.push_back({"reference", "#2ca02c", true, frames, channel_series(*reference, joint, axis)});
    }
    charts.push_back(svg::render(chart));
  }
  // Stack the three axis charts vertically in one document.
  const int h = 260;
  doc = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"" + std::to_string(3 * h) + "\">\n";
  for (std::size_t i = 0; i < charts.size(); ++i) {
    doc += "<g transform=\"translate(0," + std::to_string(static_cast<int>(i) * h) + ")\">\n" + charts[i] + "</g>\n";
  }
  doc += "</svg>\n";
  return doc;
}

int run_refine(RefineArgs& a, std::ostream& out) {
  const RefinementConfig cfg = a.flags.resolve();
  std::optional<MotionSequence> reference;
  if (!a.plot_reference.empty()) reference = load_motion(a.plot_reference);
  const MotionSequence input = load_motion(a.input);
  if (reference && !reference->same_shape(input)) {
    throw Error(ErrorCode::ShapeMismatch, "--plot-reference does not match the input shape");
  }

  const auto start = std::chrono::steady_clock::now();
  const MotionRefinement result = refine_motion(input, cfg, RefineOptions{a.threads});
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!all_finite(result.refined)) {
    throw Error(ErrorCode::NonFinite, "refinement produced a non-finite value");
  }
  io::write_motion(a.output, result.refined);

  if (!a.report.empty()) {
    json doc;
    doc["format_version"] = io::kFormatVersion;
    doc["command"] = "refine";
    doc["input"] = fs::path(a.input).filename().string();
    doc["frames"] = input.frames();
    doc["joints"] = input.joints();
    doc["config"] = io::config_to_json(cfg);
    json rows = json::array();
    double rho_sum = 0.0, high = 0.0, high_refined = 0.0;
    for (const ChannelReport& r : result.reports) {
      rows.push_back(io::channel_report_to_json(r));
      rho_sum += r.rho;
      high += r.energy_high;
      high_refined += r.energy_high_refined;
    }
    doc["channels"] = std::move(rows);
    doc["summary"] = {{"mean_rho", rho_sum / static_cast<double>(result.reports.size())},
                      {"energy_high", high},
                      {"energy_high_refined", high_refined},
                      {"mean_jerk_input", mean_jerk(input) ? json(*mean_jerk(input)) : json(nullptr)},
                      {"mean_jerk_refined",
                       mean_jerk(result.refined) ? json(*mean_jerk(result.refined)) : json(nullptr)}};
    if (a.timing) doc["timing"] = {{"refine_seconds", seconds}, {"threads", a.threads}};
    io::write_text_file(a.report, dump(doc));
  }
  if (!a.report_csv.empty()) io::write_text_file(a.report_csv, io::channel_reports_csv(result.reports));
  if (!a.plot.empty()) {
    io::write_text_file(a.plot, trajectory_svg(input, result.refined, reference, a.plot_joint));
  }
  out << "refined " << input.frames() << "x" << input.joints() << " (" << to_string(cfg.mode) << ") -> "
      << a.output << "\n";
  return kOk;
}

// evaluate

struct EvaluateArgs {
  std::string pred_dir;
  std::string gt;
  std::string mm_gt_dir;
  double mm_eps = 0.0;
  std::string past;
  std::string metrics;
  std::string out;
};

int run_evaluate(const EvaluateArgs& a, CLI::App* app, std::ostream& out) {
  const std::vector<MotionSequence> preds = load_dir(a.pred_dir);
  if (preds.empty()) throw UsageError("--pred-dir contains no motion files");

  std::vector<std::string> wanted;
  if (a.metrics.empty()) {
    wanted = {"ade", "fde"};
    if (preds.size() >= 2) wanted.push_back("apd");
    if (!a.mm_gt_dir.empty()) {
      wanted.push_back("mmade");
      wanted.push_back("mmfde");
    }
  } else {
    wanted = split_list(a.metrics);
  }
  const std::vector<std::string> known = {"ade", "fde", "apd", "mmade", "mmfde", "jerk"};
  for (const std::string& m : wanted) {
    if (std::find(known.begin(), known.end(), m) == known.end()) throw UsageError("unknown metric '" + m + "'");
  }
  auto want = [&](const char* m) { return std::find(wanted.begin(), wanted.end(), m) != wanted.end(); };

  MetricReport report;
  report.samples = preds.size();
  report.frames = preds[0].frames();
  report.joints = preds[0].joints();
  for (const MotionSequence& p : preds) {
    if (!p.same_shape(preds[0])) throw Error(ErrorCode::ShapeMismatch, "prediction files differ in shape");
  }

  std::optional<MotionSequence> gt;
  if (want("ade") || want("fde")) {
    if (a.gt.empty()) throw UsageError("ade/fde need --gt");
    gt = load_motion(a.gt);
    report.ade = ade(preds, *gt);
    report.fde = fde(preds, *gt);
    if (!want("ade")) report.ade.reset();
    if (!want("fde")) report.fde.reset();
  }
  if (want("apd")) report.apd = apd(preds);
  if (want("mmade") || want("mmfde")) {
    if (a.mm_gt_dir.empty()) throw UsageError("mmade/mmfde need --mm-gt-dir");
    std::vector<MotionSequence> gt_set;
    if (!a.past.empty()) {
      if (app->get_option("--mm-eps")->count() == 0) throw UsageError("--past needs --mm-eps");
      const MotionSequence query = load_motion(a.past);
      const auto pasts = load_dir(fs::path(a.mm_gt_dir) / "past");
      const auto futures = load_dir(fs::path(a.mm_gt_dir) / "future");
      gt_set = multimodal_gt(pasts, futures, query, a.mm_eps);
    } else {
      gt_set = load_dir(a.mm_gt_dir);
    }
    if (gt_set.empty()) throw Error(ErrorCode::EmptyGtSet, "multimodal ground-truth set is empty");
    report.gt_set_size = gt_set.size();
    if (want("mmade")) report.mmade = mmade(preds, gt_set);
    if (want("mmfde")) report.mmfde = mmfde(preds, gt_set);
  }
  if (want("jerk")) {
    std::vector<double> acc(preds[0].joints(), 0.0);
    for (const MotionSequence& p : preds) {
      const auto profile = jerk_profile(p);
      for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += profile[j];
    }
    for (double& v : acc) v /= static_cast<double>(preds.size());
    report.per_joint_jerk = std::move(acc);
  }
  emit(a.out, dump(io::metric_report_to_json(report)), out);
  return kOk;
}

// jitter

struct JitterArgs {
  std::string base;
  std::string refined;
  std::string parts_map;
  std::string out;
  std::string json_out;
  bool fps_scaled = false;
};

int run_jitter(const JitterArgs& a, std::ostream& out) {
  const MotionSequence base = load_motion(a.base);
  const MotionSequence refined = load_motion(a.refined);
  if (!base.same_shape(refined)) {
    std::ostringstream msg;
    msg << "base is " << base.frames() << "x" << base.joints() << ", refined is " << refined.frames() << "x"
        << refined.joints();
    throw Error(ErrorCode::ShapeMismatch, msg.str());
  }
  PartGrouping grouping;
  if (a.parts_map.empty()) {
    grouping = per_joint_grouping(base);
  } else {
    try {
      grouping = io::read_parts_map(a.parts_map, base);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Io) throw;
      throw Error(ErrorCode::Parse, e.what());
    }
  }
  const JitterReport report =
      jitter_reduction(base, refined, grouping, a.fps_scaled ? JerkUnits::PerSecond : JerkUnits::PerFrame);
  emit(a.out, io::jitter_report_csv(report), out);
  if (!a.json_out.empty()) io::write_text_file(a.json_out, dump(io::jitter_report_to_json(report)));
  return kOk;
}

// steady-state

struct SteadyArgs {
  double q = 0.0;
  double r = 0.0;
  std::string sweep;
  std::string out;
  std::string svg;
  ConfigFlags flags;
};

int run_steady(SteadyArgs& a, CLI::App* app, std::ostream& out) {
  const bool pair = app->get_option("--q")->count() > 0 || app->get_option("--r")->count() > 0;
  if (pair == !a.sweep.empty()) throw UsageError("give either --q and --r, or --sweep-snr");
  if (pair) {
    if (app->get_option("--q")->count() == 0 || app->get_option("--r")->count() == 0) {
      throw UsageError("--q and --r go together");
    }
    validate_params({a.q, a.r});
    std::string text = "q,r,p_star,k_star\n";
    text += io::format_double(a.q) + ',' + io::format_double(a.r) + ',' +
            io::format_double(steady_state_error(a.q, a.r)) + ',' +
            io::format_double(steady_state_gain(a.q, a.r)) + '\n';
    emit(a.out, text, out);
    return kOk;
  }

  const auto parts = [&] {
    std::vector<std::string> v;
    std::stringstream ss(a.sweep);
    std::string item;
    while (std::getline(ss, item, ':')) v.push_back(item);
    return v;
  }();
  if (parts.size() != 3) throw UsageError("--sweep-snr expects lo:hi:n");
  const double lo = parse_double(parts[0], "--sweep-snr lo");
  const double hi = parse_double(parts[1], "--sweep-snr hi");
  const double nd = parse_double(parts[2], "--sweep-snr n");
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi) || !(nd >= 2.0) || nd != std::floor(nd)) {
    throw UsageError("--sweep-snr needs 0 < lo < hi and an integer n >= 2");
  }
  const auto n = static_cast<std::size_t>(nd);
  const RefinementConfig cfg = a.flags.resolve();

  std::vector<double> snrs(n), qs(n), rs(n), ks(n), ps(n);
  std::string text = "snr,q,r,p_star,k_star\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(n - 1);
    snrs[i] = std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)));
    const KalmanParams kp = adaptive_params(snrs[i], cfg);
    validate_params(kp);
    qs[i] = kp.q;
    rs[i] = kp.r;
    ps[i] = steady_state_error(kp.q, kp.r);
    ks[i] = steady_state_gain(kp.q, kp.r);
    text += io::format_double(snrs[i]) + ',' + io::format_double(qs[i]) + ',' + io::format_double(rs[i]) +
            ',' + io::format_double(ps[i]) + ',' + io::format_double(ks[i]) + '\n';
  }
  emit(a.out, text, out);
  if (!a.svg.empty()) {
    svg::Chart chart;
    chart.title = "adaptive parameters vs estimated SNR";
    chart.x_label = "SNR_est";
    chart.y_label = "relative value";
    chart.log_x = true;
    std::vector<double> qn(n), rn(n);
    for (std::size_t i = 0; i < n; ++i) {
      qn[i] = qs[i] / cfg.q0;
      rn[i] = rs[i] / cfg.r0;
    }
    chart.series.push_back({"Q / Q0", "#1f77b4", false, snrs, qn});
    chart.series.push_back({"R / R0", "#d62728", false, snrs, rn});
    chart.series.push_back({"K*", "#2ca02c", true, snrs, ks});
    io::write_text_file(a.svg, svg::render(chart));
  }
  return kOk;
}

// compare

struct CompareArgs {
  std::string input;
  std::string clean;
  std::string gammas = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  std::string out;
  std::size_t threads = 1;
  ConfigFlags flags;
};

int run_compare(CompareArgs& a, std::ostream& out) {
  const RefinementConfig cfg = a.flags.resolve();
  std::vector<double> gammas;
  for (const std::string& g : split_list(a.gammas)) {
    const double v = parse_double(g, "--gammas");
    if (!(v >= 0.0 && v <= 1.0)) throw UsageError("--gammas entries must lie in [0, 1]");
    gammas.push_back(v);
  }
  const MotionSequence noisy = load_motion(a.input);
  const MotionSequence clean = load_motion(a.clean);
  if (!noisy.same_shape(clean)) throw Error(ErrorCode::ShapeMismatch, "--input and --clean differ in shape");

  std::string text = "method,gamma,mse,jerk\n";
  auto row = [&](const std::string& method, const std::string& gamma, const MotionSequence& m) {
    if (!all_finite(m)) throw Error(ErrorCode::NonFinite, method + " produced a non-finite value");
    const auto jerk = mean_jerk(m);
    text += method + ',' + gamma + ',' + io::format_double(mse(m, clean)) + ',' +
            (jerk ? io::format_double(*jerk) : "") + '\n';
  };
  const RefineOptions options{a.threads};
  row("raw", "", noisy);
  for (double g : gammas) {
    RefinementConfig c = cfg;
    c.mode = RefinementMode::FixedSuppress;
    c.gamma = g;
    row("fixed_suppress", io::format_double(g), refine_motion(noisy, c, options).refined);
  }
  RefinementConfig fk = cfg;
  fk.mode = RefinementMode::FixedKalman;
  row("fixed_kalman", "", refine_motion(noisy, fk, options).refined);
  RefinementConfig ad = cfg;
  ad.mode = RefinementMode::Adaptive;
  row("adaptive", "", refine_motion(noisy, ad, options).refined);
  emit(a.out, text, out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frequency-domain Kalman refinement of 3D motion sequences", "freqkf"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "freqkf 1.0");

  SynthArgs sa;
  CLI::App* synth = app.add_subcommand("synth", "generate synthetic clean and noisy motion");
  synth->add_option("--kind", sa.kind, "sinusoid_mix | polynomial | walk_like")->capture_default_str();
  synth->add_option("--frames", sa.frames)->capture_default_str();
  synth->add_option("--joints", sa.joints)->capture_default_str();
  synth->add_option("--fps", sa.fps)->capture_default_str();
  synth->add_option("--seed", sa.seed)->capture_default_str();
  auto* ratio_opt = synth->add_option("--noise-ratio", sa.noise_ratio, "target high-band energy ratio");
  synth->add_option("--noise-sigma", sa.noise_sigma, "white noise standard deviation")->excludes(ratio_opt);
  synth->add_option("--k0", sa.k0, "first noisy bin for --noise-ratio")->capture_default_str();
  synth->add_option("--band-limit", sa.band_limit, "sinusoid_mix frequency bound")->capture_default_str();
  synth->add_option("--degree", sa.degree, "polynomial degree")->capture_default_str();
  synth->add_option("--out", sa.out, "clean output file (.json or .csv)")->required();

  RefineArgs ra;
  CLI::App* refine = app.add_subcommand("refine", "refine a motion file");
  refine->add_option("--input", ra.input)->required();
  refine->add_option("--output", ra.output)->required();
  ra.flags.add(refine, true, true);
  refine->add_option("--report", ra.report, "run report JSON");
  refine->add_option("--report-csv", ra.report_csv, "per-channel report CSV");
  refine->add_option("--threads", ra.threads, "worker threads, 0 = hardware")->capture_default_str();
  refine->add_flag("--timing", ra.timing, "add wall-clock timing to the report");
  refine->add_option("--plot", ra.plot, "trajectory SVG");
  refine->add_option("--plot-joint", ra.plot_joint)->capture_default_str();
  refine->add_option("--plot-reference", ra.plot_reference, "extra motion drawn dashed in the plot");

  EvaluateArgs ea;
  CLI::App* evaluate = app.add_subcommand("evaluate", "prediction metrics");
  evaluate->add_option("--pred-dir", ea.pred_dir, "directory of K sample files")->required();
  evaluate->add_option("--gt", ea.gt, "ground-truth future");
  evaluate->add_option("--mm-gt-dir", ea.mm_gt_dir,
                       "multimodal ground truths, or past/ and future/ subdirectories with --past");
  evaluate->add_option("--mm-eps", ea.mm_eps, "clustering threshold on past distance");
  evaluate->add_option("--past", ea.past, "observed past used to cluster --mm-gt-dir");
  evaluate->add_option("--metrics", ea.metrics, "comma list of ade,fde,apd,mmade,mmfde,jerk");
  evaluate->add_option("--out", ea.out, "report JSON (stdout if omitted)");

  JitterArgs ja;
  CLI::App* jitter = app.add_subcommand("jitter", "jerk of base vs refined motion");
  jitter->add_option("--base", ja.base)->required();
  jitter->add_option("--refined", ja.refined)->required();
  jitter->add_option("--parts-map", ja.parts_map, "joint to body-part JSON");
  jitter->add_option("--out", ja.out, "CSV table (stdout if omitted)");
  jitter->add_option("--json", ja.json_out, "JSON copy of the table");
  jitter->add_flag("--fps-scaled", ja.fps_scaled, "report jerk per second cubed");

  SteadyArgs sta;
  CLI::App* steady = app.add_subcommand("steady-state", "steady-state covariance and gain");
  steady->add_option("--q", sta.q, "process variance");
  steady->add_option("--r", sta.r, "observation variance");
  steady->add_option("--sweep-snr", sta.sweep, "lo:hi:n log-spaced SNR sweep");
  sta.flags.add(steady, false, false);
  steady->add_option("--out", sta.out, "CSV table (stdout if omitted)");
  steady->add_option("--svg", sta.svg, "sweep chart");

  CompareArgs ca;
  CLI::App* compare = app.add_subcommand("compare", "adaptive vs fixed suppression against a clean oracle");
  compare->add_option("--input", ca.input, "noisy motion")->required();
  compare->add_option("--clean", ca.clean, "clean oracle motion")->required();
  compare->add_option("--gammas", ca.gammas, "comma list of suppression factors")->capture_default_str();
  ca.flags.add(compare, false, true);
  compare->add_option("--threads", ca.threads)->capture_default_str();
  compare->add_option("--out", ca.out, "CSV table (stdout if omitted)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*synth) return run_synth(sa, synth, out);
    if (*refine) return run_refine(ra, out);
    if (*evaluate) return run_evaluate(ea, evaluate, out);
    if (*jitter) return run_jitter(ja, out);
    if (*steady) return run_steady(sta, steady, out);
    if (*compare) return run_compare(ca, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}

}  // namespace freqkf::cli
