#include "freqkf/core.hpp"

#include <cmath>
#include <sstream>

namespace freqkf {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ChannelCountMismatch: return "ChannelCountMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::EmptySpectrum: return "EmptySpectrum";
    case ErrorCode::EmptyObservations: return "EmptyObservations";
    case ErrorCode::NonPositiveVariance: return "NonPositiveVariance";
    case ErrorCode::CutoffOutOfRange: return "CutoffOutOfRange";
    case ErrorCode::GammaOutOfRange: return "GammaOutOfRange";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidSkeleton: return "InvalidSkeleton";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::NoConstraints: return "NoConstraints";
    case ErrorCode::LengthCountMismatch: return "LengthCountMismatch";
    case ErrorCode::EmptySampleSet: return "EmptySampleSet";
    case ErrorCode::NeedTwoSamples: return "NeedTwoSamples";
    case ErrorCode::EmptyGtSet: return "EmptyGtSet";
    case ErrorCode::MisalignedPairs: return "MisalignedPairs";
    case ErrorCode::DegenerateChannel: return "DegenerateChannel";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

std::string_view to_string(Axis axis) {
  switch (axis) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
  }
  return "?";
}

MotionSequence::MotionSequence(std::size_t frames, std::size_t joints, std::vector<double> data,
                               double fps, std::vector<std::string> joint_names)
    : frames_(frames),
      joints_(joints),
      data_(std::move(data)),
      fps_(fps),
      joint_names_(std::move(joint_names)) {}

MotionSequence MotionSequence::zeros(std::size_t frames, std::size_t joints, double fps) {
  return MotionSequence(frames, joints, std::vector<double>(frames * joints * kAxes, 0.0), fps);
}

std::optional<Error> validate(const MotionSequence& motion) {
  if (motion.frames() < 1 || motion.joints() < 1) {
    return Error(ErrorCode::ShapeMismatch, "motion needs at least one frame and one joint");
  }
  if (motion.data().size() != motion.frames() * motion.joints() * kAxes) {
    std::ostringstream msg;
    msg << "expected " << motion.frames() << "x" << motion.joints() << "x3 = "
        << motion.frames() * motion.joints() * kAxes << " values, got " << motion.data().size();
    return Error(ErrorCode::ShapeMismatch, msg.str());
  }
  if (!motion.joint_names().empty() && motion.joint_names().size() != motion.joints()) {
    return Error(ErrorCode::ShapeMismatch, "joint_names length differs from joint count");
  }
  if (!(motion.fps() > 0.0) || !std::isfinite(motion.fps())) {
    return Error(ErrorCode::ShapeMismatch, "fps must be positive and finite");
  }
  const auto data = motion.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      const std::size_t per_frame = motion.joints() * kAxes;
      std::ostringstream msg;
      msg << "non-finite value at frame " << i / per_frame << ", joint " << (i % per_frame) / kAxes
          << ", axis " << to_string(static_cast<Axis>(i % kAxes));
      return Error(ErrorCode::NonFinite, msg.str());
    }
  }
  return std::nullopt;
}

void require_valid(const MotionSequence& motion) {
  if (auto err = validate(motion)) throw *err;
}

std::vector<double> channel_series(const MotionSequence& motion, std::size_t joint, Axis axis) {
  std::vector<double> series(motion.frames());
  const auto d = static_cast<std::size_t>(axis);
  for (std::size_t t = 0; t < motion.frames(); ++t) series[t] = motion.at(t, joint, d);
  return series;
}

std::vector<Channel> split_channels(const MotionSequence& motion) {
  require_valid(motion);
  std::vector<Channel> channels;
  channels.reserve(motion.channels());
  for (std::size_t j = 0; j < motion.joints(); ++j) {
    for (Axis axis : kAllAxes) {
      channels.push_back(Channel{j, axis, channel_series(motion, j, axis)});
    }
  }
  return channels;
}

MotionSequence reassemble(std::span<const Channel> channels, std::size_t joints, std::size_t frames,
                          double fps, std::vector<std::string> joint_names) {
  if (channels.size() != joints * kAxes) {
    std::ostringstream msg;
    msg << "expected " << joints * kAxes << " channels for " << joints << " joints, got "
        << channels.size();
    throw Error(ErrorCode::ChannelCountMismatch, msg.str());
  }
  std::vector<double> data(frames * joints * kAxes, 0.0);
  std::vector<bool> seen(channels.size(), false);
  for (const Channel& ch : channels) {
    if (ch.series.size() != frames) {
      std::ostringstream msg;
      msg << "channel (" << ch.joint_index << ", " << to_string(ch.axis) << ") has length "
          << ch.series.size() << ", expected " << frames;
      throw Error(ErrorCode::LengthMismatch, msg.str());
    }
    if (ch.joint_index >= joints) {
      throw Error(ErrorCode::ChannelCountMismatch, "channel joint index out of range");
    }
    const std::size_t slot = channel_index(ch.joint_index, ch.axis);
    if (seen[slot]) throw Error(ErrorCode::ChannelCountMismatch, "duplicate channel");
    seen[slot] = true;
    const auto d = static_cast<std::size_t>(ch.axis);
    for (std::size_t t = 0; t < frames; ++t) {
      data[(t * joints + ch.joint_index) * kAxes + d] = ch.series[t];
    }
  }
  return MotionSequence(frames, joints, std::move(data), fps, std::move(joint_names));
}

std::vector<std::pair<std::size_t, std::size_t>> Skeleton::limbs_from_parents(
    std::span<const int> parents) {
  std::vector<std::pair<std::size_t, std::size_t>> limbs;
  for (std::size_t j = 0; j < parents.size(); ++j) {
    if (parents[j] != kRoot) limbs.emplace_back(static_cast<std::size_t>(parents[j]), j);
  }
  return limbs;
}

namespace {

void check_index(std::size_t index, std::size_t joint_count, const std::string& where) {
  if (index >= joint_count) {
    std::ostringstream msg;
    msg << where << ": joint index " << index << " out of range for " << joint_count << " joints";
    throw Error(ErrorCode::InvalidSkeleton, msg.str());
  }
}

}  // namespace

void validate_skeleton(const Skeleton& skeleton) {
  const std::size_t n = skeleton.joint_count;
  if (n == 0) throw Error(ErrorCode::InvalidSkeleton, "joint_count must be positive");
  if (!skeleton.joint_names.empty() && skeleton.joint_names.size() != n) {
    throw Error(ErrorCode::InvalidSkeleton, "joint_names length differs from joint_count");
  }
  if (!skeleton.parents.empty()) {
    if (skeleton.parents.size() != n) {
      throw Error(ErrorCode::InvalidSkeleton, "parents length differs from joint_count");
    }
    bool has_root = false;
    for (std::size_t j = 0; j < n; ++j) {
      const int p = skeleton.parents[j];
      if (p == Skeleton::kRoot) {
        has_root = true;
      } else if (p < 0 || static_cast<std::size_t>(p) >= n) {
        throw Error(ErrorCode::InvalidSkeleton, "parent index out of range");
      }
    }
    if (!has_root) throw Error(ErrorCode::InvalidSkeleton, "parent graph has no root");
    // Walking up from any joint must reach a root within n steps.
    for (std::size_t j = 0; j < n; ++j) {
      int cur = static_cast<int>(j);
      std::size_t steps = 0;
      while (cur != Skeleton::kRoot) {
        if (++steps > n) throw Error(ErrorCode::InvalidSkeleton, "parent graph has a cycle");
        cur = skeleton.parents[static_cast<std::size_t>(cur)];
      }
    }
  }
  for (const auto& [a, b] : skeleton.limb_pairs) {
    check_index(a, n, "limb pair");
    check_index(b, n, "limb pair");
  }
  for (const AngleConstraint& c : skeleton.angle_constraints) {
    const std::string where = "constraint '" + c.name + "'";
    check_index(c.vec1.first, n, where);
    check_index(c.vec1.second, n, where);
    if (c.kind == AngleConstraint::Kind::BoneBone) {
      check_index(c.vec2.first, n, where);
      check_index(c.vec2.second, n, where);
    } else {
      for (std::size_t idx : c.plane) check_index(idx, n, where);
    }
    if (!(c.cos_min >= -1.0 && c.cos_max <= 1.0 && c.cos_min <= c.cos_max)) {
      throw Error(ErrorCode::InvalidSkeleton,
                  where + ": need -1 <= cos_min <= cos_max <= 1");
    }
  }
}

std::string_view to_string(RefinementMode mode) {
  switch (mode) {
    case RefinementMode::Adaptive: return "adaptive";
    case RefinementMode::FixedKalman: return "fixed-kalman";
    case RefinementMode::FixedSuppress: return "fixed-suppress";
  }
  return "?";
}

std::optional<RefinementMode> parse_refinement_mode(std::string_view text) {
  if (text == "adaptive") return RefinementMode::Adaptive;
  if (text == "fixed-kalman" || text == "fixed_kalman") return RefinementMode::FixedKalman;
  if (text == "fixed-suppress" || text == "fixed_suppress") return RefinementMode::FixedSuppress;
  return std::nullopt;
}

void validate_config(const RefinementConfig& config) {
  auto bad = [](const char* what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (!(config.q0 > 0.0) || !std::isfinite(config.q0)) bad("q0 must be positive and finite");
  if (!(config.r0 > 0.0) || !std::isfinite(config.r0)) bad("r0 must be positive and finite");
  if (!(config.lambda_q >= 0.0) || !std::isfinite(config.lambda_q)) bad("lambda_q must be >= 0");
  if (!(config.lambda_r >= 0.0) || !std::isfinite(config.lambda_r)) bad("lambda_r must be >= 0");
  if (!(config.epsilon > 0.0) || !std::isfinite(config.epsilon)) bad("epsilon must be positive");
  if (!(config.gamma >= 0.0 && config.gamma <= 1.0)) {
    throw Error(ErrorCode::GammaOutOfRange, "gamma must lie in [0, 1]");
  }
}

}  // namespace freqkf
