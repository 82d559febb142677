#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "freqkf/error.hpp"

namespace freqkf {

enum class Axis : std::size_t { x = 0, y = 1, z = 2 };

inline constexpr std::size_t kAxes = 3;
inline constexpr std::array<Axis, kAxes> kAllAxes{Axis::x, Axis::y, Axis::z};

std::string_view to_string(Axis axis);

// Dense T x J x 3 array of joint positions, stored frame-major
// (index = (t * J + j) * 3 + d). Units are opaque.
//
// Construction does not validate; call validate() or require_valid() before
// trusting a sequence that came from outside the library.
class MotionSequence {
 public:
  MotionSequence() = default;
  MotionSequence(std::size_t frames, std::size_t joints, std::vector<double> data, double fps,
                 std::vector<std::string> joint_names = {});

  // Zero-filled sequence of the given shape.
  static MotionSequence zeros(std::size_t frames, std::size_t joints, double fps);

  std::size_t frames() const noexcept { return frames_; }
  std::size_t joints() const noexcept { return joints_; }
  std::size_t channels() const noexcept { return joints_ * kAxes; }
  double fps() const noexcept { return fps_; }
  const std::vector<std::string>& joint_names() const noexcept { return joint_names_; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  std::size_t index(std::size_t t, std::size_t j, std::size_t d) const noexcept {
    return (t * joints_ + j) * kAxes + d;
  }
  double at(std::size_t t, std::size_t j, std::size_t d) const { return data_[index(t, j, d)]; }
  double& at(std::size_t t, std::size_t j, std::size_t d) { return data_[index(t, j, d)]; }

  std::array<double, 3> position(std::size_t t, std::size_t j) const {
    const std::size_t i = index(t, j, 0);
    return {data_[i], data_[i + 1], data_[i + 2]};
  }

  // Same shape/metadata as another sequence.
  bool same_shape(const MotionSequence& other) const noexcept {
    return frames_ == other.frames_ && joints_ == other.joints_;
  }

  bool operator==(const MotionSequence& other) const = default;

 private:
  std::size_t frames_ = 0;
  std::size_t joints_ = 0;
  std::vector<double> data_;
  double fps_ = 0.0;
  std::vector<std::string> joint_names_;
};

// Returns the first invariant violation, or nullopt when the sequence is valid.
std::optional<Error> validate(const MotionSequence& motion);

// Throws the violation reported by validate().
void require_valid(const MotionSequence& motion);

// One (joint, axis) scalar time series.
struct Channel {
  std::size_t joint_index = 0;
  Axis axis = Axis::x;
  std::vector<double> series;

  bool operator==(const Channel&) const = default;
};

// Channel position in the canonical joint-major, then x/y/z ordering.
constexpr std::size_t channel_index(std::size_t joint, Axis axis) noexcept {
  return joint * kAxes + static_cast<std::size_t>(axis);
}

std::vector<Channel> split_channels(const MotionSequence& motion);

std::vector<double> channel_series(const MotionSequence& motion, std::size_t joint, Axis axis);

MotionSequence reassemble(std::span<const Channel> channels, std::size_t joints, std::size_t frames,
                          double fps, std::vector<std::string> joint_names = {});

struct AngleConstraint {
  enum class Kind { BoneBone, BonePlane };

  std::string name;
  Kind kind = Kind::BoneBone;
  // (tail, head) joint indices; the vector is head - tail.
  std::pair<std::size_t, std::size_t> vec1{0, 0};
  // Second bone for BoneBone.
  std::pair<std::size_t, std::size_t> vec2{0, 0};
  // Plane through joints (a, b, c) for BonePlane; its normal is (b-a) x (c-a).
  std::array<std::size_t, 3> plane{0, 0, 0};
  double cos_min = -1.0;
  double cos_max = 1.0;
};

struct Skeleton {
  static constexpr int kRoot = -1;

  std::size_t joint_count = 0;
  std::vector<int> parents;  // empty means "no topology given"
  std::vector<std::pair<std::size_t, std::size_t>> limb_pairs;
  std::vector<AngleConstraint> angle_constraints;
  std::vector<std::string> joint_names;

  // Limb pairs derived from the parent links, in joint order.
  static std::vector<std::pair<std::size_t, std::size_t>> limbs_from_parents(
      std::span<const int> parents);
};

// Throws InvalidSkeleton on a cyclic/rootless parent graph, out-of-range
// indices or inverted cosine bounds.
void validate_skeleton(const Skeleton& skeleton);

enum class RefinementMode { Adaptive, FixedKalman, FixedSuppress };

std::string_view to_string(RefinementMode mode);
std::optional<RefinementMode> parse_refinement_mode(std::string_view text);

struct RefinementConfig {
  std::size_t k0 = 10;
  double q0 = 1e-6;
  double r0 = 1e-2;
  double lambda_q = 0.2;
  double lambda_r = 0.5;
  double epsilon = 1e-8;
  RefinementMode mode = RefinementMode::Adaptive;
  double gamma = 0.5;
  bool include_dc = true;

  bool operator==(const RefinementConfig&) const = default;
};

// Throws InvalidConfig (or GammaOutOfRange) when a field is out of its domain.
void validate_config(const RefinementConfig& config);

}  // namespace freqkf
