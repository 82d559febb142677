#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "freqkf/core.hpp"

namespace freqkf {

// Average pairwise L1 distance, 2/(K(K-1)) sum_{j<k} ||Y_j - Y_k||_1.
// Throws NeedTwoSamples / ShapeMismatch.
double apd(std::span<const MotionSequence> samples);

// Per-frame error is the Frobenius norm of the J x 3 difference.
// Both throw EmptySampleSet / ShapeMismatch.
double ade(std::span<const MotionSequence> samples, const MotionSequence& gt);
double fde(std::span<const MotionSequence> samples, const MotionSequence& gt);

// Mean over the ground-truth set of the best-sample ADE/FDE. Throw EmptyGtSet.
double mmade(std::span<const MotionSequence> samples, std::span<const MotionSequence> gt_set);
double mmfde(std::span<const MotionSequence> samples, std::span<const MotionSequence> gt_set);

// ADE/FDE of one sample against one target.
double displacement_error(const MotionSequence& sample, const MotionSequence& gt);
double final_displacement_error(const MotionSequence& sample, const MotionSequence& gt);

// Indices of futures whose paired past lies within Frobenius distance
// eps_threshold of query_past. Throws MisalignedPairs / ShapeMismatch.
std::vector<std::size_t> multimodal_gt_indices(std::span<const MotionSequence> pasts,
                                               std::span<const MotionSequence> futures,
                                               const MotionSequence& query_past,
                                               double eps_threshold);

std::vector<MotionSequence> multimodal_gt(std::span<const MotionSequence> pasts,
                                          std::span<const MotionSequence> futures,
                                          const MotionSequence& query_past, double eps_threshold);

enum class JerkUnits {
  PerFrame,   // length / frame^3
  PerSecond,  // length / s^3 (per-frame value times fps^3)
};

// Mean over t of the norm of the third forward difference
//   x_{t+3} - 3 x_{t+2} + 3 x_{t+1} - x_t
// of each joint's 3-vector. Throws TooShort for T < 4.
std::vector<double> jerk_profile(const MotionSequence& motion,
                                 JerkUnits units = JerkUnits::PerFrame);

// Named groups of joints; a group's jerk is the mean of its joints' jerks.
struct PartGrouping {
  std::vector<std::string> parts;
  std::vector<std::vector<std::size_t>> members;
};

PartGrouping per_joint_grouping(const MotionSequence& motion);

struct JitterRow {
  std::string label;
  double base = 0.0;
  double refined = 0.0;
  std::optional<double> reduction_pct;  // absent when the base jerk is zero
};

struct JitterReport {
  std::vector<JitterRow> rows;
  double mean_base = 0.0;
  double mean_refined = 0.0;
  std::optional<double> mean_reduction_pct;  // over rows with a defined reduction
};

// 100 (1 - jerk_refined / jerk_base) per group. Throws ShapeMismatch.
JitterReport jitter_reduction(const MotionSequence& base, const MotionSequence& refined,
                              const PartGrouping& grouping, JerkUnits units = JerkUnits::PerFrame);

JitterReport jitter_reduction(const MotionSequence& base, const MotionSequence& refined);

struct MetricReport {
  std::optional<double> apd;
  std::optional<double> ade;
  std::optional<double> fde;
  std::optional<double> mmade;
  std::optional<double> mmfde;
  std::optional<std::vector<double>> per_joint_jerk;
  std::size_t samples = 0;
  std::size_t gt_set_size = 0;
  std::size_t frames = 0;
  std::size_t joints = 0;
};

}  // namespace freqkf
