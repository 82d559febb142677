#include "freqkf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "freqkf/physics.hpp"

namespace freqkf {

namespace {

void check_shapes(std::span<const MotionSequence> samples, const MotionSequence& reference) {
  for (std::size_t k = 0; k < samples.size(); ++k) {
    require_valid(samples[k]);
    if (!samples[k].same_shape(reference)) {
      std::ostringstream msg;
      msg << "sample " << k << " has shape " << samples[k].frames() << "x" << samples[k].joints()
          << ", expected " << reference.frames() << "x" << reference.joints();
      throw Error(ErrorCode::ShapeMismatch, msg.str());
    }
  }
}

double frame_distance(const MotionSequence& a, const MotionSequence& b, std::size_t t) {
  const std::size_t stride = a.joints() * kAxes;
  const auto x = a.data().subspan(t * stride, stride);
  const auto y = b.data().subspan(t * stride, stride);
  double acc = 0.0;
  for (std::size_t i = 0; i < stride; ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

template <typename ErrorFn>
double best_of(std::span<const MotionSequence> samples, const MotionSequence& gt, ErrorFn fn) {
  if (samples.empty()) throw Error(ErrorCode::EmptySampleSet, "no samples");
  require_valid(gt);
  check_shapes(samples, gt);
  double best = std::numeric_limits<double>::infinity();
  for (const MotionSequence& s : samples) best = std::min(best, fn(s, gt));
  return best;
}

template <typename ErrorFn>
double multimodal_mean(std::span<const MotionSequence> samples,
                       std::span<const MotionSequence> gt_set, ErrorFn fn) {
  if (gt_set.empty()) throw Error(ErrorCode::EmptyGtSet, "empty multimodal ground-truth set");
  double acc = 0.0;
  for (const MotionSequence& gt : gt_set) acc += best_of(samples, gt, fn);
  return acc / static_cast<double>(gt_set.size());
}

}  // namespace

double apd(std::span<const MotionSequence> samples) {
  if (samples.size() < 2) throw Error(ErrorCode::NeedTwoSamples, "APD needs at least 2 samples");
  check_shapes(samples, samples[0]);
  const std::size_t k = samples.size();
  double acc = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) acc += l1_distance(samples[a], samples[b]);
  }
  return 2.0 * acc / static_cast<double>(k * (k - 1));
}

double displacement_error(const MotionSequence& sample, const MotionSequence& gt) {
  double acc = 0.0;
  for (std::size_t t = 0; t < gt.frames(); ++t) acc += frame_distance(gt, sample, t);
  return acc / static_cast<double>(gt.frames());
}

double final_displacement_error(const MotionSequence& sample, const MotionSequence& gt) {
  return frame_distance(gt, sample, gt.frames() - 1);
}

double ade(std::span<const MotionSequence> samples, const MotionSequence& gt) {
  return best_of(samples, gt, displacement_error);
}

double fde(std::span<const MotionSequence> samples, const MotionSequence& gt) {
  return best_of(samples, gt, final_displacement_error);
}

double mmade(std::span<const MotionSequence> samples, std::span<const MotionSequence> gt_set) {
  return multimodal_mean(samples, gt_set, displacement_error);
}

double mmfde(std::span<const MotionSequence> samples, std::span<const MotionSequence> gt_set) {
  return multimodal_mean(samples, gt_set, final_displacement_error);
}

std::vector<std::size_t> multimodal_gt_indices(std::span<const MotionSequence> pasts,
                                               std::span<const MotionSequence> futures,
                                               const MotionSequence& query_past,
                                               double eps_threshold) {
  if (pasts.size() != futures.size()) {
    std::ostringstream msg;
    msg << pasts.size() << " pasts vs " << futures.size() << " futures";
    throw Error(ErrorCode::MisalignedPairs, msg.str());
  }
  if (std::isnan(eps_threshold) || eps_threshold < 0.0) {
    throw Error(ErrorCode::InvalidConfig, "clustering threshold must be >= 0");
  }
  require_valid(query_past);
  check_shapes(pasts, query_past);
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < pasts.size(); ++i) {
    if (std::sqrt(squared_distance(pasts[i], query_past)) <= eps_threshold) picked.push_back(i);
  }
  return picked;
}

std::vector<MotionSequence> multimodal_gt(std::span<const MotionSequence> pasts,
                                          std::span<const MotionSequence> futures,
                                          const MotionSequence& query_past, double eps_threshold) {
  std::vector<MotionSequence> out;
  for (std::size_t i : multimodal_gt_indices(pasts, futures, query_past, eps_threshold)) {
    out.push_back(futures[i]);
  }
  return out;
}

std::vector<double> jerk_profile(const MotionSequence& motion, JerkUnits units) {
  require_valid(motion);
  const std::size_t frames = motion.frames();
  if (frames < 4) throw Error(ErrorCode::TooShort, "jerk needs at least 4 frames");
  const double unit_scale =
      units == JerkUnits::PerSecond ? motion.fps() * motion.fps() * motion.fps() : 1.0;
  std::vector<double> out(motion.joints(), 0.0);
  for (std::size_t j = 0; j < motion.joints(); ++j) {
    double acc = 0.0;
    for (std::size_t t = 0; t + 3 < frames; ++t) {
      double sq = 0.0;
      for (std::size_t d = 0; d < kAxes; ++d) {
        const double jerk = motion.at(t + 3, j, d) - 3.0 * motion.at(t + 2, j, d) +
                            3.0 * motion.at(t + 1, j, d) - motion.at(t, j, d);
        sq += jerk * jerk;
      }
      acc += std::sqrt(sq);
    }
    out[j] = unit_scale * acc / static_cast<double>(frames - 3);
  }
  return out;
}

PartGrouping per_joint_grouping(const MotionSequence& motion) {
  PartGrouping g;
  for (std::size_t j = 0; j < motion.joints(); ++j) {
    g.parts.push_back(motion.joint_names().empty() ? "joint_" + std::to_string(j)
                                                   : motion.joint_names()[j]);
    g.members.push_back({j});
  }
  return g;
}

JitterReport jitter_reduction(const MotionSequence& base, const MotionSequence& refined,
                              const PartGrouping& grouping, JerkUnits units) {
  if (!base.same_shape(refined)) {
    throw Error(ErrorCode::ShapeMismatch, "base and refined motions differ in shape");
  }
  if (grouping.parts.size() != grouping.members.size()) {
    throw Error(ErrorCode::InvalidConfig, "part grouping is inconsistent");
  }
  const std::vector<double> jb = jerk_profile(base, units);
  const std::vector<double> jr = jerk_profile(refined, units);

  JitterReport report;
  double reduction_sum = 0.0;
  std::size_t defined = 0;
  for (std::size_t p = 0; p < grouping.parts.size(); ++p) {
    const auto& members = grouping.members[p];
    if (members.empty()) continue;
    JitterRow row;
    row.label = grouping.parts[p];
    for (std::size_t j : members) {
      if (j >= base.joints()) throw Error(ErrorCode::InvalidConfig, "part member out of range");
      row.base += jb[j];
      row.refined += jr[j];
    }
    row.base /= static_cast<double>(members.size());
    row.refined /= static_cast<double>(members.size());
    if (row.base > 0.0) {
      row.reduction_pct = 100.0 * (1.0 - row.refined / row.base);
      reduction_sum += *row.reduction_pct;
      ++defined;
    }
    report.mean_base += row.base;
    report.mean_refined += row.refined;
    report.rows.push_back(std::move(row));
  }
  if (!report.rows.empty()) {
    report.mean_base /= static_cast<double>(report.rows.size());
    report.mean_refined /= static_cast<double>(report.rows.size());
  }
  if (defined > 0) report.mean_reduction_pct = reduction_sum / static_cast<double>(defined);
  return report;
}

JitterReport jitter_reduction(const MotionSequence& base, const MotionSequence& refined) {
  return jitter_reduction(base, refined, per_joint_grouping(base));
}

}  // namespace freqkf
