#include "freqkf/physics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace freqkf {

namespace {

using Vec3 = std::array<double, 3>;

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 scale(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

void accumulate(std::vector<double>& grad, const MotionSequence& m, std::size_t t, std::size_t j,
                const Vec3& g, double sign = 1.0) {
  const std::size_t i = m.index(t, j, 0);
  grad[i] += sign * g[0];
  grad[i + 1] += sign * g[1];
  grad[i + 2] += sign * g[2];
}

// Geometry of one constraint at one frame.
struct ConstraintGeometry {
  Vec3 v1;
  Vec3 v2;
  Vec3 plane_u;  // b - a (BonePlane only)
  Vec3 plane_w;  // c - a (BonePlane only)
};

ConstraintGeometry geometry(const MotionSequence& m, std::size_t t, const AngleConstraint& c) {
  ConstraintGeometry g{};
  g.v1 = sub(m.position(t, c.vec1.second), m.position(t, c.vec1.first));
  if (c.kind == AngleConstraint::Kind::BoneBone) {
    g.v2 = sub(m.position(t, c.vec2.second), m.position(t, c.vec2.first));
  } else {
    const Vec3 a = m.position(t, c.plane[0]);
    g.plane_u = sub(m.position(t, c.plane[1]), a);
    g.plane_w = sub(m.position(t, c.plane[2]), a);
    g.v2 = cross(g.plane_u, g.plane_w);
  }
  return g;
}

void check_skeleton_fits(const MotionSequence& motion, const Skeleton& skeleton) {
  validate_skeleton(skeleton);
  if (skeleton.joint_count != motion.joints()) {
    std::ostringstream msg;
    msg << "skeleton has " << skeleton.joint_count << " joints, motion has " << motion.joints();
    throw Error(ErrorCode::ShapeMismatch, msg.str());
  }
}

void check_same_shape(const MotionSequence& a, const MotionSequence& b, const char* what) {
  if (!a.same_shape(b)) {
    std::ostringstream msg;
    msg << what << ": shape " << a.frames() << "x" << a.joints() << " vs " << b.frames() << "x"
        << b.joints();
    throw Error(ErrorCode::ShapeMismatch, msg.str());
  }
}

}  // namespace

LossValue temporal_smoothness(const MotionSequence& motion, bool with_gradient) {
  require_valid(motion);
  const std::size_t frames = motion.frames();
  if (frames < 2) throw Error(ErrorCode::TooShort, "temporal smoothness needs at least 2 frames");
  const std::size_t stride = motion.joints() * kAxes;
  const auto data = motion.data();
  const double norm_factor = 1.0 / static_cast<double>(frames - 1);

  LossValue out;
  if (with_gradient) out.gradient.emplace(data.size(), 0.0);
  double sum = 0.0;
  for (std::size_t t = 1; t < frames; ++t) {
    for (std::size_t e = 0; e < stride; ++e) {
      const std::size_t cur = t * stride + e;
      const std::size_t prev = cur - stride;
      const double diff = data[cur] - data[prev];
      sum += diff * diff;
      if (with_gradient) {
        const double g = 2.0 * norm_factor * diff;
        (*out.gradient)[cur] += g;
        (*out.gradient)[prev] -= g;
      }
    }
  }
  out.value = sum * norm_factor;
  return out;
}

CosineTable joint_cosines(const MotionSequence& motion, const Skeleton& skeleton) {
  require_valid(motion);
  check_skeleton_fits(motion, skeleton);
  const auto& constraints = skeleton.angle_constraints;
  CosineTable table;
  table.frames = motion.frames();
  table.angles = constraints.size();
  table.values.resize(table.frames * table.angles);
  for (std::size_t t = 0; t < table.frames; ++t) {
    for (std::size_t i = 0; i < table.angles; ++i) {
      const ConstraintGeometry g = geometry(motion, t, constraints[i]);
      const double n1 = norm(g.v1);
      const double n2 = norm(g.v2);
      if (n1 < kDegenerateBoneNorm) table.degenerate.push_back({t, i, 1});
      if (n2 < kDegenerateBoneNorm) table.degenerate.push_back({t, i, 2});
      table.values[t * table.angles + i] = dot(g.v1, g.v2) / (n1 * n2 + kCosineEpsilon);
    }
  }
  return table;
}

LossValue angle_loss(const MotionSequence& motion, const Skeleton& skeleton, bool with_gradient) {
  require_valid(motion);
  check_skeleton_fits(motion, skeleton);
  const auto& constraints = skeleton.angle_constraints;
  if (constraints.empty()) throw Error(ErrorCode::NoConstraints, "skeleton has no angle constraints");

  const std::size_t frames = motion.frames();
  const double norm_factor = 1.0 / static_cast<double>(frames * constraints.size());
  LossValue out;
  if (with_gradient) out.gradient.emplace(motion.data().size(), 0.0);

  double sum = 0.0;
  for (std::size_t t = 0; t < frames; ++t) {
    for (const AngleConstraint& c : constraints) {
      const ConstraintGeometry g = geometry(motion, t, c);
      const double n1 = norm(g.v1);
      const double n2 = norm(g.v2);
      const double denom = n1 * n2 + kCosineEpsilon;
      const double d = dot(g.v1, g.v2);
      const double cosine = d / denom;

      double dloss_dcos = 0.0;
      if (cosine > c.cos_max) {
        const double excess = cosine - c.cos_max;
        sum += excess * excess;
        dloss_dcos = 2.0 * excess;
      } else if (cosine < c.cos_min) {
        const double deficit = c.cos_min - cosine;
        sum += deficit * deficit;
        dloss_dcos = -2.0 * deficit;
      }
      if (!with_gradient || dloss_dcos == 0.0) continue;

      // d cos / d v1 = v2 / D - d * n2 * (v1 / n1) / D^2, symmetric for v2.
      const double s = dloss_dcos * norm_factor;
      Vec3 g1 = scale(g.v2, 1.0 / denom);
      Vec3 g2 = scale(g.v1, 1.0 / denom);
      if (n1 > 0.0) g1 = sub(g1, scale(g.v1, d * n2 / (n1 * denom * denom)));
      if (n2 > 0.0) g2 = sub(g2, scale(g.v2, d * n1 / (n2 * denom * denom)));
      g1 = scale(g1, s);
      g2 = scale(g2, s);

      auto& grad = *out.gradient;
      accumulate(grad, motion, t, c.vec1.second, g1);
      accumulate(grad, motion, t, c.vec1.first, g1, -1.0);
      if (c.kind == AngleConstraint::Kind::BoneBone) {
        accumulate(grad, motion, t, c.vec2.second, g2);
        accumulate(grad, motion, t, c.vec2.first, g2, -1.0);
      } else {
        // normal = u x w with u = b - a, w = c - a.
        const Vec3 du = cross(g.plane_w, g2);
        const Vec3 dw = cross(g2, g.plane_u);
        accumulate(grad, motion, t, c.plane[1], du);
        accumulate(grad, motion, t, c.plane[2], dw);
        accumulate(grad, motion, t, c.plane[0], du, -1.0);
        accumulate(grad, motion, t, c.plane[0], dw, -1.0);
      }
    }
  }
  out.value = sum * norm_factor;
  return out;
}

std::vector<double> limb_lengths(const MotionSequence& motion, const Skeleton& skeleton) {
  require_valid(motion);
  check_skeleton_fits(motion, skeleton);
  const auto& limbs = skeleton.limb_pairs;
  std::vector<double> out(motion.frames() * limbs.size());
  for (std::size_t t = 0; t < motion.frames(); ++t) {
    for (std::size_t l = 0; l < limbs.size(); ++l) {
      out[t * limbs.size() + l] =
          norm(sub(motion.position(t, limbs[l].second), motion.position(t, limbs[l].first)));
    }
  }
  return out;
}

std::vector<double> mean_limb_lengths(const MotionSequence& motion, const Skeleton& skeleton) {
  const std::vector<double> lengths = limb_lengths(motion, skeleton);
  const std::size_t limbs = skeleton.limb_pairs.size();
  std::vector<double> mean(limbs, 0.0);
  for (std::size_t t = 0; t < motion.frames(); ++t) {
    for (std::size_t l = 0; l < limbs; ++l) mean[l] += lengths[t * limbs + l];
  }
  for (double& v : mean) v /= static_cast<double>(motion.frames());
  return mean;
}

LossValue limb_length_loss(const MotionSequence& pred, std::span<const double> reference_lengths,
                           const Skeleton& skeleton, bool with_gradient) {
  require_valid(pred);
  check_skeleton_fits(pred, skeleton);
  const auto& limbs = skeleton.limb_pairs;
  if (reference_lengths.size() != limbs.size()) {
    std::ostringstream msg;
    msg << reference_lengths.size() << " reference lengths for " << limbs.size() << " limbs";
    throw Error(ErrorCode::LengthCountMismatch, msg.str());
  }
  const double norm_factor = 1.0 / static_cast<double>(pred.frames());
  LossValue out;
  if (with_gradient) out.gradient.emplace(pred.data().size(), 0.0);
  double sum = 0.0;
  for (std::size_t t = 0; t < pred.frames(); ++t) {
    for (std::size_t l = 0; l < limbs.size(); ++l) {
      const Vec3 bone = sub(pred.position(t, limbs[l].second), pred.position(t, limbs[l].first));
      const double len = norm(bone);
      const double dev = len - reference_lengths[l];
      sum += dev * dev;
      if (with_gradient && len > 0.0) {
        const Vec3 g = scale(bone, 2.0 * dev * norm_factor / len);
        accumulate(*out.gradient, pred, t, limbs[l].second, g);
        accumulate(*out.gradient, pred, t, limbs[l].first, g, -1.0);
      }
    }
  }
  out.value = sum * norm_factor;
  return out;
}

double squared_distance(const MotionSequence& a, const MotionSequence& b) {
  check_same_shape(a, b, "squared_distance");
  const auto x = a.data();
  const auto y = b.data();
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return acc;
}

double l1_distance(const MotionSequence& a, const MotionSequence& b) {
  check_same_shape(a, b, "l1_distance");
  const auto x = a.data();
  const auto y = b.data();
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::abs(x[i] - y[i]);
  return acc;
}

SampleSetLosses sample_set_losses(std::span<const MotionSequence> samples, const MotionSequence& gt,
                                  std::span<const MotionSequence> mm_gt, double alpha,
                                  std::optional<HistoryPair> history) {
  if (samples.empty()) throw Error(ErrorCode::EmptySampleSet, "no samples");
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidConfig, "alpha must be positive");

  auto min_over_samples = [&](const MotionSequence& target) {
    double best = std::numeric_limits<double>::infinity();
    for (const MotionSequence& s : samples) best = std::min(best, squared_distance(s, target));
    return best;
  };

  SampleSetLosses out;
  out.recon = min_over_samples(gt);

  if (!mm_gt.empty()) {
    double acc = 0.0;
    for (const MotionSequence& m : mm_gt) acc += min_over_samples(m);
    out.multimodal = acc / static_cast<double>(mm_gt.size());
  }

  if (samples.size() >= 2) {
    const std::size_t k = samples.size();
    double acc = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a + 1; b < k; ++b) {
        acc += std::exp(-l1_distance(samples[a], samples[b]) / alpha);
      }
    }
    out.diversity = 2.0 * acc / static_cast<double>(k * (k - 1));
  }

  if (history && history->observed != nullptr) {
    if (history->reconstructions.empty()) {
      throw Error(ErrorCode::EmptySampleSet, "no history reconstructions");
    }
    double acc = 0.0;
    for (const MotionSequence& r : history->reconstructions) {
      acc += squared_distance(r, *history->observed);
    }
    out.history = acc / static_cast<double>(history->reconstructions.size());
  }
  return out;
}

double weighted_objective(const LossTerms& terms, const LossWeights& weights) {
  double total = 0.0;
  auto add = [&](const std::optional<double>& term, double weight) {
    if (term) total += weight * *term;
  };
  add(terms.recon, weights.recon);
  add(terms.history, weights.history);
  add(terms.multimodal, weights.multimodal);
  add(terms.diversity, weights.diversity);
  add(terms.limb, weights.limb);
  add(terms.temporal, weights.temporal);
  add(terms.angle, weights.angle);
  return total;
}

}  // namespace freqkf
