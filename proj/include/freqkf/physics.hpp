#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "freqkf/core.hpp"

namespace freqkf {

// A loss value and, when requested, d(loss)/d(position) laid out like
// MotionSequence::data().
struct LossValue {
  double value = 0.0;
  std::optional<std::vector<double>> gradient;
};

inline constexpr double kCosineEpsilon = 1e-8;
inline constexpr double kDegenerateBoneNorm = 1e-12;

// Mean squared frame-to-frame displacement,
//   1/(T-1) sum_{t>=1} ||Y_t - Y_{t-1}||_F^2.
// Throws TooShort for T < 2.
LossValue temporal_smoothness(const MotionSequence& motion, bool with_gradient = true);

struct DegenerateBone {
  std::size_t frame = 0;
  std::size_t constraint = 0;
  int vector = 1;  // 1 or 2
};

struct CosineTable {
  std::size_t frames = 0;
  std::size_t angles = 0;
  std::vector<double> values;  // values[t * angles + i]
  std::vector<DegenerateBone> degenerate;

  double at(std::size_t t, std::size_t i) const { return values[t * angles + i]; }
};

// cos = (v1 . v2) / (|v1| |v2| + 1e-8) per frame and constraint. Bones
// shorter than 1e-12 are listed in `degenerate`; their cosine is whatever
// the epsilon guard yields.
CosineTable joint_cosines(const MotionSequence& motion, const Skeleton& skeleton);

// Quadratic penalty outside [cos_min, cos_max], averaged over T x N_angles.
// Throws NoConstraints when the skeleton has no angle constraints.
LossValue angle_loss(const MotionSequence& motion, const Skeleton& skeleton,
                     bool with_gradient = true);

// Bone lengths per frame for every limb pair: result[t * limbs + l].
std::vector<double> limb_lengths(const MotionSequence& motion, const Skeleton& skeleton);

// Per-limb lengths averaged over frames; a convenient reference.
std::vector<double> mean_limb_lengths(const MotionSequence& motion, const Skeleton& skeleton);

// 1/T sum_t sum_l (|bone_l(t)| - reference_l)^2. Throws LengthCountMismatch.
LossValue limb_length_loss(const MotionSequence& pred, std::span<const double> reference_lengths,
                           const Skeleton& skeleton, bool with_gradient = true);

// Reconstructions of the observed past paired with the past itself.
struct HistoryPair {
  std::span<const MotionSequence> reconstructions;
  const MotionSequence* observed = nullptr;
};

struct SampleSetLosses {
  double recon = 0.0;               // min_k ||Y_k - Y||^2
  std::optional<double> history;   // 1/K sum_k ||X_k - X||^2
  std::optional<double> multimodal; // 1/M sum_m min_k ||Y_k - Y_m||^2
  std::optional<double> diversity;  // 2/(K(K-1)) sum_{j<k} exp(-||Y_j - Y_k||_1 / alpha)
};

// Squared norms are squared Frobenius over the whole sequence, ||.||_1 the
// elementwise absolute sum. `multimodal` is absent for an empty mm_gt set and
// `diversity` for K < 2. Throws EmptySampleSet / ShapeMismatch / InvalidConfig.
SampleSetLosses sample_set_losses(std::span<const MotionSequence> samples, const MotionSequence& gt,
                                  std::span<const MotionSequence> mm_gt, double alpha,
                                  std::optional<HistoryPair> history = std::nullopt);

double squared_distance(const MotionSequence& a, const MotionSequence& b);
double l1_distance(const MotionSequence& a, const MotionSequence& b);

struct LossWeights {
  double recon = 11.0;
  double history = 16.0;
  double multimodal = 0.1;
  double diversity = 0.63;
  double limb = 0.5;
  double temporal = 1.28;
  double angle = 5.0;
};

struct LossTerms {
  std::optional<double> recon;
  std::optional<double> history;
  std::optional<double> multimodal;
  std::optional<double> diversity;
  std::optional<double> limb;
  std::optional<double> temporal;
  std::optional<double> angle;
};

// Weighted sum of whichever terms are present.
double weighted_objective(const LossTerms& terms, const LossWeights& weights = {});

}  // namespace freqkf
