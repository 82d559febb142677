#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "freqkf/core.hpp"
#include "freqkf/spectral.hpp"

namespace freqkf {

// Process (q) and observation (r) variances of the scalar random-walk model
//   x_k = x_{k-1} + w_k,  w_k ~ N(0, q)
//   z_k = x_k + v_k,      v_k ~ N(0, r)
// run along the frequency index.
struct KalmanParams {
  double q = 0.0;
  double r = 0.0;
};

// Throws NonPositiveVariance unless both variances are positive and finite.
void validate_params(const KalmanParams& params);

struct KalmanStep {
  double predicted_state = 0.0;       // x_{k|k-1}
  double predicted_covariance = 0.0;  // P_{k|k-1}
  double gain = 0.0;                  // K_k
  double state = 0.0;                 // x_{k|k}
  double covariance = 0.0;            // P_{k|k}
};

struct KalmanTrace {
  double initial_state = 0.0;
  double initial_covariance = 0.0;
  // One entry per observation after the first.
  std::vector<KalmanStep> steps;
};

struct KalmanResult {
  std::vector<double> estimates;
  KalmanTrace trace;
};

// Scalar Kalman recursion over z_0..z_{n-1}. The state starts at z_0 with
// covariance r and z_0 is returned unfiltered; every later observation goes
// through predict/update.
KalmanResult kalman_filter(std::span<const double> observations, const KalmanParams& params);

// Same recursion without the trace; bit-identical estimates.
std::vector<double> kalman_estimates(std::span<const double> observations,
                                     const KalmanParams& params);

// Positive root of P^2 + Q P - Q R = 0, the fixed point of the covariance
// recursion. Always 0 < P* < R.
double steady_state_error(double q, double r);

// K* = (P* + Q) / (P* + Q + R).
double steady_state_gain(double q, double r);

// Q = q0 (1 + lambda_q / (snr + eps)),  R = r0 / (1 + lambda_r snr).
KalmanParams adaptive_params(double snr_est, const RefinementConfig& config);

// Multiplies every coefficient k >= k0 by gamma. Throws GammaOutOfRange.
ChannelSpectrum fixed_suppress(const ChannelSpectrum& spectrum, std::size_t k0, double gamma);

struct ChannelReport {
  std::size_t joint_index = 0;
  Axis axis = Axis::x;
  double rho = 0.0;
  double snr_est = 0.0;
  // Filter parameters and steady state; absent for fixed suppression.
  std::optional<double> q;
  std::optional<double> r;
  std::optional<double> steady_state_p;
  std::optional<double> steady_state_k;
  double energy_total = 0.0;          // over the bins that enter rho's denominator
  double energy_high = 0.0;           // sum_{k >= k0} c_k^2 before refinement
  double energy_high_refined = 0.0;   // same band after refinement
};

struct ChannelRefinement {
  ChannelSpectrum refined;
  ChannelReport report;
};

// Refines one channel spectrum: bins below k0 are copied, bins from k0 on are
// replaced according to config.mode. Throws CutoffOutOfRange when k0 > N.
ChannelRefinement refine_channel(const ChannelSpectrum& spectrum, const RefinementConfig& config);

struct RefineOptions {
  // Worker threads for the per-channel loop; 0 picks the hardware count.
  std::size_t threads = 1;
};

struct MotionRefinement {
  MotionSequence refined;
  std::vector<ChannelReport> reports;  // canonical channel order
};

// DCT -> refine_channel -> IDCT on every (joint, axis) channel. Output is
// bit-identical for any thread count.
MotionRefinement refine_motion(const MotionSequence& motion, const RefinementConfig& config,
                               const RefineOptions& options = {});

}  // namespace freqkf
