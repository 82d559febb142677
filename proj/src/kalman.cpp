#include "freqkf/kalman.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace freqkf {

void validate_params(const KalmanParams& params) {
  if (!(params.q > 0.0) || !std::isfinite(params.q) || !(params.r > 0.0) ||
      !std::isfinite(params.r)) {
    std::ostringstream msg;
    msg << "variances must be positive and finite (Q = " << params.q << ", R = " << params.r << ")";
    throw Error(ErrorCode::NonPositiveVariance, msg.str());
  }
}

namespace {

void check_observations(std::span<const double> observations) {
  if (observations.empty()) throw Error(ErrorCode::EmptyObservations, "no observations");
  for (double z : observations) {
    if (!std::isfinite(z)) throw Error(ErrorCode::NonFinite, "observation is not finite");
  }
}

// One predict/update cycle. Shared by both entry points so they agree bitwise.
inline KalmanStep kalman_step(double state, double covariance, double z, const KalmanParams& p) {
  KalmanStep s;
  s.predicted_state = state;
  s.predicted_covariance = covariance + p.q;
  s.gain = s.predicted_covariance / (s.predicted_covariance + p.r);
  s.state = s.predicted_state + s.gain * (z - s.predicted_state);
  s.covariance = (1.0 - s.gain) * s.predicted_covariance;
  return s;
}

}  // namespace

KalmanResult kalman_filter(std::span<const double> observations, const KalmanParams& params) {
  check_observations(observations);
  validate_params(params);
  KalmanResult out;
  out.estimates.resize(observations.size());
  out.trace.initial_state = observations[0];
  out.trace.initial_covariance = params.r;
  out.trace.steps.reserve(observations.size() - 1);

  double state = observations[0];
  double covariance = params.r;
  out.estimates[0] = state;
  for (std::size_t i = 1; i < observations.size(); ++i) {
    const KalmanStep s = kalman_step(state, covariance, observations[i], params);
    out.trace.steps.push_back(s);
    state = s.state;
    covariance = s.covariance;
    out.estimates[i] = state;
  }
  return out;
}

std::vector<double> kalman_estimates(std::span<const double> observations,
                                     const KalmanParams& params) {
  check_observations(observations);
  validate_params(params);
  std::vector<double> estimates(observations.size());
  double state = observations[0];
  double covariance = params.r;
  estimates[0] = state;
  for (std::size_t i = 1; i < observations.size(); ++i) {
    const KalmanStep s = kalman_step(state, covariance, observations[i], params);
    state = s.state;
    covariance = s.covariance;
    estimates[i] = state;
  }
  return estimates;
}

double steady_state_error(double q, double r) {
  validate_params({q, r});
  // (-Q + sqrt(Q^2 + 4QR)) / 2 rewritten without the cancellation when Q >> R.
  const double root = std::sqrt(q) * std::sqrt(q + 4.0 * r);
  return 2.0 * q * r / (q + root);
}

double steady_state_gain(double q, double r) {
  const double p = steady_state_error(q, r);
  return (p + q) / (p + q + r);
}

KalmanParams adaptive_params(double snr_est, const RefinementConfig& config) {
  KalmanParams p;
  p.q = config.q0 * (1.0 + config.lambda_q / (snr_est + config.epsilon));
  p.r = config.r0 / (1.0 + config.lambda_r * snr_est);
  return p;
}

ChannelSpectrum fixed_suppress(const ChannelSpectrum& spectrum, std::size_t k0, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    std::ostringstream msg;
    msg << "gamma = " << gamma << " is outside [0, 1]";
    throw Error(ErrorCode::GammaOutOfRange, msg.str());
  }
  ChannelSpectrum out = spectrum;
  for (std::size_t k = k0; k < out.coeffs.size(); ++k) out.coeffs[k] *= gamma;
  return out;
}

ChannelRefinement refine_channel(const ChannelSpectrum& spectrum, const RefinementConfig& config) {
  validate_config(config);
  const std::size_t n = spectrum.coeffs.size();
  if (n == 0) throw Error(ErrorCode::EmptySpectrum, "empty spectrum");
  if (config.k0 > n) {
    std::ostringstream msg;
    msg << "cutoff k0 = " << config.k0 << " exceeds spectrum length " << n;
    throw Error(ErrorCode::CutoffOutOfRange, msg.str());
  }

  ChannelRefinement out;
  ChannelReport& report = out.report;
  report.rho = high_freq_ratio(spectrum, config.k0, config.include_dc, config.epsilon);
  report.snr_est = estimate_snr(report.rho, config.epsilon);
  report.energy_total = band_energy(spectrum, config.include_dc ? 0 : 1, n);
  report.energy_high = band_energy(spectrum, config.k0, n);

  if (config.mode == RefinementMode::FixedSuppress) {
    out.refined = fixed_suppress(spectrum, config.k0, config.gamma);
  } else {
    const KalmanParams params = config.mode == RefinementMode::Adaptive
                                    ? adaptive_params(report.snr_est, config)
                                    : KalmanParams{config.q0, config.r0};
    report.q = params.q;
    report.r = params.r;
    report.steady_state_p = steady_state_error(params.q, params.r);
    report.steady_state_k = steady_state_gain(params.q, params.r);

    out.refined = spectrum;
    if (config.k0 < n) {
      const auto high = std::span<const double>(spectrum.coeffs).subspan(config.k0);
      const std::vector<double> filtered = kalman_estimates(high, params);
      std::copy(filtered.begin(), filtered.end(),
                out.refined.coeffs.begin() + static_cast<std::ptrdiff_t>(config.k0));
    }
  }
  report.energy_high_refined = band_energy(out.refined, config.k0, n);
  return out;
}

MotionRefinement refine_motion(const MotionSequence& motion, const RefinementConfig& config,
                               const RefineOptions& options) {
  require_valid(motion);
  validate_config(config);
  const std::size_t frames = motion.frames();
  const std::size_t joints = motion.joints();
  if (config.k0 > frames) {
    std::ostringstream msg;
    msg << "cutoff k0 = " << config.k0 << " exceeds sequence length " << frames;
    throw Error(ErrorCode::CutoffOutOfRange, msg.str());
  }

  const DctPlan plan(frames);
  const std::size_t total = motion.channels();
  std::vector<double> out(motion.data().begin(), motion.data().end());
  std::vector<ChannelReport> reports(total);

  // Each channel owns disjoint output elements and its own report slot.
  auto work = [&](std::size_t c) {
    const std::size_t j = c / kAxes;
    const Axis axis = kAllAxes[c % kAxes];
    const ChannelSpectrum spectrum = plan.forward(channel_series(motion, j, axis));
    ChannelRefinement r = refine_channel(spectrum, config);
    r.report.joint_index = j;
    r.report.axis = axis;
    const std::vector<double> series = plan.inverse(r.refined);
    for (std::size_t t = 0; t < frames; ++t) out[motion.index(t, j, c % kAxes)] = series[t];
    reports[c] = std::move(r.report);
  };

  std::size_t threads = options.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, total);

  if (threads <= 1) {
    for (std::size_t c = 0; c < total; ++c) work(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
      std::vector<std::jthread> pool;
      pool.reserve(threads);
      for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
          for (std::size_t c = next++; c < total; c = next++) {
            try {
              work(c);
            } catch (...) {
              std::lock_guard lock(failure_mutex);
              if (!failure) failure = std::current_exception();
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  return {MotionSequence(frames, joints, std::move(out), motion.fps(), motion.joint_names()),
          std::move(reports)};
}

}  // namespace freqkf
