#include "freqkf/synth.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "freqkf/spectral.hpp"

namespace freqkf {

namespace {

// Stream ids keep the clean signal and each noise kind on separate sequences.
constexpr std::uint64_t kCleanStream = 0x100000;
constexpr std::uint64_t kHighBandStream = 0x200000;
constexpr std::uint64_t kWhiteStream = 0x300000;

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : engine_(splitmix64(seed + splitmix64(stream))) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection sampling keeps the result unbiased.
  const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

std::int64_t Rng::integer(std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

double Rng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::string_view to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::SinusoidMix: return "sinusoid_mix";
    case SynthKind::Polynomial: return "polynomial";
    case SynthKind::WalkLike: return "walk_like";
  }
  return "?";
}

std::optional<SynthKind> parse_synth_kind(std::string_view text) {
  if (text == "sinusoid_mix") return SynthKind::SinusoidMix;
  if (text == "polynomial") return SynthKind::Polynomial;
  if (text == "walk_like") return SynthKind::WalkLike;
  return std::nullopt;
}

void validate_spec(const SynthSpec& spec) {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (spec.frames < 1) bad("frames must be >= 1");
  if (spec.joints < 1) bad("joints must be >= 1");
  if (!(spec.fps > 0.0) || !std::isfinite(spec.fps)) bad("fps must be positive");
  if (spec.band_limit < 1) bad("band_limit must be >= 1");
  if (spec.polynomial_degree < 0 || spec.polynomial_degree > 3) bad("polynomial degree must be 0..3");
  if (spec.frames > 1 << 20) bad("too many frames");
  if (const auto* hb = std::get_if<HighBandNoise>(&spec.noise)) {
    if (!(hb->target_ratio > 0.0 && hb->target_ratio < 1.0)) bad("noise ratio must lie in (0, 1)");
    if (hb->k0 >= spec.frames) {
      throw Error(ErrorCode::CutoffOutOfRange, "noise cutoff k0 must be below the frame count");
    }
  }
  if (const auto* wn = std::get_if<WhiteNoise>(&spec.noise)) {
    if (!(wn->sigma >= 0.0) || !std::isfinite(wn->sigma)) bad("noise sigma must be >= 0");
  }
}

namespace {

void fill_channel(std::vector<double>& data, std::size_t frames, std::size_t joints, std::size_t c,
                  const std::vector<double>& series) {
  const std::size_t j = c / kAxes;
  const std::size_t d = c % kAxes;
  for (std::size_t t = 0; t < frames; ++t) data[(t * joints + j) * kAxes + d] = series[t];
}

std::vector<double> sinusoid_channel(const SynthSpec& spec, const DctPlan& plan, Rng& rng) {
  const std::size_t n = spec.frames;
  const std::size_t max_index = std::min(spec.band_limit, n);
  ChannelSpectrum spectrum{std::vector<double>(n, 0.0)};
  const auto terms = static_cast<std::size_t>(rng.integer(1, 5));
  for (std::size_t i = 0; i < terms; ++i) {
    const std::size_t k = rng.below(max_index);
    // Time-domain amplitude; dividing by the basis scale turns it into a coefficient.
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double amplitude = k == 0 ? rng.uniform(-1.0, 1.0) : sign * rng.uniform(0.02, 0.3);
    const double basis_scale = std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(n));
    spectrum.coeffs[k] += amplitude / basis_scale;
  }
  return plan.inverse(spectrum);
}

std::vector<double> polynomial_channel(const SynthSpec& spec, Rng& rng) {
  // c_p = m_p * 2^-s_p with |m_p| < 1024 and 2^s_p >= 1024 * T^p, so every
  // term stays below 1 in magnitude and is a multiple of 2^-s_3. For
  // T <= 8192 every product and partial sum (and finite difference) is exact.
  const std::size_t n = spec.frames;
  const int log_t = static_cast<int>(std::ceil(std::log2(static_cast<double>(std::max<std::size_t>(n, 2)))));
  std::array<double, 4> coeff{0.0, 0.0, 0.0, 0.0};
  for (int p = 0; p <= spec.polynomial_degree; ++p) {
    const auto mantissa = static_cast<double>(rng.integer(-1023, 1023));
    coeff[static_cast<std::size_t>(p)] = std::ldexp(mantissa, -(10 + p * log_t));
  }
  std::vector<double> series(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto x = static_cast<double>(t);
    series[t] = coeff[0] + coeff[1] * x + coeff[2] * (x * x) + coeff[3] * (x * x * x);
  }
  return series;
}

struct GaitParams {
  double stride_hz;
  double speed;
};

std::vector<double> walk_channel(const SynthSpec& spec, const GaitParams& gait, std::size_t c,
                                 Rng& rng) {
  const std::size_t j = c / kAxes;
  const std::size_t d = c % kAxes;
  const double side_phase = (j % 2 == 0) ? 0.0 : std::numbers::pi;
  const double jitter_phase = rng.uniform(-0.2, 0.2);
  const double offset = rng.uniform(-0.5, 0.5) + (d == 1 ? 0.1 * static_cast<double>(j) : 0.0);
  const double amplitude = rng.uniform(0.02, 0.15);
  const double omega = 2.0 * std::numbers::pi * gait.stride_hz / spec.fps;
  std::vector<double> series(spec.frames);
  for (std::size_t t = 0; t < spec.frames; ++t) {
    const auto tt = static_cast<double>(t);
    const double phase = omega * tt + side_phase + jitter_phase;
    switch (d) {
      case 0:  // forward: drift plus leg swing
        series[t] = offset + gait.speed * tt / spec.fps + amplitude * std::sin(phase);
        break;
      case 1:  // vertical bob at twice the stride frequency
        series[t] = offset + 0.3 * amplitude * std::sin(2.0 * phase);
        break;
      default:  // lateral sway
        series[t] = offset + 0.5 * amplitude * std::cos(phase);
        break;
    }
  }
  return series;
}

}  // namespace

MotionSequence generate_clean(const SynthSpec& spec) {
  validate_spec(spec);
  const std::size_t channels = spec.joints * kAxes;
  std::vector<double> data(spec.frames * channels, 0.0);

  std::optional<DctPlan> plan;
  if (spec.kind == SynthKind::SinusoidMix) plan.emplace(spec.frames);
  GaitParams gait{};
  if (spec.kind == SynthKind::WalkLike) {
    Rng shared(spec.seed, kCleanStream - 1);
    gait.stride_hz = shared.uniform(0.8, 1.2);
    gait.speed = shared.uniform(0.8, 1.6);
  }

  for (std::size_t c = 0; c < channels; ++c) {
    Rng rng(spec.seed, kCleanStream + c);
    std::vector<double> series;
    switch (spec.kind) {
      case SynthKind::SinusoidMix: series = sinusoid_channel(spec, *plan, rng); break;
      case SynthKind::Polynomial: series = polynomial_channel(spec, rng); break;
      case SynthKind::WalkLike: series = walk_channel(spec, gait, c, rng); break;
    }
    fill_channel(data, spec.frames, spec.joints, c, series);
  }
  return MotionSequence(spec.frames, spec.joints, std::move(data), spec.fps);
}

NoiseInjection inject_high_band_noise(const MotionSequence& motion, std::size_t k0,
                                      double target_ratio, std::uint64_t seed, bool include_dc,
                                      double epsilon) {
  require_valid(motion);
  const std::size_t n = motion.frames();
  if (k0 >= n) {
    std::ostringstream msg;
    msg << "cutoff k0 = " << k0 << " leaves no high band in " << n << " frames";
    throw Error(ErrorCode::CutoffOutOfRange, msg.str());
  }
  if (!(target_ratio > 0.0 && target_ratio < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "target ratio must lie in (0, 1)");
  }
  const std::size_t first = include_dc ? 0 : 1;
  const std::size_t high_first = std::max(k0, first);
  if (high_first >= n) throw Error(ErrorCode::CutoffOutOfRange, "no high band to inject into");

  const DctPlan plan(n);
  NoiseInjection out{motion, std::vector<double>(motion.channels(), 0.0)};
  std::vector<double> data(motion.data().begin(), motion.data().end());

  for (std::size_t c = 0; c < motion.channels(); ++c) {
    const std::size_t j = c / kAxes;
    const Axis axis = kAllAxes[c % kAxes];
    ChannelSpectrum spectrum = plan.forward(channel_series(motion, j, axis));

    const double low = band_energy(spectrum, first, high_first);
    if (!(low > 0.0)) {
      std::ostringstream msg;
      msg << "channel (" << j << ", " << to_string(axis) << ") has no low-band energy";
      throw Error(ErrorCode::DegenerateChannel, msg.str());
    }
    // rho = H / (low + H + eps)  =>  H = rho (low + eps) / (1 - rho).
    const double target_high = target_ratio * (low + epsilon) / (1.0 - target_ratio);
    const double clean_high = band_energy(spectrum, high_first, n);

    Rng rng(seed, kHighBandStream + c);
    std::vector<double> noise(n, 0.0);
    double noise_sq = 0.0;
    double cross = 0.0;
    for (std::size_t k = high_first; k < n; ++k) {
      noise[k] = rng.normal();
      noise_sq += noise[k] * noise[k];
      cross += noise[k] * spectrum.coeffs[k];
    }
    if (clean_high > target_high || !(noise_sq > 0.0)) {
      std::ostringstream msg;
      msg << "channel (" << j << ", " << to_string(axis)
          << ") already has more high-band energy than the target ratio allows";
      throw Error(ErrorCode::DegenerateChannel, msg.str());
    }
    // sum (c_k + a n_k)^2 = target_high; take the positive root in a.
    const double disc = cross * cross + noise_sq * (target_high - clean_high);
    const double scale = (-cross + std::sqrt(disc)) / noise_sq;
    for (std::size_t k = high_first; k < n; ++k) spectrum.coeffs[k] += scale * noise[k];
    out.noise_energy[c] = scale * scale * noise_sq;

    const std::vector<double> series = plan.inverse(spectrum);
    fill_channel(data, n, motion.joints(), c, series);
  }
  out.noisy = MotionSequence(n, motion.joints(), std::move(data), motion.fps(), motion.joint_names());
  return out;
}

MotionSequence inject_white_noise(const MotionSequence& motion, double sigma, std::uint64_t seed) {
  require_valid(motion);
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidConfig, "sigma must be >= 0");
  }
  std::vector<double> data(motion.data().begin(), motion.data().end());
  for (std::size_t c = 0; c < motion.channels(); ++c) {
    Rng rng(seed, kWhiteStream + c);
    const std::size_t j = c / kAxes;
    const std::size_t d = c % kAxes;
    for (std::size_t t = 0; t < motion.frames(); ++t) {
      data[motion.index(t, j, d)] += sigma * rng.normal();
    }
  }
  return MotionSequence(motion.frames(), motion.joints(), std::move(data), motion.fps(),
                        motion.joint_names());
}

SynthResult generate(const SynthSpec& spec) {
  SynthResult result;
  result.clean = generate_clean(spec);
  std::visit(
      [&](const auto& noise) {
        using T = std::decay_t<decltype(noise)>;
        if constexpr (std::is_same_v<T, HighBandNoise>) {
          NoiseInjection inj = inject_high_band_noise(result.clean, noise.k0, noise.target_ratio, spec.seed);
          result.noisy = std::move(inj.noisy);
          result.noise_energy = std::move(inj.noise_energy);
          result.rho_k0 = noise.k0;
        } else if constexpr (std::is_same_v<T, WhiteNoise>) {
          result.noisy = inject_white_noise(result.clean, noise.sigma, spec.seed);
          result.rho_k0 = std::min(spec.band_limit, spec.frames);
        } else {
          result.rho_k0 = std::min(spec.band_limit, spec.frames);
        }
      },
      spec.noise);

  const MotionSequence& measured = result.noisy ? *result.noisy : result.clean;
  const DctPlan plan(measured.frames());
  for (std::size_t c = 0; c < measured.channels(); ++c) {
    const ChannelSpectrum s =
        plan.forward(channel_series(measured, c / kAxes, kAllAxes[c % kAxes]));
    result.rho.push_back(high_freq_ratio(s, result.rho_k0, true, 1e-8));
  }
  return result;
}

}  // namespace freqkf
