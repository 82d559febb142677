#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <variant>
#include <vector>

#include "freqkf/core.hpp"

namespace freqkf {

// Deterministic random stream. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; it is seeded with
//   splitmix64(seed + splitmix64(stream))
// so each channel (stream) gets an independent, reproducible sequence.
// Uniforms take the top 53 bits of one draw; normals use Box-Muller on two
// uniforms (no cached second value). std distributions are avoided because
// their algorithms are implementation-defined.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }
  double uniform();                              // [0, 1)
  double uniform(double lo, double hi);          // [lo, hi)
  std::uint64_t below(std::uint64_t n);          // [0, n), n > 0
  std::int64_t integer(std::int64_t lo, std::int64_t hi);  // [lo, hi]
  double normal();

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

inline constexpr std::string_view kRngDescription =
    "mt19937_64 seeded with splitmix64(seed + splitmix64(stream)); uniform = (u64 >> 11) * 2^-53; "
    "normal = Box-Muller sqrt(-2 ln(1-u1)) cos(2 pi u2)";

enum class SynthKind { SinusoidMix, Polynomial, WalkLike };

std::string_view to_string(SynthKind kind);
std::optional<SynthKind> parse_synth_kind(std::string_view text);

struct NoNoise {};
struct HighBandNoise {
  std::size_t k0 = 10;
  double target_ratio = 0.5;
};
struct WhiteNoise {
  double sigma = 0.0;
};
using NoiseSpec = std::variant<NoNoise, HighBandNoise, WhiteNoise>;

struct SynthSpec {
  std::size_t frames = 100;
  std::size_t joints = 17;
  double fps = 50.0;
  SynthKind kind = SynthKind::SinusoidMix;
  std::uint64_t seed = 0;
  NoiseSpec noise = NoNoise{};
  // sinusoid_mix uses cosine frequency indices strictly below this.
  std::size_t band_limit = 10;
  // polynomial kind degree, 0..3.
  int polynomial_degree = 3;
};

// Throws InvalidConfig on an out-of-domain field.
void validate_spec(const SynthSpec& spec);

// sinusoid_mix: per channel, 1..5 DCT-basis cosines with frequency index
//   below band_limit, so the high band is exactly empty.
// polynomial: per channel, c0 + c1 t + c2 t^2 + c3 t^3 with dyadic
//   coefficients, evaluated exactly in double precision.
// walk_like: forward drift plus stride-frequency sway and a double-frequency
//   vertical bob, phase-shifted between left and right joints.
MotionSequence generate_clean(const SynthSpec& spec);

struct NoiseInjection {
  MotionSequence noisy;
  std::vector<double> noise_energy;  // per channel, energy added to the spectrum
};

// Adds Gaussian DCT coefficients to bins k >= k0 of every channel, scaled in
// closed form so that the channel's high_freq_ratio equals target_ratio.
// Low bins are untouched. Throws CutoffOutOfRange (k0 >= T), InvalidConfig,
// DegenerateChannel (no energy to measure against, or the clean high band
// already exceeds the target).
NoiseInjection inject_high_band_noise(const MotionSequence& motion, std::size_t k0,
                                      double target_ratio, std::uint64_t seed,
                                      bool include_dc = true, double epsilon = 1e-8);

// i.i.d. N(0, sigma^2) added to every coordinate.
MotionSequence inject_white_noise(const MotionSequence& motion, double sigma, std::uint64_t seed);

struct SynthResult {
  MotionSequence clean;
  std::optional<MotionSequence> noisy;
  std::vector<double> rho;           // per channel, of noisy if present else clean
  std::vector<double> noise_energy;  // per channel; empty without noise
  std::size_t rho_k0 = 0;            // cutoff used for rho
};

SynthResult generate(const SynthSpec& spec);

}  // namespace freqkf
