#include <gtest/gtest.h>

#include <cmath>

#include "freqkf/kalman.hpp"
#include "freqkf/metrics.hpp"
#include "freqkf/physics.hpp"
#include "freqkf/spectral.hpp"
#include "freqkf/synth.hpp"

using namespace freqkf;

namespace {

double channel_rho(const MotionSequence& m, std::size_t c, std::size_t k0) {
  return high_freq_ratio(dct(channel_series(m, c / kAxes, kAllAxes[c % kAxes])), k0, true, 1e-8);
}

}  // namespace

TEST(Rng, Reproducible) {
  Rng a(7, 3), b(7, 3), c(7, 4);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
  }
}

TEST(Rng, Ranges) {
  Rng r(1, 1);
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = r.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    const auto k = r.integer(-2, 3);
    EXPECT_GE(k, -2);
    EXPECT_LE(k, 3);
    EXPECT_LT(r.below(7), 7u);
    const double n = r.normal();
    sum += n;
    sq += n * n;
  }
  EXPECT_NEAR(sum / 20000.0, 0.0, 0.05);
  EXPECT_NEAR(sq / 20000.0, 1.0, 0.05);
}

TEST(Rng, SplitmixKnownValue) {
  // First output of the reference splitmix64 generator seeded with 0.
  EXPECT_EQ(splitmix64(0), 0xE220A8397B1DCDAFull);
}

TEST(Synth, SameSeedSameOutput) {
  for (SynthKind kind : {SynthKind::SinusoidMix, SynthKind::Polynomial, SynthKind::WalkLike}) {
    SynthSpec s;
    s.kind = kind;
    s.seed = 11;
    s.noise = HighBandNoise{};
    const SynthResult a = generate(s), b = generate(s);
    EXPECT_EQ(a.clean, b.clean);
    EXPECT_EQ(*a.noisy, *b.noisy);
    s.seed = 12;
    EXPECT_NE(generate(s).clean, a.clean);
  }
}

TEST(Synth, SinusoidMixIsBandLimited) {
  SynthSpec s;
  s.band_limit = 6;
  s.seed = 3;
  const MotionSequence m = generate_clean(s);
  for (std::size_t c = 0; c < m.channels(); ++c) EXPECT_LT(channel_rho(m, c, 10), 1e-9);
}

TEST(Synth, LowDegreePolynomialHasZeroJerk) {
  for (int degree = 0; degree <= 2; ++degree) {
    SynthSpec s;
    s.kind = SynthKind::Polynomial;
    s.polynomial_degree = degree;
    s.seed = 5;
    EXPECT_EQ(jerk_profile(generate_clean(s)), std::vector<double>(s.joints, 0.0));
  }
  SynthSpec cubic;
  cubic.kind = SynthKind::Polynomial;
  cubic.seed = 5;
  const auto jerk = jerk_profile(generate_clean(cubic));
  EXPECT_GT(*std::max_element(jerk.begin(), jerk.end()), 0.0);
}

TEST(Synth, WalkLikeIsValid) {
  SynthSpec s;
  s.kind = SynthKind::WalkLike;
  s.frames = 150;
  s.seed = 9;
  const MotionSequence m = generate_clean(s);
  EXPECT_FALSE(validate(m).has_value());
  EXPECT_EQ(m.frames(), 150u);
}

TEST(Synth, SpecValidation) {
  SynthSpec s;
  s.frames = 0;
  EXPECT_THROW(validate_spec(s), Error);
  s = SynthSpec{};
  s.noise = HighBandNoise{100, 0.5};
  EXPECT_THROW(validate_spec(s), Error);
  s.noise = HighBandNoise{10, 1.0};
  EXPECT_THROW(validate_spec(s), Error);
  s.noise = WhiteNoise{-1.0};
  EXPECT_THROW(validate_spec(s), Error);
  s = SynthSpec{};
  s.polynomial_degree = 4;
  s.kind = SynthKind::Polynomial;
  EXPECT_THROW(validate_spec(s), Error);
}

TEST(Injection, HitsTargetRatio) {
  SynthSpec s;
  s.seed = 21;
  const MotionSequence clean = generate_clean(s);
  for (double target : {0.5, 0.2, 1e-4}) {
    const NoiseInjection inj = inject_high_band_noise(clean, 10, target, 4);
    for (std::size_t c = 0; c < clean.channels(); ++c) {
      EXPECT_NEAR(channel_rho(inj.noisy, c, 10), target, 1e-6);
    }
  }
}

TEST(Injection, LowBandUntouched) {
  SynthSpec s;
  s.seed = 22;
  const MotionSequence clean = generate_clean(s);
  const NoiseInjection inj = inject_high_band_noise(clean, 10, 0.5, 1);
  for (std::size_t c = 0; c < clean.channels(); ++c) {
    const auto a = dct(channel_series(clean, c / kAxes, kAllAxes[c % kAxes])).coeffs;
    const auto b = dct(channel_series(inj.noisy, c / kAxes, kAllAxes[c % kAxes])).coeffs;
    for (std::size_t k = 0; k < 10; ++k) EXPECT_NEAR(a[k], b[k], 1e-12 * (1.0 + std::abs(a[k])));
  }
}

TEST(Injection, SeedsChangeNoiseNotRatio) {
  SynthSpec s;
  s.seed = 23;
  const MotionSequence clean = generate_clean(s);
  const auto a = inject_high_band_noise(clean, 10, 0.3, 1);
  const auto b = inject_high_band_noise(clean, 10, 0.3, 2);
  EXPECT_NE(a.noisy, b.noisy);
  for (std::size_t c = 0; c < clean.channels(); ++c) {
    EXPECT_NEAR(channel_rho(a.noisy, c, 10), channel_rho(b.noisy, c, 10), 1e-9);
  }
}

TEST(Injection, SmallRatioIsNearlyClean) {
  SynthSpec s;
  s.seed = 24;
  const MotionSequence clean = generate_clean(s);
  const auto inj = inject_high_band_noise(clean, 10, 1e-10, 1);
  for (std::size_t i = 0; i < clean.data().size(); ++i) {
    EXPECT_NEAR(inj.noisy.data()[i], clean.data()[i], 1e-4);
  }
}

TEST(Injection, Errors) {
  const MotionSequence flat = MotionSequence::zeros(20, 1, 50.0);
  EXPECT_THROW(inject_high_band_noise(flat, 10, 0.5, 1), Error);
  SynthSpec s;
  s.frames = 20;
  const MotionSequence clean = generate_clean(s);
  EXPECT_THROW(inject_high_band_noise(clean, 20, 0.5, 1), Error);
}

TEST(Refinement, BeatsRawAcrossSeeds) {
  for (double target : {0.2, 0.5, 0.8}) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      SynthSpec s;
      s.seed = seed;
      s.noise = HighBandNoise{10, target};
      const SynthResult r = generate(s);
      const MotionSequence refined = refine_motion(*r.noisy, RefinementConfig{}).refined;
      EXPECT_LT(squared_distance(refined, r.clean), squared_distance(*r.noisy, r.clean))
          << "target " << target << " seed " << seed;
    }
  }
}

TEST(Refinement, NearCleanDistortionIsSmall) {
  for (double target : {1e-4, 1e-5}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      SynthSpec s;
      s.seed = seed;
      s.noise = HighBandNoise{10, target};
      const SynthResult r = generate(s);
      const MotionSequence refined = refine_motion(*r.noisy, RefinementConfig{}).refined;
      EXPECT_LE(squared_distance(refined, r.clean), 1.05 * squared_distance(*r.noisy, r.clean));
    }
  }
}

TEST(Generate, SidecarRho) {
  SynthSpec s;
  s.seed = 7;
  s.noise = HighBandNoise{10, 0.5};
  const SynthResult r = generate(s);
  EXPECT_EQ(r.rho_k0, 10u);
  ASSERT_EQ(r.rho.size(), r.clean.channels());
  for (double v : r.rho) EXPECT_NEAR(v, 0.5, 1e-6);
  ASSERT_EQ(r.noise_energy.size(), r.clean.channels());

  SynthSpec white;
  white.noise = WhiteNoise{0.1};
  EXPECT_TRUE(generate(white).noisy.has_value());
  EXPECT_FALSE(generate(SynthSpec{}).noisy.has_value());
}
