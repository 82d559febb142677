#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "freqkf/core.hpp"
#include "oracles.hpp"

using namespace freqkf;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no freqkf::Error thrown";
  return ErrorCode::Io;
}

}  // namespace

TEST(MotionSequence, ValidShapeAccepted) {
  std::mt19937_64 gen(1);
  const MotionSequence m = oracle::random_motion(gen, 10, 17);
  EXPECT_FALSE(validate(m).has_value());
}

TEST(MotionSequence, NanRejected) {
  MotionSequence m = MotionSequence::zeros(10, 17, 50.0);
  m.at(3, 4, 1) = std::numeric_limits<double>::quiet_NaN();
  ASSERT_TRUE(validate(m).has_value());
  EXPECT_EQ(validate(m)->code(), ErrorCode::NonFinite);
}

TEST(MotionSequence, MissingFrameIsShapeMismatch) {
  const MotionSequence m(10, 17, std::vector<double>(9 * 17 * 3, 0.0), 50.0);
  EXPECT_EQ(code_of([&] { require_valid(m); }), ErrorCode::ShapeMismatch);
}

TEST(MotionSequence, BadFpsAndNamesRejected) {
  EXPECT_TRUE(validate(MotionSequence(2, 1, std::vector<double>(6, 0.0), 0.0)).has_value());
  EXPECT_TRUE(validate(MotionSequence(2, 1, std::vector<double>(6, 0.0), 50.0, {"a", "b"})).has_value());
  EXPECT_TRUE(validate(MotionSequence(0, 1, {}, 50.0)).has_value());
}

TEST(Channels, SingleJointGivesThreeColumns) {
  std::vector<double> data;
  for (int t = 0; t < 4; ++t) {
    data.insert(data.end(), {1.0 * t, 10.0 * t, 100.0 * t});
  }
  const MotionSequence m(4, 1, data, 30.0);
  const auto ch = split_channels(m);
  ASSERT_EQ(ch.size(), 3u);
  EXPECT_EQ(ch[1].axis, Axis::y);
  EXPECT_EQ(ch[1].series, (std::vector<double>{0, 10, 20, 30}));
  EXPECT_EQ(ch[2].series, (std::vector<double>{0, 100, 200, 300}));
}

TEST(Channels, OrderingIsJointMajor) {
  EXPECT_EQ(channel_index(1, Axis::y), 4u);
  std::mt19937_64 gen(2);
  const auto ch = split_channels(oracle::random_motion(gen, 5, 2));
  EXPECT_EQ(ch[4].joint_index, 1u);
  EXPECT_EQ(ch[4].axis, Axis::y);
}

TEST(Channels, RoundtripIsBitwise) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const MotionSequence m = oracle::random_motion(gen, 1 + trial * 3, 1 + trial % 7);
    const auto ch = split_channels(m);
    EXPECT_EQ(reassemble(ch, m.joints(), m.frames(), m.fps()), m);
  }
}

TEST(Channels, ReassembleShape) {
  std::vector<Channel> ch = {{0, Axis::x, {1, 2, 3, 4, 5}}, {0, Axis::y, {0, 0, 0, 0, 0}},
                             {0, Axis::z, {5, 4, 3, 2, 1}}};
  const MotionSequence m = reassemble(ch, 1, 5, 50.0);
  EXPECT_EQ(m.frames(), 5u);
  EXPECT_EQ(m.joints(), 1u);
  EXPECT_EQ(m.at(4, 0, 2), 1.0);
}

TEST(Channels, ReassembleErrors) {
  std::vector<Channel> two = {{0, Axis::x, {1}}, {0, Axis::y, {1}}};
  EXPECT_EQ(code_of([&] { reassemble(two, 1, 1, 50.0); }), ErrorCode::ChannelCountMismatch);
  std::vector<Channel> ragged = {{0, Axis::x, {1, 2}}, {0, Axis::y, {1}}, {0, Axis::z, {1, 2}}};
  EXPECT_EQ(code_of([&] { reassemble(ragged, 1, 2, 50.0); }), ErrorCode::LengthMismatch);
  std::vector<Channel> dup = {{0, Axis::x, {1}}, {0, Axis::x, {1}}, {0, Axis::z, {1}}};
  EXPECT_EQ(code_of([&] { reassemble(dup, 1, 1, 50.0); }), ErrorCode::ChannelCountMismatch);
}

TEST(Skeleton, LimbsFromParents) {
  const std::vector<int> parents = {-1, 0, 1, 0};
  const auto limbs = Skeleton::limbs_from_parents(parents);
  ASSERT_EQ(limbs.size(), 3u);
  EXPECT_EQ(limbs[0], (std::pair<std::size_t, std::size_t>{0, 1}));
  EXPECT_EQ(limbs[2], (std::pair<std::size_t, std::size_t>{0, 3}));
}

TEST(Skeleton, ValidationCatchesCyclesAndBounds) {
  Skeleton sk;
  sk.joint_count = 3;
  sk.parents = {-1, 0, 1};
  EXPECT_NO_THROW(validate_skeleton(sk));
  sk.parents = {1, 2, 0};
  EXPECT_EQ(code_of([&] { validate_skeleton(sk); }), ErrorCode::InvalidSkeleton);
  sk.parents = {-1, 2, 1};
  EXPECT_EQ(code_of([&] { validate_skeleton(sk); }), ErrorCode::InvalidSkeleton);
  sk.parents = {-1, 0, 1};
  AngleConstraint c;
  c.vec1 = {0, 1};
  c.vec2 = {1, 2};
  c.cos_min = 0.5;
  c.cos_max = 0.2;
  sk.angle_constraints = {c};
  EXPECT_EQ(code_of([&] { validate_skeleton(sk); }), ErrorCode::InvalidSkeleton);
  sk.angle_constraints[0].cos_max = 0.9;
  sk.angle_constraints[0].vec2 = {1, 7};
  EXPECT_EQ(code_of([&] { validate_skeleton(sk); }), ErrorCode::InvalidSkeleton);
}

TEST(Config, DefaultsAndValidation) {
  const RefinementConfig c;
  EXPECT_EQ(c.k0, 10u);
  EXPECT_EQ(c.q0, 1e-6);
  EXPECT_EQ(c.r0, 1e-2);
  EXPECT_EQ(c.lambda_q, 0.2);
  EXPECT_EQ(c.lambda_r, 0.5);
  EXPECT_EQ(c.epsilon, 1e-8);
  EXPECT_TRUE(c.include_dc);
  EXPECT_EQ(c.mode, RefinementMode::Adaptive);
  EXPECT_NO_THROW(validate_config(c));
  RefinementConfig bad = c;
  bad.r0 = 0.0;
  EXPECT_EQ(code_of([&] { validate_config(bad); }), ErrorCode::InvalidConfig);
  bad = c;
  bad.gamma = 1.5;
  EXPECT_EQ(code_of([&] { validate_config(bad); }), ErrorCode::GammaOutOfRange);
}

TEST(Config, ModeNames) {
  for (RefinementMode m : {RefinementMode::Adaptive, RefinementMode::FixedKalman, RefinementMode::FixedSuppress}) {
    EXPECT_EQ(parse_refinement_mode(to_string(m)), m);
  }
  EXPECT_EQ(parse_refinement_mode("fixed_kalman"), RefinementMode::FixedKalman);
  EXPECT_FALSE(parse_refinement_mode("kalman").has_value());
}
