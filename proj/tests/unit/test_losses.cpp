#include <cmath>

#include <gtest/gtest.h>

#include "bbcg/losses.hpp"

using namespace bbcg;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

}  // namespace

TEST(Losses, LinearGenerationHasUnitDirections) {
  const auto ball = FeasibleSet::ball(2, 1.0);
  const auto seq = LossSequence::generate(LossFamily::Linear, 7, 4, ball);
  EXPECT_EQ(seq.horizon(), 4);
  EXPECT_DOUBLE_EQ(seq.lipschitz_bound(), 1.0);
  EXPECT_DOUBLE_EQ(seq.value_bound(), 1.0);
  for (Index t = 1; t <= 4; ++t) EXPECT_NEAR(seq.parameter(t).norm(), 1.0, 1e-15);
}

TEST(Losses, QuadraticConstantsAreAnalytic) {
  for (double R : {1.0, 2.5}) {
    const auto seq = LossSequence::generate(LossFamily::Quadratic, 3, 10, FeasibleSet::ball(3, R));
    EXPECT_DOUBLE_EQ(seq.lipschitz_bound(), 1.0);
    EXPECT_DOUBLE_EQ(seq.value_bound(), R);
    for (Index t = 1; t <= 10; ++t) EXPECT_LE(seq.parameter(t).norm(), R * (1 + 1e-12));
  }
}

TEST(Losses, GenerationIsDeterministic) {
  const auto set = FeasibleSet::box(3, 1.0);
  for (auto family : {LossFamily::Linear, LossFamily::Quadratic, LossFamily::ShiftingTarget}) {
    const auto a = LossSequence::generate(family, 7, 50, set);
    const auto b = LossSequence::generate(family, 7, 50, set);
    const auto c = LossSequence::generate(family, 8, 50, set);
    bool differs = false;
    for (Index t = 1; t <= 50; ++t) {
      EXPECT_TRUE(bitwise_equal(a.parameter(t), b.parameter(t)));
      differs = differs || !bitwise_equal(a.parameter(t), c.parameter(t));
    }
    EXPECT_TRUE(differs);
  }
}

TEST(Losses, ValueExamples) {
  const auto lin = LossSequence::linear({vec({0, 1})}, 1.0);
  EXPECT_DOUBLE_EQ(lin.value(1, vec({0.3, 0.5})), 0.5);
  const auto quad = LossSequence::quadratic({vec({1, 0})}, 1.0);
  EXPECT_DOUBLE_EQ(quad.value(1, vec({0, 0})), 0.25);
  EXPECT_DOUBLE_EQ(quad.value(1, vec({1, 0})), 0.0);
  EXPECT_DOUBLE_EQ(LossSequence::zero(3, 2).value(2, vec({5, 5})), 0.0);
}

TEST(Losses, RoundOutOfRangeThrows) {
  const auto lin = LossSequence::linear({vec({0, 1})}, 1.0);
  EXPECT_THROW(lin.value(0, vec({0, 0})), std::out_of_range);
  EXPECT_THROW(lin.value(2, vec({0, 0})), std::out_of_range);
  EXPECT_THROW(LossSequence::generate(LossFamily::Linear, 1, 0, FeasibleSet::ball(2)), ConfigurationError);
  EXPECT_THROW(parse_loss_family("cubic"), ConfigurationError);
  EXPECT_THROW(LossSequence::quadratic({vec({2, 0})}, 1.0), ConfigurationError);
}

TEST(Losses, GradientMatchesFiniteDifferences) {
  const auto set = FeasibleSet::ball(3, 1.0);
  for (auto family : {LossFamily::Linear, LossFamily::Quadratic}) {
    const auto seq = LossSequence::generate(family, 2, 5, set);
    Engine rng = make_engine(2, Stream::Testing, 0);
    const Vector x = random_member(set, rng);
    const Vector g = seq.gradient(3, x);
    for (Index i = 0; i < 3; ++i) {
      Vector e = Vector::Zero(3);
      e(i) = 1e-6;
      const double fd = (seq.value(3, x + e) - seq.value(3, x - e)) / 2e-6;
      EXPECT_NEAR(g(i), fd, 1e-7);
    }
  }
}

// Sampled check of G and M on 10 random rounds × 1000 points.
TEST(Losses, SampledBoundsHold) {
  for (const auto& set : {FeasibleSet::ball(3, 1.0), FeasibleSet::box(3, 0.5), FeasibleSet::l1_ball(3, 2.0)}) {
    for (auto family : {LossFamily::Linear, LossFamily::Quadratic, LossFamily::ShiftingTarget}) {
      const auto seq = LossSequence::generate(family, 11, 200, set);
      Engine rng = make_engine(11, Stream::Testing, 1);
      std::uniform_int_distribution<Index> round(1, 200);
      for (int r = 0; r < 10; ++r) {
        const Index t = round(rng);
        for (int i = 0; i < 1000; ++i) {
          const Vector x = random_member(set, rng);
          EXPECT_LE(seq.gradient(t, x).norm(), seq.lipschitz_bound() + 1e-12);
          EXPECT_LE(std::abs(seq.value(t, x)), seq.value_bound() + 1e-12);
        }
      }
    }
  }
}

TEST(Losses, OfflineOptimumLinearIsLmoOfSum) {
  const auto ball = FeasibleSet::ball(2, 1.0);
  const auto seq = LossSequence::linear({vec({1, 0}), vec({1, 0})}, 1.0);
  const auto opt = offline_optimum(seq, ball, 1e-8);
  EXPECT_EQ(opt.point, vec({-1, 0}));
  EXPECT_DOUBLE_EQ(opt.value, -2.0);
}

TEST(Losses, OfflineOptimumInteriorQuadratic) {
  const auto ball = FeasibleSet::ball(2, 1.0);
  const auto seq = LossSequence::quadratic({vec({0.5, 0})}, 1.0);
  const auto opt = offline_optimum(seq, ball, 1e-8);
  EXPECT_NEAR((opt.point - vec({0.5, 0})).norm(), 0.0, 1e-8);
  EXPECT_NEAR(opt.value, 0.0, 1e-8);
}

TEST(Losses, OfflineOptimumSymmetricPairMatchesGridSearch) {
  const auto ball = FeasibleSet::ball(2, 1.0);
  const auto seq = LossSequence::quadratic({vec({1, 0}), vec({-1, 0})}, 1.0);
  const auto opt = offline_optimum(seq, ball, 1e-8);

  // grid search over the disk at resolution 1e-3
  double grid_best = std::numeric_limits<double>::infinity();
  for (int i = -1000; i <= 1000; ++i) {
    for (int j = -1000; j <= 1000; ++j) {
      const Vector x = vec({i * 1e-3, j * 1e-3});
      if (x.squaredNorm() > 1.0) continue;
      grid_best = std::min(grid_best, seq.total_value(x));
    }
  }
  EXPECT_NEAR(opt.value, 0.5, 1e-8);
  EXPECT_NEAR(opt.point.norm(), 0.0, 1e-4);
  EXPECT_LE(opt.value, grid_best + 1e-12);
  EXPECT_NEAR(grid_best, 0.5, 1e-6);
}

TEST(Losses, OfflineOptimumCertificate) {
  for (const auto& set : {FeasibleSet::ball(3, 1.0), FeasibleSet::box(3, 0.5), FeasibleSet::l1_ball(3, 1.0),
                          FeasibleSet::simplex(3)}) {
    for (auto family : {LossFamily::Linear, LossFamily::Quadratic, LossFamily::ShiftingTarget}) {
      const auto seq = LossSequence::generate(family, 13, 300, set);
      const double tol = default_gap_tol(seq);
      const auto opt = offline_optimum(seq, set, tol);
      EXPECT_TRUE(set.contains(opt.point));
      EXPECT_LE(opt.gap, tol);
      Engine rng = make_engine(13, Stream::Testing, 0);
      for (int i = 0; i < 100; ++i) EXPECT_GE(seq.total_value(random_member(set, rng)), opt.value - tol);
    }
  }
}
