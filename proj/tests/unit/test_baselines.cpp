#include <cmath>

#include <gtest/gtest.h>

#include "bbcg/baselines.hpp"

using namespace bbcg;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

}  // namespace

TEST(Baselines, FkmStepExamples) {
  const auto ball = FeasibleSet::ball(2, 1.0);
  EXPECT_EQ(fkm_step(ball, vec({0, 0}), vec({1, 0}), 0.1), vec({-0.1, 0}));
  EXPECT_EQ(fkm_step(ball, vec({0, 0}), vec({-20, 0}), 0.1), vec({1, 0}));
  const ShrunkSet region(ball, 0.5);
  EXPECT_EQ(fkm_step(region, vec({0, 0}), vec({-20, 0}), 0.1), vec({0.5, 0}));
}

TEST(Baselines, FkmConfigFormula) {
  const auto ball = FeasibleSet::ball(2, 1.0);
  const auto cfg = derive_fkm_config(256, ball, 1.0);
  EXPECT_DOUBLE_EQ(cfg.delta, 0.25);
  // eta = R / (nM/delta) · T^{-3/4} = 1 / 8 / 64
  EXPECT_DOUBLE_EQ(cfg.eta, 1.0 / 512);
  EXPECT_DOUBLE_EQ(derive_fkm_config(1, ball, 1.0).delta, 1.0);
}

TEST(Baselines, OfwConfigFormula) {
  const auto cfg = derive_ofw_config(16, FeasibleSet::ball(2, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(cfg.eta, 4.0 / 8.0);
  EXPECT_THROW(derive_ofw_config(16, FeasibleSet::ball(2), 0.0), ConfigurationError);
}

TEST(Baselines, ZeroLossesGiveZeroRegret) {
  const auto ball = FeasibleSet::ball(3, 1.0);
  const auto seq = LossSequence::zero(100, 3);
  const auto fkm = run_fkm(derive_fkm_config(100, ball, seq.value_bound()), ball, seq, 1);
  const auto ofw = run_ofw(derive_ofw_config(100, ball, seq.lipschitz_bound()), ball, seq, 1);
  EXPECT_DOUBLE_EQ(regret(fkm, seq, ball, 1e-9), 0.0);
  EXPECT_DOUBLE_EQ(regret(ofw, seq, ball, 1e-9), 0.0);
}

TEST(Baselines, Counters) {
  const auto ball = FeasibleSet::ball(2, 1.0);
  const auto seq = LossSequence::generate(LossFamily::Quadratic, 2, 300, ball);
  const auto fkm = run_fkm(derive_fkm_config(300, ball, seq.value_bound()), ball, seq, 2);
  EXPECT_EQ(fkm.projections, 300);
  EXPECT_EQ(fkm.lmo_calls, 0);
  EXPECT_EQ(fkm.algorithm, "fkm");
  const auto ofw = run_ofw(derive_ofw_config(300, ball, seq.lipschitz_bound()), ball, seq, 2);
  EXPECT_EQ(ofw.lmo_calls, 300);
  EXPECT_EQ(ofw.projections, 0);
  EXPECT_EQ(ofw.algorithm, "ofw");
  EXPECT_EQ(ofw.rounds.size(), 300u);
}

TEST(Baselines, OfwStepDoesNotIncreaseObjective) {
  const auto box = FeasibleSet::box(3, 1.0);
  Engine rng = make_engine(3, Stream::Testing, 0);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 500; ++i) {
    SurrogateObjective obj{0.5, vec({normal(rng), normal(rng), normal(rng)}), Vector::Zero(3)};
    const Vector x = random_member(box, rng);
    const auto step = ofw_step(obj, box, x);
    EXPECT_LE(obj.value(step.x_next), obj.value(x) + 1e-12);
    EXPECT_TRUE(box.contains(step.x_next));
  }
}

TEST(Baselines, IteratesStayFeasible) {
  for (const auto& set : {FeasibleSet::ball(2, 1.0), FeasibleSet::box(3, 0.5), FeasibleSet::l1_ball(3, 1.0)}) {
    const auto seq = LossSequence::generate(LossFamily::ShiftingTarget, 4, 512, set);
    RunOptions options;
    options.check_feasibility = true;
    EXPECT_EQ(run_fkm(derive_fkm_config(512, set, seq.value_bound()), set, seq, 4, options).feasibility_violations, 0);
    EXPECT_EQ(run_ofw(derive_ofw_config(512, set, seq.lipschitz_bound()), set, seq, 4, options).feasibility_violations,
              0);
  }
}

TEST(Baselines, OfwRunsOnSimplexButFkmDoesNot) {
  const auto simplex = FeasibleSet::simplex(3);
  const auto seq = LossSequence::generate(LossFamily::Linear, 5, 64, simplex);
  RunOptions options;
  options.check_feasibility = true;
  EXPECT_EQ(run_ofw(derive_ofw_config(64, simplex, 1.0), simplex, seq, 5, options).feasibility_violations, 0);
  BaselineConfig fkm{BaselineAlgorithm::FKM, 64, 0.1, 0.1};
  EXPECT_THROW(run_fkm(fkm, simplex, seq, 5), CapabilityError);
}

TEST(Baselines, Deterministic) {
  const auto ball = FeasibleSet::ball(2, 1.0);
  const auto seq = LossSequence::generate(LossFamily::Quadratic, 6, 256, ball);
  const auto fkm = derive_fkm_config(256, ball, seq.value_bound());
  EXPECT_TRUE(bitwise_equal(run_fkm(fkm, ball, seq, 6), run_fkm(fkm, ball, seq, 6)));
  const auto ofw = derive_ofw_config(256, ball, seq.lipschitz_bound());
  EXPECT_TRUE(bitwise_equal(run_ofw(ofw, ball, seq, 6), run_ofw(ofw, ball, seq, 99)));
}

TEST(Baselines, RejectsMismatchedConfig) {
  const auto ball = FeasibleSet::ball(2, 1.0);
  const auto seq = LossSequence::generate(LossFamily::Quadratic, 7, 16, ball);
  EXPECT_THROW(run_fkm(derive_ofw_config(16, ball, 1.0), ball, seq, 7), ConfigurationError);
  EXPECT_THROW(run_ofw(derive_fkm_config(16, ball, 1.0), ball, seq, 7), ConfigurationError);
  EXPECT_THROW(run_ofw(derive_ofw_config(17, ball, 1.0), ball, seq, 7), ConfigurationError);
}
