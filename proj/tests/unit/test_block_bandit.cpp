#include <cmath>

#include <gtest/gtest.h>

#include "bbcg/block_bandit.hpp"

using namespace bbcg;

namespace {

BbcgConfig theorem_config(Index T, const FeasibleSet& set, const LossSequence& seq) {
  return derive_config(T, set, seq);
}

}  // namespace

TEST(BlockBandit, ScheduleExample) {
  const auto ball = FeasibleSet::ball(2, 1.0);
  const auto cfg = derive_config(256, ball, 1.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(cfg.eta, 1.0 / 64);
  EXPECT_DOUBLE_EQ(cfg.delta, 0.25);
  EXPECT_DOUBLE_EQ(cfg.epsilon, 1.0);
  EXPECT_EQ(cfg.block_size, 16);
  EXPECT_EQ(cfg.num_blocks(), 16);
  EXPECT_TRUE(cfg.derived);
}

TEST(BlockBandit, RadiusPrecondition) {
  const auto ball = FeasibleSet::ball(2, 1.0);
  EXPECT_DOUBLE_EQ(derive_config(16, ball, 1.0, 1.0, 2.0).delta, 1.0);
  EXPECT_THROW(derive_config(16, ball, 1.0, 1.0, 2.1), ConfigurationError);
  EXPECT_THROW(derive_config(16, ball, 1.0, 1.0, 0.0), ConfigurationError);
  EXPECT_THROW(derive_config(0, ball, 1.0, 1.0, 1.0), ConfigurationError);
}

TEST(BlockBandit, DefaultScaleConstant) {
  const auto ball = FeasibleSet::ball(2, 1.0);
  EXPECT_DOUBLE_EQ(derive_config(256, ball, 1.0, 1.0).scale_constant, std::sqrt(2.0));
  // (nM/(Gr))^2 = 4 > T = 3
  EXPECT_THROW(derive_config(3, ball, 1.0, 1.0), ConfigurationError);
  EXPECT_NO_THROW(derive_config(4, ball, 1.0, 1.0));
}

TEST(BlockBandit, IntegerSqrt) {
  EXPECT_EQ(integer_sqrt(0), 0);
  EXPECT_EQ(integer_sqrt(15), 3);
  EXPECT_EQ(integer_sqrt(16), 4);
  EXPECT_EQ(integer_sqrt(65535), 255);
  EXPECT_EQ(integer_sqrt(65536), 256);
}

TEST(BlockBandit, BoundFormulas) {
  // c = G = M = r = R = 1, n = 1: (3 + 1 + 6 + 4 + 4)·T^{3/4}
  EXPECT_DOUBLE_EQ(regret_upper_bound(16, 1, 1.0, 1.0, 1.0, 1.0, 1.0), 18.0 * 8.0);
  // (3/4 + 1/2 + 1/4)·T
  EXPECT_DOUBLE_EQ(lmo_call_upper_bound(100, 1, 1.0, 1.0, 1.0), 150.0);
}

TEST(BlockBandit, ZeroLossesStayAtOrigin) {
  const auto ball = FeasibleSet::ball(3, 1.0);
  const auto seq = LossSequence::zero(64, 3);
  const auto cfg = derive_config(64, ball, seq, 0.5);
  const auto record = run(cfg, ball, seq, 1);
  for (const auto& block : record.blocks) EXPECT_TRUE(block.x_next.isZero(0.0));
  EXPECT_DOUBLE_EQ(record.total_loss, 0.0);
  EXPECT_DOUBLE_EQ(regret(record, seq, ball, 1e-9), 0.0);
}

TEST(BlockBandit, SingleBlockUsesNoOracle) {
  const auto ball = FeasibleSet::ball(2, 1.0);
  const auto seq = LossSequence::generate(LossFamily::Quadratic, 3, 16, ball);
  BbcgConfig cfg = theorem_config(16, ball, seq);
  cfg.block_size = 16;
  const auto record = run(cfg, ball, seq, 3);
  EXPECT_EQ(record.lmo_calls, 0);
  ASSERT_EQ(record.blocks.size(), 1u);
  EXPECT_FALSE(record.blocks[0].trace.has_value());
  for (const auto& round : record.rounds) EXPECT_NEAR((round.y).norm(), cfg.delta, 1e-12);
}

TEST(BlockBandit, BlocksPartitionRounds) {
  const auto ball = FeasibleSet::ball(2, 1.0);
  for (Index T : {49, 50, 256}) {
    const auto seq = LossSequence::generate(LossFamily::Linear, 4, T, ball);
    BbcgConfig cfg = theorem_config(T, ball, seq);
    cfg.block_size = 7;
    const auto record = run(cfg, ball, seq, 4);
    EXPECT_EQ(static_cast<Index>(record.blocks.size()), (T + 6) / 7);
    EXPECT_EQ(static_cast<Index>(record.rounds.size()), T);
    EXPECT_EQ(record.total_rounds, T);

    Index covered = 0;
    Index lmo_calls = 0;
    double total_loss = 0.0;
    for (const auto& block : record.blocks) {
      for (const auto& s : block.gradient.samples) {
        EXPECT_EQ(s.t, covered + 1);
        EXPECT_EQ(block_of_round(s.t, 7), block.m);
        EXPECT_TRUE(bitwise_equal(s.y, record.rounds[static_cast<std::size_t>(covered)].y));
        ++covered;
      }
      if (block.trace) lmo_calls += block.trace->lmo_calls;
    }
    for (const auto& round : record.rounds) total_loss += round.loss;
    EXPECT_EQ(covered, T);
    EXPECT_EQ(lmo_calls, record.lmo_calls);
    EXPECT_DOUBLE_EQ(total_loss, record.total_loss);
  }
}

TEST(BlockBandit, PredictionsShareBlockCenter) {
  const auto ball = FeasibleSet::ball(3, 1.0);
  const auto seq = LossSequence::generate(LossFamily::Quadratic, 5, 400, ball);
  const auto cfg = theorem_config(400, ball, seq);
  const auto record = run(cfg, ball, seq, 5);
  const ShrunkSet region(ball, cfg.delta);
  for (std::size_t i = 0; i < record.blocks.size(); ++i) {
    const auto& block = record.blocks[i];
    if (i > 0) {
      EXPECT_TRUE(bitwise_equal(block.x_play, record.blocks[i - 1].x_next));
    }
    EXPECT_TRUE(region.contains(block.x_next));
    for (const auto& s : block.gradient.samples) EXPECT_NEAR((s.y - block.x_play).norm(), cfg.delta, 1e-12);
    if (block.trace) {
      EXPECT_LE(block.trace->final_gap, cfg.epsilon);
      EXPECT_TRUE(bitwise_equal(block.trace->iterates.front().z, block.x_play));
    }
  }
}

// x_m is computed from blocks 1..m-1 only; resampling block m's exploration
// must leave x_m unchanged and (generically) change x_{m+1}.
TEST(BlockBandit, SolveIgnoresCurrentBlock) {
  const auto ball = FeasibleSet::ball(2, 1.0);
  const auto seq = LossSequence::generate(LossFamily::Linear, 6, 400, ball);
  auto cfg = theorem_config(400, ball, seq);
  cfg.epsilon = 1e-6;
  const Index target = 5;
  const auto base = run(cfg, ball, seq, 6);

  RunOptions options;
  options.exploration = [&](std::uint64_t seed, Index t) {
    if (block_of_round(t, cfg.block_size) == target) return make_engine(seed + 999, Stream::Exploration, t);
    return default_exploration_stream(seed, t);
  };
  const auto changed = run(cfg, ball, seq, 6, options);
  const auto m = static_cast<std::size_t>(target - 1);
  EXPECT_FALSE(bitwise_equal(base.blocks[m].gradient.g_hat, changed.blocks[m].gradient.g_hat));
  EXPECT_TRUE(bitwise_equal(base.blocks[m].x_next, changed.blocks[m].x_next));
  EXPECT_FALSE(bitwise_equal(base.blocks[m + 1].x_next, changed.blocks[m + 1].x_next));
  for (std::size_t i = 0; i < m; ++i) EXPECT_TRUE(bitwise_equal(base.blocks[i].x_next, changed.blocks[i].x_next));
}

TEST(BlockBandit, ParallelMatchesSequential) {
  const auto box = FeasibleSet::box(3, 1.0);
  const auto seq = LossSequence::generate(LossFamily::ShiftingTarget, 7, 1024, box);
  const auto cfg = theorem_config(1024, box, seq);
  RunOptions sequential, parallel;
  parallel.mode = ExecutionMode::Parallel;
  const auto a = run(cfg, box, seq, 7, sequential);
  const auto b = run(cfg, box, seq, 7, parallel);
  EXPECT_TRUE(bitwise_equal(a, b));
}

TEST(BlockBandit, SameSeedSameRecord) {
  const auto ball = FeasibleSet::ball(2, 1.0);
  const auto seq = LossSequence::generate(LossFamily::Quadratic, 8, 256, ball);
  const auto cfg = theorem_config(256, ball, seq);
  EXPECT_TRUE(bitwise_equal(run(cfg, ball, seq, 8), run(cfg, ball, seq, 8)));
  EXPECT_FALSE(bitwise_equal(run(cfg, ball, seq, 8), run(cfg, ball, seq, 9)));
}

TEST(BlockBandit, NoFeasibilityViolations) {
  for (const auto& set : {FeasibleSet::ball(2, 1.0), FeasibleSet::box(3, 0.5), FeasibleSet::l1_ball(3, 1.0)}) {
    const auto seq = LossSequence::generate(LossFamily::Quadratic, 9, 1024, set);
    RunOptions options;
    options.check_feasibility = true;
    const auto record = run(derive_config(1024, set, seq, 0.5 * set.inner_radius()), set, seq, 9, options);
    EXPECT_EQ(record.feasibility_violations, 0) << to_string(set.kind());
  }
}

TEST(BlockBandit, RegretExamples) {
  RunRecord record;
  record.total_loss = 3.5;
  EXPECT_DOUBLE_EQ(regret(record, OfflineOptimum{Vector::Zero(1), -1.5, 0.0}), 5.0);

  // One linear loss repeated: the comparator earns -T·R.
  const auto ball = FeasibleSet::ball(2, 1.0);
  Vector c(2);
  c << 1.0, 0.0;
  const auto seq = LossSequence::linear(std::vector<Vector>(16, c), 1.0);
  const auto cfg = derive_config(16, ball, seq, 1.0);
  const auto run_record = run(cfg, ball, seq, 10);
  EXPECT_DOUBLE_EQ(regret(run_record, seq, ball, 1e-9), run_record.total_loss + 16.0);
}

TEST(BlockBandit, RejectsUnsupportedInputs) {
  const auto simplex = FeasibleSet::simplex(3);
  const auto seq = LossSequence::generate(LossFamily::Quadratic, 1, 16, simplex);
  BbcgConfig cfg{16, 4, 0.1, 0.01, 1.0, 1.0, false};
  EXPECT_THROW(run(cfg, simplex, seq, 1), CapabilityError);

  const auto ball = FeasibleSet::ball(3, 1.0);
  const auto ball_seq = LossSequence::generate(LossFamily::Quadratic, 1, 16, ball);
  EXPECT_THROW(run(BbcgConfig{17, 4, 0.1, 0.1, 1.0, 1.0, false}, ball, ball_seq, 1), ConfigurationError);
  EXPECT_THROW(run(BbcgConfig{16, 0, 0.1, 0.1, 1.0, 1.0, false}, ball, ball_seq, 1), ConfigurationError);
  EXPECT_THROW(run(BbcgConfig{16, 4, 0.1, 2.0, 1.0, 1.0, false}, ball, ball_seq, 1), ConfigurationError);
  EXPECT_THROW(run(BbcgConfig{16, 4, 0.1, 0.1, 1.0, 1.0, false}, FeasibleSet::ball(2, 1.0), ball_seq, 1),
               ConfigurationError);
}

TEST(BlockBandit, CountersOnlyModeKeepsTotals) {
  const auto ball = FeasibleSet::ball(2, 1.0);
  const auto seq = LossSequence::generate(LossFamily::Quadratic, 11, 256, ball);
  const auto cfg = theorem_config(256, ball, seq);
  RunOptions lean;
  lean.keep_details = false;
  const auto full = run(cfg, ball, seq, 11);
  const auto slim = run(cfg, ball, seq, 11, lean);
  EXPECT_TRUE(slim.rounds.empty());
  EXPECT_TRUE(slim.blocks.empty());
  EXPECT_EQ(slim.lmo_calls, full.lmo_calls);
  EXPECT_TRUE(bitwise_equal(slim.total_loss, full.total_loss));
}
