#pragma once

// Self-check suite: each check reproduces one acceptance criterion of the
// library at a pinned tolerance. Shared by the acceptance test binary and the
// `verify` CLI subcommand.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bbcg/bbcg.hpp"

namespace bbcg::verify {

struct CriterionResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

template <class... Args>
std::string str(const Args&... args) {
  std::ostringstream os;
  os.precision(6);
  (os << ... << args);
  return os.str();
}

/// Largest ||g|| / (nM/δ) seen by any estimator check; must stay <= 1.
struct EstimatorBoundTracker {
  std::mutex mutex;
  double worst_excess = -std::numeric_limits<double>::infinity();  // ||g|| - nM/δ
  Index samples = 0;

  void observe(const Vector& g, Index n, double M, double delta) {
    const double excess = g.norm() - static_cast<double>(n) * M / delta;
    std::lock_guard lock(mutex);
    worst_excess = std::max(worst_excess, excess);
    ++samples;
  }
};

inline EstimatorBoundTracker& estimator_tracker() {
  static EstimatorBoundTracker tracker;
  return tracker;
}

/// Random instance: F(x) = eta·g·x + ||x - anchor||^2 over a ball, with a
/// feasible starting point.
struct SurrogateInstance {
  FeasibleSet ball;
  SurrogateObjective objective;
  Vector x_init;
};

inline std::vector<SurrogateInstance> surrogate_instances(Index count, std::uint64_t seed) {
  constexpr std::array<Index, 3> dims{2, 10, 50};
  std::vector<SurrogateInstance> out;
  for (Index i = 0; i < count; ++i) {
    Engine rng = make_engine(seed, Stream::Testing, static_cast<std::uint64_t>(i));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Index n = dims[static_cast<std::size_t>(i) % dims.size()];
    const double R = 0.5 + 1.5 * unit(rng);
    FeasibleSet ball = FeasibleSet::ball(n, R);
    Vector anchor = random_member(ball, rng);
    Vector g(n);
    for (Index k = 0; k < n; ++k) g(k) = normal(rng);
    const double eta = 0.05 + 2.0 * unit(rng);
    // scale so the unconstrained minimizer anchor - eta·g/2 lands up to ~2R away
    g *= 4.0 * R * unit(rng) / (eta * std::max(g.norm(), 1e-12));
    Vector x_init = random_member(ball, rng);
    out.push_back({ball, SurrogateObjective{eta, g, anchor}, x_init});
  }
  return out;
}

/// Minimizer of ||x - p||^2 + const over a ball: the radial projection of the
/// unconstrained minimizer.
inline Vector ball_minimizer(const SurrogateInstance& inst) {
  const Vector p = inst.objective.anchor - 0.5 * inst.objective.eta * inst.objective.g_sum;
  const double R = inst.ball.outer_radius();
  const double norm = p.norm();
  return norm <= R ? p : Vector(p * (R / norm));
}

inline constexpr std::array<double, 3> kEpsilons{1e-1, 1e-2, 1e-3};

}  // namespace detail

/// FW certificate soundness on 200 random ball instances, every tolerance.
inline CriterionResult fw_certificate_soundness() {
  detail::Stopwatch clock;
  Index violations = 0, solves = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& inst : detail::surrogate_instances(200, 11)) {
    const Vector x_star = detail::ball_minimizer(inst);
    for (double eps : detail::kEpsilons) {
      const FwResult r = solve(inst.objective, inst.ball, eps, inst.x_init);
      const double excess = inst.objective.value(r.x) - inst.objective.value(x_star) - eps;
      worst = std::max(worst, excess);
      if (excess > 1e-9) ++violations;
      ++solves;
    }
  }
  const double secs = clock.seconds();
  return {"FW certificate soundness", violations == 0 && secs < 10.0,
          detail::str(solves, " solves, ", violations, " violations, max(F(x_out)-F(x*)-eps) = ", worst,
                      ", runtime limit 10 s"),
          secs};
}

/// Measured LMO calls against the FW iteration bound (+1 for the certifying gap check).
inline CriterionResult fw_iteration_bound() {
  detail::Stopwatch clock;
  Index violations = 0, solves = 0;
  double tightest = 0.0;  // max calls / allowed
  for (const auto& inst : detail::surrogate_instances(200, 11)) {
    const Vector x_star = detail::ball_minimizer(inst);
    const double h1 = inst.objective.value(inst.x_init) - inst.objective.value(x_star);
    for (double eps : detail::kEpsilons) {
      const FwResult r = solve(inst.objective, inst.ball, eps, inst.x_init);
      const double allowed = std::max(0.0, iteration_bound(inst.ball.outer_radius(), eps, h1)) + 1.0;
      tightest = std::max(tightest, static_cast<double>(r.trace.lmo_calls) / allowed);
      if (static_cast<double>(r.trace.lmo_calls) > allowed) ++violations;
      ++solves;
    }
  }
  return {"FW iteration bound", violations == 0,
          detail::str(solves, " solves, ", violations, " violations, max calls/allowed = ", tightest), clock.seconds()};
}

/// Mean one-point estimate of a linear loss equals its gradient.
inline CriterionResult estimator_unbiasedness() {
  detail::Stopwatch clock;
  constexpr Index n = 5;
  constexpr double delta = 0.1;
  constexpr Index samples = 100000;
  const FeasibleSet ball = FeasibleSet::ball(n, 1.0);
  const ShrunkSet region(ball, delta);
  Engine setup = make_engine(21, Stream::Testing, 0);
  const Vector c = sample_sphere(n, setup);
  const Vector center = random_member(region, setup);
  const LossSequence seq = LossSequence::linear({c}, ball.outer_radius());

  Vector sum = Vector::Zero(n), sum_sq = Vector::Zero(n);
  auto& tracker = detail::estimator_tracker();
  for (Index i = 0; i < samples; ++i) {
    Engine rng = make_engine(21, Stream::Exploration, static_cast<std::uint64_t>(i));
    const PerturbationSample s = estimate_gradient(seq, 1, region, center, rng);
    tracker.observe(s.g, n, seq.value_bound(), delta);
    sum += s.g;
    sum_sq += s.g.cwiseProduct(s.g);
  }
  const auto N = static_cast<double>(samples);
  const Vector mean = sum / N;
  const Vector var = ((sum_sq - N * mean.cwiseProduct(mean)) / (N - 1.0)).cwiseMax(0.0);
  const Vector se = (var / N).cwiseSqrt();
  double worst_z = 0.0;
  for (Index i = 0; i < n; ++i) worst_z = std::max(worst_z, std::abs(mean(i) - c(i)) / se(i));
  const double secs = clock.seconds();
  return {"Estimator unbiasedness", worst_z <= 4.0 && secs < 5.0,
          detail::str("max |mean - c|/SE over coordinates = ", worst_z, " (limit 4), runtime limit 5 s"), secs};
}

/// E||ĝ_m||^2 <= K(nM/δ)^2 + K^2 G^2 with a fixed center and unit-norm linear losses.
inline CriterionResult block_variance_bound() {
  detail::Stopwatch clock;
  constexpr Index n = 5;
  constexpr double delta = 0.1;
  constexpr Index blocks = 10000;
  const FeasibleSet ball = FeasibleSet::ball(n, 1.0);
  const ShrunkSet region(ball, delta);
  Engine setup = make_engine(31, Stream::Testing, 0);
  const Vector center = random_member(region, setup);
  auto& tracker = detail::estimator_tracker();

  bool ok = true;
  std::ostringstream detail_text;
  for (Index K : {1, 4, 16, 64}) {
    const LossSequence seq = LossSequence::generate(LossFamily::Linear, 31 + static_cast<std::uint64_t>(K), K, ball);
    double mean_sq = 0.0;
    for (Index b = 0; b < blocks; ++b) {
      Vector g_hat = Vector::Zero(n);
      for (Index t = 1; t <= K; ++t) {
        Engine rng = make_engine(31, Stream::Exploration, static_cast<std::uint64_t>(b * K + t));
        const PerturbationSample s = estimate_gradient(seq, t, region, center, rng);
        tracker.observe(s.g, n, seq.value_bound(), delta);
        g_hat += s.g;
      }
      mean_sq += g_hat.squaredNorm();
    }
    mean_sq /= static_cast<double>(blocks);
    const double G = seq.lipschitz_bound();
    const double scaled = static_cast<double>(n) * seq.value_bound() / delta;
    const double bound = static_cast<double>(K) * scaled * scaled + static_cast<double>(K * K) * G * G;
    ok = ok && mean_sq <= bound;
    detail_text << "K=" << K << ": " << mean_sq << " <= " << bound << "; ";
  }
  const double secs = clock.seconds();
  return {"Block gradient second-moment bound", ok && secs < 30.0, detail_text.str() + "runtime limit 30 s", secs};
}

/// |f̂_δ(x) - f(x)| <= δG + 3 SE at 100 random points of K_δ, quadratic losses.
inline CriterionResult smoothing_accuracy() {
  detail::Stopwatch clock;
  constexpr Index n = 2;
  constexpr double delta = 0.25;
  constexpr Index points = 100;
  constexpr Index n_mc = 10000;
  const FeasibleSet ball = FeasibleSet::ball(n, 1.0);
  const ShrunkSet region(ball, delta);
  const LossSequence seq = LossSequence::generate(LossFamily::Quadratic, 41, points, ball);
  Index violations = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (Index t = 1; t <= points; ++t) {
    Engine rng = make_engine(41, Stream::Testing, static_cast<std::uint64_t>(t));
    const Vector x = random_member(region, rng);
    const SmoothedValue sv = smoothed_value(seq, t, x, delta, n_mc, rng);
    const double excess = std::abs(sv.mean - seq.value(t, x)) - (delta * seq.lipschitz_bound() + 3.0 * sv.std_error);
    worst = std::max(worst, excess);
    if (excess > 0.0) ++violations;
  }
  return {"Smoothing accuracy", violations == 0,
          detail::str(points, " points, ", violations, " violations, max(|f_hat - f| - (dG + 3SE)) = ", worst),
          clock.seconds()};
}

inline RunRecord reference_run(const FeasibleSet& set, ExecutionMode mode, std::uint64_t seed = 51) {
  constexpr Index T = 1 << 12;
  const LossSequence seq = LossSequence::generate(LossFamily::Quadratic, seed, T, set);
  const BbcgConfig cfg = derive_config(T, set, seq);
  RunOptions options;
  options.mode = mode;
  options.check_feasibility = true;
  return run(cfg, set, seq, seed, options);
}

/// Every y_t in K and every x_m in K_δ for full T = 2^12 runs (ball, box, l1 ball).
inline CriterionResult feasibility_suite() {
  detail::Stopwatch clock;
  Index violations = 0, checked_rounds = 0, checked_blocks = 0;
  auto& tracker = detail::estimator_tracker();
  for (const FeasibleSet& set : {FeasibleSet::ball(2, 1.0), FeasibleSet::box(3, 1.0), FeasibleSet::l1_ball(3, 1.0)}) {
    const RunRecord rec = reference_run(set, ExecutionMode::Sequential);
    violations += rec.feasibility_violations;
    const LossSequence seq = LossSequence::generate(LossFamily::Quadratic, 51, rec.total_rounds, set);
    const BbcgConfig cfg = derive_config(rec.total_rounds, set, seq);
    const ShrunkSet region(set, cfg.delta);
    for (const auto& round : rec.rounds) {
      ++checked_rounds;
      if (!set.contains(round.y)) ++violations;
    }
    for (const auto& block : rec.blocks) {
      ++checked_blocks;
      if (!region.contains(block.x_next)) ++violations;
      for (const auto& s : block.gradient.samples) tracker.observe(s.g, set.dim(), seq.value_bound(), cfg.delta);
      if (block.trace)
        for (const auto& step : block.trace->iterates)
          if (!region.contains(step.z)) ++violations;
    }
  }
  return {"Feasibility", violations == 0,
          detail::str(checked_rounds, " rounds, ", checked_blocks, " blocks, ", violations, " violations"),
          clock.seconds()};
}

inline CriterionResult parallel_equivalence() {
  detail::Stopwatch clock;
  const FeasibleSet set = FeasibleSet::ball(2, 1.0);
  const RunRecord seq_run = reference_run(set, ExecutionMode::Sequential);
  const RunRecord par_run = reference_run(set, ExecutionMode::Parallel);
  const bool same = bitwise_equal(seq_run, par_run);
  return {"Parallel/sequential equivalence", same,
          detail::str(seq_run.blocks.size(), " blocks, ", seq_run.lmo_calls, " LMO calls, records ",
                      same ? "bitwise identical" : "DIFFER"),
          clock.seconds()};
}

/// Runs after every estimator check above; reports the worst ||g|| - nM/δ.
inline CriterionResult estimator_bound() {
  auto& tracker = detail::estimator_tracker();
  std::lock_guard lock(tracker.mutex);
  return {"Estimator norm bound", tracker.samples > 0 && tracker.worst_excess <= 1e-9,
          detail::str(tracker.samples, " samples, max(||g|| - nM/delta) = ", tracker.worst_excess), 0.0};
}

// ---------------------------------------------------------------------------
// Horizon sweep shared by the regret and oracle-complexity criteria.

inline ExperimentConfig exponent_sweep_config(Index workers = 1) {
  ExperimentConfig config;
  config.experiment_id = "exponent-sweep";
  config.set = {SetKind::EuclideanBall, 2, 1.0};
  config.family = LossFamily::Quadratic;
  config.base_seed = 2020;
  config.algorithms = {Algorithm::BBCG};
  for (Index k = 10; k <= 16; ++k) config.horizons.push_back(Index{1} << k);
  config.seeds = 20;
  config.workers = workers;
  config.record_wall_time = false;
  return config;
}

inline const SweepSummary& exponent_sweep(Index workers = 1) {
  static std::once_flag once;
  static SweepSummary summary;
  std::call_once(once, [&] { summary = run_sweep(exponent_sweep_config(workers)); });
  return summary;
}

inline CriterionResult regret_exponent(Index workers = 1) {
  detail::Stopwatch clock;
  const ExperimentConfig config = exponent_sweep_config(workers);
  const SweepSummary& s = exponent_sweep(workers);
  const FeasibleSet set = config.set.build();
  bool below = true;
  std::ostringstream text;
  for (Index T : config.horizons) {
    const CellSummary* cell = s.cell(Algorithm::BBCG, T);
    if (!cell || cell->status != CellStatus::Ok) {
      below = false;
      continue;
    }
    const RunRow& row = *std::find_if(s.rows.begin(), s.rows.end(), [&](const RunRow& r) { return r.T == T; });
    const double bound = regret_upper_bound(T, set.dim(), *row.c, 1.0, set.outer_radius(), set.inner_radius(),
                                            set.outer_radius());
    below = below && cell->mean_regret < bound;
    text << "T=" << T << ": " << cell->mean_regret << " < " << bound << "; ";
  }
  const ExponentFit& fit = s.fits.at(Algorithm::BBCG);
  const bool slope_ok = fit.available && fit.slope >= 0.55 && fit.slope <= 0.85;
  return {"Regret exponent", slope_ok && below,
          detail::str("slope = ", fit.slope, " +/- ", fit.std_error, " (band [0.55, 0.85]); ") + text.str(),
          clock.seconds()};
}

inline CriterionResult oracle_complexity(Index workers = 1) {
  detail::Stopwatch clock;
  const ExperimentConfig config = exponent_sweep_config(workers);
  const SweepSummary& s = exponent_sweep(workers);
  const FeasibleSet set = config.set.build();
  bool within = true;
  std::ostringstream text;
  std::vector<double> per_round;
  for (Index T : config.horizons) {
    const CellSummary* cell = s.cell(Algorithm::BBCG, T);
    if (!cell || cell->status != CellStatus::Ok) {
      within = false;
      per_round.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const RunRow& row = *std::find_if(s.rows.begin(), s.rows.end(), [&](const RunRow& r) { return r.T == T; });
    const double bound = lmo_call_upper_bound(T, set.dim(), *row.c, 1.0, set.outer_radius());
    within = within && cell->mean_lmo_calls <= bound;
    per_round.push_back(cell->mean_lmo_calls / static_cast<double>(T));
    text << "T=" << T << ": " << cell->mean_lmo_calls << " <= " << bound << "; ";
  }
  const double first = per_round.front();
  const double last = per_round.back();
  const bool ratio_ok = last <= 1.2 * first;
  return {"Oracle complexity", within && ratio_ok,
          detail::str("calls/T at 2^10 = ", first, ", at 2^16 = ", last, " (limit 1.2x); ") + text.str(),
          clock.seconds()};
}

/// FKM: T projections, 0 LMO calls. OFW: T LMO calls, 0 projections.
inline CriterionResult baseline_counters() {
  detail::Stopwatch clock;
  constexpr Index T = 1 << 12;
  const FeasibleSet set = FeasibleSet::ball(2, 1.0);
  const LossSequence seq = LossSequence::generate(LossFamily::Quadratic, 61, T, set);
  RunOptions options;
  options.keep_details = false;
  const RunRecord fkm = run_fkm(derive_fkm_config(T, set, seq.value_bound()), set, seq, 61, options);
  const RunRecord ofw = run_ofw(derive_ofw_config(T, set, seq.lipschitz_bound()), set, seq, 61, options);
  const RunRecord bb = run(derive_config(T, set, seq), set, seq, 61, options);
  const bool ok = fkm.projections == T && fkm.lmo_calls == 0 && ofw.lmo_calls == T && ofw.projections == 0 &&
                  bb.projections == 0;
  return {"Baseline oracle counters", ok,
          detail::str("T=", T, " fkm: ", fkm.projections, " projections / ", fkm.lmo_calls, " LMO; ofw: ", ofw.lmo_calls,
                      " LMO / ", ofw.projections, " projections; bbcg: ", bb.lmo_calls, " LMO (",
                      static_cast<double>(bb.lmo_calls) / T, " per round) / ", bb.projections, " projections"),
          clock.seconds()};
}

struct Options {
  bool include_sweep = true;
  Index workers = 1;
};

inline std::vector<CriterionResult> run_all(const Options& options = {}) {
  std::vector<CriterionResult> out;
  out.push_back(fw_certificate_soundness());
  out.push_back(fw_iteration_bound());
  out.push_back(estimator_unbiasedness());
  out.push_back(block_variance_bound());
  out.push_back(smoothing_accuracy());
  out.push_back(feasibility_suite());
  out.push_back(estimator_bound());
  out.push_back(parallel_equivalence());
  if (options.include_sweep) {
    out.push_back(regret_exponent(options.workers));
    out.push_back(oracle_complexity(options.workers));
  }
  out.push_back(baseline_counters());
  return out;
}

}  // namespace bbcg::verify
