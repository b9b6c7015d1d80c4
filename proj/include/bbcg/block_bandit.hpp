#pragma once

#include <cmath>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "bbcg/cg_solver.hpp"
#include "bbcg/core.hpp"
#include "bbcg/geometry.hpp"
#include "bbcg/losses.hpp"
#include "bbcg/smoothing.hpp"

namespace bbcg {

#ifdef NDEBUG
inline constexpr bool kDebugBuild = false;
#else
inline constexpr bool kDebugBuild = true;
#endif

/// Parameters of the block bandit conditional gradient method.
struct BbcgConfig {
  Index horizon = 0;         // T
  Index block_size = 1;      // K
  double eta = 0.0;          // step size of the surrogate
  double delta = 0.0;        // smoothing radius
  double epsilon = 0.0;      // FW duality-gap tolerance
  double scale_constant = 0.0;  // c
  bool derived = false;       // set by derive_config

  Index num_blocks() const { return (horizon + block_size - 1) / block_size; }
};

inline Index integer_sqrt(Index value) {
  auto root = static_cast<Index>(std::sqrt(static_cast<double>(value)));
  while (root * root > value) --root;
  while ((root + 1) * (root + 1) <= value) ++root;
  return root;
}

/// c = sqrt(nMr/G), the constant that balances the regret bound.
inline double default_scale_constant(Index dim, double value_bound, double inner_radius, double lipschitz) {
  return std::sqrt(static_cast<double>(dim) * value_bound * inner_radius / lipschitz);
}

/// The T^{3/4}-regret schedule:
///   eta = (2cR/(nM))·T^{-3/4},  delta = c·T^{-1/4},  epsilon = 16R^2·T^{-1/2},  K = floor(sqrt(T)).
/// Without c, uses default_scale_constant(), which needs (nM/(Gr))^2 <= T.
inline BbcgConfig derive_config(Index horizon, const FeasibleSet& set, double lipschitz, double value_bound,
                                std::optional<double> scale_constant = std::nullopt) {
  if (horizon < 1) throw ConfigurationError("horizon must be >= 1");
  if (!(lipschitz > 0.0) || !(value_bound > 0.0)) throw ConfigurationError("G and M must be positive");
  const auto n = static_cast<double>(set.dim());
  const double r = set.inner_radius();
  const double R = set.outer_radius();
  const auto T = static_cast<double>(horizon);

  double c = 0.0;
  if (scale_constant) {
    c = *scale_constant;
    if (!(c > 0.0)) throw ConfigurationError("scale constant c must be positive");
  } else {
    const double ratio = n * value_bound / (lipschitz * r);
    if (ratio * ratio > T)
      throw ConfigurationError("automatic c requires (nM/(Gr))^2 <= T; got " + std::to_string(ratio * ratio) + " > " +
                               std::to_string(horizon));
    c = default_scale_constant(set.dim(), value_bound, r, lipschitz);
  }

  const double quarter = 1.0 / std::sqrt(std::sqrt(T));  // T^{-1/4}
  BbcgConfig cfg;
  cfg.horizon = horizon;
  cfg.block_size = std::max<Index>(1, integer_sqrt(horizon));
  cfg.delta = c * quarter;
  cfg.eta = 2.0 * c * R / (n * value_bound) * quarter * quarter * quarter;
  cfg.epsilon = 16.0 * R * R / std::sqrt(T);
  cfg.scale_constant = c;
  cfg.derived = true;
  if (cfg.delta > r)
    throw ConfigurationError("precondition c·T^(-1/4) <= r violated: delta=" + std::to_string(cfg.delta) +
                             " > r=" + std::to_string(r));
  return cfg;
}

inline BbcgConfig derive_config(Index horizon, const FeasibleSet& set, const LossSequence& seq,
                                std::optional<double> scale_constant = std::nullopt) {
  return derive_config(horizon, set, seq.lipschitz_bound(), seq.value_bound(), scale_constant);
}

/// Constant-explicit expected-regret bound for the derived schedule:
/// (3cG + cRG/r + 6GR + 4cG^2R/(nM) + 4RnM/c)·T^{3/4}.
inline double regret_upper_bound(Index horizon, Index dim, double c, double G, double M, double r, double R) {
  const auto n = static_cast<double>(dim);
  const double coeff = 3.0 * c * G + c * R * G / r + 6.0 * G * R + 4.0 * c * G * G * R / (n * M) + 4.0 * R * n * M / c;
  return coeff * std::pow(static_cast<double>(horizon), 0.75);
}

/// Expected total LMO calls bound: (3/4 + Gc/(2nM) + G^2c^2/(4n^2M^2))·T.
inline double lmo_call_upper_bound(Index horizon, Index dim, double c, double G, double M) {
  const double a = G * c / (static_cast<double>(dim) * M);
  return (0.75 + 0.5 * a + 0.25 * a * a) * static_cast<double>(horizon);
}

struct RoundRecord {
  Index t = 0;
  Vector y;
  double loss = 0.0;
};

struct BlockRecord {
  Index m = 0;
  Vector x_play;  // x_{m-1}, used for every prediction in the block
  BlockGradient gradient;
  std::optional<FwTrace> trace;  // absent for m = 1
  Vector x_next;  // x_m
};

/// Output of one run of a bandit or online algorithm.
struct RunRecord {
  std::string algorithm;
  std::vector<RoundRecord> rounds;
  std::vector<BlockRecord> blocks;
  Index total_rounds = 0;
  Index lmo_calls = 0;
  Index projections = 0;
  Index feasibility_violations = 0;
  double total_loss = 0.0;
};

inline bool bitwise_equal(const RunRecord& a, const RunRecord& b) {
  if (a.algorithm != b.algorithm || a.total_rounds != b.total_rounds || a.lmo_calls != b.lmo_calls ||
      a.projections != b.projections || a.feasibility_violations != b.feasibility_violations ||
      !bitwise_equal(a.total_loss, b.total_loss) || a.rounds.size() != b.rounds.size() ||
      a.blocks.size() != b.blocks.size())
    return false;
  for (std::size_t i = 0; i < a.rounds.size(); ++i) {
    const auto& x = a.rounds[i];
    const auto& y = b.rounds[i];
    if (x.t != y.t || !bitwise_equal(x.y, y.y) || !bitwise_equal(x.loss, y.loss)) return false;
  }
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    const auto& x = a.blocks[i];
    const auto& y = b.blocks[i];
    if (x.m != y.m || !bitwise_equal(x.x_play, y.x_play) || !bitwise_equal(x.x_next, y.x_next) ||
        !bitwise_equal(x.gradient, y.gradient) || x.trace.has_value() != y.trace.has_value())
      return false;
    if (x.trace && !bitwise_equal(*x.trace, *y.trace)) return false;
  }
  return true;
}

enum class ExecutionMode { Sequential, Parallel };

using ExplorationStreams = std::function<Engine(std::uint64_t seed, Index t)>;

inline Engine default_exploration_stream(std::uint64_t seed, Index t) {
  return make_engine(seed, Stream::Exploration, static_cast<std::uint64_t>(t));
}

struct RunOptions {
  /// Parallel overlaps each block's FW solve with that block's predictions.
  ExecutionMode mode = ExecutionMode::Sequential;
  /// Count membership violations of every y_t in K and x_m in K_δ.
  bool check_feasibility = kDebugBuild;
  /// Keep per-round and per-block detail; counters and total loss are always kept.
  bool keep_details = true;
  /// Per-round engine factory; rounds never share an engine.
  ExplorationStreams exploration = default_exploration_stream;
};

/// Block Bandit Conditional Gradient.
///
/// Rounds are split into blocks of K. Block m plays x_{m-1} + δu_t for each of
/// its rounds and sums the one-point estimates into ĝ_m. For m > 1, the
/// surrogate F_m(x) = η·(ĝ_1 + … + ĝ_{m-1})·x + ||x - x_1||^2 is solved over
/// K_δ by conditional gradient, warm-started at x_{m-1}, to gap ε; its output
/// is x_m. Since F_m never sees ĝ_m, the solve may overlap the block's
/// predictions (ExecutionMode::Parallel) without changing any output.
inline RunRecord run(const BbcgConfig& config, const FeasibleSet& set, const LossSequence& seq, std::uint64_t seed,
                     const RunOptions& options = {}) {
  if (!set.full_dimensional())
    throw CapabilityError("bbcg requires a full-dimensional set; '" + std::string(to_string(set.kind())) +
                          "' has empty interior");
  if (seq.dim() != set.dim()) throw ConfigurationError("loss and set dimensions differ");
  if (config.horizon != seq.horizon()) throw ConfigurationError("config horizon differs from loss horizon");
  if (config.block_size < 1 || config.block_size > config.horizon)
    throw ConfigurationError("block size must satisfy 1 <= K <= T");
  if (!(config.eta > 0.0) || !(config.epsilon > 0.0)) throw ConfigurationError("eta and epsilon must be positive");

  const ShrunkSet region(set, config.delta);
  const Index n = set.dim();
  const Index T = config.horizon;
  const Index K = config.block_size;

  RunRecord record;
  record.algorithm = "bbcg";
  if (options.keep_details) {
    record.rounds.reserve(static_cast<std::size_t>(T));
    record.blocks.reserve(static_cast<std::size_t>(config.num_blocks()));
  }

  const Vector x0 = Vector::Zero(n);  // the origin, scaled into K_δ, is still the origin
  const Vector& anchor = x0;          // x_1 = x_0
  Vector x_prev = x0;
  Vector g_sum = Vector::Zero(n);

  for (Index m = 1; m <= config.num_blocks(); ++m) {
    const Index first = (m - 1) * K + 1;
    const Index last = std::min(m * K, T);
    const SurrogateObjective objective{config.eta, g_sum, anchor};
    const Index iter_cap = default_iter_cap(objective, region.outer_radius(), config.epsilon);

    std::future<FwResult> pending;
    if (m > 1 && options.mode == ExecutionMode::Parallel) {
      pending = std::async(std::launch::async, [&region, objective, eps = config.epsilon, x_prev, iter_cap] {
        return solve(objective, region, eps, x_prev, iter_cap);
      });
    }

    std::vector<PerturbationSample> samples;
    samples.reserve(static_cast<std::size_t>(last - first + 1));
    for (Index t = first; t <= last; ++t) {
      Engine rng = options.exploration(seed, t);
      PerturbationSample s = estimate_gradient(seq, t, region, x_prev, rng);
      if (options.check_feasibility && !set.contains(s.y)) ++record.feasibility_violations;
      record.total_loss += s.f_value;
      if (options.keep_details) record.rounds.push_back({t, s.y, s.f_value});
      samples.push_back(std::move(s));
    }
    BlockGradient block = aggregate_block(std::move(samples), K);

    std::optional<FwResult> solved;
    if (m > 1) {
      solved = options.mode == ExecutionMode::Parallel ? pending.get()
                                                       : solve(objective, region, config.epsilon, x_prev, iter_cap);
      record.lmo_calls += solved->trace.lmo_calls;
    }
    Vector x_next = solved ? solved->x : x_prev;
    if (options.check_feasibility && !region.contains(x_next)) ++record.feasibility_violations;

    g_sum += block.g_hat;
    if (options.keep_details) {
      BlockRecord br;
      br.m = m;
      br.x_play = x_prev;
      br.gradient = std::move(block);
      if (solved) br.trace = std::move(solved->trace);
      br.x_next = x_next;
      record.blocks.push_back(std::move(br));
    }
    x_prev = std::move(x_next);
  }
  record.total_rounds = T;
  return record;
}

/// Realized regret: total loss minus the best fixed point in hindsight.
inline double regret(const RunRecord& record, const OfflineOptimum& optimum) { return record.total_loss - optimum.value; }

inline double regret(const RunRecord& record, const LossSequence& seq, const FeasibleSet& set, double gap_tol) {
  return regret(record, offline_optimum(seq, set, gap_tol));
}

}  // namespace bbcg
