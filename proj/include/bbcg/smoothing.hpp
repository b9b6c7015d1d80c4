#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "bbcg/core.hpp"
#include "bbcg/geometry.hpp"
#include "bbcg/losses.hpp"
#include "bbcg/sampling.hpp"

namespace bbcg {

/// One bandit round: play y = x + δu, observe f_t(y), estimate g = (n/δ)·f_t(y)·u.
struct PerturbationSample {
  Index t = 0;
  Vector u;
  Vector y;
  double f_value = 0.0;
  Vector g;
};

/// ĝ_m: the sum of one-point estimates over a block.
struct BlockGradient {
  Index m = 0;
  std::vector<PerturbationSample> samples;
  Vector g_hat;

  double squared_norm() const { return g_hat.squaredNorm(); }
};

inline bool bitwise_equal(const PerturbationSample& a, const PerturbationSample& b) {
  return a.t == b.t && bitwise_equal(a.u, b.u) && bitwise_equal(a.y, b.y) && bitwise_equal(a.f_value, b.f_value) &&
         bitwise_equal(a.g, b.g);
}

inline bool bitwise_equal(const BlockGradient& a, const BlockGradient& b) {
  if (a.m != b.m || a.samples.size() != b.samples.size() || !bitwise_equal(a.g_hat, b.g_hat)) return false;
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    if (!bitwise_equal(a.samples[i], b.samples[i])) return false;
  return true;
}

inline Vector one_point_estimate(double f_value, const Vector& u, double delta) {
  if (!(delta > 0.0)) throw ConfigurationError("smoothing delta must be positive");
  return (static_cast<double>(u.size()) / delta * f_value) * u;
}

/// Deterministic part of the estimator for a given direction u.
inline PerturbationSample perturb_and_estimate(const LossSequence& seq, Index t, const Vector& x_center, double delta,
                                               Vector u) {
  PerturbationSample s;
  s.t = t;
  s.y = x_center + delta * u;
  s.f_value = seq.value(t, s.y);
  s.g = one_point_estimate(s.f_value, u, delta);
  s.u = std::move(u);
  return s;
}

/// One-point gradient estimate of the δ-smoothed f_t at x_center, with δ
/// taken from region. Unbiased: E[g] = ∇f̂_δ(x_center).
template <class URBG>
PerturbationSample estimate_gradient(const LossSequence& seq, Index t, const ShrunkSet& region, const Vector& x_center,
                                     URBG& rng) {
  require_dim(x_center, region.dim(), "estimate_gradient");
  return perturb_and_estimate(seq, t, x_center, region.delta(), sample_sphere(region.dim(), rng));
}

/// Same estimator with an explicit delta; delta must lie in (0, r].
template <class URBG>
PerturbationSample estimate_gradient(const LossSequence& seq, Index t, const Vector& x_center, double delta,
                                     double inner_radius, URBG& rng) {
  if (!(delta > 0.0) || delta > inner_radius)
    throw ConfigurationError("smoothing delta=" + std::to_string(delta) + " outside (0, r=" +
                             std::to_string(inner_radius) + "]");
  return perturb_and_estimate(seq, t, x_center, delta, sample_sphere(x_center.size(), rng));
}

struct SmoothedValue {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Monte-Carlo estimate of f̂_δ(x) = E_{v ~ unit ball}[f_t(x + δv)].
/// Test oracle only; no algorithm calls this.
template <class URBG>
SmoothedValue smoothed_value(const LossSequence& seq, Index t, const Vector& x, double delta, Index n_mc, URBG& rng) {
  if (n_mc < 1) throw ConfigurationError("smoothed_value: n_mc must be >= 1");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (Index i = 0; i < n_mc; ++i) {
    const double f = seq.value(t, x + delta * sample_ball(x.size(), rng));
    sum += f;
    sum_sq += f * f;
  }
  const auto count = static_cast<double>(n_mc);
  SmoothedValue out;
  out.mean = sum / count;
  if (n_mc > 1) {
    const double var = std::max(0.0, (sum_sq - count * out.mean * out.mean) / (count - 1.0));
    out.std_error = std::sqrt(var / count);
  }
  return out;
}

inline Index block_of_round(Index t, Index block_size) { return (t - 1) / block_size + 1; }

/// Sums the samples of one block. All samples must fall in the same block.
inline BlockGradient aggregate_block(std::vector<PerturbationSample> samples, Index block_size) {
  if (samples.empty()) throw std::logic_error("aggregate_block: no samples");
  if (block_size < 1) throw std::logic_error("aggregate_block: block size must be >= 1");
  BlockGradient out;
  out.m = block_of_round(samples.front().t, block_size);
  out.g_hat = Vector::Zero(samples.front().g.size());
  for (const auto& s : samples) {
    if (block_of_round(s.t, block_size) != out.m)
      throw std::logic_error("aggregate_block: round " + std::to_string(s.t) + " is not in block " +
                             std::to_string(out.m));
    out.g_hat += s.g;
  }
  out.samples = std::move(samples);
  return out;
}

}  // namespace bbcg
