#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "bbcg/block_bandit.hpp"
#include "bbcg/cg_solver.hpp"
#include "bbcg/core.hpp"
#include "bbcg/geometry.hpp"
#include "bbcg/losses.hpp"
#include "bbcg/smoothing.hpp"

namespace bbcg {

// Reference algorithms:
//   FKM - projected online gradient descent on one-point estimates
//         (one Euclidean projection per round).
//   OFW - full-information online Frank-Wolfe (one LMO call per round).

enum class BaselineAlgorithm { FKM, OFW };

struct BaselineConfig {
  BaselineAlgorithm algorithm = BaselineAlgorithm::FKM;
  Index horizon = 0;
  double eta = 0.0;
  double delta = 0.0;  // FKM only
};

/// delta = min(T^{-1/4}·sqrt(rR), r); eta = (R/G')·T^{-3/4} with G' = nM/delta.
inline BaselineConfig derive_fkm_config(Index horizon, const FeasibleSet& set, double value_bound) {
  if (horizon < 1) throw ConfigurationError("horizon must be >= 1");
  const auto T = static_cast<double>(horizon);
  const double r = set.inner_radius();
  const double R = set.outer_radius();
  const double quarter = 1.0 / std::sqrt(std::sqrt(T));
  BaselineConfig cfg;
  cfg.algorithm = BaselineAlgorithm::FKM;
  cfg.horizon = horizon;
  cfg.delta = std::min(quarter * std::sqrt(r * R), r);
  const double estimator_bound = static_cast<double>(set.dim()) * value_bound / cfg.delta;
  cfg.eta = R / estimator_bound * quarter * quarter * quarter;
  return cfg;
}

/// eta = (2R/G)·T^{-3/4}.
inline BaselineConfig derive_ofw_config(Index horizon, const FeasibleSet& set, double lipschitz) {
  if (horizon < 1) throw ConfigurationError("horizon must be >= 1");
  if (!(lipschitz > 0.0)) throw ConfigurationError("G must be positive");
  const double quarter = 1.0 / std::sqrt(std::sqrt(static_cast<double>(horizon)));
  BaselineConfig cfg;
  cfg.algorithm = BaselineAlgorithm::OFW;
  cfg.horizon = horizon;
  cfg.eta = 2.0 * set.outer_radius() / lipschitz * quarter * quarter * quarter;
  return cfg;
}

template <class Set>
Vector fkm_step(const Set& region, const Vector& x, const Vector& g, double eta) {
  return region.project(x - eta * g);
}

struct OfwStep {
  Vector x_next;
  Vector v;
  double sigma = 0.0;
};

/// A single Frank-Wolfe step with exact line search on objective from x.
template <LinearOracleSet Set>
OfwStep ofw_step(const SurrogateObjective& objective, const Set& set, const Vector& x) {
  OfwStep out;
  out.v = set.lmo(objective.gradient(x));
  out.sigma = line_search(objective, x, out.v);
  out.x_next = x + out.sigma * (out.v - x);
  return out;
}

inline RunRecord run_fkm(const BaselineConfig& config, const FeasibleSet& set, const LossSequence& seq,
                         std::uint64_t seed, const RunOptions& options = {}) {
  if (config.algorithm != BaselineAlgorithm::FKM) throw ConfigurationError("run_fkm: config is not FKM");
  if (!set.has_projection())
    throw CapabilityError("fkm requires a set with a closed-form projection");
  if (!set.full_dimensional())
    throw CapabilityError("fkm requires a full-dimensional set; '" + std::string(to_string(set.kind())) +
                          "' has empty interior");
  if (seq.dim() != set.dim()) throw ConfigurationError("loss and set dimensions differ");
  if (config.horizon != seq.horizon()) throw ConfigurationError("config horizon differs from loss horizon");

  const ShrunkSet region(set, config.delta);
  RunRecord record;
  record.algorithm = "fkm";
  if (options.keep_details) record.rounds.reserve(static_cast<std::size_t>(config.horizon));

  Vector x = Vector::Zero(set.dim());
  for (Index t = 1; t <= config.horizon; ++t) {
    Engine rng = options.exploration(seed, t);
    const PerturbationSample s = estimate_gradient(seq, t, region, x, rng);
    if (options.check_feasibility && !set.contains(s.y)) ++record.feasibility_violations;
    record.total_loss += s.f_value;
    if (options.keep_details) record.rounds.push_back({t, s.y, s.f_value});
    x = fkm_step(region, x, s.g, config.eta);
    ++record.projections;
    if (options.check_feasibility && !region.contains(x)) ++record.feasibility_violations;
  }
  record.total_rounds = config.horizon;
  return record;
}

/// Maintains F_t(x) = eta·sum_{i<t} ∇f_i(x_i)·x + ||x - x_1||^2 and takes one
/// FW step on it per round. Plays x_t itself; seed is unused (deterministic).
inline RunRecord run_ofw(const BaselineConfig& config, const FeasibleSet& set, const LossSequence& seq,
                         std::uint64_t /*seed*/, const RunOptions& options = {}) {
  if (config.algorithm != BaselineAlgorithm::OFW) throw ConfigurationError("run_ofw: config is not OFW");
  if (seq.dim() != set.dim()) throw ConfigurationError("loss and set dimensions differ");
  if (config.horizon != seq.horizon()) throw ConfigurationError("config horizon differs from loss horizon");

  RunRecord record;
  record.algorithm = "ofw";
  if (options.keep_details) record.rounds.reserve(static_cast<std::size_t>(config.horizon));

  const Vector anchor = Vector::Zero(set.dim());
  SurrogateObjective objective{config.eta, Vector::Zero(set.dim()), anchor};
  Vector x = anchor;
  for (Index t = 1; t <= config.horizon; ++t) {
    if (options.check_feasibility && !set.contains(x)) ++record.feasibility_violations;
    const double loss = seq.value(t, x);
    record.total_loss += loss;
    if (options.keep_details) record.rounds.push_back({t, x, loss});
    objective.g_sum += seq.gradient(t, x);
    x = ofw_step(objective, set, x).x_next;
    ++record.lmo_calls;
  }
  record.total_rounds = config.horizon;
  return record;
}

}  // namespace bbcg
