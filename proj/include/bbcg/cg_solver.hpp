#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "bbcg/core.hpp"
#include "bbcg/geometry.hpp"

namespace bbcg {

/// F(x) = eta·g_sum·x + ||x - anchor||^2. Hessian is 2·I, so F is
/// 2-smooth and 2-strongly convex.
struct SurrogateObjective {
  double eta = 0.0;
  Vector g_sum;
  Vector anchor;

  double value(const Vector& x) const { return eta * g_sum.dot(x) + (x - anchor).squaredNorm(); }
  Vector gradient(const Vector& x) const { return eta * g_sum + 2.0 * (x - anchor); }
  /// Minimizer over all of R^n.
  Vector unconstrained_minimizer() const { return anchor - 0.5 * eta * g_sum; }
  Index dim() const { return anchor.size(); }
};

struct FwStep {
  Vector z;
  Vector v;
  double gap = 0.0;
  double sigma = 0.0;
};

/// One entry per gap evaluation (= one LMO call). The last entry is the
/// certifying evaluation and carries sigma = 0.
struct FwTrace {
  std::vector<FwStep> iterates;
  Index lmo_calls = 0;
  double final_gap = std::numeric_limits<double>::infinity();
};

inline bool bitwise_equal(const FwTrace& a, const FwTrace& b) {
  if (a.lmo_calls != b.lmo_calls || !bitwise_equal(a.final_gap, b.final_gap) ||
      a.iterates.size() != b.iterates.size())
    return false;
  for (std::size_t i = 0; i < a.iterates.size(); ++i) {
    const auto& x = a.iterates[i];
    const auto& y = b.iterates[i];
    if (!bitwise_equal(x.z, y.z) || !bitwise_equal(x.v, y.v) || !bitwise_equal(x.gap, y.gap) ||
        !bitwise_equal(x.sigma, y.sigma))
      return false;
  }
  return true;
}

/// Thrown when the iteration cap is hit; carries the partial trace.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, FwTrace trace) : std::runtime_error(what), trace_(std::move(trace)) {}
  const FwTrace& trace() const { return trace_; }

 private:
  FwTrace trace_;
};

struct GapResult {
  double value = 0.0;
  Vector v;
};

struct FwResult {
  Vector x;
  FwTrace trace;
};

/// Exact minimizer over [0,1] of F(z + sigma·d) given descent = -grad·d and dist_sq = ||d||^2.
inline double line_search_step(double descent, double dist_sq) {
  if (dist_sq == 0.0) return 0.0;
  return std::clamp(descent / (2.0 * dist_sq), 0.0, 1.0);
}

inline double line_search(const SurrogateObjective& objective, const Vector& z, const Vector& v) {
  const Vector d = v - z;
  return line_search_step(-objective.gradient(z).dot(d), d.squaredNorm());
}

/// Frank-Wolfe duality gap grad(z)·(z - v) with v = lmo(grad(z)).
template <LinearOracleSet Set>
GapResult duality_gap(const SurrogateObjective& objective, const Set& set, const Vector& z) {
  const Vector grad = objective.gradient(z);
  GapResult out;
  out.v = set.lmo(grad);
  out.value = std::max(0.0, grad.dot(z - out.v));
  return out;
}

/// Iteration count after which a 2-smooth, 2-strongly convex objective is
/// guaranteed to be within epsilon, starting from suboptimality h1.
inline double iteration_bound(double outer_radius, double epsilon, double h1) {
  const double excess = h1 - epsilon;
  return std::max(16.0 * outer_radius * outer_radius / (epsilon * epsilon) * excess, 2.0 / epsilon * excess);
}

/// 10x the iteration bound with h1 replaced by the a-priori upper bound
/// 4R^2 + eta·||g_sum||·2R.
inline Index default_iter_cap(const SurrogateObjective& objective, double outer_radius, double epsilon) {
  const double h1 = 4.0 * outer_radius * outer_radius + objective.eta * objective.g_sum.norm() * 2.0 * outer_radius;
  const double bound = std::ceil(10.0 * iteration_bound(outer_radius, epsilon, h1));
  if (!(bound < 1e15)) return static_cast<Index>(1e15);
  return std::max<Index>(static_cast<Index>(bound), 10);
}

/// Conditional gradient with a duality-gap stopping rule. The gap is checked
/// before each step, so the returned point is the one that was certified:
/// gap(x) <= epsilon, hence F(x) - min F <= epsilon.
template <LinearOracleSet Set>
FwResult solve(const SurrogateObjective& objective, const Set& set, double epsilon, const Vector& x_init,
               Index iter_cap) {
  if (!(epsilon > 0.0)) throw ConfigurationError("solve: epsilon must be positive");
  require_dim(x_init, set.dim(), "solve");
  require_dim(objective.anchor, set.dim(), "solve anchor");
  require_dim(objective.g_sum, set.dim(), "solve g_sum");
  if (!set.contains(x_init, kMembershipTol)) throw ConfigurationError("solve: initial point is not in the set");

  FwResult out;
  Vector z = x_init;
  while (true) {
    GapResult g = duality_gap(objective, set, z);
    ++out.trace.lmo_calls;
    if (g.value <= epsilon) {
      out.trace.final_gap = g.value;
      out.trace.iterates.push_back({z, std::move(g.v), g.value, 0.0});
      break;
    }
    if (out.trace.lmo_calls >= iter_cap) {
      out.trace.final_gap = g.value;
      out.trace.iterates.push_back({z, std::move(g.v), g.value, 0.0});
      throw SolverError("conditional gradient hit iteration cap " + std::to_string(iter_cap) +
                            " with gap " + std::to_string(g.value),
                        std::move(out.trace));
    }
    const double sigma = line_search(objective, z, g.v);
    Vector next = z + sigma * (g.v - z);
    out.trace.iterates.push_back({std::move(z), std::move(g.v), g.value, sigma});
    z = std::move(next);
  }
  out.x = std::move(z);
  return out;
}

template <LinearOracleSet Set>
FwResult solve(const SurrogateObjective& objective, const Set& set, double epsilon, const Vector& x_init) {
  return solve(objective, set, epsilon, x_init, default_iter_cap(objective, set.outer_radius(), epsilon));
}

}  // namespace bbcg
