#pragma once

#include <cmath>
#include <random>

#include "bbcg/core.hpp"
#include "bbcg/geometry.hpp"

namespace bbcg {

/// Uniform draw from the unit sphere S^{n-1} via a normalized Gaussian vector.
template <class URBG>
Vector sample_sphere(Index dim, URBG& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector u(dim);
  double norm = 0.0;
  do {
    for (Index i = 0; i < dim; ++i) u(i) = normal(rng);
    norm = u.norm();
  } while (norm == 0.0);
  return u / norm;
}

/// Uniform draw from the unit ball: a sphere sample scaled by U^{1/n}.
template <class URBG>
Vector sample_ball(Index dim, URBG& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Vector u = sample_sphere(dim, rng);
  return std::pow(uniform(rng), 1.0 / static_cast<double>(dim)) * u;
}

/// A random point of the set. Uniform for the ball, box, simplex and l1 ball.
template <class URBG>
Vector random_member(const FeasibleSet& set, URBG& rng) {
  const Index n = set.dim();
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::exponential_distribution<double> exponential(1.0);
  return std::visit(
      [&](const auto& s) -> Vector {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, FeasibleSet::EuclideanBall>) {
          return s.radius * sample_ball(n, rng);
        } else if constexpr (std::is_same_v<S, FeasibleSet::Box>) {
          Vector v(n);
          for (Index i = 0; i < n; ++i) v(i) = s.half_width * (2.0 * uniform(rng) - 1.0);
          return v;
        } else if constexpr (std::is_same_v<S, FeasibleSet::Simplex>) {
          Vector w(n);
          for (Index i = 0; i < n; ++i) w(i) = exponential(rng);
          return (w / w.sum()).array() - 1.0 / static_cast<double>(n);
        } else {
          // n+1 exponentials normalized give a uniform point of the simplex
          // {w >= 0, sum w <= 1}; random signs map it onto the l1 ball.
          Vector w(n);
          for (Index i = 0; i < n; ++i) w(i) = exponential(rng);
          const double total = w.sum() + exponential(rng);
          for (Index i = 0; i < n; ++i) w(i) *= (uniform(rng) < 0.5 ? -1.0 : 1.0) * s.radius / total;
          return w;
        }
      },
      set.shape());
}

template <class URBG>
Vector random_member(const ShrunkSet& set, URBG& rng) {
  return set.scale() * random_member(set.base(), rng);
}

}  // namespace bbcg
