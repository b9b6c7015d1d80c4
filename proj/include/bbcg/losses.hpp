#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "bbcg/cg_solver.hpp"
#include "bbcg/core.hpp"
#include "bbcg/geometry.hpp"
#include "bbcg/sampling.hpp"

namespace bbcg {

enum class LossFamily { Linear, Quadratic, ShiftingTarget, Zero };

inline std::string_view to_string(LossFamily f) {
  switch (f) {
    case LossFamily::Linear: return "linear";
    case LossFamily::Quadratic: return "quadratic";
    case LossFamily::ShiftingTarget: return "shifting";
    case LossFamily::Zero: return "zero";
  }
  return "unknown";
}

inline LossFamily parse_loss_family(std::string_view s) {
  if (s == "linear") return LossFamily::Linear;
  if (s == "quadratic") return LossFamily::Quadratic;
  if (s == "shifting" || s == "shifting_target") return LossFamily::ShiftingTarget;
  if (s == "zero") return LossFamily::Zero;
  throw ConfigurationError("unknown loss family '" + std::string(s) + "'");
}

/// An oblivious adversary: every round's loss is fixed at construction.
///
///   Linear:               f_t(x) = c_t·x,                 ||c_t|| = 1
///   Quadratic, Shifting:  f_t(x) = ||x - a_t||^2 / (4R),   ||a_t|| <= R
///   Zero:                 f_t(x) = 0
///
/// On K ⊆ RB both nonzero families have gradient norm <= 1 and |f| <= R, so
/// G and M are exact analytic constants rather than estimates.
class LossSequence {
 public:
  /// Seeded generation. Linear directions are a fixed seeded bias plus
  /// Gaussian noise, normalized. Quadratic targets sit at 0.6R along a seeded
  /// direction with uniform jitter of radius 0.4R. Shifting targets start at
  /// the same point and follow a random walk projected onto the R-ball.
  static LossSequence generate(LossFamily family, std::uint64_t seed, Index horizon, const FeasibleSet& set) {
    if (horizon < 1) throw ConfigurationError("loss horizon must be >= 1");
    const Index n = set.dim();
    const double R = set.outer_radius();
    LossSequence seq(family, seed, horizon, n, R);
    if (family == LossFamily::Zero) return seq;

    Engine bias_rng = make_engine(seed, Stream::Adversary, 0);
    const Vector bias = sample_sphere(n, bias_rng);
    seq.params_.reserve(static_cast<std::size_t>(horizon));
    std::normal_distribution<double> normal(0.0, 1.0);

    switch (family) {
      case LossFamily::Linear:
        for (Index t = 1; t <= horizon; ++t) {
          Engine rng = make_engine(seed, Stream::Adversary, static_cast<std::uint64_t>(t));
          Vector c = bias;
          double norm = 0.0;
          do {
            for (Index i = 0; i < n; ++i) c(i) = bias(i) + normal(rng);
            norm = c.norm();
          } while (norm == 0.0);
          seq.params_.push_back(c / norm);
        }
        seq.lipschitz_ = 1.0;
        seq.value_bound_ = R;
        break;
      case LossFamily::Quadratic:
        for (Index t = 1; t <= horizon; ++t) {
          Engine rng = make_engine(seed, Stream::Adversary, static_cast<std::uint64_t>(t));
          seq.params_.push_back(0.6 * R * bias + 0.4 * R * sample_ball(n, rng));
        }
        seq.lipschitz_ = 1.0;
        seq.value_bound_ = R;
        break;
      case LossFamily::ShiftingTarget: {
        Engine rng = make_engine(seed, Stream::Adversary, 1);
        const double step = R / std::sqrt(static_cast<double>(horizon) * static_cast<double>(n));
        const FeasibleSet target_ball = FeasibleSet::ball(n, R);
        Vector a = 0.6 * R * bias;
        for (Index t = 1; t <= horizon; ++t) {
          seq.params_.push_back(a);
          Vector next = a;
          for (Index i = 0; i < n; ++i) next(i) += step * normal(rng);
          a = target_ball.project(next);
        }
        seq.lipschitz_ = 1.0;
        seq.value_bound_ = R;
        break;
      }
      case LossFamily::Zero: break;
    }
    return seq;
  }

  /// Explicit linear losses c_t·x on a set of outer radius R.
  static LossSequence linear(std::vector<Vector> directions, double outer_radius) {
    if (directions.empty()) throw ConfigurationError("loss horizon must be >= 1");
    const Index n = directions.front().size();
    LossSequence seq(LossFamily::Linear, 0, static_cast<Index>(directions.size()), n, outer_radius);
    double g = 0.0;
    for (const auto& c : directions) {
      require_dim(c, n, "linear loss");
      g = std::max(g, c.norm());
    }
    seq.params_ = std::move(directions);
    seq.lipschitz_ = g;
    seq.value_bound_ = g * outer_radius;
    return seq;
  }

  /// Explicit quadratic losses ||x - a_t||^2/(4R); requires ||a_t|| <= R.
  static LossSequence quadratic(std::vector<Vector> targets, double outer_radius) {
    if (targets.empty()) throw ConfigurationError("loss horizon must be >= 1");
    const Index n = targets.front().size();
    LossSequence seq(LossFamily::Quadratic, 0, static_cast<Index>(targets.size()), n, outer_radius);
    for (const auto& a : targets) {
      require_dim(a, n, "quadratic loss");
      if (a.norm() > outer_radius * (1.0 + 1e-12))
        throw ConfigurationError("quadratic target lies outside the R-ball");
    }
    seq.params_ = std::move(targets);
    seq.lipschitz_ = 1.0;
    seq.value_bound_ = outer_radius;
    return seq;
  }

  static LossSequence zero(Index horizon, Index dim, double outer_radius = 1.0) {
    if (horizon < 1) throw ConfigurationError("loss horizon must be >= 1");
    return LossSequence(LossFamily::Zero, 0, horizon, dim, outer_radius);
  }

  LossFamily family() const { return family_; }
  std::uint64_t seed() const { return seed_; }
  Index horizon() const { return horizon_; }
  Index dim() const { return dim_; }
  double outer_radius() const { return outer_radius_; }
  /// G: bound on subgradient norms over K.
  double lipschitz_bound() const { return lipschitz_; }
  /// M: bound on |f_t| over K.
  double value_bound() const { return value_bound_; }

  /// c_t for linear losses, a_t for quadratic ones.
  const Vector& parameter(Index t) const {
    check_round(t);
    if (family_ == LossFamily::Zero) throw ConfigurationError("zero losses have no parameters");
    return params_[static_cast<std::size_t>(t - 1)];
  }

  /// f_t(y); rounds are 1-based.
  double value(Index t, const Vector& y) const {
    check_round(t);
    switch (family_) {
      case LossFamily::Linear: return params_[static_cast<std::size_t>(t - 1)].dot(y);
      case LossFamily::Quadratic:
      case LossFamily::ShiftingTarget:
        return (y - params_[static_cast<std::size_t>(t - 1)]).squaredNorm() / (4.0 * outer_radius_);
      case LossFamily::Zero: return 0.0;
    }
    return 0.0;
  }

  /// Exact gradient (full-information access, used only by the OFW baseline).
  Vector gradient(Index t, const Vector& x) const {
    check_round(t);
    switch (family_) {
      case LossFamily::Linear: return params_[static_cast<std::size_t>(t - 1)];
      case LossFamily::Quadratic:
      case LossFamily::ShiftingTarget:
        return (x - params_[static_cast<std::size_t>(t - 1)]) / (2.0 * outer_radius_);
      case LossFamily::Zero: return Vector::Zero(dim_);
    }
    return Vector::Zero(dim_);
  }

  /// Sum over all rounds of f_t(x).
  double total_value(const Vector& x) const {
    double total = 0.0;
    for (Index t = 1; t <= horizon_; ++t) total += value(t, x);
    return total;
  }

 private:
  LossSequence(LossFamily family, std::uint64_t seed, Index horizon, Index dim, double outer_radius)
      : family_(family), seed_(seed), horizon_(horizon), dim_(dim), outer_radius_(outer_radius) {}

  void check_round(Index t) const {
    if (t < 1 || t > horizon_)
      throw std::out_of_range("round " + std::to_string(t) + " outside [1, " + std::to_string(horizon_) + "]");
  }

  LossFamily family_;
  std::uint64_t seed_;
  Index horizon_;
  Index dim_;
  double outer_radius_;
  double lipschitz_ = 1.0;
  double value_bound_ = 1.0;
  std::vector<Vector> params_;
};

struct OfflineOptimum {
  Vector point;
  double value = 0.0;
  /// Certified duality gap of the aggregate objective at point (0 for exact cases).
  double gap = 0.0;
};

inline double default_gap_tol(const LossSequence& seq) {
  return 1e-8 * static_cast<double>(seq.horizon()) * seq.value_bound();
}

/// min over x in K of sum_t f_t(x). Linear: one LMO call on the summed
/// direction. Quadratic: the aggregate is (T/4R)·||x - mean(a)||^2 + const,
/// solved by conditional gradient (warm-started at the projection of the
/// mean target) to duality gap <= gap_tol.
inline OfflineOptimum offline_optimum(const LossSequence& seq, const FeasibleSet& set, double gap_tol) {
  if (!(gap_tol > 0.0)) throw ConfigurationError("offline_optimum: gap_tol must be positive");
  require_dim(Vector::Zero(set.dim()), seq.dim(), "offline_optimum");
  OfflineOptimum out;
  switch (seq.family()) {
    case LossFamily::Zero:
      out.point = Vector::Zero(set.dim());
      break;
    case LossFamily::Linear: {
      Vector total = Vector::Zero(set.dim());
      for (Index t = 1; t <= seq.horizon(); ++t) total += seq.parameter(t);
      out.point = set.lmo(total);
      break;
    }
    case LossFamily::Quadratic:
    case LossFamily::ShiftingTarget: {
      Vector mean = Vector::Zero(set.dim());
      for (Index t = 1; t <= seq.horizon(); ++t) mean += seq.parameter(t);
      mean /= static_cast<double>(seq.horizon());
      const SurrogateObjective aggregate{0.0, Vector::Zero(set.dim()), mean};
      const double weight = static_cast<double>(seq.horizon()) / (4.0 * seq.outer_radius());
      const double epsilon = gap_tol / weight;
      const Vector start = set.has_projection() ? set.project(mean) : Vector::Zero(set.dim());
      FwResult r = solve(aggregate, set, epsilon, start);
      out.point = std::move(r.x);
      out.gap = weight * r.trace.final_gap;
      break;
    }
  }
  out.value = seq.total_value(out.point);
  return out;
}

inline OfflineOptimum offline_optimum(const LossSequence& seq, const FeasibleSet& set) {
  return offline_optimum(seq, set, default_gap_tol(seq));
}

}  // namespace bbcg
