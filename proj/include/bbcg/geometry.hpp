#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <numeric>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bbcg/core.hpp"

namespace bbcg {

/// Default absolute l2 tolerance for membership tests.
inline constexpr double kMembershipTol = 1e-9;

enum class SetKind { EuclideanBall, Box, Simplex, L1Ball };

inline std::string_view to_string(SetKind k) {
  switch (k) {
    case SetKind::EuclideanBall: return "ball";
    case SetKind::Box: return "box";
    case SetKind::Simplex: return "simplex";
    case SetKind::L1Ball: return "l1ball";
  }
  return "unknown";
}

inline SetKind parse_set_kind(std::string_view s) {
  if (s == "ball") return SetKind::EuclideanBall;
  if (s == "box") return SetKind::Box;
  if (s == "simplex") return SetKind::Simplex;
  if (s == "l1ball") return SetKind::L1Ball;
  throw ConfigurationError("unknown set kind '" + std::string(s) + "'");
}

namespace detail {

/// Euclidean projection onto {x >= 0, sum x = mass} (sort-and-threshold).
inline Vector project_onto_simplex(const Vector& p, double mass) {
  std::vector<double> sorted(p.data(), p.data() + p.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cumsum += sorted[i];
    const double candidate = (cumsum - mass) / static_cast<double>(i + 1);
    if (sorted[i] - candidate > 0.0) theta = candidate;
  }
  return (p.array() - theta).max(0.0).matrix();
}

}  // namespace detail

/// A compact convex set K with rB ⊆ K ⊆ RB (B the unit l2 ball), accessed
/// through a linear minimization oracle. All operations are closed form.
///
/// Simplex is the probability simplex shifted by -(1/n)·1 so that the origin
/// is its barycenter. It lies in the hyperplane sum(x) = 0, so its inner
/// radius is measured within that hyperplane and it is not full-dimensional.
class FeasibleSet {
 public:
  struct EuclideanBall {
    double radius;
  };
  struct Box {
    double half_width;
  };
  struct Simplex {};
  struct L1Ball {
    double radius;
  };
  using Shape = std::variant<EuclideanBall, Box, Simplex, L1Ball>;

  static FeasibleSet ball(Index dim, double radius = 1.0) {
    check_positive(radius, "ball radius");
    return FeasibleSet(dim, EuclideanBall{radius}, radius, radius);
  }
  static FeasibleSet box(Index dim, double half_width = 1.0) {
    check_positive(half_width, "box half-width");
    return FeasibleSet(dim, Box{half_width}, half_width, half_width * std::sqrt(static_cast<double>(dim)));
  }
  static FeasibleSet simplex(Index dim) {
    if (dim < 2) throw ConfigurationError("simplex requires dim >= 2");
    const auto n = static_cast<double>(dim);
    return FeasibleSet(dim, Simplex{}, 1.0 / std::sqrt(n * (n - 1.0)), std::sqrt((n - 1.0) / n));
  }
  static FeasibleSet l1_ball(Index dim, double radius = 1.0) {
    check_positive(radius, "l1 ball radius");
    return FeasibleSet(dim, L1Ball{radius}, radius / std::sqrt(static_cast<double>(dim)), radius);
  }
  /// Builds a set from a kind and its single shape parameter (ignored for Simplex).
  static FeasibleSet make(SetKind kind, Index dim, double size = 1.0) {
    switch (kind) {
      case SetKind::EuclideanBall: return ball(dim, size);
      case SetKind::Box: return box(dim, size);
      case SetKind::Simplex: return simplex(dim);
      case SetKind::L1Ball: return l1_ball(dim, size);
    }
    throw ConfigurationError("unknown set kind");
  }

  Index dim() const { return dim_; }
  double inner_radius() const { return inner_radius_; }
  double outer_radius() const { return outer_radius_; }
  const Shape& shape() const { return shape_; }

  SetKind kind() const {
    return std::visit(
        [](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, EuclideanBall>) return SetKind::EuclideanBall;
          else if constexpr (std::is_same_v<S, Box>) return SetKind::Box;
          else if constexpr (std::is_same_v<S, Simplex>) return SetKind::Simplex;
          else return SetKind::L1Ball;
        },
        shape_);
  }

  /// True when the set contains an l2 ball of radius inner_radius() in R^n.
  bool full_dimensional() const { return kind() != SetKind::Simplex; }

  /// Every provided kind has a closed-form projection.
  bool has_projection() const { return true; }

  /// First vertex in the fixed enumeration; returned by lmo() for a zero direction.
  Vector canonical_vertex() const {
    Vector v = Vector::Zero(dim_);
    std::visit(
        [&](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, EuclideanBall>) {
            v(0) = -s.radius;
          } else if constexpr (std::is_same_v<S, Box>) {
            v.setConstant(-s.half_width);
          } else if constexpr (std::is_same_v<S, Simplex>) {
            v.setConstant(-1.0 / static_cast<double>(dim_));
            v(0) += 1.0;
          } else {
            v(0) = -s.radius;
          }
        },
        shape_);
    return v;
  }

  /// argmin over the set of direction·x.
  Vector lmo(const Vector& direction) const {
    require_dim(direction, dim_, "lmo");
    if (!direction.allFinite()) throw ConfigurationError("lmo: direction is not finite");
    if ((direction.array() == 0.0).all()) return canonical_vertex();
    return std::visit(
        [&](const auto& s) -> Vector {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, EuclideanBall>) {
            return (-s.radius / direction.norm()) * direction;
          } else if constexpr (std::is_same_v<S, Box>) {
            Vector v(dim_);
            // zero coordinates follow the canonical vertex
            for (Index i = 0; i < dim_; ++i) v(i) = direction(i) < 0.0 ? s.half_width : -s.half_width;
            return v;
          } else if constexpr (std::is_same_v<S, Simplex>) {
            Index best = 0;
            direction.minCoeff(&best);
            Vector v = Vector::Constant(dim_, -1.0 / static_cast<double>(dim_));
            v(best) += 1.0;
            return v;
          } else {
            Index best = 0;
            direction.cwiseAbs().maxCoeff(&best);
            Vector v = Vector::Zero(dim_);
            v(best) = direction(best) > 0.0 ? -s.radius : s.radius;
            return v;
          }
        },
        shape_);
  }

  /// argmin over the set of ||x - point||.
  Vector project(const Vector& point) const {
    require_dim(point, dim_, "project");
    return std::visit(
        [&](const auto& s) -> Vector {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, EuclideanBall>) {
            const double norm = point.norm();
            return norm <= s.radius ? Vector(point) : Vector((s.radius / norm) * point);
          } else if constexpr (std::is_same_v<S, Box>) {
            return point.cwiseMax(-s.half_width).cwiseMin(s.half_width);
          } else if constexpr (std::is_same_v<S, Simplex>) {
            const double shift = 1.0 / static_cast<double>(dim_);
            Vector shifted = point.array() + shift;
            return (detail::project_onto_simplex(shifted, 1.0).array() - shift).matrix();
          } else {
            if (point.lpNorm<1>() <= s.radius) return point;
            Vector magnitude = detail::project_onto_simplex(point.cwiseAbs(), s.radius);
            return magnitude.cwiseProduct(point.unaryExpr([](double x) { return x < 0.0 ? -1.0 : 1.0; }));
          }
        },
        shape_);
  }

  /// l2 distance from point to the set.
  double distance(const Vector& point) const {
    require_dim(point, dim_, "distance");
    if (const auto* b = std::get_if<EuclideanBall>(&shape_)) return std::max(0.0, point.norm() - b->radius);
    return (point - project(point)).norm();
  }

  /// True iff point lies in the set inflated by tol in l2.
  bool contains(const Vector& point, double tol = kMembershipTol) const {
    if (tol < 0.0) throw ConfigurationError("membership tolerance must be >= 0");
    return distance(point) <= tol;
  }

 private:
  FeasibleSet(Index dim, Shape shape, double r, double R)
      : dim_(dim), shape_(shape), inner_radius_(r), outer_radius_(R) {
    if (dim < 1) throw ConfigurationError("set dimension must be positive");
  }

  static void check_positive(double value, const char* what) {
    if (!(value > 0.0) || !std::isfinite(value)) throw ConfigurationError(std::string(what) + " must be positive");
  }

  Index dim_;
  Shape shape_;
  double inner_radius_;
  double outer_radius_;
};

/// K_δ = (1 - δ/r)·K. For every x in K_δ and unit u, x + δu lies in K.
class ShrunkSet {
 public:
  ShrunkSet(FeasibleSet base, double delta) : base_(std::move(base)), delta_(delta) {
    if (!(delta > 0.0) || delta > base_.inner_radius()) {
      throw ConfigurationError("shrink parameter delta=" + std::to_string(delta) + " must lie in (0, r=" +
                               std::to_string(base_.inner_radius()) + "]");
    }
    scale_ = 1.0 - delta_ / base_.inner_radius();
  }

  const FeasibleSet& base() const { return base_; }
  double delta() const { return delta_; }
  double scale() const { return scale_; }
  Index dim() const { return base_.dim(); }
  double inner_radius() const { return scale_ * base_.inner_radius(); }
  double outer_radius() const { return scale_ * base_.outer_radius(); }

  Vector lmo(const Vector& direction) const { return scale_ * base_.lmo(direction); }

  Vector project(const Vector& point) const {
    require_dim(point, dim(), "project");
    if (scale_ == 0.0) return Vector::Zero(dim());
    return scale_ * base_.project(point / scale_);
  }

  double distance(const Vector& point) const {
    require_dim(point, dim(), "distance");
    if (scale_ == 0.0) return point.norm();
    return scale_ * base_.distance(point / scale_);
  }

  bool contains(const Vector& point, double tol = kMembershipTol) const {
    if (tol < 0.0) throw ConfigurationError("membership tolerance must be >= 0");
    return distance(point) <= tol;
  }

 private:
  FeasibleSet base_;
  double delta_;
  double scale_ = 1.0;
};

/// Anything the conditional gradient solver can run over.
template <class S>
concept LinearOracleSet = requires(const S& s, const Vector& v) {
  { s.lmo(v) } -> std::convertible_to<Vector>;
  { s.dim() } -> std::convertible_to<Index>;
  { s.outer_radius() } -> std::convertible_to<double>;
  { s.contains(v, 0.0) } -> std::convertible_to<bool>;
};

static_assert(LinearOracleSet<FeasibleSet>);
static_assert(LinearOracleSet<ShrunkSet>);

}  // namespace bbcg
