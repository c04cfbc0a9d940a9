#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "splinecomp/errors.hpp"
#include "splinecomp/quadrature.hpp"

namespace splinecomp {

/// Ordered segment boundaries 0 = x_0 < x_1 < ... < x_L.
template <typename Scalar = double>
class KnotVector {
 public:
  explicit KnotVector(std::vector<Scalar> knots) : knots_(std::move(knots)) {
    if (knots_.size() < 2) throw DomainError("KnotVector: need at least two knots");
    if (knots_.front() != Scalar(0)) throw DomainError("KnotVector: first knot must be 0");
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      if (!(knots_[i] > knots_[i - 1])) throw DomainError("KnotVector: knots must be strictly increasing");
    }
  }

  std::size_t segment_count() const { return knots_.size() - 1; }
  Scalar operator[](std::size_t i) const { return knots_[i]; }
  Scalar front() const { return knots_.front(); }
  Scalar back() const { return knots_.back(); }
  std::span<const Scalar> values() const { return knots_; }

 private:
  std::vector<Scalar> knots_;
};

/// r + p x + q x^2 on [lo, hi].
template <typename Scalar = double>
struct QuadSegment {
  Scalar r;
  Scalar p;
  Scalar q;
  Scalar lo;
  Scalar hi;

  Scalar value(Scalar x) const { return r + x * (p + x * q); }
  Scalar slope(Scalar x) const { return p + 2 * q * x; }
};

/// Piecewise quadratic over a knot vector. Pieces are independent; no
/// continuity is imposed at the knots (see knot_jumps()).
template <typename Scalar = double>
class QuadraticSpline {
 public:
  explicit QuadraticSpline(std::vector<QuadSegment<Scalar>> segments) : segments_(std::move(segments)) {
    if (segments_.empty()) throw DomainError("QuadraticSpline: no segments");
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      if (!(segments_[i].lo < segments_[i].hi)) throw DomainError("QuadraticSpline: empty segment");
      if (i > 0 && segments_[i].lo != segments_[i - 1].hi) {
        throw DomainError("QuadraticSpline: segments do not tile the domain");
      }
    }
  }

  std::size_t size() const { return segments_.size(); }
  const QuadSegment<Scalar>& operator[](std::size_t i) const { return segments_.at(i); }
  std::span<const QuadSegment<Scalar>> segments() const { return segments_; }
  Scalar lower() const { return segments_.front().lo; }
  Scalar upper() const { return segments_.back().hi; }

  /// Owning segment of x. A knot belongs to the segment on its left.
  std::size_t segment_index(Scalar x) const {
    if (!(x >= lower() && x <= upper())) {
      throw DomainError("QuadraticSpline: x = " + std::to_string(static_cast<double>(x)) +
                        " outside [" + std::to_string(static_cast<double>(lower())) + ", " +
                        std::to_string(static_cast<double>(upper())) + "]");
    }
    std::size_t i = 0;
    while (x > segments_[i].hi) ++i;
    return i;
  }

 private:
  std::vector<QuadSegment<Scalar>> segments_;
};

template <typename Scalar>
Scalar eval(const QuadraticSpline<Scalar>& spline, Scalar x) {
  return spline[spline.segment_index(x)].value(x);
}

template <typename Scalar>
Scalar deriv(const QuadraticSpline<Scalar>& spline, Scalar x) {
  return spline[spline.segment_index(x)].slope(x);
}

/// h_{i+1}(x_i) - h_i(x_i) at each interior knot.
template <typename Scalar>
std::vector<Scalar> knot_jumps(const QuadraticSpline<Scalar>& spline) {
  std::vector<Scalar> jumps;
  for (std::size_t i = 1; i < spline.size(); ++i) {
    const Scalar x = spline[i].lo;
    jumps.push_back(spline[i].value(x) - spline[i - 1].value(x));
  }
  return jumps;
}

/// Solves r + p y + q y^2 = target for the root inside the segment's domain.
///
/// Roots within 1e-9 of the segment are accepted and clamped onto it. Two
/// distinct roots in the domain mean the segment turns over, which is a
/// design failure rather than an ambiguity to resolve.
template <typename Scalar>
Scalar invert_segment(const QuadraticSpline<Scalar>& spline, std::size_t segment_index, Scalar target) {
  if (segment_index >= spline.size()) throw DomainError("invert_segment: segment index out of range");
  const auto& seg = spline[segment_index];
  using std::abs;
  using std::sqrt;
  const Scalar slack = static_cast<Scalar>(1e-9);
  auto in_domain = [&](Scalar y) { return y >= seg.lo - slack && y <= seg.hi + slack; };
  auto clamp = [&](Scalar y) { return std::min(std::max(y, seg.lo), seg.hi); };
  const Scalar c = seg.r - target;

  if (abs(seg.q) < static_cast<Scalar>(1e-12) * abs(seg.p)) {
    const Scalar y = -c / seg.p;
    if (!in_domain(y)) throw DesignError("invert_segment: linear root outside segment " + std::to_string(segment_index));
    return clamp(y);
  }
  if (seg.q == Scalar(0)) throw DesignError("invert_segment: constant segment");

  Scalar disc = seg.p * seg.p - 4 * seg.q * c;
  if (disc < 0) {
    if (disc > -std::numeric_limits<Scalar>::epsilon() * 16 * seg.p * seg.p) {
      disc = 0;
    } else {
      throw DesignError("invert_segment: no real root in segment " + std::to_string(segment_index));
    }
  }
  // Stable form: never subtract nearly equal quantities.
  const Scalar root_disc = sqrt(disc);
  const Scalar s = -(seg.p + (seg.p >= 0 ? root_disc : -root_disc)) / 2;
  const Scalar y1 = s / seg.q;
  const Scalar y2 = s != Scalar(0) ? c / s : y1;
  const bool ok1 = in_domain(y1);
  const bool ok2 = in_domain(y2);
  if (ok1 && ok2 && abs(y1 - y2) > slack) {
    throw DesignError("invert_segment: both roots inside segment " + std::to_string(segment_index) +
                      " (segment is not monotone)");
  }
  if (ok1) return clamp(y1);
  if (ok2) return clamp(y2);
  throw DesignError("invert_segment: no root of segment " + std::to_string(segment_index) +
                    " inside its domain for target " + std::to_string(static_cast<double>(target)));
}

template <typename Scalar = double>
struct SplineFit {
  QuadraticSpline<Scalar> spline;
  /// 1-norm condition number of each segment's moment matrix.
  std::vector<Scalar> condition_numbers;
};

namespace detail {

// int_a^b x^k dx
template <typename Scalar>
Scalar power_moment(int k, Scalar a, Scalar b) {
  using std::pow;
  return (pow(b, k + 1) - pow(a, k + 1)) / static_cast<Scalar>(k + 1);
}

}  // namespace detail

/// Least-squares quadratic on every knot interval.
///
/// Each piece minimizes int (target - h)^2 over its own interval, which is
/// what setting the partial derivatives of the weighted objective to zero
/// gives (the 1 / (x_i - x_{i-1}) weight is constant per piece). The normal
/// equations use closed-form power moments on the left and quadrature of
/// x^k * target on the right, solved by LU with partial pivoting.
template <typename Scalar = double, typename F>
SplineFit<Scalar> fit_with_diagnostics(F&& target, const KnotVector<Scalar>& knots,
                                       const QuadratureSpec& quad = {}) {
  using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
  using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
  std::vector<QuadSegment<Scalar>> segments;
  std::vector<Scalar> conditions;
  for (std::size_t i = 0; i < knots.segment_count(); ++i) {
    const Scalar a = knots[i];
    const Scalar b = knots[i + 1];
    Matrix3 moments;
    Vector3 rhs;
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) moments(j, k) = detail::power_moment<Scalar>(j + k, a, b);
      rhs(j) = integrate<Scalar>(
          [&](Scalar x) {
            Scalar w = 1;
            for (int e = 0; e < j; ++e) w *= x;
            return w * target(x);
          },
          a, b, quad);
    }
    Eigen::PartialPivLU<Matrix3> lu(moments);
    const Matrix3 inverse = lu.inverse();
    const Scalar cond = moments.cwiseAbs().colwise().sum().maxCoeff() *
                        inverse.cwiseAbs().colwise().sum().maxCoeff();
    if (!std::isfinite(static_cast<double>(cond)) || cond > static_cast<Scalar>(1e14)) {
      throw DesignError("fit: moment matrix of segment " + std::to_string(i) + " is singular");
    }
    const Vector3 coeffs = lu.solve(rhs);
    segments.push_back({coeffs(0), coeffs(1), coeffs(2), a, b});
    conditions.push_back(cond);
  }
  return {QuadraticSpline<Scalar>(std::move(segments)), std::move(conditions)};
}

template <typename Scalar = double, typename F>
QuadraticSpline<Scalar> fit(F&& target, const KnotVector<Scalar>& knots, const QuadratureSpec& quad = {}) {
  return fit_with_diagnostics<Scalar>(std::forward<F>(target), knots, quad).spline;
}

/// sum_i 1/(x_i - x_{i-1}) int_{x_{i-1}}^{x_i} (target - h)^2 dx
template <typename Scalar = double, typename F>
Scalar fit_objective(F&& target, const QuadraticSpline<Scalar>& spline, const KnotVector<Scalar>& knots,
                     const QuadratureSpec& quad = {}) {
  if (spline.size() != knots.segment_count()) throw DomainError("fit_objective: knot/segment count mismatch");
  Scalar total = 0;
  for (std::size_t i = 0; i < spline.size(); ++i) {
    const auto& seg = spline[i];
    if (seg.lo != knots[i] || seg.hi != knots[i + 1]) {
      throw DomainError("fit_objective: segment " + std::to_string(i) + " does not match knots");
    }
    const Scalar sq = integrate<Scalar>(
        [&](Scalar x) {
          const Scalar d = target(x) - seg.value(x);
          return d * d;
        },
        seg.lo, seg.hi, quad);
    total += sq / (seg.hi - seg.lo);
  }
  return total;
}

}  // namespace splinecomp
