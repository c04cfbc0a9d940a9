#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "splinecomp/errors.hpp"

namespace splinecomp {

struct QuadratureSpec {
  double relative_tolerance = 1e-10;
  double absolute_tolerance = 1e-12;
  std::size_t max_subdivisions = 2000;

  void validate() const {
    if (!(relative_tolerance > 0.0) || !(absolute_tolerance > 0.0) || max_subdivisions < 1) {
      throw DomainError("QuadratureSpec: tolerances must be positive and max_subdivisions >= 1");
    }
  }
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr std::array<long double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329L, 0.949107912342758524526189684047851L,
    0.864864423359769072789712788640926L, 0.741531185599394439863864773280788L,
    0.586087235467691130294144845693013L, 0.405845151377397166906606412076961L,
    0.207784955007898467600689403773245L, 0.000000000000000000000000000000000L};
inline constexpr std::array<long double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970L, 0.063092092629978553290700663189204L,
    0.104790010322250183839876322541518L, 0.140653259715525918745189590510238L,
    0.169004726639267902826583426598550L, 0.190350578064785409913256402421014L,
    0.204432940075298892414161999234649L, 0.209482141084727828012999174891714L};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<long double, 4> kGaussWeights = {
    0.129484966168869693270611432679082L, 0.279705391489276667901467771423780L,
    0.381830050505118944950369775488975L, 0.417959183673469387755102040816327L};

template <typename Scalar>
struct Panel {
  Scalar a;
  Scalar b;
  Scalar estimate;
  Scalar error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <typename Scalar, typename F>
Panel<Scalar> kronrod15(F& f, Scalar a, Scalar b) {
  const Scalar center = (a + b) / 2;
  const Scalar half = (b - a) / 2;
  const Scalar f_center = f(center);
  Scalar kronrod = f_center * static_cast<Scalar>(kKronrodWeights[7]);
  Scalar gauss = f_center * static_cast<Scalar>(kGaussWeights[3]);
  for (std::size_t i = 0; i < 7; ++i) {
    const Scalar dx = half * static_cast<Scalar>(kKronrodNodes[i]);
    const Scalar pair = f(center - dx) + f(center + dx);
    kronrod += static_cast<Scalar>(kKronrodWeights[i]) * pair;
    if (i % 2 == 1) gauss += static_cast<Scalar>(kGaussWeights[i / 2]) * pair;
  }
  using std::abs;
  return {a, b, kronrod * half, abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Result of an adaptive integration.
template <typename Scalar = double>
struct Integral {
  Scalar value;
  Scalar error;
  std::size_t subdivisions;
};

/// Globally adaptive Gauss-Kronrod (G7/K15) quadrature of f over [a, b].
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate meets max(absolute_tolerance, relative_tolerance * |I|). Throws
/// QuadratureError with the best estimate if max_subdivisions is exhausted.
template <typename Scalar = double, typename F>
Integral<Scalar> integrate_with_error(F&& f, Scalar a, Scalar b, const QuadratureSpec& spec = {}) {
  spec.validate();
  if (!(a <= b)) throw DomainError("integrate: requires a <= b");
  if (a == b) return {Scalar(0), Scalar(0), 0};

  std::priority_queue<detail::Panel<Scalar>> panels;
  auto first = detail::kronrod15<Scalar>(f, a, b);
  Scalar total = first.estimate;
  Scalar total_error = first.error;
  panels.push(first);

  std::size_t subdivisions = 1;
  using std::abs;
  auto converged = [&] {
    const Scalar target = std::max(static_cast<Scalar>(spec.absolute_tolerance),
                                   static_cast<Scalar>(spec.relative_tolerance) * abs(total));
    return total_error <= target;
  };
  while (!converged()) {
    if (subdivisions >= spec.max_subdivisions) {
      std::ostringstream msg;
      msg << "integrate: no convergence on [" << a << ", " << b << "] after " << subdivisions
          << " subdivisions (estimate " << total << ", error " << total_error << ")";
      throw QuadratureError(msg.str(), static_cast<double>(total), static_cast<double>(total_error));
    }
    const auto worst = panels.top();
    panels.pop();
    const Scalar mid = (worst.a + worst.b) / 2;
    if (!(mid > worst.a && mid < worst.b)) {
      // Panel cannot be split further in this precision.
      std::ostringstream msg;
      msg << "integrate: panel width underflow near " << mid;
      throw QuadratureError(msg.str(), static_cast<double>(total), static_cast<double>(total_error));
    }
    auto left = detail::kronrod15<Scalar>(f, worst.a, mid);
    auto right = detail::kronrod15<Scalar>(f, mid, worst.b);
    total += left.estimate + right.estimate - worst.estimate;
    total_error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++subdivisions;
  }

  // Re-sum to shed the drift from incremental updates.
  Scalar value = 0;
  Scalar error = 0;
  while (!panels.empty()) {
    value += panels.top().estimate;
    error += panels.top().error;
    panels.pop();
  }
  return {value, error, subdivisions};
}

template <typename Scalar = double, typename F>
Scalar integrate(F&& f, Scalar a, Scalar b, const QuadratureSpec& spec = {}) {
  return integrate_with_error<Scalar>(std::forward<F>(f), a, b, spec).value;
}

}  // namespace splinecomp
