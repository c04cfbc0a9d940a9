#pragma once

#include "splinecomp/quadrature.hpp"

namespace splinecomp {

/// Zero-mean Gaussian source. The design reference is sigma = 1.
struct SourceModel {
  double sigma = 1.0;

  SourceModel() = default;
  explicit SourceModel(double s);

  double variance() const { return sigma * sigma; }
};

/// Largest normalized cutoff x / sigma for which tail statistics are computed.
/// Beyond it the upper-tail probability is within a few decades of underflow.
inline constexpr double kTailCutoff = 37.0;

double pdf(const SourceModel& model, double x);

/// P(X > x), computed through erfc so it stays accurate deep in the tail.
double upper_tail(const SourceModel& model, double x);

/// Optimal compressor for the Gaussian source scaled to [-x_max, x_max].
/// Closed form x_max * sgn(x) * erf(|x| / (sigma sqrt 6)) / erf(x_max / (sigma sqrt 6)).
double compressor(const SourceModel& model, double x_max, double x);

/// First derivative of compressor() with respect to x.
double compressor_derivative(const SourceModel& model, double x_max, double x);

/// Same function as compressor(), evaluated from its defining ratio of
/// integrals of pdf^(1/3). Used to cross-check the closed form.
double compressor_by_quadrature(const SourceModel& model, double x_max, double x,
                                const QuadratureSpec& spec = {});

/// Inverse of compressor() on [0, x_max] (odd extension for negative targets),
/// by safeguarded Newton iteration.
double compressor_inverse(const SourceModel& model, double x_max, double target);

/// Support-region threshold for n_levels output levels.
double support_threshold(const SourceModel& model, int n_levels);

/// Conditional mean of the source beyond x_max, E[X | X > x_max].
double tail_centroid(const SourceModel& model, double x_max);

/// Upper integration limit used in place of +infinity for tail integrals.
inline double tail_truncation(const SourceModel& model, double x_max) {
  return x_max + 12.0 * model.sigma;
}

}  // namespace splinecomp
