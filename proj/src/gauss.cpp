#include "splinecomp/gauss.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "splinecomp/errors.hpp"

namespace splinecomp {

namespace {

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

void require_support(double x_max, double x) {
  if (!(x_max > 0.0)) throw DomainError("compressor: x_max must be positive");
  if (!(std::abs(x) <= x_max)) {
    throw DomainError("compressor: |x| = " + std::to_string(std::abs(x)) + " exceeds x_max = " +
                      std::to_string(x_max));
  }
}

}  // namespace

SourceModel::SourceModel(double s) : sigma(s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("SourceModel: sigma must be positive");
}

double pdf(const SourceModel& model, double x) {
  const double z = x / model.sigma;
  return std::exp(-0.5 * z * z) / (model.sigma * std::sqrt(2.0 * std::numbers::pi));
}

double upper_tail(const SourceModel& model, double x) {
  return 0.5 * std::erfc(x / (model.sigma * std::numbers::sqrt2));
}

double compressor(const SourceModel& model, double x_max, double x) {
  require_support(x_max, x);
  const double scale = model.sigma * std::sqrt(6.0);
  return x_max * sgn(x) * std::erf(std::abs(x) / scale) / std::erf(x_max / scale);
}

double compressor_derivative(const SourceModel& model, double x_max, double x) {
  require_support(x_max, x);
  const double scale = model.sigma * std::sqrt(6.0);
  const double z = x / scale;
  return x_max * (2.0 / std::sqrt(std::numbers::pi)) * std::exp(-z * z) /
         (scale * std::erf(x_max / scale));
}

double compressor_by_quadrature(const SourceModel& model, double x_max, double x,
                                const QuadratureSpec& spec) {
  require_support(x_max, x);
  auto cube_root_pdf = [&](double t) { return std::cbrt(pdf(model, t)); };
  const double num = integrate(cube_root_pdf, 0.0, std::abs(x), spec);
  const double den = integrate(cube_root_pdf, 0.0, x_max, spec);
  return x_max * sgn(x) * num / den;
}

double compressor_inverse(const SourceModel& model, double x_max, double target) {
  if (!(x_max > 0.0)) throw DomainError("compressor_inverse: x_max must be positive");
  if (!(std::abs(target) <= x_max)) throw DomainError("compressor_inverse: target outside range");
  const double t = std::abs(target);
  // c is concave with c(0) = 0 and c(x_max) = x_max, so c(x) >= x and the root is in [0, t].
  double lo = 0.0;
  double hi = t;
  double x = 0.5 * t;
  for (int iter = 0; iter < 200; ++iter) {
    const double f = compressor(model, x_max, x) - t;
    if (f == 0.0) break;
    if (f < 0.0) lo = x; else hi = x;
    double next = x - f / compressor_derivative(model, x_max, x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, x)) {
      x = next;
      break;
    }
    x = next;
  }
  return sgn(target) * x;
}

double support_threshold(const SourceModel& model, int n_levels) {
  if (n_levels < 4) {
    throw DomainError("support_threshold: need at least 4 levels, got " + std::to_string(n_levels));
  }
  const double ln_n = std::log(static_cast<double>(n_levels));
  return model.sigma * std::sqrt(6.0 * ln_n) *
         (1.0 - std::log(ln_n) / (4.0 * ln_n) -
          std::log(3.0 * std::sqrt(std::numbers::pi)) / (2.0 * ln_n));
}

double tail_centroid(const SourceModel& model, double x_max) {
  if (!(x_max >= 0.0)) throw DomainError("tail_centroid: x_max must be non-negative");
  if (x_max / model.sigma > kTailCutoff) {
    throw DomainError("tail_centroid: x_max / sigma = " + std::to_string(x_max / model.sigma) +
                      " beyond cutoff " + std::to_string(kTailCutoff));
  }
  // int_x^inf t p(t) dt = sigma^2 p(x)
  return model.variance() * pdf(model, x_max) / upper_tail(model, x_max);
}

}  // namespace splinecomp
