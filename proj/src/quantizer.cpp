#include "splinecomp/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "splinecomp/errors.hpp"

namespace splinecomp {

namespace {

// Lower compressed-domain bound of each segment's share of the target grid,
// plus the final upper bound: h_1(0), h_1(x_1), ..., h_L(x_L).
std::vector<double> compressed_bounds(const QuadraticSpline<double>& spline) {
  std::vector<double> bounds{spline[0].value(spline[0].lo)};
  for (const auto& seg : spline.segments()) bounds.push_back(seg.value(seg.hi));
  return bounds;
}

std::size_t owning_segment(const std::vector<double>& bounds, double target) {
  const std::size_t segments = bounds.size() - 1;
  if (target < bounds.front() || target > bounds.back()) {
    throw DesignError("compressed target " + std::to_string(target) + " outside spline range [" +
                      std::to_string(bounds.front()) + ", " + std::to_string(bounds.back()) + "]");
  }
  for (std::size_t i = 0; i + 1 < segments; ++i) {
    if (target < bounds[i + 1]) return i;
  }
  return segments - 1;
}

// Smallest x in the segment with h_i(x) >= target. Targets below the segment's
// own left value (upward jump at the knot) land on the knot itself.
double generalized_inverse(const QuadraticSpline<double>& spline, std::size_t i, double target) {
  const auto& seg = spline[i];
  if (target <= seg.value(seg.lo)) return seg.lo;
  return invert_segment(spline, i, target);
}

void require_monotone(const QuadraticSpline<double>& spline) {
  constexpr int kGrid = 100;
  for (std::size_t i = 0; i < spline.size(); ++i) {
    const auto& seg = spline[i];
    for (int k = 0; k < kGrid; ++k) {
      const double x = seg.lo + (seg.hi - seg.lo) * k / (kGrid - 1);
      if (!(seg.slope(x) > 0.0)) {
        throw DesignError("spline segment " + std::to_string(i) + " is not increasing at x = " +
                          std::to_string(x));
      }
    }
  }
}

}  // namespace

DesignConfig::DesignConfig(int n, KnotVector<double> k, SourceModel s)
    : n_levels(n), knots(std::move(k)), source(s) {
  if (n_levels < 4 || n_levels % 2 != 0) {
    throw DomainError("DesignConfig: N must be even and >= 4, got " + std::to_string(n_levels));
  }
  if (n_levels - 2 < 2 * static_cast<int>(knots.segment_count())) {
    throw DomainError("DesignConfig: N - 2 must be at least 2 L");
  }
}

DesignConfig two_segment_config(int n_levels, double x1, SourceModel source) {
  const double x_max = support_threshold(source, n_levels);
  if (!(x1 > 0.0 && x1 < x_max)) {
    throw DomainError("segment threshold " + std::to_string(x1) + " must lie in (0, " +
                      std::to_string(x_max) + ")");
  }
  return DesignConfig(n_levels, KnotVector<double>({0.0, x1, x_max}), source);
}

std::vector<double> CompandingQuantizer::boundaries() const {
  std::vector<double> all;
  all.reserve(2 * thresholds.size() + 1);
  for (auto it = thresholds.rbegin(); it != thresholds.rend(); ++it) all.push_back(-*it);
  all.push_back(0.0);
  all.insert(all.end(), thresholds.begin(), thresholds.end());
  return all;
}

double step_size(const DesignConfig& config) { return 2.0 * config.x_max() / (config.n_levels - 2); }

std::vector<int> allocate_levels(const QuadraticSpline<double>& spline, const DesignConfig& config) {
  if (spline.size() != config.knots.segment_count()) {
    throw DomainError("allocate_levels: spline does not match the knot vector");
  }
  require_monotone(spline);
  const auto bounds = compressed_bounds(spline);
  const double step = step_size(config);
  std::vector<int> counts(spline.size(), 0);
  for (int k = 1; k <= config.granular_per_side(); ++k) {
    ++counts[owning_segment(bounds, (k - 0.5) * step)];
  }
  return counts;
}

CompandingQuantizer build(const QuadraticSpline<double>& spline, const DesignConfig& config) {
  const auto counts = allocate_levels(spline, config);
  const auto bounds = compressed_bounds(spline);
  const double step = step_size(config);
  const int per_side = config.granular_per_side();
  const double x_max = config.x_max();

  if (bounds.front() >= step / 2) {
    throw DesignError("h(0) = " + std::to_string(bounds.front()) + " is not below step/2 = " +
                      std::to_string(step / 2));
  }

  std::vector<double> ratio;
  for (std::size_t i = 0; i < spline.size(); ++i) {
    ratio.push_back(per_side * (bounds[i + 1] - bounds[i]) / bounds.back());
    if (std::abs(ratio.back() - counts[i]) > 1.0) {
      throw DesignError("segment " + std::to_string(i) + " holds " + std::to_string(counts[i]) +
                        " levels, real-valued allocation is " + std::to_string(ratio.back()));
    }
  }

  std::vector<double> levels;
  std::vector<std::size_t> owners;
  std::vector<double> slopes;
  std::vector<double> lengths;
  for (int k = 1; k <= per_side; ++k) {
    const double target = (k - 0.5) * step;
    const std::size_t i = owning_segment(bounds, target);
    const double y = generalized_inverse(spline, i, target);
    const double slope = spline[i].slope(y);
    if (!(slope > 0.0)) throw DesignError("spline slope not positive at level " + std::to_string(y));
    levels.push_back(y);
    owners.push_back(i);
    slopes.push_back(slope);
    lengths.push_back(step / slope);
  }

  std::vector<double> thresholds;
  for (int k = 1; k < per_side; ++k) {
    const double target = k * step;
    thresholds.push_back(generalized_inverse(spline, owning_segment(bounds, target), target));
  }
  thresholds.push_back(x_max);

  double lower = 0.0;
  std::vector<double> widths;
  for (int k = 0; k < per_side; ++k) {
    const double y = levels[k];
    const auto& seg = spline[owners[k]];
    if (!(lower < y && y < thresholds[k])) {
      throw DesignError("level " + std::to_string(y) + " does not lie strictly inside its cell [" +
                        std::to_string(lower) + ", " + std::to_string(thresholds[k]) + ")");
    }
    if (y < seg.lo || y > seg.hi) throw DesignError("level outside its segment");
    widths.push_back(thresholds[k] - lower);
    lower = thresholds[k];
  }

  const double y_max = tail_centroid(config.source, x_max);
  return CompandingQuantizer{config,
                             spline,
                             step,
                             std::move(levels),
                             std::move(owners),
                             std::move(thresholds),
                             counts,
                             std::move(ratio),
                             y_max,
                             std::move(slopes),
                             std::move(lengths),
                             std::move(widths)};
}

Design design(const DesignConfig& config, const QuadratureSpec& quad) {
  const SourceModel source = config.source;
  const double x_max = config.x_max();
  auto fitted = fit_with_diagnostics<double>(
      [&](double x) { return compressor(source, x_max, x); }, config.knots, quad);
  auto quantizer = build(fitted.spline, config);
  auto report = sqnr(quantizer, quad);
  return {std::move(fitted), std::move(quantizer), report};
}

double granular_distortion(const CompandingQuantizer& q) {
  const double x_max = q.config.x_max();
  const double n = q.config.n_levels - 2;
  double sum = 0.0;
  for (std::size_t k = 0; k < q.levels.size(); ++k) {
    const double slope = q.level_slopes[k];
    sum += pdf(q.config.source, q.levels[k]) / (slope * slope) * q.cell_lengths[k];
  }
  return 2.0 * x_max * x_max / (3.0 * n * n) * sum;
}

double granular_distortion_cell_form(const CompandingQuantizer& q) {
  double sum = 0.0;
  for (std::size_t k = 0; k < q.levels.size(); ++k) {
    const double len = q.cell_lengths[k];
    sum += pdf(q.config.source, q.levels[k]) * len * len * len / 12.0;
  }
  return 2.0 * sum;
}

double overload_distortion_at(const SourceModel& source, double x_max, double y_max,
                              const QuadratureSpec& quad) {
  const double upper = tail_truncation(source, x_max);
  // int_T^inf (x - y)^2 p(x) dx in closed form bounds what truncation drops.
  const double remainder = source.variance() * (upper - 2.0 * y_max) * pdf(source, upper) +
                           (source.variance() + y_max * y_max) * upper_tail(source, upper);
  if (std::abs(remainder) >= 1e-14) {
    throw DesignError("overload integral truncation remainder " + std::to_string(remainder) +
                      " exceeds 1e-14");
  }
  const double body = integrate(
      [&](double x) {
        const double d = x - y_max;
        return d * d * pdf(source, x);
      },
      x_max, upper, quad);
  return 2.0 * body;
}

double overload_distortion_exact(const CompandingQuantizer& q, const QuadratureSpec& quad) {
  return overload_distortion_at(q.config.source, q.config.x_max(), q.y_max, quad);
}

double overload_distortion_closed(double x_max, const SourceModel& source) {
  if (!(x_max > 0.0)) throw DomainError("overload_distortion_closed: x_max must be positive");
  const double z = x_max / source.sigma;
  return source.variance() * std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * z * z) / (z * z * z);
}

DistortionReport sqnr(const CompandingQuantizer& q, const QuadratureSpec& quad) {
  DistortionReport report{};
  report.granular = granular_distortion(q);
  report.overload = overload_distortion_closed(q.config.x_max(), q.config.source);
  report.overload_exact = overload_distortion_exact(q, quad);
  report.total = report.granular + report.overload;
  report.sqnr_db = 10.0 * std::log10(q.config.source.variance() / report.total);
  return report;
}

CellDistortion distortion_by_cells(const CompandingQuantizer& q, const QuadratureSpec& quad) {
  double granular = 0.0;
  double lower = 0.0;
  for (std::size_t k = 0; k < q.levels.size(); ++k) {
    const double y = q.levels[k];
    granular += integrate(
        [&](double x) {
          const double d = x - y;
          return d * d * pdf(q.config.source, x);
        },
        lower, q.thresholds[k], quad);
    lower = q.thresholds[k];
  }
  granular *= 2.0;
  const double overload = overload_distortion_exact(q, quad);
  return {granular, overload, granular + overload};
}

std::size_t encode(const CompandingQuantizer& q, double x) {
  const auto edges = q.boundaries();
  return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
}

double decode(const CompandingQuantizer& q, std::size_t index) {
  const std::size_t per_side = q.levels.size();
  if (index > 2 * per_side + 1) {
    throw DomainError("decode: index " + std::to_string(index) + " out of range");
  }
  if (index == 0) return -q.y_max;
  if (index == 2 * per_side + 1) return q.y_max;
  if (index <= per_side) return -q.levels[per_side - index];
  return q.levels[index - per_side - 1];
}

std::vector<std::optional<double>> literal_offset_levels(const QuadraticSpline<double>& spline,
                                                         const DesignConfig& config) {
  const auto bounds = compressed_bounds(spline);
  const double step = step_size(config);
  const int per_side = config.granular_per_side();
  std::vector<int> counts;
  int assigned = 0;
  for (std::size_t i = 0; i < spline.size(); ++i) {
    int c = static_cast<int>(std::lround(per_side * (bounds[i + 1] - bounds[i]) / bounds.back()));
    if (i + 1 == spline.size()) c = per_side - assigned;
    counts.push_back(std::max(c, 0));
    assigned += counts.back();
  }
  std::vector<std::optional<double>> out;
  for (std::size_t i = 0; i < spline.size(); ++i) {
    const double offset = i == 0 ? 0.0 : spline[i].value(spline[i].hi);
    for (int j = 1; j <= counts[i]; ++j) {
      try {
        out.emplace_back(invert_segment(spline, i, offset + (j - 0.5) * step));
      } catch (const DesignError&) {
        out.emplace_back(std::nullopt);
      }
    }
  }
  return out;
}

}  // namespace splinecomp
