#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "splinecomp/gauss.hpp"
#include "splinecomp/quadrature.hpp"
#include "splinecomp/spline.hpp"

namespace splinecomp {

/// N output levels, segment knots over [0, x_max] and the source they are designed for.
struct DesignConfig {
  int n_levels;
  KnotVector<double> knots;
  SourceModel source;

  DesignConfig(int n_levels, KnotVector<double> knots, SourceModel source = {});

  double x_max() const { return knots.back(); }
  /// Granular levels on the positive half, (N - 2) / 2.
  int granular_per_side() const { return (n_levels - 2) / 2; }
};

/// Standard two-segment configuration: knots (0, x1, support_threshold(N)).
DesignConfig two_segment_config(int n_levels, double x1, SourceModel source = {});

/// Odd-symmetric companding quantizer. Vectors describe the positive half;
/// the negative half is the mirror image.
struct CompandingQuantizer {
  DesignConfig config;
  QuadraticSpline<double> spline;
  double step;
  /// Granular reproduction levels, ascending, grouped by segment.
  std::vector<double> levels;
  /// Segment owning each level.
  std::vector<std::size_t> level_segment;
  /// Upper cell boundaries of the granular cells; the last one is x_max.
  std::vector<double> thresholds;
  /// Levels per segment on the positive half.
  std::vector<int> counts;
  /// Real-valued per-segment allocation the integer counts realize.
  std::vector<double> allocation_ratio;
  /// Overload reproduction level.
  double y_max;
  /// h'(y) at every level.
  std::vector<double> level_slopes;
  /// step / h'(y): asymptotic cell length used by the granular distortion formula.
  std::vector<double> cell_lengths;
  /// Threshold differences: actual cell widths.
  std::vector<double> cell_widths;

  int output_levels() const { return config.n_levels; }
  /// Full symmetric boundary list -x_max, ..., 0, ..., x_max.
  std::vector<double> boundaries() const;
};

struct DistortionReport {
  double granular;
  /// Closed-form overload term; this is what enters total and sqnr_db.
  double overload;
  /// Overload term from direct integration, reported alongside.
  double overload_exact;
  double total;
  double sqnr_db;
};

double step_size(const DesignConfig& config);

/// Integer levels per segment from the uniform compressed-domain grid
/// (k - 1/2) * step, k = 1 .. (N - 2) / 2.
std::vector<int> allocate_levels(const QuadraticSpline<double>& spline, const DesignConfig& config);

CompandingQuantizer build(const QuadraticSpline<double>& spline, const DesignConfig& config);

/// Fit result, quantizer and distortion report for the Gaussian compressor.
struct Design {
  SplineFit<double> fit;
  CompandingQuantizer quantizer;
  DistortionReport report;
};

/// Fits the optimal compressor of config.source over config.knots, builds
/// the quantizer and evaluates it.
Design design(const DesignConfig& config, const QuadratureSpec& quad = {});

double granular_distortion(const CompandingQuantizer& q);
/// 2 * sum p(y) * cell_length^3 / 12; algebraically equal to granular_distortion().
double granular_distortion_cell_form(const CompandingQuantizer& q);

double overload_distortion_exact(const CompandingQuantizer& q, const QuadratureSpec& quad = {});
/// Same integral for an arbitrary overload reproduction level.
double overload_distortion_at(const SourceModel& source, double x_max, double y_max,
                              const QuadratureSpec& quad = {});
double overload_distortion_closed(double x_max, const SourceModel& source = {});

DistortionReport sqnr(const CompandingQuantizer& q, const QuadratureSpec& quad = {});

/// Mean squared error of the quantizer as built, integrated cell by cell.
struct CellDistortion {
  double granular;
  double overload;
  double total;
};
CellDistortion distortion_by_cells(const CompandingQuantizer& q, const QuadratureSpec& quad = {});

/// Cell index in [0, N): 0 is the negative overload cell, N - 1 the positive one.
/// Cells are half-open [lower, upper).
std::size_t encode(const CompandingQuantizer& q, double x);
double decode(const CompandingQuantizer& q, std::size_t index);
inline std::size_t mirror_index(const CompandingQuantizer& q, std::size_t index) {
  return static_cast<std::size_t>(q.output_levels()) - 1 - index;
}

/// Levels obtained when the second and later segments offset their targets by
/// the segment's right-end compressed value h_i(x_i), with per-segment counts
/// rounded from the real-valued allocation. Entries without a root inside the
/// segment are empty. Diagnostic only.
std::vector<std::optional<double>> literal_offset_levels(const QuadraticSpline<double>& spline,
                                                         const DesignConfig& config);

}  // namespace splinecomp
