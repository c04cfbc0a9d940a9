#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "splinecomp/gauss.hpp"
#include "splinecomp/quadrature.hpp"
#include "splinecomp/quantizer.hpp"

namespace splinecomp {

/// One evaluated segment threshold. Invalid candidates carry the design error.
struct SweepCandidate {
  double x1;
  bool valid;
  double sqnr_db;
  DistortionReport report;
  std::string failure;
};

struct SweepResult {
  int n_levels;
  double x_max;
  double grid_step;
  std::vector<SweepCandidate> candidates;
  double best_x1;
  double best_sqnr_db;
  std::size_t best_index;
  /// Valid candidates more than 0.05 dB above both valid neighbours while below the maximum.
  std::vector<double> spurious_peaks;
};

/// Evaluates the design at x1 = x_max/2 + k * grid_step for every k with x1 < x_max.
///
/// Candidates whose fit cannot be turned into a quantizer are kept in the
/// curve as invalid and never win. Ties go to the smaller threshold.
SweepResult sweep(int n_levels, double grid_step, SourceModel source = {}, const QuadratureSpec& quad = {});

/// Index of the valid candidate with the largest SQNR; first one wins ties.
std::optional<std::size_t> best_candidate(std::span<const SweepCandidate> candidates);

/// SQNR of the two-segment design at x1, or nullopt if the design fails.
std::optional<double> sqnr_at(int n_levels, double x1, SourceModel source = {}, const QuadratureSpec& quad = {});

struct GoldenSectionResult {
  double x;
  double value;
  int evaluations;
};

/// Golden-section search for the maximum of f on [lo, hi], stopping once the
/// bracket is no wider than tolerance.
GoldenSectionResult golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                                            double tolerance);

struct RefinedThreshold {
  double x1;
  double sqnr_db;
  /// False when the grid maximum was at the sweep boundary and was returned unchanged.
  bool interior;
};

/// Golden-section refinement within one grid step of the sweep's best threshold.
RefinedThreshold refine(const SweepResult& result, double tolerance, SourceModel source = {},
                        const QuadratureSpec& quad = {});

}  // namespace splinecomp
