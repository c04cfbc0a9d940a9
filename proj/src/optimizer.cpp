#include "splinecomp/optimizer.hpp"

#include <cmath>
#include <limits>

#include "splinecomp/errors.hpp"

namespace splinecomp {

std::optional<double> sqnr_at(int n_levels, double x1, SourceModel source, const QuadratureSpec& quad) {
  try {
    return design(two_segment_config(n_levels, x1, source), quad).report.sqnr_db;
  } catch (const DesignError&) {
    return std::nullopt;
  }
}

SweepResult sweep(int n_levels, double grid_step, SourceModel source, const QuadratureSpec& quad) {
  const double x_max = support_threshold(source, n_levels);
  if (!(grid_step > 0.0) || grid_step >= x_max / 2) {
    throw DomainError("sweep: grid step must lie in (0, x_max / 2)");
  }
  SweepResult result{n_levels, x_max, grid_step, {}, 0.0, -std::numeric_limits<double>::infinity(), 0, {}};
  for (int k = 0;; ++k) {
    const double x1 = x_max / 2 + k * grid_step;
    if (!(x1 < x_max)) break;
    SweepCandidate cand{x1, false, std::numeric_limits<double>::quiet_NaN(), {}, {}};
    try {
      cand.report = design(two_segment_config(n_levels, x1, source), quad).report;
      cand.sqnr_db = cand.report.sqnr_db;
      cand.valid = true;
    } catch (const DesignError& e) {
      cand.failure = e.what();
    }
    result.candidates.push_back(std::move(cand));
  }

  const auto best = best_candidate(result.candidates);
  if (!best) throw DesignError("sweep: every candidate threshold failed to produce a quantizer");
  result.best_index = *best;
  result.best_x1 = result.candidates[*best].x1;
  result.best_sqnr_db = result.candidates[*best].sqnr_db;

  for (std::size_t i = 1; i + 1 < result.candidates.size(); ++i) {
    const auto& prev = result.candidates[i - 1];
    const auto& cur = result.candidates[i];
    const auto& next = result.candidates[i + 1];
    if (!(prev.valid && cur.valid && next.valid) || i == result.best_index) continue;
    if (cur.sqnr_db > prev.sqnr_db + 0.05 && cur.sqnr_db > next.sqnr_db + 0.05) {
      result.spurious_peaks.push_back(cur.x1);
    }
  }
  return result;
}

std::optional<std::size_t> best_candidate(std::span<const SweepCandidate> candidates) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].valid && (!best || candidates[i].sqnr_db > candidates[*best].sqnr_db)) best = i;
  }
  return best;
}

GoldenSectionResult golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                                            double tolerance) {
  if (!(lo < hi) || !(tolerance > 0.0)) throw DomainError("golden_section_maximize: bad bracket");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int evaluations = 2;
  while (b - a > tolerance) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evaluations;
  }
  return fc >= fd ? GoldenSectionResult{c, fc, evaluations} : GoldenSectionResult{d, fd, evaluations};
}

RefinedThreshold refine(const SweepResult& result, double tolerance, SourceModel source,
                        const QuadratureSpec& quad) {
  const auto& cands = result.candidates;
  const std::size_t i = result.best_index;
  const bool interior = i > 0 && i + 1 < cands.size() && cands[i - 1].valid && cands[i + 1].valid;
  if (!interior) return {result.best_x1, result.best_sqnr_db, false};
  if (tolerance >= result.grid_step) return {result.best_x1, result.best_sqnr_db, true};

  auto objective = [&](double x1) {
    return sqnr_at(result.n_levels, x1, source, quad).value_or(-std::numeric_limits<double>::infinity());
  };
  const auto found = golden_section_maximize(objective, cands[i - 1].x1, cands[i + 1].x1, tolerance);
  if (found.value >= result.best_sqnr_db) return {found.x, found.value, true};
  return {result.best_x1, result.best_sqnr_db, true};
}

}  // namespace splinecomp
