#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "splinecomp/gauss.hpp"
#include "splinecomp/quadrature.hpp"
#include "splinecomp/quantizer.hpp"

namespace splinecomp {

/// Deterministic Gaussian stream: mt19937_64 seeded through seed_seq with
/// (seed, stream), Box-Muller on 53-bit uniforms. Output depends only on the
/// seed pair, never on the standard library's distribution implementations.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream, double sigma = 1.0);
  double next();

 private:
  double uniform_open();

  std::mt19937_64 engine_;
  double sigma_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct McEstimate {
  double mean_distortion;
  double std_error;
  std::size_t n_samples;
  std::uint64_t seed;
};

/// Samples are split into a fixed number of shards, each with its own stream,
/// so the estimate does not depend on how many threads run them.
inline constexpr std::size_t kMcShards = 64;

McEstimate mc_distortion(const std::function<double(double)>& reconstruct, const SourceModel& source,
                         std::size_t n_samples, std::uint64_t seed);
McEstimate mc_distortion(const CompandingQuantizer& q, std::size_t n_samples, std::uint64_t seed);

struct LloydMaxOptions {
  double tolerance = 1e-12;
  int max_iterations = 10000;
  QuadratureSpec quad{};
};

struct LloydMaxResult {
  /// Positive-half reproduction levels, ascending (N / 2 of them).
  std::vector<double> levels;
  /// Positive-half interior decision thresholds (N / 2 - 1 of them).
  std::vector<double> thresholds;
  double distortion;
  double sqnr_db;
  int iterations;
  /// Distortion after every half-step, starting with the initial codebook.
  std::vector<double> history;
};

/// Symmetric Lloyd-Max quantizer with an even number of levels. Centroids are
/// closed form; cell distortions come from quadrature.
LloydMaxResult lloyd_max(const SourceModel& source, int n_levels, const LloydMaxOptions& options = {});
LloydMaxResult lloyd_max(const SourceModel& source, int n_levels, std::vector<double> initial_levels,
                         const LloydMaxOptions& options = {});

/// Companding pipeline (granular formula plus closed-form overload) for an
/// arbitrary increasing compressor mapping [0, x_max] onto itself.
DistortionReport companding_sqnr(const SourceModel& source, int n_levels, double x_max,
                                 const std::function<double(double)>& compressor_inverse,
                                 const std::function<double(double)>& compressor_slope,
                                 const QuadratureSpec& quad = {});

/// companding_sqnr() with the exact optimal compressor in place of the spline.
DistortionReport exact_compressor_sqnr(const SourceModel& source, int n_levels, const QuadratureSpec& quad = {});

}  // namespace splinecomp
