#include "splinecomp/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

#include "splinecomp/errors.hpp"

namespace splinecomp {

GaussianStream::GaussianStream(std::uint64_t seed, std::uint64_t stream, double sigma) : sigma_(sigma) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

double GaussianStream::uniform_open() {
  // (k + 0.5) / 2^53 never hits 0 or 1.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double GaussianStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform_open()));
  const double angle = 2.0 * std::numbers::pi * uniform_open();
  spare_ = sigma_ * radius * std::sin(angle);
  has_spare_ = true;
  return sigma_ * radius * std::cos(angle);
}

McEstimate mc_distortion(const std::function<double(double)>& reconstruct, const SourceModel& source,
                         std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw DomainError("mc_distortion: need at least one sample");
  struct Partial {
    long double sum = 0;
    long double sum_sq = 0;
  };
  std::vector<Partial> partials(kMcShards);
  auto run_shard = [&](std::size_t shard) {
    const std::size_t begin = n_samples * shard / kMcShards;
    const std::size_t end = n_samples * (shard + 1) / kMcShards;
    GaussianStream stream(seed, shard, source.sigma);
    Partial acc;
    for (std::size_t i = begin; i < end; ++i) {
      const double x = stream.next();
      const double d = x - reconstruct(x);
      const long double e = static_cast<long double>(d) * d;
      acc.sum += e;
      acc.sum_sq += e * e;
    }
    partials[shard] = acc;
  };

  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, kMcShards);
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t s = w; s < kMcShards; s += workers) run_shard(s);
    });
  }
  for (std::size_t s = 0; s < kMcShards; s += workers) run_shard(s);
  for (auto& t : pool) t.join();

  long double sum = 0;
  long double sum_sq = 0;
  for (const auto& p : partials) {
    sum += p.sum;
    sum_sq += p.sum_sq;
  }
  const long double n = static_cast<long double>(n_samples);
  const long double mean = sum / n;
  double std_error = std::numeric_limits<double>::infinity();
  if (n_samples > 1) {
    const long double var = std::max<long double>((sum_sq - n * mean * mean) / (n - 1), 0);
    std_error = static_cast<double>(std::sqrt(var / n));
  }
  return {static_cast<double>(mean), std_error, n_samples, seed};
}

McEstimate mc_distortion(const CompandingQuantizer& q, std::size_t n_samples, std::uint64_t seed) {
  return mc_distortion([&q](double x) { return decode(q, encode(q, x)); }, q.config.source, n_samples, seed);
}

namespace {

// Mean of the source restricted to [a, b); b may be +infinity.
double cell_centroid(const SourceModel& source, double a, double b) {
  const double mass = upper_tail(source, a) - (std::isinf(b) ? 0.0 : upper_tail(source, b));
  const double first = source.variance() * (pdf(source, a) - (std::isinf(b) ? 0.0 : pdf(source, b)));
  return first / mass;
}

double cell_distortion(const SourceModel& source, double a, double b, double y, const QuadratureSpec& quad) {
  const double upper = std::isinf(b) ? tail_truncation(source, a) : b;
  return integrate(
      [&](double x) {
        const double d = x - y;
        return d * d * pdf(source, x);
      },
      a, upper, quad);
}

std::vector<double> midpoints(const std::vector<double>& levels) {
  std::vector<double> t;
  for (std::size_t j = 0; j + 1 < levels.size(); ++j) t.push_back(0.5 * (levels[j] + levels[j + 1]));
  return t;
}

double total_distortion(const SourceModel& source, const std::vector<double>& levels,
                        const std::vector<double>& thresholds, const QuadratureSpec& quad) {
  double total = 0.0;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    const double a = j == 0 ? 0.0 : thresholds[j - 1];
    const double b = j + 1 == levels.size() ? std::numeric_limits<double>::infinity() : thresholds[j];
    total += cell_distortion(source, a, b, levels[j], quad);
  }
  return 2.0 * total;
}

std::vector<double> initial_codebook(const SourceModel& source, int n_levels) {
  const int half = n_levels / 2;
  if (n_levels >= 4) {
    try {
      const double x_max = support_threshold(source, n_levels);
      const DesignConfig config =
          n_levels >= 8 ? two_segment_config(n_levels, x_max / 2, source)
                        : DesignConfig(n_levels, KnotVector<double>({0.0, x_max}), source);
      auto d = design(config);
      std::vector<double> levels = d.quantizer.levels;
      levels.push_back(d.quantizer.y_max);
      return levels;
    } catch (const DesignError&) {
      // fall through to the uniform codebook
    }
  }
  std::vector<double> levels;
  for (int j = 1; j <= half; ++j) levels.push_back(source.sigma * (j - 0.5) * 3.0 / half);
  return levels;
}

}  // namespace

LloydMaxResult lloyd_max(const SourceModel& source, int n_levels, const LloydMaxOptions& options) {
  if (n_levels < 2 || n_levels % 2 != 0) {
    throw DomainError("lloyd_max: N must be even and >= 2, got " + std::to_string(n_levels));
  }
  return lloyd_max(source, n_levels, initial_codebook(source, n_levels), options);
}

LloydMaxResult lloyd_max(const SourceModel& source, int n_levels, std::vector<double> levels,
                         const LloydMaxOptions& options) {
  if (n_levels < 2 || n_levels % 2 != 0) {
    throw DomainError("lloyd_max: N must be even and >= 2, got " + std::to_string(n_levels));
  }
  if (levels.size() != static_cast<std::size_t>(n_levels / 2)) {
    throw DomainError("lloyd_max: initial codebook must hold N / 2 positive levels");
  }
  std::sort(levels.begin(), levels.end());

  LloydMaxResult result;
  auto thresholds = midpoints(levels);
  double current = total_distortion(source, levels, thresholds, options.quad);
  result.history.push_back(current);

  auto record = [&](double next) {
    // Each half-step is a minimization, so distortion cannot grow beyond quadrature noise.
    if (next > current * (1.0 + 1e-12)) {
      throw std::logic_error("lloyd_max: distortion increased from " + std::to_string(current) + " to " +
                             std::to_string(next));
    }
    result.history.push_back(next);
  };

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    for (std::size_t j = 0; j < levels.size(); ++j) {
      const double a = j == 0 ? 0.0 : thresholds[j - 1];
      const double b = j + 1 == levels.size() ? std::numeric_limits<double>::infinity() : thresholds[j];
      levels[j] = cell_centroid(source, a, b);
    }
    const double after_centroid = total_distortion(source, levels, thresholds, options.quad);
    record(after_centroid);
    thresholds = midpoints(levels);
    const double after_boundary = total_distortion(source, levels, thresholds, options.quad);
    record(after_boundary);

    const double change = (current - after_boundary) / after_boundary;
    current = after_boundary;
    if (change < options.tolerance) {
      result.levels = levels;
      result.thresholds = thresholds;
      result.distortion = current;
      result.sqnr_db = 10.0 * std::log10(source.variance() / current);
      result.iterations = iter;
      return result;
    }
  }
  throw ConvergenceError("lloyd_max: no convergence within " + std::to_string(options.max_iterations) +
                         " iterations");
}

DistortionReport companding_sqnr(const SourceModel& source, int n_levels, double x_max,
                                 const std::function<double(double)>& compressor_inverse,
                                 const std::function<double(double)>& compressor_slope,
                                 const QuadratureSpec& quad) {
  if (n_levels < 4 || n_levels % 2 != 0) throw DomainError("companding_sqnr: N must be even and >= 4");
  const double step = 2.0 * x_max / (n_levels - 2);
  const double n = n_levels - 2;
  double sum = 0.0;
  for (int k = 1; k <= (n_levels - 2) / 2; ++k) {
    const double y = compressor_inverse((k - 0.5) * step);
    const double slope = compressor_slope(y);
    if (!(slope > 0.0)) throw DesignError("companding_sqnr: compressor not increasing");
    sum += pdf(source, y) / (slope * slope) * (step / slope);
  }
  DistortionReport report{};
  report.granular = 2.0 * x_max * x_max / (3.0 * n * n) * sum;
  report.overload = overload_distortion_closed(x_max, source);
  report.overload_exact = overload_distortion_at(source, x_max, tail_centroid(source, x_max), quad);
  report.total = report.granular + report.overload;
  report.sqnr_db = 10.0 * std::log10(source.variance() / report.total);
  return report;
}

DistortionReport exact_compressor_sqnr(const SourceModel& source, int n_levels, const QuadratureSpec& quad) {
  const double x_max = support_threshold(source, n_levels);
  return companding_sqnr(
      source, n_levels, x_max, [&](double t) { return compressor_inverse(source, x_max, t); },
      [&](double x) { return compressor_derivative(source, x_max, x); }, quad);
}

}  // namespace splinecomp
