#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "splinecomp/errors.hpp"
#include "splinecomp/gauss.hpp"
#include "splinecomp/optimizer.hpp"
#include "splinecomp/oracles.hpp"
#include "splinecomp/quantizer.hpp"

using namespace splinecomp;

namespace {
const SourceModel kUnit;
}

TEST_CASE("gaussian stream is reproducible and standard normal") {
  GaussianStream a(42, 3), b(42, 3), c(42, 4);
  double sum = 0.0, sum_sq = 0.0;
  bool differs = false;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = a.next();
    CHECK(x == b.next());
    differs |= x != c.next();
    sum += x;
    sum_sq += x * x;
  }
  CHECK(differs);
  CHECK(std::abs(sum / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(sum_sq / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("monte carlo of the all-zero quantizer estimates the variance") {
  const auto est = mc_distortion([](double) { return 0.0; }, kUnit, 100000, 1);
  CHECK(est.std_error > 0.0);
  CHECK(std::abs(est.mean_distortion - 1.0) <= 3 * est.std_error);
  const auto again = mc_distortion([](double) { return 0.0; }, kUnit, 100000, 1);
  CHECK(again.mean_distortion == est.mean_distortion);
  CHECK(again.std_error == est.std_error);
  CHECK(mc_distortion([](double) { return 0.0; }, kUnit, 1, 1).std_error > 0.0);
  CHECK_THROWS_AS(mc_distortion([](double) { return 0.0; }, kUnit, 0, 1), DomainError);
}

TEST_CASE("monte carlo result does not depend on threading") {
  const std::size_t n = 12345;
  const auto est = mc_distortion([](double x) { return std::round(x); }, kUnit, n, 9);
  long double total = 0;
  for (std::size_t shard = 0; shard < kMcShards; ++shard) {
    GaussianStream s(9, shard);
    long double part = 0;
    for (std::size_t i = n * shard / kMcShards; i < n * (shard + 1) / kMcShards; ++i) {
      const double x = s.next();
      const double d = x - std::round(x);
      part += static_cast<long double>(d) * d;
    }
    total += part;
  }
  CHECK(est.mean_distortion == static_cast<double>(total / n));
}

TEST_CASE("monte carlo agrees with cell integration") {
  const DesignConfig uniform_config(16, KnotVector<double>({0.0, 2.5}));
  const auto uniform = build(QuadraticSpline<double>({{0.0, 1.0, 0.0, 0.0, 2.5}}), uniform_config);
  const auto mc_u = mc_distortion(uniform, 1'000'000, 3);
  CHECK(std::abs(mc_u.mean_distortion - distortion_by_cells(uniform).total) <= 3 * mc_u.std_error);

  const auto q = design(two_segment_config(16, 1.68)).quantizer;
  const auto mc = mc_distortion(q, 2'000'000, 11);
  CHECK(std::abs(mc.mean_distortion - distortion_by_cells(q).total) <= 3 * mc.std_error);
}

TEST_CASE("one-bit lloyd-max quantizer") {
  const auto r = lloyd_max(kUnit, 2);
  REQUIRE(r.levels.size() == 1);
  CHECK(r.levels[0] == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-12));
  CHECK(r.thresholds.empty());
  CHECK(r.sqnr_db == doctest::Approx(10 * std::log10(1.0 / (1.0 - 2.0 / std::numbers::pi))).epsilon(1e-10));
}

TEST_CASE("lloyd-max reference values") {
  // scipy fixed-point iteration run to level convergence 1e-15
  const auto r4 = lloyd_max(kUnit, 4);
  CHECK(r4.sqnr_db == doctest::Approx(9.3002923124).epsilon(1e-8));
  CHECK(r4.levels[0] == doctest::Approx(0.45278003).epsilon(1e-6));
  const auto r16 = lloyd_max(kUnit, 16);
  CHECK(r16.sqnr_db == doctest::Approx(20.2223031585).epsilon(1e-7));
  CHECK(r16.levels[0] == doctest::Approx(0.12839503).epsilon(1e-5));
  const auto r32 = lloyd_max(kUnit, 32);
  CHECK(r32.sqnr_db == doctest::Approx(26.0124977113).epsilon(1e-6));
  CHECK(r32.levels.size() == 16);
  CHECK(r32.thresholds.size() == 15);
}

TEST_CASE("lloyd-max distortion never increases") {
  const auto r = lloyd_max(kUnit, 16);
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1] * (1 + 1e-12));
  CHECK(r.distortion == r.history.back());
}

TEST_CASE("lloyd-max beats every spline design") {
  for (int n : {16, 32}) {
    const double opt = lloyd_max(kUnit, n).sqnr_db;
    const auto swept = sweep(n, 0.05);
    for (const auto& c : swept.candidates) {
      if (c.valid) CHECK(opt >= c.sqnr_db);
    }
  }
}

TEST_CASE("lloyd-max argument checks") {
  CHECK_THROWS_AS(lloyd_max(kUnit, 3), DomainError);
  CHECK_THROWS_AS(lloyd_max(kUnit, 0), DomainError);
  CHECK_THROWS_AS(lloyd_max(kUnit, 4, std::vector<double>{1.0}), DomainError);
  LloydMaxOptions tiny;
  tiny.max_iterations = 1;
  CHECK_THROWS_AS(lloyd_max(kUnit, 16, tiny), ConvergenceError);
}

TEST_CASE("exact compressor pipeline") {
  // scipy reimplementation of the same formula chain
  CHECK(exact_compressor_sqnr(kUnit, 16).sqnr_db == doctest::Approx(19.627079039255918).epsilon(1e-9));
  CHECK(exact_compressor_sqnr(kUnit, 32).sqnr_db == doctest::Approx(25.791643079158412).epsilon(1e-9));
}

TEST_CASE("identity compressor reduces to the uniform design") {
  const double x_max = 2.5;
  const auto q = build(QuadraticSpline<double>({{0.0, 1.0, 0.0, 0.0, x_max}}),
                       DesignConfig(16, KnotVector<double>({0.0, x_max})));
  const auto uniform = sqnr(q);
  const auto via_compander = companding_sqnr(
      kUnit, 16, x_max, [](double t) { return t; }, [](double) { return 1.0; });
  CHECK(via_compander.granular == doctest::Approx(uniform.granular).epsilon(1e-13));
  CHECK(via_compander.sqnr_db == doctest::Approx(uniform.sqnr_db).epsilon(1e-13));
}
