#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "splinecomp/errors.hpp"
#include "splinecomp/gauss.hpp"

using namespace splinecomp;

TEST_CASE("pdf values and symmetry") {
  const SourceModel unit;
  CHECK(pdf(unit, 0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-15));
  CHECK(pdf(unit, 1.0) == doctest::Approx(0.24197072451914337).epsilon(1e-14));
  CHECK(pdf(unit, -1.0) == pdf(unit, 1.0));
  CHECK(pdf(unit, 40.0) >= 0.0);
}

TEST_CASE("source model rejects non-positive sigma") {
  CHECK_THROWS_AS(SourceModel(0.0), DomainError);
  CHECK_THROWS_AS(SourceModel(-1.0), DomainError);
}

TEST_CASE("compressor endpoints and oddness") {
  const SourceModel unit;
  const double x_max = 2.4744;
  CHECK(compressor(unit, x_max, 0.0) == 0.0);
  CHECK(compressor(unit, x_max, x_max) == doctest::Approx(x_max).epsilon(1e-15));
  CHECK(compressor(unit, x_max, -x_max) == doctest::Approx(-x_max).epsilon(1e-15));
  CHECK(compressor(unit, x_max, -0.7) == -compressor(unit, x_max, 0.7));
  // mpmath: 2.4744 * erf(1/sqrt 6) / erf(2.4744/sqrt 6)
  CHECK(compressor(unit, x_max, 1.0) == doctest::Approx(1.27476656711565437).epsilon(1e-13));
  CHECK_THROWS_AS(compressor(unit, x_max, 2.5), DomainError);
}

TEST_CASE("compressor closed form matches quadrature of the defining integral") {
  const SourceModel unit;
  const double x_max = support_threshold(unit, 16);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = x_max * i / 999.0;
    worst = std::max(worst, std::abs(compressor(unit, x_max, x) - compressor_by_quadrature(unit, x_max, x)));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("compressor is strictly increasing and its derivative matches finite differences") {
  const SourceModel unit;
  const double x_max = support_threshold(unit, 32);
  double prev = -1.0;
  for (int i = 0; i <= 500; ++i) {
    const double x = x_max * i / 500.0;
    const double c = compressor(unit, x_max, x);
    CHECK(c > prev);
    prev = c;
  }
  for (double x : {0.1, 0.9, 2.0, 2.9}) {
    const double h = 1e-6;
    const double fd = (compressor(unit, x_max, x + h) - compressor(unit, x_max, x - h)) / (2 * h);
    CHECK(compressor_derivative(unit, x_max, x) == doctest::Approx(fd).epsilon(1e-8));
  }
}

TEST_CASE("compressor inverse round trip") {
  const SourceModel unit;
  const double x_max = support_threshold(unit, 16);
  for (double t : {0.0, 0.01, 0.5, 1.3, 2.0, x_max}) {
    CHECK(compressor(unit, x_max, compressor_inverse(unit, x_max, t)) == doctest::Approx(t).epsilon(1e-13));
  }
  CHECK(compressor_inverse(unit, x_max, -0.5) == -compressor_inverse(unit, x_max, 0.5));
}

TEST_CASE("support threshold") {
  const SourceModel unit;
  // mpmath evaluation of the support-region formula
  CHECK(support_threshold(unit, 16) == doctest::Approx(2.47456487636762755).epsilon(1e-14));
  CHECK(support_threshold(unit, 32) == doctest::Approx(3.05193494829305882).epsilon(1e-14));
  CHECK(support_threshold(SourceModel(2.0), 16) == doctest::Approx(2.0 * support_threshold(unit, 16)));
  CHECK_THROWS_AS(support_threshold(unit, 3), DomainError);

  double prev = 0.0;
  for (int n : {8, 16, 32, 64, 128}) {
    const double x = support_threshold(unit, n);
    CHECK(x > prev);
    prev = x;
  }
}

TEST_CASE("tail centroid") {
  const SourceModel unit;
  CHECK(tail_centroid(unit, 0.0) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-14));
  // mpmath quadrature of numerator and denominator
  CHECK(tail_centroid(unit, 2.4744) == doctest::Approx(2.79943665398086936).epsilon(1e-12));

  double prev_gap = tail_centroid(unit, 0.0);
  for (int i = 1; i <= 50; ++i) {
    const double x = 0.1 * i;
    const double gap = tail_centroid(unit, x) - x;
    CHECK(gap > 0.0);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK_NOTHROW(tail_centroid(unit, 30.0));
  CHECK_THROWS_AS(tail_centroid(unit, 40.0), DomainError);
  CHECK_THROWS_AS(tail_centroid(unit, -1.0), DomainError);
}

TEST_CASE("upper tail stays accurate deep in the tail") {
  const SourceModel unit;
  // Q(10) = 7.61985302416e-24
  CHECK(upper_tail(unit, 10.0) == doctest::Approx(7.6198530241604696e-24).epsilon(1e-12));
}
