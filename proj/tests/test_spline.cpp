#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "splinecomp/errors.hpp"
#include "splinecomp/gauss.hpp"
#include "splinecomp/spline.hpp"

using namespace splinecomp;

namespace {

const SourceModel kUnit;
const double kXmax16 = support_threshold(kUnit, 16);

double gauss_compressor(double x) { return compressor(kUnit, kXmax16, x); }

KnotVector<double> paper_knots() { return KnotVector<double>({0.0, 1.68, kXmax16}); }

// F restricted to one segment, straight from its definition.
double segment_objective(double r, double p, double q, double a, double b) {
  return integrate(
             [&](double x) {
               const double d = gauss_compressor(x) - (r + p * x + q * x * x);
               return d * d;
             },
             a, b) /
         (b - a);
}

}  // namespace

TEST_CASE("knot vector invariants") {
  CHECK_THROWS_AS(KnotVector<double>({0.0}), DomainError);
  CHECK_THROWS_AS(KnotVector<double>({0.1, 1.0}), DomainError);
  CHECK_THROWS_AS(KnotVector<double>({0.0, 1.0, 1.0}), DomainError);
  CHECK(KnotVector<double>({0.0, 1.0, 2.0}).segment_count() == 2);
}

TEST_CASE("exactly representable targets are recovered") {
  const KnotVector<double> knots({0.0, 0.7, 1.9, 3.0});
  const auto identity = fit([](double x) { return x; }, knots);
  for (const auto& s : identity.segments()) {
    CHECK(std::abs(s.r) < 1e-10);
    CHECK(s.p == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(s.q) < 1e-10);
  }
  auto quad = [](double x) { return 1.0 + 2.0 * x + 3.0 * x * x; };
  const auto spline = fit(quad, knots);
  for (const auto& s : spline.segments()) {
    CHECK(s.r == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(s.p == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(s.q == doctest::Approx(3.0).epsilon(1e-9));
  }
  CHECK(fit_objective(quad, spline, knots) <= 1e-16);

  // Piecewise quadratic target with a different piece per interval.
  auto piecewise = [](double x) { return x < 1.0 ? x * x : 2.0 - 0.5 * x; };
  const KnotVector<double> two({0.0, 1.0, 2.5});
  CHECK(fit_objective(piecewise, fit(piecewise, two), two) <= 1e-16);
}

TEST_CASE("gaussian compressor fit matches high-precision normal equations") {
  const auto result = fit_with_diagnostics(gauss_compressor, paper_knots());
  const auto& s = result.spline;
  // mpmath, 30 digits
  CHECK(s[0].r == doctest::Approx(-0.013007144921953).epsilon(1e-9));
  CHECK(s[0].p == doctest::Approx(1.44427872509134).epsilon(1e-10));
  CHECK(s[0].q == doctest::Approx(-0.159978669671154).epsilon(1e-10));
  CHECK(s[1].r == doctest::Approx(-0.0903633598192298).epsilon(1e-8));
  CHECK(s[1].p == doctest::Approx(1.5948056776404).epsilon(1e-9));
  CHECK(s[1].q == doctest::Approx(-0.225683439768496).epsilon(1e-9));
  CHECK(result.condition_numbers.size() == 2);
  for (double c : result.condition_numbers) CHECK(c >= 1.0);
  // eval at 0 reads off r_1, a small non-zero offset
  CHECK(eval(s, 0.0) == s[0].r);
  CHECK(eval(s, 0.0) != 0.0);
}

TEST_CASE("fit objective agrees with a brute-force coefficient grid search") {
  const auto knots = paper_knots();
  const auto spline = fit(gauss_compressor, knots);
  double brute_total = 0.0;
  for (std::size_t i = 0; i < spline.size(); ++i) {
    const auto& s = spline[i];
    double r = s.r, p = s.p, q = s.q;
    double best = segment_objective(r, p, q, s.lo, s.hi);
    // Successively finer 5x5x5 grids centred on the incumbent.
    for (double h : {1e-2, 1e-3, 1e-4, 1e-5}) {
      bool moved = true;
      while (moved) {
        moved = false;
        double br = r, bp = p, bq = q;
        for (int a = -2; a <= 2; ++a)
          for (int b = -2; b <= 2; ++b)
            for (int c = -2; c <= 2; ++c) {
              const double v = segment_objective(r + a * h, p + b * h, q + c * h, s.lo, s.hi);
              if (v < best * (1 - 1e-12)) {
                best = v;
                br = r + a * h;
                bp = p + b * h;
                bq = q + c * h;
                moved = true;
              }
            }
        r = br, p = bp, q = bq;
      }
    }
    // The normal-equation solution is never beaten.
    CHECK(std::abs(r - s.r) <= 1e-5);
    CHECK(std::abs(p - s.p) <= 1e-5);
    CHECK(std::abs(q - s.q) <= 1e-5);
    brute_total += best;
  }
  const double fitted = fit_objective(gauss_compressor, spline, knots);
  CHECK(fitted == doctest::Approx(brute_total).epsilon(1e-9));
  // mpmath: 1.9844219819964e-5 + 2.21965119646776e-8
  CHECK(fitted == doctest::Approx(1.9844219819964e-5 + 2.21965119646776e-8).epsilon(1e-7));
}

TEST_CASE("fit objective rises under any perturbation") {
  const auto knots = paper_knots();
  const auto spline = fit(gauss_compressor, knots);
  const double base = fit_objective(gauss_compressor, spline, knots);
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<int> coin(0, 1);
  auto segs = std::vector<QuadSegment<double>>(spline.segments().begin(), spline.segments().end());
  for (int trial = 0; trial < 100; ++trial) {
    auto moved = segs;
    for (auto& s : moved) {
      s.r += coin(rng) ? 1e-3 : -1e-3;
      s.p += coin(rng) ? 1e-3 : -1e-3;
      s.q += coin(rng) ? 1e-3 : -1e-3;
    }
    CHECK(fit_objective(gauss_compressor, QuadraticSpline<double>(moved), knots) > base);
  }
  // single-coefficient nudges
  for (std::size_t i = 0; i < segs.size(); ++i) {
    for (double* field : {&segs[i].r, &segs[i].p, &segs[i].q}) {
      for (double d : {1e-3, -1e-3}) {
        *field += d;
        CHECK(fit_objective(gauss_compressor, QuadraticSpline<double>(segs), knots) > base);
        *field -= d;
      }
    }
  }
}

TEST_CASE("residual is orthogonal to 1, x, x^2 on every segment") {
  const auto spline = fit(gauss_compressor, paper_knots());
  for (const auto& s : spline.segments()) {
    for (int k = 0; k < 3; ++k) {
      const double m = integrate(
          [&](double x) { return (gauss_compressor(x) - s.value(x)) * std::pow(x, k); }, s.lo, s.hi);
      CHECK(std::abs(m) <= 1e-8 * (s.hi - s.lo));
    }
  }
}

TEST_CASE("fit objective rejects mismatched knots") {
  const auto spline = fit(gauss_compressor, paper_knots());
  CHECK_THROWS_AS(fit_objective(gauss_compressor, spline, KnotVector<double>({0.0, kXmax16})), DomainError);
  CHECK_THROWS_AS(fit_objective(gauss_compressor, spline, KnotVector<double>({0.0, 1.5, kXmax16})), DomainError);
}

TEST_CASE("eval and deriv") {
  const QuadraticSpline<double> s({{0.0, 1.0, 0.0, 0.0, 1.0}, {5.0, 0.0, 1.0, 1.0, 3.0}});
  CHECK(eval(s, 0.5) == 0.5);
  CHECK(eval(s, 1.0) == 1.0);  // knot belongs to the left piece
  CHECK(eval(s, 1.0 + 1e-12) == doctest::Approx(6.0));
  CHECK(deriv(s, 0.3) == 1.0);
  CHECK(deriv(s, 2.0) == 4.0);
  CHECK(knot_jumps(s).at(0) == doctest::Approx(5.0));
  CHECK_THROWS_AS(eval(s, -0.1), DomainError);
  CHECK_THROWS_AS(deriv(s, 3.1), DomainError);
}

TEST_CASE("deriv matches finite differences of eval on the gaussian fit") {
  const auto spline = fit(gauss_compressor, paper_knots());
  for (int i = 1; i < 50; ++i) {
    const double x = kXmax16 * i / 50.0;
    if (std::abs(x - 1.68) < 1e-3) continue;
    const double h = 1e-6;
    const double fd = (eval(spline, x + h) - eval(spline, x - h)) / (2 * h);
    CHECK(deriv(spline, x) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("invert_segment") {
  const QuadraticSpline<double> identity({{0.0, 1.0, 0.0, 0.0, 1.0}});
  CHECK(invert_segment(identity, 0, 0.7) == doctest::Approx(0.7));

  const QuadraticSpline<double> square({{0.0, 0.0, 1.0, 0.0, 3.0}});
  CHECK(invert_segment(square, 0, 4.0) == doctest::Approx(2.0));

  const QuadraticSpline<double> vee({{0.0, -2.0, 1.0, 0.0, 3.0}});  // minimum at x = 1
  CHECK_THROWS_AS(invert_segment(vee, 0, -0.5), DesignError);       // roots 0.29 and 1.71
  CHECK_THROWS_AS(invert_segment(vee, 0, -2.0), DesignError);       // no real root
  CHECK_THROWS_AS(invert_segment(square, 0, 100.0), DesignError);   // root 10 outside
  CHECK_THROWS_AS(invert_segment(square, 1, 1.0), DomainError);

  // nearly linear piece uses the linear solve
  const QuadraticSpline<double> flat({{0.5, 2.0, 1e-14, 0.0, 1.0}});
  CHECK(invert_segment(flat, 0, 1.5) == doctest::Approx(0.5));
}

TEST_CASE("invert_segment round trip on the gaussian fit") {
  const auto spline = fit(gauss_compressor, paper_knots());
  const double step = 2 * kXmax16 / 14;
  for (std::size_t i = 0; i < spline.size(); ++i) {
    const auto& s = spline[i];
    for (int k = 0; k <= 40; ++k) {
      const double t = s.value(s.lo) + (s.value(s.hi) - s.value(s.lo)) * k / 40.0;
      const double y = invert_segment(spline, i, t);
      CHECK(s.value(y) == doctest::Approx(t).epsilon(1e-10));
    }
  }
  const double y = invert_segment(spline, 0, step / 2);
  CHECK(std::abs(eval(spline, y) - step / 2) <= 1e-10);
}
