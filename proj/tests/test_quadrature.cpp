#include <doctest.h>

#include <cmath>

#include "stokesrec/quadrature.hpp"

using namespace stokesrec;

namespace {

// closed form for the reference triangle: int x^a y^b = a! b! / (a+b+2)!
double exact_triangle_monomial(int a, int b) {
  double v = 1.0;
  for (int i = 1; i <= a; ++i) v *= i;
  for (int i = 1; i <= b; ++i) v *= i;
  for (int i = 1; i <= a + b + 2; ++i) v /= i;
  return v;
}

double integrate_triangle(const QuadRule& rule, int a, int b) {
  double s = 0.0;
  for (int q = 0; q < rule.size(); ++q)
    s += rule.weights[q] * std::pow(rule.x(q), a) * std::pow(rule.y(q), b);
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("quadrature");

TEST_CASE("triangle rule frozen values") {
  const QuadRule& r = triangle_rule(8);
  CHECK(integrate_triangle(r, 0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(integrate_triangle(r, 1, 1) == doctest::Approx(1.0 / 24.0).epsilon(1e-13));
  const QuadRule& r7 = triangle_rule(7);
  CHECK(integrate_triangle(r7, 4, 3) == doctest::Approx(1.0 / 2520.0).epsilon(1e-13));
}

TEST_CASE("triangle monomial exactness sweep") {
  for (int degree : {0, 1, 2, 3, 5, 8, 12, 16, 20, 26, 30}) {
    const QuadRule& rule = triangle_rule(degree);
    double wsum = 0.0;
    for (double w : rule.weights) {
      CHECK(std::isfinite(w));
      wsum += w;
    }
    CHECK(wsum == doctest::Approx(0.5).epsilon(1e-14));
    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b) {
        const double exact = exact_triangle_monomial(a, b);
        CHECK(integrate_triangle(rule, a, b) == doctest::Approx(exact).epsilon(1e-13));
      }
  }
}

TEST_CASE("edge rule exactness") {
  const QuadRule& r = edge_rule(5);
  double s0 = 0, s1 = 0, s5 = 0, wsum = 0;
  for (int q = 0; q < r.size(); ++q) {
    wsum += r.weights[q];
    s0 += r.weights[q];
    s1 += r.weights[q] * r.t(q);
    s5 += r.weights[q] * std::pow(r.t(q), 5);
  }
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s0 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s1 == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(s5 == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

  for (int degree : {0, 1, 3, 9, 17, 25}) {
    const QuadRule& rule = edge_rule(degree);
    for (int p = 0; p <= degree; ++p) {
      double s = 0.0;
      for (int q = 0; q < rule.size(); ++q) s += rule.weights[q] * std::pow(rule.t(q), p);
      CHECK(s == doctest::Approx(1.0 / (p + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("degree out of range") {
  CHECK_THROWS_AS(triangle_rule(31), std::runtime_error);
  CHECK_THROWS_AS(triangle_rule(-1), std::runtime_error);
}

TEST_SUITE_END();
