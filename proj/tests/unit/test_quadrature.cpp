#include <cmath>

#include "doctest.h"
#include "generators.hpp"
#include "jlab/quadrature.hpp"

using namespace jlab;

TEST_SUITE("quadrature") {
  TEST_CASE("gauss-legendre integrates polynomials up to degree 2n-1 exactly") {
    for (std::size_t n : {1u, 4u, 16u, 32u}) {
      const quad::Rule r = quad::gauss_legendre(n);
      REQUIRE(r.size() == n);
      for (std::size_t k = 0; k < 2 * n; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += r.w[i] * std::pow(r.x[i], static_cast<double>(k));
        const double exact = k % 2 == 1 ? 0.0 : 2.0 / (static_cast<double>(k) + 1.0);
        CHECK(s == doctest::Approx(exact).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("kronrod rule: weights sum to 2 and the embedded gauss weights too") {
    const auto& k = quad::kronrod15();
    double sk = 0.0, sg = 0.0;
    for (std::size_t i = 0; i < 15; ++i) {
      sk += k.w[i];
      sg += k.gauss_weight[i];
    }
    CHECK(sk == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(sg == doctest::Approx(2.0).epsilon(1e-15));
    // Degree 22 exactness of the Kronrod rule.
    double s = 0.0;
    for (std::size_t i = 0; i < 15; ++i) s += k.w[i] * std::pow(k.x[i], 22.0);
    CHECK(s == doctest::Approx(2.0 / 23.0).epsilon(1e-13));
  }

  TEST_CASE("adaptive integration of smooth and peaked integrands") {
    double err = 0.0;
    const double g = quad::adaptive_integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0,
                                              0.0, 1e-13, 4000, &err);
    CHECK(g == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-13));
    CHECK(err < 1e-12);
    const double peak = quad::adaptive_integrate(
        [](double x) { return 1e-3 / (x * x + 1e-6); }, -1.0, 1.0, 0.0, 1e-12);
    CHECK(peak == doctest::Approx(2.0 * std::atan(1e3)).epsilon(1e-11));
  }

  TEST_CASE("golden section and bracketed max") {
    const auto m = quad::golden_section_min([](double x) { return (x - 0.3) * (x - 0.3) + 1.0; },
                                            -2.0, 2.0);
    CHECK(m.x == doctest::Approx(0.3).epsilon(1e-7));
    CHECK(m.value == doctest::Approx(1.0).epsilon(1e-14));
    const auto b = quad::bracketed_max([](double x) { return std::sin(x); }, 0.0, 6.0);
    CHECK(b.x == doctest::Approx(M_PI / 2).epsilon(1e-7));
  }

  TEST_CASE("increasing root brackets and bisects; no sign change throws") {
    testing::Gen gen(11);
    for (int i = 0; i < 20; ++i) {
      const double r0 = gen.uniform(-50.0, 50.0);
      const double r = quad::increasing_root([&](double x) { return std::cbrt(x - r0); }, 0.0);
      CHECK(r == doctest::Approx(r0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(quad::increasing_root([](double) { return 1.0; }, 0.0, 1.0, 1e-14, 1e3),
                    NumericError);
  }
}
