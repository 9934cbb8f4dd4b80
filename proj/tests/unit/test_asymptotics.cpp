#include <cmath>

#include <Eigen/Dense>

#include "doctest.h"
#include "generators.hpp"
#include "jlab/asymptotics.hpp"
#include "jlab/quadrature.hpp"

using namespace jlab;
namespace mp = boost::multiprecision;

namespace {

SpectralDomain example2_domain(double b = 1.0) {
  return SpectralDomain(AmplitudeProfile::constant(b * b, b * b, 0.5 * b), RoofMode::max_consistent, {-0.5, 0.5});
}

MeasureSpec example2_measure() {
  MeasureSpec m;
  m.density.kind = Density::Kind::gaussian_p;
  m.density.k = 12.0;
  return m;
}

AmplitudeProfile example1_profile() { return AmplitudeProfile::quadratic(1.0 / 24.0, 1.0 / 16.0, 1.0 / 16.0, 0.2); }

double gamma_entry(int i, int k) {
  return (i + k) % 2 == 0 ? 2.0 * std::tgamma((i + k + 1) / 2.0) : 0.0;
}

double sech2(double a) {
  const double c = std::cosh(a);
  return 1.0 / (c * c);
}

// sup over a_n of |logdet_v - reference| at time t, reference = term n or the whole train.
double logdet_gap(int n, double t, bool whole_train) {
  const SpectralDomain d = example2_domain();
  const MeasureSpec m = example2_measure();
  const SolitonTrain train(d, m, 3.0, PhaseNormalization::degenerate);
  const DegenerateKernelModel dk(d, m, 3.0, 0.0);
  const FrontGeometry geo = train.geometry(0.0);
  const Interval b = subdomain_bounds(geo.q0, geo.g, 3.0, n, t);
  const double hi = std::isfinite(b.hi) ? b.hi : 10.0;
  double s = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double x = geo.C * t + b.lo + (hi - b.lo) * i / 400.0;
    const double ref = whole_train ? train.sum(geo, x, t) : train.term(n, x, 0.0, t);
    s = std::max(s, std::abs(logdet_v(dk, x, t) - ref));
  }
  return s;
}

}  // namespace

TEST_SUITE("asymptotics") {
  TEST_CASE("gram determinants: small cases by hand") {
    CHECK(gram_pair(0).gamma_det == 1.0);
    CHECK(gram_pair(0).q_det == 1.0);
    CHECK(gram_pair(1).gamma_det == doctest::Approx(2.0 * std::sqrt(M_PI)).epsilon(1e-14));
    CHECK(gram_pair(1).q_det == 1.0);
    // [[2 sqrt(pi), 0], [0, sqrt(pi)]]
    CHECK(gram_pair(2).gamma_det == doctest::Approx(2.0 * M_PI).epsilon(1e-14));
    CHECK(gram_pair(2).q_det == 1.0);
    // [[2G(1/2), 0, 2G(3/2)], [0, 2G(3/2), 0], [2G(3/2), 0, 2G(5/2)]]
    CHECK(gram_pair(3).gamma_det == doctest::Approx(2.0 * std::pow(M_PI, 1.5)).epsilon(1e-14));
    CHECK(gram_pair(3).q_det == 4.0);
  }

  TEST_CASE("Q determinant equals the product of squared factorials (exact integers)") {
    for (int n = 0; n <= 8; ++n) {
      mp::cpp_int prod = 1, f = 1;
      for (int k = 0; k < n; ++k) {
        if (k > 0) f *= k;
        prod *= f * f;
      }
      CHECK(q_det_exact(n) == prod);
    }
  }

  TEST_CASE("gram determinants are positive through n = 10 and factor into parity blocks") {
    for (int n = 1; n <= 10; ++n) {
      const GramPair g = gram_pair(n);
      CHECK(g.gamma_det > 0.0);
      CHECK(g.q_det > 0.0);
      Eigen::MatrixXd even((n + 1) / 2, (n + 1) / 2), odd(n / 2, n / 2);
      for (int i = 0; i < n; i += 2)
        for (int k = 0; k < n; k += 2) even(i / 2, k / 2) = gamma_entry(i, k);
      for (int i = 1; i < n; i += 2)
        for (int k = 1; k < n; k += 2) odd(i / 2, k / 2) = gamma_entry(i, k);
      const double blocks = even.determinant() * (n > 1 ? odd.determinant() : 1.0);
      CHECK(g.gamma_det == doctest::Approx(blocks).epsilon(1e-10));
      Eigen::MatrixXd full(n, n);
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) full(i, k) = gamma_entry(i, k);
      CHECK(g.gamma_det == doctest::Approx(full.determinant()).epsilon(1e-10));
    }
  }

  TEST_CASE("phase shift closed form") {
    for (double b : {1.0, 1.3}) {
      const AmplitudeProfile p = AmplitudeProfile::constant(b * b, b * b, 0.5 * b);
      CHECK(phi_n(p, 1, 0.0) == doctest::Approx(std::sqrt(M_PI) / (std::pow(2.0, 2.5) * std::pow(b, 3.5))).epsilon(1e-13));
    }
    // example1 profile at y = 0: C = 1/16, C' = 0, C'' = 1/12.
    CHECK(phi_n(example1_profile(), 1, 0.0) ==
          doctest::Approx(std::sqrt(3.0) * 2.0 * std::sqrt(M_PI) / (std::pow(2.0, 3.5) * std::pow(1.0 / 16.0, 1.75))).epsilon(1e-13));
    // n = 1 does not see the (C + 48 C'^2) factor.
    const AmplitudeProfile q = AmplitudeProfile::quadratic(0.1, 0.5, 0.4, 0.3);
    const double y = 1.7;
    const ProfileValue v = q(y);
    const double expect = std::pow(1.0 + 24.0 * v.d2c, 0.5) * 2.0 * std::sqrt(M_PI) /
                          (std::pow(2.0, 3.5) * std::pow(v.c + 12.0 * v.dc * v.dc, 1.75));
    CHECK(phi_n(q, 1, y) == doctest::Approx(expect).epsilon(1e-13));
    const AmplitudeProfile bad = AmplitudeProfile::quadratic(-0.05, 3.0, 1.0, 0.3);
    CHECK_THROWS_AS((void)phi_n(bad, 2, 0.0), NumericError);
  }

  TEST_CASE("profile-specific shifts differ from the general form by 2^((2n+5)/2)") {
    const AmplitudeProfile p = AmplitudeProfile::constant(1.0, 1.0, 0.5);
    for (int n = 1; n <= 4; ++n)
      CHECK(phi_n_constant_profile(1.0, n) / phi_n(p, n, 0.0) ==
            doctest::Approx(std::pow(2.0, (2.0 * n + 5.0) / 2.0)).epsilon(1e-12));
  }

  TEST_CASE("example 2 geometry: j0, a, h_pp and psi") {
    const FrontGeometry g = front_geometry(example2_domain(), example2_measure(), 0.0);
    CHECK(g.j0 == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(std::abs(g.h_pp) < 1e-12);
    CHECK(g.a == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-12));
    const FrontGeometry g2 = front_geometry(example2_domain(1.4), example2_measure(), 0.6);
    CHECK(g2.j0 == doctest::Approx(1.0 / (4.0 * 1.96)).epsilon(1e-13));
    CHECK(g2.a == doctest::Approx(std::pow(6.0 * 1.4, -0.5)).epsilon(1e-10));
    const Eigen::MatrixXd psi = psi_matrix(g, 5);
    for (int n = 0; n < 5; ++n)
      for (int j = 0; j < 5; ++j)
        if ((n + j) % 2 == 1) CHECK(psi(n, j) == 0.0);
    CHECK(psi(0, 0) == doctest::Approx(g.g * g.j0 * g.a * std::sqrt(M_PI)).epsilon(1e-14));
  }

  TEST_CASE("train terms: amplitude, peak positions, separations") {
    const SolitonTrain train(example2_domain(), example2_measure(), 3.5);
    CHECK(train.terms() == 2);
    testing::Gen gen(51);
    for (int i = 0; i < 10; ++i) {
      const double y = gen.uniform(-1, 1), t = gen.log_uniform(10, 1e4);
      const FrontGeometry geo = train.geometry(y);
      for (int n = 1; n <= 2; ++n) {
        const double xp = train.peak(n, y, t);
        CHECK(train.term(n, xp, y, t) == doctest::Approx(2.0 * geo.q0 * geo.q0).epsilon(1e-12));
        const double expect = geo.C * t - ((n + 0.5) * std::log(t) - std::log(geo.g) - std::log(train.phi(n, y))) / (2.0 * geo.q0);
        CHECK(xp == doctest::Approx(expect).epsilon(1e-12));
      }
      const double sep = train.peak(1, y, t) - train.peak(2, y, t);
      CHECK(sep == doctest::Approx((std::log(t) - std::log(train.phi(2, y) / train.phi(1, y))) / (2.0 * geo.q0)).epsilon(1e-10));
      // At the first peak the second term is below its sech^2 tail bound.
      const double other = train.term(2, train.peak(1, y, t), y, t);
      CHECK(other <= 2.0 * geo.q0 * geo.q0 * 4.0 * std::exp(-2.0 * geo.q0 * sep) + 1e-15);
    }
    const double t = 100.0;
    CHECK(train.sum(t + 40.0, 0.0, t) < 1e-10);
    CHECK(SolitonTrain(example2_domain(), example2_measure(), 2.5).terms() == 1);
  }

  TEST_CASE("example 1 train phase carries ln t^(n+1/2) - ln g - ln phi_n") {
    const SpectralDomain d(example1_profile(), RoofMode::max_consistent, {-2.0, 2.0});
    MeasureSpec m;
    m.density.kind = Density::Kind::gaussian_pq;
    m.density.a = 18.0;
    m.density.b = 2.0;
    m.density.c = -0.5;
    const SolitonTrain train(d, m, 3.0);
    for (double y : {0.0, 0.5, 1.0})
      for (int n = 1; n <= 2; ++n) {
        const double t = 50.0;
        const double q0 = std::sqrt(y * y + 1.0) / 4.0;
        const double g = std::exp(-(5.0 * y * y / 8.0 - 3.0 / 8.0));
        const double x = 3.0;
        const double expect = x - (y * y / 24.0 + 1.0 / 16.0) * t +
                              ((n + 0.5) * std::log(t) - std::log(g) - std::log(phi_n(example1_profile(), n, y))) / (2.0 * q0);
        CHECK(train.phase(n, x, y, t) == doctest::Approx(expect).epsilon(1e-12));
      }
  }

  TEST_CASE("front domain") {
    const AmplitudeProfile p1 = example1_profile();
    testing::Gen gen(52);
    for (int i = 0; i < 200; ++i) {
      const double y = gen.uniform(-3, 3), t = gen.log_uniform(3, 1e3), M = 3.0;
      const double x = gen.uniform(-2.0, 1.0) * t;
      const double g = std::exp(-y * y);
      const bool expect = std::abs(y) < std::sqrt(std::log(t)) &&
                          x > y * y * t / 24.0 + t / 16.0 - 2.0 / std::sqrt(y * y + 1.0) * (M + 1.0) * std::log(t);
      CHECK(in_front_domain(p1, g, M, x, y, t) == expect);
    }
    const AmplitudeProfile p2 = AmplitudeProfile::constant(1.0, 1.0, 0.5);
    CHECK_FALSE(in_front_domain(p2, std::exp(-1.0), 3.0, 100.0, 0.0, std::exp(1.0)));
    const double t = 100.0, M = 3.0;
    const double edge = t - (M + 1.0) * std::log(t) / 2.0;
    CHECK(in_front_domain(p2, 1.0, M, edge + 1e-6, 0.0, t));
    CHECK_FALSE(in_front_domain(p2, 1.0, M, edge - 1e-6, 0.0, t));
  }

  TEST_CASE("subdomain covering") {
    const AmplitudeProfile p = AmplitudeProfile::constant(1.0, 1.0, 0.5);
    const double t = 1000.0, M = 3.0;
    CHECK(subdomain_index(p, 1.0, M, t, 0.0, t) == 1);
    const SolitonTrain train(example2_domain(), example2_measure(), M);
    for (int n = 1; n <= 2; ++n) CHECK(subdomain_index(p, 1.0, M, train.peak(n, 0.0, t), 0.0, t) == n);
    CHECK_FALSE(subdomain_index(p, 1.0, M, t - 50.0, 0.0, t).has_value());
    // Overlaps go to the smaller index.
    const Interval a1 = subdomain_bounds(1.0, 1.0, M, 1, t);
    const Interval a2 = subdomain_bounds(1.0, 1.0, M, 2, t);
    CHECK(a2.hi > a1.lo);
    CHECK(subdomain_index(p, 1.0, M, t + 0.5 * (a1.lo + a2.hi), 0.0, t) == 1);
  }

  TEST_CASE("incomplete moments: recurrence against quadrature") {
    for (double xi : {-3.0, 0.0, 3.0}) {
      const std::vector<double> I = incomplete_moments(10, 1.0, xi);
      for (int k = 0; k <= 10; ++k) {
        const double ref = quad::adaptive_integrate(
            [k](double s) { return std::pow(s, k) * std::exp(-2.0 * s); }, xi, xi + 80.0, 0.0, 1e-15);
        CHECK(std::abs(I[static_cast<std::size_t>(k)] - ref) <= 1e-12 * std::abs(ref));
      }
    }
  }

  TEST_CASE("log-determinant path") {
    const FrontGeometry geo = front_geometry(example2_domain(), example2_measure(), 0.0);
    CHECK(degenerate_rank(3.0) == 3);
    CHECK(degenerate_rank(2.5) == 2);

    // N = 1: det(I + A) = 1 + psi00 t^(-3/2) I0(xi), a single exact sech^2.
    const DegenerateKernelModel one(geo, 1);
    const double t = 200.0;
    const double A0 = one.psi()(0, 0) * std::pow(t, -1.5) / (2.0 * geo.q0);
    for (double xi : {-6.0, -3.0, 0.0}) {
      CHECK(one.log_det(xi, t) == doctest::Approx(std::log1p(A0 * std::exp(-2.0 * geo.q0 * xi))).epsilon(1e-13));
      const double v = logdet_v(one, geo.C * t + xi, t);
      const double ref = 2.0 * geo.q0 * geo.q0 * sech2(geo.q0 * xi - 0.5 * std::log(A0));
      CHECK(std::abs(v - ref) < 1e-6);
      // The same profile is the first train term under the degenerate normalisation.
      const SolitonTrain train(example2_domain(), example2_measure(), 2.5, PhaseNormalization::degenerate);
      CHECK(std::abs(v - train.term(1, geo.C * t + xi, 0.0, t)) < 1e-6);
    }

    const DegenerateKernelModel full(example2_domain(), example2_measure(), 3.0, 0.0);
    CHECK(std::abs(logdet_v(full, geo.C * t + 60.0, t)) < 1e-12);

    // Fourth-order second difference.
    const double x = geo.C * t - 4.0;
    const double ref = logdet_v(full, x, t, 1.25e-3);
    const double e1 = std::abs(logdet_v(full, x, t, 0.1) - ref);
    const double e2 = std::abs(logdet_v(full, x, t, 0.05) - ref);
    CHECK(e1 / e2 > 12.0);
    CHECK(e1 / e2 < 20.0);
  }

  // K fitted at t = 100, checked with factor-2 slack later. The degenerate
  // normalisation is the one implied by the finite-rank kernel.
  TEST_CASE("front soliton against log-determinant within K t^(-1/2) on a_1") {
    const double K = logdet_gap(1, 1e2, false) * 10.0;
    for (double t : {1e3, 1e4}) CHECK(logdet_gap(1, t, false) <= 2.0 * K / std::sqrt(t));
  }

  TEST_CASE("whole train against log-determinant within K t^(-1/2) on a_1 and a_2") {
    for (int n = 1; n <= 2; ++n) {
      const double K = logdet_gap(n, 1e2, true) * 10.0;
      for (double t : {1e3, 1e4}) CHECK(logdet_gap(n, t, true) <= 2.0 * K / std::sqrt(t));
    }
  }

  // Known failure: the upper edge of a_2 sits (0.45 ln t + ln phi_1) / (2 q0)
  // behind the first peak, so the first soliton's tail inside a_2 only decays
  // like t^(-0.45) and is still O(1) for t <= 1e4.
  TEST_CASE("second soliton alone against log-determinant on a_2" * doctest::should_fail()) {
    const double K = logdet_gap(2, 1e2, false) * 10.0;
    for (double t : {1e3, 1e4}) CHECK(logdet_gap(2, t, false) <= 2.0 * K / std::sqrt(t));
  }

  TEST_CASE("normalisation names round trip") {
    for (auto n : {PhaseNormalization::general, PhaseNormalization::profile_specific, PhaseNormalization::degenerate})
      CHECK(phase_normalization_from_string(to_string(n)) == n);
  }
}
