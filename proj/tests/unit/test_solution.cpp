#include <cmath>

#include "doctest.h"
#include "generators.hpp"
#include "jlab/solution.hpp"

using namespace jlab;

namespace {

SpectralDomain wide_domain() {
  return SpectralDomain(AmplitudeProfile::constant(4.0, 4.0, 0.2), RoofMode::max_consistent, {-2.0, 2.0});
}

SpectralDomain example2_domain() {
  return SpectralDomain(AmplitudeProfile::constant(1.0, 1.0, 0.5), RoofMode::max_consistent, {-0.5, 0.5});
}

MeasureSpec example2_measure() {
  MeasureSpec m;
  m.density.kind = Density::Kind::gaussian_p;
  m.density.k = 12.0;
  return m;
}

MeasureSpec atom(double p, double q, double c) {
  MeasureSpec m;
  m.atoms.push_back({{p, q}, c});
  return m;
}

// Position of the closed-form peak.
double soliton_peak(const SolitonAtomParams& a, double y, double t) {
  const double speed = a.q * a.q - 3.0 * a.p * a.p - y * y / 48.0 - a.p * y / 2.0;
  return speed * t + std::log(a.c / (2.0 * a.q)) / (2.0 * a.q);
}

}  // namespace

TEST_SUITE("solution") {
  TEST_CASE("one-soliton closed form: amplitude, peak, symmetry") {
    const SolitonAtomParams a{0.0, 1.0, 2.0};
    for (double t : {0.5, 1.0, 7.0}) CHECK(one_soliton(a, t, 0.0, t) == doctest::Approx(2.0).epsilon(1e-15));
    testing::Gen gen(41);
    for (int i = 0; i < 20; ++i) {
      const SolitonAtomParams b{gen.uniform(-1, 1), gen.uniform(0.3, 2), gen.log_uniform(0.1, 10)};
      const double y = gen.uniform(-2, 2), t = gen.uniform(0.5, 10);
      const double xs = soliton_peak(b, y, t);
      CHECK(one_soliton(b, xs, y, t) == doctest::Approx(2.0 * b.q * b.q).epsilon(1e-12));
      const double dlt = gen.uniform(0.1, 3.0);
      CHECK(one_soliton(b, xs + dlt, y, t) == doctest::Approx(one_soliton(b, xs - dlt, y, t)).epsilon(1e-9));
    }
  }

  TEST_CASE("zero measure gives v = 0") {
    for (double x : {-3.0, 0.0, 5.0}) {
      const FieldSample s = eval_v(MeasureSpec{}, wide_domain(), x, 0.3, 2.0);
      CHECK(s.v == 0.0);
    }
  }

  TEST_CASE("single atom: Marchenko field equals the closed form at mirrored momentum on a 21x21 grid") {
    const double p = 0.35, q = 0.8, c = 1.3, y = 0.4;
    const SolitonAtomParams mirrored{-p, q, c};
    double worst = 0.0;
    for (int it = 0; it < 21; ++it) {
      const double t = 0.5 + 4.5 * it / 20.0;
      const double xc = soliton_peak(mirrored, y, t);
      for (int ix = 0; ix < 21; ++ix) {
        const double x = xc - 4.0 + 8.0 * ix / 20.0;
        const FieldSample s = eval_v(atom(p, q, c), wide_domain(), x, y, t);
        const double ref = one_soliton(mirrored, x, y, t);
        worst = std::max(worst, std::abs(s.v - ref) / (2.0 * q * q));
        CHECK(s.diag.reality_resid < 1e-10);
      }
    }
    CHECK(worst < 1e-7);
  }

  TEST_CASE("example 2: far ahead of the front the field vanishes and decays monotonically") {
    const double t = 5.0;
    const FieldSample far = eval_v(example2_measure(), example2_domain(), t + 50.0, 0.0, t);
    CHECK(std::abs(far.v) < 1e-8);
    double prev = 1e300;
    for (double dx : {20.0, 22.0, 25.0, 30.0}) {
      const double v = eval_v(example2_measure(), example2_domain(), t + dx, 0.0, t).v;
      CHECK(v < prev);
      CHECK(v >= 0.0);
      prev = v;
    }
  }

  TEST_CASE("JE residual: closed form, zero field, fourth-order convergence") {
    const SolitonAtomParams a{0.0, 1.0, 2.0};
    const Sampler v = [&](double x, double y, double t) { return one_soliton(a, x, y, t); };
    CHECK(std::abs(je_residual(v, 2.0, 0.0, 2.0)) < 1e-5);
    const Sampler zero = [](double, double, double) { return 0.0; };
    CHECK(je_residual(zero, 1.0, 0.5, 2.0) == 0.0);

    const SolitonAtomParams b{0.3, 0.9, 1.1};
    const Sampler w = [&](double x, double y, double t) { return one_soliton(b, x, y, t); };
    const double x0 = soliton_peak(b, 0.5, 2.0) + 0.4;
    const double r1 = std::abs(je_residual(w, x0, 0.5, 2.0, {0.08, 0.08, 0.02}));
    const double r2 = std::abs(je_residual(w, x0, 0.5, 2.0, {0.04, 0.04, 0.01}));
    CHECK(r1 / r2 > 10.0);
    CHECK(r1 / r2 < 24.0);
  }

  TEST_CASE("JE residual of the Marchenko field for example 2 at t = 5") {
    const MarchenkoField field(example2_measure(), example2_domain(), 1.0, 4.0, 0.0, 5.0);
    const Sampler v = field.sampler();
    for (double x : {2.0, 3.0}) CHECK(std::abs(je_residual(v, x, 0.0, 5.0)) < 1e-4);
  }

  TEST_CASE("KP and JE maps") {
    const SolitonAtomParams a{0.2, 0.9, 1.7};
    const Sampler v = [&](double x, double y, double t) { return one_soliton(a, x, y, t); };
    const Sampler back = je_from_kp(kp_from_je(v));
    testing::Gen gen(42);
    for (int i = 0; i < 100; ++i) {
      const double x = gen.uniform(-5, 5), y = gen.uniform(-3, 3), t = gen.uniform(0.5, 10);
      CHECK(std::abs(back(x, y, t) - v(x, y, t)) <= 1e-12);
    }
    // eta = 0 and y = 0 leave the first argument alone.
    const Sampler probe = [](double x, double y, double t) { return x + 10.0 * y + 100.0 * t; };
    CHECK(kp_from_je(probe)(1.5, 0.0, 2.0) == probe(1.5, 0.0, 2.0));
    CHECK(je_from_kp(probe)(1.5, 0.0, 2.0) == probe(1.5, 0.0, 2.0));

    // In the KP frame the soliton depends on xi + 2 p eta only; for p = 0 it is eta-independent.
    const Sampler u = kp_from_je(v);
    for (int i = 0; i < 10; ++i) {
      const double xi = gen.uniform(-3, 3), eta = gen.uniform(-3, 3), tau = gen.uniform(1, 5);
      CHECK(u(xi, eta, tau) == doctest::Approx(u(xi + 2.0 * a.p * eta, 0.0, tau)).epsilon(1e-12));
    }
    const SolitonAtomParams a0{0.0, 1.2, 0.9};
    const Sampler u0 = kp_from_je([&](double x, double y, double t) { return one_soliton(a0, x, y, t); });
    CHECK(u0(0.3, -2.0, 2.0) == doctest::Approx(u0(0.3, 1.5, 2.0)).epsilon(1e-12));
    CHECK(std::abs(kp_residual(u, 0.4, 0.7, 2.0)) < 1e-5);
  }

  TEST_CASE("path names round trip") {
    for (auto p : {FieldPath::marchenko, FieldPath::one_soliton, FieldPath::asymptotic_train, FieldPath::logdet})
      CHECK(field_path_from_string(to_string(p)) == p);
    CHECK_THROWS_AS(field_path_from_string("nope"), ValidationError);
    CHECK_THROWS_AS((void)eval_v(example2_measure(), example2_domain(), 0, 0, -1.0), DomainError);
  }
}
