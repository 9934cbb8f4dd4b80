#include <cmath>

#include "doctest.h"
#include "generators.hpp"
#include "jlab/spectral.hpp"

using namespace jlab;

namespace {

AmplitudeProfile example1_profile() { return AmplitudeProfile::quadratic(1.0 / 24.0, 1.0 / 16.0, 1.0 / 16.0, 0.2); }
AmplitudeProfile example2_profile(double b = 1.0) { return AmplitudeProfile::constant(b * b, b * b, 0.5 * b); }

MeasureSpec example2_measure() {
  MeasureSpec m;
  m.density.kind = Density::Kind::gaussian_p;
  m.density.k = 12.0;
  return m;
}

const ConditionCheck* find_check(const ConditionsReport& r, const std::string& prefix) {
  for (const auto& c : r.checks)
    if (c.id.rfind(prefix, 0) == 0) return &c;
  return nullptr;
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("eval_phase: hand-computed values") {
    CHECK(eval_phase({0.0, 1.0}, 0.0) == 1.0);
    for (double y : {0.0, 1.0, 2.0}) {
      const double q = std::sqrt(y * y + 1.0) / 4.0;
      CHECK(eval_phase({y / 6.0, q}, y) == doctest::Approx(y * y / 24.0 + 1.0 / 16.0).epsilon(1e-14));
    }
    for (double y : {0.0, 3.0}) CHECK(eval_phase({y / 12.0, 1.0}, y) == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("tangency point examples") {
    const SpectralPoint t1 = tangency_point(example1_profile(), 6.0);
    CHECK(t1.p == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(t1.q == doctest::Approx(std::sqrt(37.0) / 4.0).epsilon(1e-14));
    const SpectralPoint t2 = tangency_point(example2_profile(), 0.0);
    CHECK(t2.p == 0.0);
    CHECK(t2.q == doctest::Approx(1.0));
    testing::Gen gen(3);
    for (int i = 0; i < 20; ++i) {
      const double y = gen.uniform(-5.0, 5.0);
      CHECK(tangency_point(example2_profile(1.7), y).p == doctest::Approx(y / 12.0).epsilon(1e-15));
    }
  }

  TEST_CASE("f at the tangency point equals C for every sampled y") {
    testing::Gen gen(5);
    const AmplitudeProfile profiles[] = {example1_profile(), example2_profile(1.3),
                                         AmplitudeProfile::quadratic(0.2, 0.7, 0.5, 0.3)};
    for (const auto& prof : profiles)
      for (int i = 0; i < 50; ++i) {
        const double y = gen.uniform(-6.0, 6.0);
        CHECK(std::abs(eval_phase(tangency_point(prof, y), y) - prof(y).c) < 1e-12 * (1.0 + prof(y).c));
      }
  }

  TEST_CASE("envelope heights") {
    testing::Gen gen(7);
    for (int i = 0; i < 40; ++i) {
      const double p = gen.uniform(-2.0, 2.0);
      CHECK(envelope_height(example2_profile(1.5), RoofMode::paper_locus, p) == doctest::Approx(1.5).epsilon(1e-14));
      CHECK(envelope_height(example2_profile(1.5), RoofMode::max_consistent, p) == doctest::Approx(1.5).epsilon(1e-14));
      CHECK(std::abs(envelope_height(example1_profile(), RoofMode::paper_locus, p) -
                     std::sqrt(36.0 * p * p + 1.0) / 4.0) < 1e-12);
      CHECK(std::abs(envelope_height(example1_profile(), RoofMode::max_consistent, p) -
                     std::sqrt(32.0 * p * p + 1.0) / 4.0) < 1e-12);
      CHECK(envelope_parameter(example1_profile(), RoofMode::max_consistent, p) ==
            doctest::Approx(4.0 * p).epsilon(1e-8));
    }
  }

  TEST_CASE("max point: example 2 and example 1 in both roof modes") {
    const SpectralDomain d2(example2_profile(), RoofMode::max_consistent, {-2.0, 2.0});
    for (double y : {0.0, 3.0, -6.0}) {
      const MaxPointResult r = max_point(d2, y);
      CHECK(r.argmax.p == doctest::Approx(y / 12.0).epsilon(1e-6));
      CHECK(r.argmax.q == doctest::Approx(1.0));
      CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
      CHECK_FALSE(r.violation);
    }
    const SpectralDomain mc(example1_profile(), RoofMode::max_consistent, {-4.0, 4.0});
    const SpectralDomain pl(example1_profile(), RoofMode::paper_locus, {-4.0, 4.0});
    for (double y : {0.5, 1.0, 2.0, 3.0}) {
      const MaxPointResult a = max_point(mc, y);
      CHECK(std::abs(a.value - a.profile_value) < 1e-8);
      CHECK_FALSE(a.violation);
      const MaxPointResult b = max_point(pl, y);
      // On the tangency-locus roof at p = y/3: f = 3y^2/4 ... - C(y) = y^2/24 > 0.
      const double q = std::sqrt(36.0 * (y / 3.0) * (y / 3.0) + 1.0) / 4.0;
      CHECK(b.value >= eval_phase({y / 3.0, q}, y) - 1e-12);
      CHECK(b.violation);
      CHECK(b.excess > 0.0);
    }
  }

  TEST_CASE("max point grows when the roof is raised") {
    double prev = -1e300;
    for (double b : {0.8, 1.0, 1.2, 1.5}) {
      const SpectralDomain d(example2_profile(b), RoofMode::max_consistent, {-2.0, 2.0});
      const double v = max_point(d, 0.7).value;
      CHECK(v >= prev);
      prev = v;
    }
    prev = -1e300;
    for (double a0 : {0.0625, 0.1, 0.3}) {
      const SpectralDomain d(AmplitudeProfile::quadratic(1.0 / 24.0, a0, 0.05, 0.2), RoofMode::max_consistent, {-3.0, 3.0});
      const double v = max_point(d, 1.0).value;
      CHECK(v >= prev);
      prev = v;
    }
  }

  TEST_CASE("max-consistent roof keeps f below C on a 200x200 grid for 50 s") {
    const SpectralDomain d(example1_profile(), RoofMode::max_consistent, {-3.0, 3.0});
    const AmplitudeProfile prof = example1_profile();
    double worst = -1e300;
    for (int is = 0; is < 50; ++is) {
      const double s = -6.0 + 12.0 * is / 49.0;
      for (int i = 0; i < 200; ++i) {
        const double p = -3.0 + 6.0 * i / 199.0;
        const double h = d.roof(p);
        for (int j = 0; j < 200; ++j) {
          const double q = d.epsilon() + (h - d.epsilon()) * j / 199.0;
          worst = std::max(worst, eval_phase({p, q}, s) - prof(s).c);
        }
      }
    }
    CHECK(worst <= 1e-8);
  }

  TEST_CASE("tabulated profile follows the sampled function and its derivatives") {
    std::vector<double> s, c;
    for (int i = 0; i <= 400; ++i) {
      const double x = -8.0 + 16.0 * i / 400.0;
      s.push_back(x);
      c.push_back(x * x / 24.0 + 1.0 / 16.0);
    }
    const AmplitudeProfile tab = AmplitudeProfile::tabulated(s, c, 1.0 / 16.0, 0.2);
    CHECK(tab.working_range().lo == -8.0);
    for (double x : {-3.3, 0.0, 1.7, 5.1}) {
      CHECK(tab(x).c == doctest::Approx(x * x / 24.0 + 1.0 / 16.0).epsilon(1e-6));
      CHECK(tab(x).dc == doctest::Approx(x / 12.0).epsilon(1e-4));
      CHECK(tab(x).d2c == doctest::Approx(1.0 / 12.0).epsilon(1e-2));
    }
    // C, C' and C'' are continuous across knots.
    const double knot = s[200];
    for (double eps : {1e-9}) {
      CHECK(std::abs(tab(knot - eps).c - tab(knot + eps).c) < 1e-8);
      CHECK(std::abs(tab(knot - eps).dc - tab(knot + eps).dc) < 1e-8);
      CHECK(std::abs(tab(knot - eps).d2c - tab(knot + eps).d2c) < 1e-6);
    }
    CHECK_THROWS_AS(AmplitudeProfile::tabulated({0.0, 1.0, 0.5, 2.0}, {1, 1, 1, 1}, 0.5, 0.1), ValidationError);
  }

  TEST_CASE("normalisation g is the density at the tangency point") {
    const AmplitudeProfile p2 = example2_profile();
    for (double y : {0.0, 0.5, 2.0})
      CHECK(normalization_g(example2_measure(), p2, y) == doctest::Approx(std::exp(-y * y)).epsilon(1e-14));
    MeasureSpec m1;
    m1.density.kind = Density::Kind::gaussian_pq;
    m1.density.a = 18.0;
    m1.density.b = 2.0;
    m1.density.c = -0.5;
    for (double y : {0.0, 1.0})
      CHECK(normalization_g(m1, example1_profile(), y) ==
            doctest::Approx(std::exp(-(5.0 * y * y / 8.0 - 3.0 / 8.0))).epsilon(1e-14));
  }

  TEST_CASE("validation: example 2 passes, bad curvature and growing density fail") {
    const AmplitudeProfile p2 = example2_profile();
    SpectralDomain d2(p2, RoofMode::max_consistent, {-2.0, 2.0});
    d2.set_p_range(choose_p_range(d2, example2_measure().density).first);
    const ConditionsReport ok = validate_conditions(p2, d2, example2_measure());
    CHECK(ok.ok());
    CHECK(ok.p_tail_bound < 1e-12);

    AmplitudeProfile bent = AmplitudeProfile::quadratic(-1.0 / 24.0, 5.0, 1.0, 0.5);
    bent.set_working_range({-2.0, 2.0});
    const SpectralDomain db(bent, RoofMode::max_consistent, {-1.0, 1.0});
    const ConditionsReport bad = validate_conditions(bent, db, MeasureSpec{});
    const ConditionCheck* curv = find_check(bad, "profile.curvature");
    REQUIRE(curv != nullptr);
    CHECK_FALSE(curv->passed);
    CHECK(curv->witness.has_value());
    CHECK_FALSE(bad.ok());

    MeasureSpec grow;
    grow.density.kind = Density::Kind::exp_growth_p;
    const ConditionsReport gr = validate_conditions(p2, d2, grow);
    CHECK_FALSE(gr.ok());
    bool moment_failed = false;
    for (const auto& c : gr.checks)
      if (c.id.rfind("measure.moment", 0) == 0 && !c.passed) moment_failed = true;
    CHECK(moment_failed);
  }

  TEST_CASE("validation: the weak moment condition accepts the algebraic density") {
    const AmplitudeProfile p = example2_profile();
    MeasureSpec m;
    m.density.kind = Density::Kind::algebraic_p;
    m.density.k = 12.0;
    m.density.alpha = 4;
    SpectralDomain d(p, RoofMode::max_consistent, {-1.0, 1.0});
    d.set_p_range(choose_p_range_weak(d, m.density, 4).first);
    ValidationOptions vo;
    vo.moment = MomentCondition::algebraic_weak;
    vo.weak_alpha = 4;
    const ConditionsReport r = validate_conditions(p, d, m, vo);
    CHECK(r.ok());
    CHECK(find_check(r, "measure.weak_moment") != nullptr);
  }

  TEST_CASE("atoms must sit strictly inside the domain") {
    const AmplitudeProfile p = example2_profile();
    const SpectralDomain d(p, RoofMode::max_consistent, {-2.0, 2.0});
    MeasureSpec m;
    m.atoms.push_back({{0.1, 0.7}, 1.0});
    CHECK(validate_conditions(p, d, m).ok());
    m.atoms.push_back({{0.1, 1.5}, 1.0});  // above the roof
    CHECK_FALSE(validate_conditions(p, d, m).ok());
    CHECK(d.contains({0.0, 0.5}));
    CHECK_FALSE(d.contains({0.0, 0.49}));
    CHECK_FALSE(d.strictly_inside({0.0, 0.5}));
  }

  TEST_CASE("roof mode and density ids round trip through strings") {
    for (auto m : {RoofMode::paper_locus, RoofMode::max_consistent}) CHECK(roof_mode_from_string(to_string(m)) == m);
    for (auto k : {Density::Kind::none, Density::Kind::gaussian_p, Density::Kind::gaussian_pq,
                   Density::Kind::algebraic_p, Density::Kind::exp_growth_p}) {
      Density d;
      d.kind = k;
      CHECK(Density::kind_from_string(d.id()) == k);
    }
    CHECK_THROWS_AS(roof_mode_from_string("bogus"), ValidationError);
  }
}
