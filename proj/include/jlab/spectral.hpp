#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jlab/common.hpp"

namespace jlab {

/// C(s) and its first two derivatives at one point.
struct ProfileValue {
  double c = 0.0;
  double dc = 0.0;
  double d2c = 0.0;
};

/// The amplitude function C(s) that fixes the spectral geometry.
///
/// Three kinds are supported: C(s) = a2 s^2 + a0, a constant C = b^2, and a
/// natural cubic spline through tabulated (s, C) samples. The spline's own
/// first and second derivatives are used everywhere, so the lower bounds of
/// the profile conditions are checked on exactly the function the solver sees.
class AmplitudeProfile {
 public:
  enum class Kind { quadratic, constant, tabulated };

  static AmplitudeProfile quadratic(double a2, double a0, double delta, double epsilon);
  static AmplitudeProfile constant(double b2, double delta, double epsilon);
  static AmplitudeProfile tabulated(std::vector<double> s, std::vector<double> c, double delta,
                                    double epsilon, int spline_order = 3);

  [[nodiscard]] ProfileValue operator()(double s) const;

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] double delta() const { return delta_; }
  [[nodiscard]] double epsilon() const { return epsilon_; }
  [[nodiscard]] double a2() const { return a2_; }
  [[nodiscard]] double a0() const { return a0_; }
  [[nodiscard]] const std::vector<double>& table_s() const { return s_; }
  [[nodiscard]] const std::vector<double>& table_c() const { return c_; }

  /// Range over which the profile is sampled for validation and where the
  /// envelope search is allowed to look. Tables: their extent.
  [[nodiscard]] Interval working_range() const { return range_; }
  void set_working_range(Interval r);

  [[nodiscard]] bool unbounded_domain() const { return kind_ != Kind::tabulated; }

 private:
  Kind kind_ = Kind::constant;
  double a2_ = 0.0;
  double a0_ = 0.0;
  double delta_ = 0.0;
  double epsilon_ = 0.0;
  Interval range_{-10.0, 10.0};
  std::vector<double> s_, c_, m_;  // spline knots, values, second derivatives
};

struct SpectralPoint {
  double p = 0.0;
  double q = 0.0;
};

enum class RoofMode { paper_locus, max_consistent };

std::string to_string(RoofMode m);
RoofMode roof_mode_from_string(const std::string& s);

/// f(p, q, y) = q^2 - 3p^2 + p y / 2 - y^2 / 48.
[[nodiscard]] double eval_phase(SpectralPoint pt, double y);

/// The tangency point (C'(y) + y/12, sqrt(C(y) + 3 C'(y)^2)).
[[nodiscard]] SpectralPoint tangency_point(const AmplitudeProfile& profile, double y);

/// Roof height h(p).
///
/// paper_locus: the curve traced by the tangency points, inverted
/// for s at the given p (p0(s) is strictly increasing under the profile conditions).
/// max_consistent: h(p)^2 = min_s [C(s) + 3p^2 - p s/2 + s^2/48], which
/// makes max over the domain of f(., ., s) equal C(s) by construction.
[[nodiscard]] double envelope_height(const AmplitudeProfile& profile, RoofMode mode, double p);

/// The s at which the envelope is attained for a given p (locus parameter
/// or minimiser, depending on the mode).
[[nodiscard]] double envelope_parameter(const AmplitudeProfile& profile, RoofMode mode, double p);

/// Region eps <= q <= h(p), p in p_range.
class SpectralDomain {
 public:
  SpectralDomain(AmplitudeProfile profile, RoofMode mode, Interval p_range);

  [[nodiscard]] const AmplitudeProfile& profile() const { return profile_; }
  [[nodiscard]] RoofMode mode() const { return mode_; }
  [[nodiscard]] double epsilon() const { return profile_.epsilon(); }
  [[nodiscard]] Interval p_range() const { return p_range_; }
  void set_p_range(Interval r) { p_range_ = r; }

  [[nodiscard]] double roof(double p) const;
  /// Second derivative of the roof, 5-point stencil.
  [[nodiscard]] double roof_pp(double p, double h = 1e-3) const;
  [[nodiscard]] bool contains(SpectralPoint pt) const;
  [[nodiscard]] bool strictly_inside(SpectralPoint pt) const;

 private:
  AmplitudeProfile profile_;
  RoofMode mode_;
  Interval p_range_;
};

struct MaxPointResult {
  SpectralPoint argmax;
  double value = 0.0;          // max of f(., ., y) over the domain
  double profile_value = 0.0;  // C(y)
  double excess = 0.0;         // value - C(y)
  bool violation = false;      // excess above tolerance
};

/// Maximum of f(., ., y) over the domain. f increases with q for q > 0, so the
/// search runs along the roof.
[[nodiscard]] MaxPointResult max_point(const SpectralDomain& domain, double y, double tol = 1e-8);

// ---------------------------------------------------------------------------
// Measure

struct Atom {
  SpectralPoint pt;
  double weight = 0.0;
};

/// Smooth non-negative density of the absolutely continuous part of the
/// measure. Parametric families keyed by an expression id.
struct Density {
  enum class Kind {
    none,         // no continuous part
    gaussian_p,   // amplitude * exp(-(k (p - center))^2)
    gaussian_pq,  // exp(-(a p^2 + b q^2 + c))
    algebraic_p,  // amplitude / (1 + (k p)^(2 alpha))
    exp_growth_p  // exp(+(k p)^2), a deliberately non-integrable density
  };

  Kind kind = Kind::none;
  double k = 1.0;
  double center = 0.0;
  double amplitude = 1.0;
  double a = 0.0, b = 0.0, c = 0.0;
  int alpha = 1;

  [[nodiscard]] double operator()(double p, double q) const;
  [[nodiscard]] bool present() const { return kind != Kind::none; }
  [[nodiscard]] std::string id() const;
  static Kind kind_from_string(const std::string& s);
};

struct MeasureSpec {
  std::vector<Atom> atoms;
  Density density;

  [[nodiscard]] bool empty() const { return atoms.empty() && !density.present(); }

  /// Sum of two measures (atoms concatenated). Densities can only be added
  /// when at most one side carries one.
  [[nodiscard]] MeasureSpec operator+(const MeasureSpec& other) const;
};

/// g(y): the density evaluated at the tangency point.
[[nodiscard]] double normalization_g(const MeasureSpec& measure, const AmplitudeProfile& profile,
                                     double y);

// ---------------------------------------------------------------------------
// Validation

enum class MomentCondition {
  exponential,    // for each a: integral of e^{a(q+|p|)} dmu is finite
  algebraic_weak  // integral of dmu / (1 + (12 p)^(2 alpha)) is finite
};

struct ValidationOptions {
  MomentCondition moment = MomentCondition::exponential;
  std::vector<double> moment_exponents{0.5, 1.0, 2.0};
  int weak_alpha = 4;
  double g_bound = 10.0;  // the constant A with g(s) < A
  double max_tol = 1e-8;
  std::size_t profile_samples = 401;
  std::size_t grid = 200;        // grid per axis for the max-consistency sweep
  std::size_t s_samples = 50;    // sampled s for the max-consistency sweep
  bool require_max_consistency = false;  // paper_locus: report-only
};

struct ConditionCheck {
  std::string id;
  bool passed = true;
  std::string detail;
  std::optional<std::pair<double, double>> witness;
};

struct ConditionsReport {
  std::vector<ConditionCheck> checks;
  double p_tail_bound = 0.0;  // relative tail mass outside p_range
  Interval p_range;

  [[nodiscard]] bool ok() const;
  [[nodiscard]] std::string to_text() const;
};

/// Integral of w(p, q) dmu over the domain restricted to |p| in [p_lo, p_hi]
/// (both signs of p), density part only.
[[nodiscard]] double density_moment(const SpectralDomain& domain, const Density& density, double a,
                                    Interval p_abs, std::size_t panels = 64);

/// Smallest symmetric p_range on a doubling ladder whose tail carries less
/// than `tail_tol` of the e^{a(q+|p|)} moment. Returns the range and the
/// tail bound actually reached. Throws NumericError if the ladder runs out.
[[nodiscard]] std::pair<Interval, double> choose_p_range(const SpectralDomain& domain,
                                                         const Density& density, double a = 1.0,
                                                         double tail_tol = 1e-12);

/// Same ladder under the weight 1 / (1 + (12 p)^(2 alpha)).
[[nodiscard]] std::pair<Interval, double> choose_p_range_weak(const SpectralDomain& domain,
                                                              const Density& density, int alpha,
                                                              double tail_tol = 1e-12);

[[nodiscard]] ConditionsReport validate_conditions(const AmplitudeProfile& profile,
                                                   const SpectralDomain& domain,
                                                   const MeasureSpec& measure,
                                                   const ValidationOptions& opts = {});

}  // namespace jlab
