#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include "jlab/common.hpp"
#include "jlab/spectral.hpp"

namespace jlab {

// ---------------------------------------------------------------------------
// Gram determinants

/// Determinants of the n x n matrices
///   Gamma_n[i][k] = Gamma((i+k+1)/2) (1 + (-1)^(i+k)),   Q_n[i][k] = (i+k)!
/// with the empty (n = 0) determinant equal to 1.
struct GramPair {
  int n = 0;
  double gamma_det = 1.0;
  double q_det = 1.0;
};

[[nodiscard]] GramPair gram_pair(int n);

/// Gamma_n = pi^(n/2) * gamma_det_rational(n), exactly.
[[nodiscard]] boost::multiprecision::cpp_rational gamma_det_rational(int n);
[[nodiscard]] boost::multiprecision::cpp_int q_det_exact(int n);

// ---------------------------------------------------------------------------
// Front geometry

/// Everything the asymptotic formulas need at one y.
struct FrontGeometry {
  double y = 0.0;
  double p0 = 0.0, q0 = 0.0;      // tangency point
  double C = 0.0, dC = 0.0, d2C = 0.0;
  double g = 0.0;                 // density at the tangency point
  double h_pp = 0.0;              // roof curvature at p0
  double j0 = 0.0;
  double a = 0.0;
};

/// Fills the tangency point, profile values, g, roof curvature and the
///   j0 = 1 / (q0 sqrt(16 q0^2 + (12 p0 - y)^2)),
///   a  = [(16 q0^2 + (12 p0 - y)^2) / (2 q0 (48 q0^2 - (12 p0 - y)^2 - 16 h_pp q0^3))]^(1/2).
/// Throws NumericError on a non-positive radicand.
[[nodiscard]] FrontGeometry front_geometry(const SpectralDomain& domain, const MeasureSpec& measure,
                                           double y);

/// psi_nj = g j0 a^(n+j+1) / (2 n! j!) Gamma((n+j+1)/2) (1 + (-1)^(n+j)), n, j < N.
[[nodiscard]] Eigen::MatrixXd psi_matrix(const FrontGeometry& geo, int N);

struct PsiGeometry {
  FrontGeometry geo;
  Eigen::MatrixXd psi;
};

[[nodiscard]] PsiGeometry psi_and_geometry(const SpectralDomain& domain, const MeasureSpec& measure,
                                           double y, int N);

// ---------------------------------------------------------------------------
// Phase shifts

/// Which normalisation of the n-th phase shift to use.
///   general           closed form valid for any admissible profile
///   profile_specific  forms specialised to constant C and to
///                     C(y) = y^2/24 + 1/16
///   degenerate        the shift implied by the finite-rank kernel itself:
///                     (j0/2) a^(2n-1) (2 q0)^(1-2n) Q_n Gamma_n / (Q_{n-1} Gamma_{n-1} ((n-1)!)^2)
enum class PhaseNormalization { general, profile_specific, degenerate };

std::string to_string(PhaseNormalization n);
PhaseNormalization phase_normalization_from_string(const std::string& s);

/// General closed form
///   (C + 48 C'^2)^(n-1) (1 + 24 C'')^(n-1/2) Q_n Gamma_n
///   / (2^((2n+5)/2) ((n-1)!)^2 (C + 12 C'^2)^((10n-3)/4) Q_{n-1} Gamma_{n-1}).
[[nodiscard]] double phi_n(const AmplitudeProfile& profile, int n, double y);

[[nodiscard]] double phi_n(PhaseNormalization norm, const AmplitudeProfile& profile,
                           const FrontGeometry& geo, int n);

/// Specialised shift for constant C = b^2:
///   Q_n Gamma_n / (b^(3(n-1/2)) ((n-1)!)^2 Q_{n-1} Gamma_{n-1}).
[[nodiscard]] double phi_n_constant_profile(double b, int n);

/// Specialised shift for C(y) = y^2/24 + 1/16:
///   3^(n-1/2) (6y^2+1)^(n-1) Q_n Gamma_n
///   / (2^(5n-3/2) (2y^2+1)^((10n-3)/4) ((n-1)!)^2 Q_{n-1} Gamma_{n-1}).
[[nodiscard]] double phi_n_quadratic_profile(double y, int n);

// ---------------------------------------------------------------------------
// Soliton train

/// |ln g(y)| < ln t and x > C(y) t - ln(t^(M+1)) / (2 q0(y)).
[[nodiscard]] bool in_front_domain(const AmplitudeProfile& profile, double g, double M, double x,
                                   double y, double t);

class SolitonTrain {
 public:
  SolitonTrain(SpectralDomain domain, MeasureSpec measure, double M,
               PhaseNormalization norm = PhaseNormalization::general);

  [[nodiscard]] int terms() const { return terms_; }
  [[nodiscard]] double M() const { return M_; }
  [[nodiscard]] PhaseNormalization normalization() const { return norm_; }
  [[nodiscard]] FrontGeometry geometry(double y) const;
  [[nodiscard]] double phi(int n, double y) const;

  /// x - C t + (ln t^(n+1/2) - ln g - ln phi_n) / (2 q0).
  [[nodiscard]] double phase(int n, double x, double y, double t) const;
  /// 2 q0^2 / cosh^2(q0 * phase).
  [[nodiscard]] double term(int n, double x, double y, double t) const;
  /// Position where the n-th phase vanishes.
  [[nodiscard]] double peak(int n, double y, double t) const;
  /// Sum of the first terms() solitons. `inside`, when given, receives
  /// whether (x, y) lies in the front domain.
  [[nodiscard]] double sum(double x, double y, double t, bool* inside = nullptr) const;
  /// Same sum with the geometry at y already computed.
  [[nodiscard]] double sum(const FrontGeometry& geo, double x, double t) const;

  [[nodiscard]] const SpectralDomain& domain() const { return domain_; }
  [[nodiscard]] const MeasureSpec& measure() const { return measure_; }

 private:
  SpectralDomain domain_;
  MeasureSpec measure_;
  double M_;
  PhaseNormalization norm_;
  int terms_;
};

/// Index n of the subdomain a_n that holds xi = x - C t (overlaps resolved
/// to the smaller n), or none below the covering.
[[nodiscard]] std::optional<int> subdomain_index(const AmplitudeProfile& profile, double g,
                                                 double M, double x, double y, double t,
                                                 double eps = 0.05);

/// Bounds (lo, hi) of subdomain a_n in xi; hi may be +inf.
[[nodiscard]] Interval subdomain_bounds(double q0, double g, double M, int n, double t,
                                        double eps = 0.05);

// ---------------------------------------------------------------------------
// Finite-rank kernel and log-determinant

/// N = floor((4M - 5)/2).
[[nodiscard]] int degenerate_rank(double M);

/// I_k(xi) = int_xi^inf s^k e^{-2 q0 s} ds for k = 0..kmax by the recurrence
/// I_k = (xi^k e^{-2 q0 xi} + k I_{k-1}) / (2 q0).
[[nodiscard]] std::vector<double> incomplete_moments(int kmax, double q0, double xi);

class DegenerateKernelModel {
 public:
  DegenerateKernelModel(const SpectralDomain& domain, const MeasureSpec& measure, double M,
                        double y);
  DegenerateKernelModel(FrontGeometry geo, int N);

  [[nodiscard]] int N() const { return N_; }
  [[nodiscard]] const FrontGeometry& geometry() const { return geo_; }
  [[nodiscard]] const Eigen::MatrixXd& psi() const { return psi_; }

  /// A[n][m] = sum_{j < N-n} psi_nj t^(-(n+j+3)/2) I_{j+m}(xi).
  [[nodiscard]] Eigen::MatrixXd matrix(double xi, double t) const;
  /// ln det(I + A); throws NumericError when the determinant is not positive.
  [[nodiscard]] double log_det(double xi, double t) const;

 private:
  FrontGeometry geo_;
  int N_;
  Eigen::MatrixXd psi_;
};

/// 2 d^2/dx^2 ln det(I + A(x - C t)) by a five-point difference with step h.
[[nodiscard]] double logdet_v(const DegenerateKernelModel& model, double x, double t,
                              double h = 1e-2);

}  // namespace jlab
