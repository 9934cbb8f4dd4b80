#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jlab/common.hpp"
#include "jlab/spectral.hpp"

namespace jlab {

struct KernelOptions {
  double rel_tol = 1e-9;          // target relative error of the density quadrature
  std::size_t max_panels = 6000;  // panel budget
  std::size_t initial_p_panels = 16;
  double skip_log = 60.0;         // panels this far below the peak exponent are dropped
};

/// Range of x and z the panel decomposition has to serve. The quadrature is
/// refined until it meets the tolerance at probes spread over x + z in
/// [2 lo, 2 hi] and |x - z| up to hi - lo.
struct KernelWindow {
  double lo = 0.0;
  double hi = 1.0;
};

/// F and its partials d^i_x d^j_z F for i, j <= order.
struct KernelField {
  cplx value{};
  std::array<std::array<cplx, 4>, 4> d{};  // d[i][j]
  double quad_error = 0.0;
  cplx atoms_part{};
  cplx density_part{};

  [[nodiscard]] cplx dx(int k) const { return d[static_cast<std::size_t>(k)][0]; }
  [[nodiscard]] cplx dz(int k) const { return d[0][static_cast<std::size_t>(k)]; }
};

/// Discretised measure: the kernel as a finite sum of exponentials
///
///   F(x, z) = sum_k W_k exp(i p_k (x - z) - q_k (x + z) + 2 q_k f(p_k, q_k, y) t).
///
/// Density nodes come from an adaptive tensor Gauss-Kronrod panel
/// decomposition of the domain; atoms are appended as nodes carrying their
/// weight. Every node is an exact solution of the linear system, so the
/// sum is too. The node set is built once per (y, t, window) and is then
/// immutable; `at(y, t)` re-times it without moving the nodes, which keeps
/// fields smooth in y and t for finite differencing.
class KernelModel {
 public:
  KernelModel() = default;

  static KernelModel build(const MeasureSpec& measure, const SpectralDomain& domain, double y,
                           double t, KernelWindow window, const KernelOptions& opts = {});

  /// Rebuild from stored nodes (cache path).
  static KernelModel from_nodes(std::vector<double> p, std::vector<double> q,
                                std::vector<double> log_w, std::size_t n_density, double y,
                                double t, double quad_error, double skipped_bound,
                                std::size_t panels);

  /// Same nodes, new (y, t).
  [[nodiscard]] KernelModel at(double y, double t) const;

  [[nodiscard]] cplx value(double x, double z) const;
  [[nodiscard]] KernelField field(double x, double z, int order = 0) const;

  /// Matrices over a point set: Fm(a, b) = F(pts[a], pts[b]) and, when
  /// `with_shift` is set, Gm = (d/dx + d/dz) F at the same points.
  /// Both are Hermitian; built through the factorisation U diag(c) U^H.
  void assemble(const std::vector<double>& pts, Eigen::MatrixXcd& fm,
                Eigen::MatrixXcd* gm = nullptr) const;

  [[nodiscard]] double y() const { return y_; }
  [[nodiscard]] double t() const { return t_; }
  [[nodiscard]] std::size_t size() const { return p_.size(); }
  [[nodiscard]] std::size_t density_nodes() const { return n_density_; }
  [[nodiscard]] std::size_t panels() const { return panels_; }
  [[nodiscard]] bool empty() const { return p_.empty(); }
  /// Achieved relative error estimate of the density quadrature.
  [[nodiscard]] double quad_error() const { return quad_error_; }
  /// Relative bound on the mass of skipped panels.
  [[nodiscard]] double skipped_bound() const { return skipped_bound_; }

  [[nodiscard]] const std::vector<double>& p() const { return p_; }
  [[nodiscard]] const std::vector<double>& q() const { return q_; }
  /// log of the node weight without the time factor (quadrature weight times density).
  [[nodiscard]] const std::vector<double>& log_w() const { return log_w_; }

 private:
  void retime();

  double y_ = 0.0;
  double t_ = 1.0;
  std::vector<double> p_, q_, log_w_;
  std::vector<double> log_c_;  // log_w + 2 q f t
  std::size_t n_density_ = 0;
  std::size_t panels_ = 0;
  double quad_error_ = 0.0;
  double skipped_bound_ = 0.0;
};

/// One-off kernel evaluation with a model sized for the single point.
[[nodiscard]] KernelField eval_kernel(const MeasureSpec& measure, const SpectralDomain& domain,
                                      double x, double z, double y, double t, int max_deriv_order,
                                      const KernelOptions& opts = {});

struct LinearResidual {
  cplx first{};
  cplx second{};
};

/// Residuals of the two linear equations the kernel satisfies (alpha = i):
///   F_t - y^2/48 (F_x + F_z) - i y/4 (F_xx - F_zz) + F_xxx + F_zzz
///   i F_y - i y t/24 (F_x + F_z) + t/4 (F_xx - F_zz).
/// x and z partials come from the model, F_t and F_y from fourth-order
/// central differences of the re-timed model with steps h_t, h_y.
[[nodiscard]] LinearResidual linear_system_residual(const KernelModel& model, double x, double z,
                                                    double h_t = 1e-3, double h_y = 1e-3);

}  // namespace jlab
