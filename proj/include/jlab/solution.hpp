#pragma once

#include <functional>
#include <memory>
#include <string>

#include "jlab/kernel.hpp"
#include "jlab/marchenko.hpp"
#include "jlab/spectral.hpp"

namespace jlab {

enum class FieldPath { marchenko, one_soliton, asymptotic_train, logdet };

std::string to_string(FieldPath p);
FieldPath field_path_from_string(const std::string& s);

struct FieldDiagnostics {
  double reality_resid = 0.0;  // |Im dK(x,x)/dx|
  double im_k_diag = 0.0;      // |Im K(x,x)|
  double imi = 0.0;            // Im of the energy integral
  double cond_est = 0.0;
  double min_eig = 0.0;
  double quad_err = 0.0;
};

struct FieldSample {
  double x = 0.0, y = 0.0, t = 0.0;
  double v = 0.0;
  FieldPath source = FieldPath::marchenko;
  FieldDiagnostics diag;
};

struct SolitonAtomParams {
  double p = 0.0;
  double q = 1.0;
  double c = 1.0;
};

/// v(x, y, t) sampler.
using Sampler = std::function<double(double, double, double)>;

/// v = 2 Re d/dx K(x,x) for one point. Builds its own kernel model.
[[nodiscard]] FieldSample eval_v(const MeasureSpec& measure, const SpectralDomain& domain, double x,
                                 double y, double t, const MarchenkoOptions& opts = {},
                                 const KernelOptions& kopts = {});

/// The closed-form one-soliton
///   v = 2 q^2 / cosh^2[q (x - (q^2 - 3p^2 - y^2/48 - p y/2) t - ln(c/2q)/(2q))].
/// The Marchenko field of a single atom at (p, q, c) equals this form at
/// momentum -p.
[[nodiscard]] double one_soliton(const SolitonAtomParams& a, double x, double y, double t);

/// Marchenko field with the discretisation frozen around (y0, t0): the
/// kernel nodes, truncation length and node count are fixed once, so the
/// field is a smooth function of (x, y, t) and can be finite-differenced.
class MarchenkoField {
 public:
  MarchenkoField(const MeasureSpec& measure, const SpectralDomain& domain, double x_lo,
                 double x_hi, double y0, double t0, const MarchenkoOptions& opts = {},
                 const KernelOptions& kopts = {});
  MarchenkoField(KernelModel model, double L, std::size_t n_nodes, std::size_t panel_order = 16);

  [[nodiscard]] FieldSample sample(double x, double y, double t) const;
  [[nodiscard]] FieldSample sample(double x) const { return sample(x, y0_, t0_); }
  [[nodiscard]] double operator()(double x, double y, double t) const { return sample(x, y, t).v; }
  [[nodiscard]] Sampler sampler() const;

  [[nodiscard]] const KernelModel& model() const { return model_; }
  [[nodiscard]] double truncation_L() const { return L_; }
  [[nodiscard]] std::size_t n_nodes() const { return n_; }
  [[nodiscard]] std::size_t panel_order() const { return order_; }

 private:
  KernelModel model_;
  double y0_ = 0.0, t0_ = 1.0;
  double L_ = 1.0;
  std::size_t n_ = 96;
  std::size_t order_ = 16;
};

struct Steps {
  double hx = 1e-2;
  double hy = 1e-2;
  double ht = 1e-3;
};

/// (v_t + v_xxx/4 + 3/2 v v_x + v/(2t))_x - (12/t^2) v_yy with fourth-order
/// central differences.
[[nodiscard]] double je_residual(const Sampler& v, double x, double y, double t,
                                 const Steps& steps = {});

/// (u_tau + u_xixixi/4 + 3/2 u u_xi)_xi - (3/4) u_etaeta, same stencils
/// (hx for xi, hy for eta, ht for tau).
[[nodiscard]] double kp_residual(const Sampler& u, double xi, double eta, double tau,
                                 const Steps& steps = {});

/// u(xi, eta, tau) = v(xi - eta^2/(3 tau), 4 eta/tau, tau).
[[nodiscard]] Sampler kp_from_je(Sampler v);
/// v(x, y, t) = u(x + y^2 t/48, y t/4, t).
[[nodiscard]] Sampler je_from_kp(Sampler u);

}  // namespace jlab
