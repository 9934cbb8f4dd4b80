#include "jlab/solution.hpp"

#include <array>
#include <cmath>

namespace jlab {

std::string to_string(FieldPath p) {
  switch (p) {
    case FieldPath::marchenko: return "marchenko";
    case FieldPath::one_soliton: return "one_soliton";
    case FieldPath::asymptotic_train: return "asymptotic_train";
    case FieldPath::logdet: return "logdet";
  }
  return "marchenko";
}

FieldPath field_path_from_string(const std::string& s) {
  if (s == "marchenko") return FieldPath::marchenko;
  if (s == "one_soliton") return FieldPath::one_soliton;
  if (s == "asymptotic_train") return FieldPath::asymptotic_train;
  if (s == "logdet") return FieldPath::logdet;
  throw ValidationError("unknown path '" + s + "'");
}

namespace {

FieldSample from_solution(const MarchenkoSolution& sol, const KernelModel& model, double x,
                          double y, double t) {
  FieldSample s;
  s.x = x;
  s.y = y;
  s.t = t;
  s.source = FieldPath::marchenko;
  s.v = 2.0 * sol.K_diag_dx.real();
  s.diag.reality_resid = std::abs(sol.K_diag_dx.imag());
  s.diag.im_k_diag = std::abs(sol.K_diag.imag());
  s.diag.imi = hermitian_energy_check(sol);
  s.diag.cond_est = sol.cond_estimate;
  s.diag.min_eig = sol.min_eig;
  s.diag.quad_err = model.quad_error() + model.skipped_bound();
  return s;
}

}  // namespace

FieldSample eval_v(const MeasureSpec& measure, const SpectralDomain& domain, double x, double y,
                   double t, const MarchenkoOptions& opts, const KernelOptions& kopts) {
  if (!(t > 0.0)) throw DomainError("eval_v: t must be positive");
  if (measure.empty()) {
    FieldSample s;
    s.x = x;
    s.y = y;
    s.t = t;
    return s;
  }
  constexpr double kFirstWindow = 32.0;
  KernelModel model = KernelModel::build(measure, domain, y, t, {x, x + kFirstWindow}, kopts);
  const double L = choose_truncation(model, x, opts.edge_tol, opts.abs_floor, opts.ladder_max);
  if (L > kFirstWindow) model = KernelModel::build(measure, domain, y, t, {x, x + L}, kopts);
  return from_solution(solve_converged(model, x, L, opts), model, x, y, t);
}

double one_soliton(const SolitonAtomParams& a, double x, double y, double t) {
  const double speed = a.q * a.q - 3.0 * a.p * a.p - y * y / 48.0 - a.p * y / 2.0;
  const double arg = a.q * (x - speed * t - std::log(a.c / (2.0 * a.q)) / (2.0 * a.q));
  const double ch = std::cosh(arg);
  return 2.0 * a.q * a.q / (ch * ch);
}

// ---------------------------------------------------------------------------

MarchenkoField::MarchenkoField(const MeasureSpec& measure, const SpectralDomain& domain,
                               double x_lo, double x_hi, double y0, double t0,
                               const MarchenkoOptions& opts, const KernelOptions& kopts)
    : y0_(y0), t0_(t0), order_(opts.panel_order) {
  if (!(t0 > 0.0)) throw DomainError("MarchenkoField: t must be positive");
  if (x_hi < x_lo) std::swap(x_lo, x_hi);
  constexpr double kFirstWindow = 32.0;
  model_ = KernelModel::build(measure, domain, y0, t0, {x_lo, x_hi + kFirstWindow}, kopts);
  if (model_.empty()) {
    L_ = 1.0;
    n_ = opts.n_nodes;
    return;
  }
  L_ = std::max(choose_truncation(model_, x_lo, opts.edge_tol, opts.abs_floor, opts.ladder_max),
                choose_truncation(model_, x_hi, opts.edge_tol, opts.abs_floor, opts.ladder_max));
  if (L_ > kFirstWindow)
    model_ = KernelModel::build(measure, domain, y0, t0, {x_lo, x_hi + L_}, kopts);
  // Node count settled at both ends of the window, then frozen at the coarser
  // count of the doubling pair that agreed.
  n_ = std::max(solve_converged(model_, x_lo, L_, opts).nodes.size(),
                solve_converged(model_, x_hi, L_, opts).nodes.size()) / 2;
}

MarchenkoField::MarchenkoField(KernelModel model, double L, std::size_t n_nodes,
                               std::size_t panel_order)
    : model_(std::move(model)), L_(L), n_(n_nodes), order_(panel_order) {
  y0_ = model_.y();
  t0_ = model_.t();
}

FieldSample MarchenkoField::sample(double x, double y, double t) const {
  if (model_.empty()) {
    FieldSample s;
    s.x = x;
    s.y = y;
    s.t = t;
    return s;
  }
  if (y == y0_ && t == t0_) return from_solution(solve(model_, x, L_, n_, order_), model_, x, y, t);
  const KernelModel m = model_.at(y, t);
  return from_solution(solve(m, x, L_, n_, order_), m, x, y, t);
}

Sampler MarchenkoField::sampler() const {
  auto self = std::make_shared<MarchenkoField>(*this);
  return [self](double x, double y, double t) { return self->sample(x, y, t).v; };
}

// ---------------------------------------------------------------------------
// Finite differences

namespace {

constexpr std::array<double, 5> kD1{1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
constexpr std::array<double, 5> kD2{-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
constexpr std::array<double, 7> kD4{-1.0 / 6, 2.0, -13.0 / 2, 28.0 / 3, -13.0 / 2, 2.0, -1.0 / 6};

// Evolution-type residual shared by the JE and KP checks:
//   (f_s + f_aaa/4 + 3/2 f f_a + lin * f)_a - coef * f_bb
double evolution_residual(const Sampler& f, double a, double b, double s, const Steps& st,
                          double lin, double coef) {
  const double ha = st.hx, hb = st.hy, hs = st.ht;
  std::array<double, 7> col{};
  for (int i = -3; i <= 3; ++i) col[static_cast<std::size_t>(i + 3)] = f(a + i * ha, b, s);
  double v = col[3], va = 0.0, vaa = 0.0, va4 = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    va += kD1[i] * col[i + 1];
    vaa += kD2[i] * col[i + 1];
  }
  for (std::size_t i = 0; i < 7; ++i) va4 += kD4[i] * col[i];
  va /= ha;
  vaa /= ha * ha;
  va4 /= ha * ha * ha * ha;

  double vas = 0.0;
  for (int i = -2; i <= 2; ++i) {
    if (i == 0) continue;
    for (int j = -2; j <= 2; ++j) {
      if (j == 0) continue;
      vas += kD1[static_cast<std::size_t>(i + 2)] * kD1[static_cast<std::size_t>(j + 2)] *
             f(a + i * ha, b, s + j * hs);
    }
  }
  vas /= ha * hs;

  double vbb = 0.0;
  for (int j = -2; j <= 2; ++j)
    vbb += kD2[static_cast<std::size_t>(j + 2)] * (j == 0 ? v : f(a, b + j * hb, s));
  vbb /= hb * hb;

  return vas + 0.25 * va4 + 1.5 * (va * va + v * vaa) + lin * va - coef * vbb;
}

}  // namespace

double je_residual(const Sampler& v, double x, double y, double t, const Steps& steps) {
  if (!(t > 0.0)) throw DomainError("je_residual: t must be positive");
  return evolution_residual(v, x, y, t, steps, 1.0 / (2.0 * t), 12.0 / (t * t));
}

double kp_residual(const Sampler& u, double xi, double eta, double tau, const Steps& steps) {
  return evolution_residual(u, xi, eta, tau, steps, 0.0, 0.75);
}

Sampler kp_from_je(Sampler v) {
  return [v = std::move(v)](double xi, double eta, double tau) {
    return v(xi - eta * eta / (3.0 * tau), 4.0 * eta / tau, tau);
  };
}

Sampler je_from_kp(Sampler u) {
  return [u = std::move(u)](double x, double y, double t) {
    return u(x + y * y * t / 48.0, y * t / 4.0, t);
  };
}

}  // namespace jlab
