#include "jlab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "jlab/quadrature.hpp"

namespace jlab {

namespace {

constexpr std::size_t kN = 15;
constexpr std::size_t kNodes = kN * kN;
// Assembly drops nodes whose largest matrix entry sits this far (in log) below
// the largest one; that is well under double precision.
constexpr double kPruneLog = 40.0;
constexpr double kOverflowLog = 700.0;

struct Probe {
  double s = 0.0;  // x + z
  double d = 0.0;  // x - z
  double ref = 0.0;
};

struct ProbeStats {
  double err_p = 0.0;
  double err_u = 0.0;
  double abs = 0.0;
  double max_exp = -std::numeric_limits<double>::infinity();
};

struct Panel {
  double p0, p1, u0, u1;
  std::array<double, kNodes> p{}, q{}, lw{};
  std::vector<ProbeStats> stats;
  bool alive = true;
};

class PanelBuilder {
 public:
  PanelBuilder(const MeasureSpec& m, const SpectralDomain& d, double y, double t, KernelWindow w,
               const KernelOptions& o)
      : measure_(m), domain_(d), y_(y), t_(t), opts_(o) {
    const double width = std::max(w.hi - w.lo, 0.0);
    for (double fs : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const double s = 2.0 * (w.lo + fs * width);
      probes_.push_back({s, 0.0, 0.0});
      if (width > 0.0) probes_.push_back({s, width, 0.0});
    }
    set_references();
  }

  Panel make(double p0, double p1, double u0, double u1) const {
    const auto& kr = quad::kronrod15();
    Panel pn{p0, p1, u0, u1, {}, {}, {}, {}, true};
    const double eps = domain_.epsilon();
    const double pc = 0.5 * (p0 + p1), ph = 0.5 * (p1 - p0);
    const double uc = 0.5 * (u0 + u1), uh = 0.5 * (u1 - u0);
    for (std::size_t i = 0; i < kN; ++i) {
      const double p = pc + ph * kr.x[i];
      const double h = domain_.roof(p);
      const double jac = std::max(h - eps, 0.0);
      for (std::size_t j = 0; j < kN; ++j) {
        const double u = uc + uh * kr.x[j];
        const double q = eps + u * jac;
        const double rho = measure_.density(p, q);
        const std::size_t k = i * kN + j;
        pn.p[k] = p;
        pn.q[k] = q;
        const double w = kr.w[i] * kr.w[j] * ph * uh * jac * rho;
        pn.lw[k] = w > 0.0 ? std::log(w) : -std::numeric_limits<double>::infinity();
      }
    }
    evaluate(pn);
    return pn;
  }

  void evaluate(Panel& pn) const {
    const auto& kr = quad::kronrod15();
    pn.stats.assign(probes_.size(), {});
    for (std::size_t pi = 0; pi < probes_.size(); ++pi) {
      const Probe& pr = probes_[pi];
      cplx kk{}, gk{}, kg{};
      double abs = 0.0;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < kN; ++i) {
        const double rp = kr.gauss_weight[i] / kr.w[i];
        for (std::size_t j = 0; j < kN; ++j) {
          const std::size_t k = i * kN + j;
          if (!std::isfinite(pn.lw[k])) continue;
          const double q = pn.q[k];
          const double e = pn.lw[k] + 2.0 * q * eval_phase({pn.p[k], q}, y_) * t_ - q * pr.s;
          mx = std::max(mx, e - pr.ref);
          const double mag = std::exp(e - pr.ref);
          const cplx term = pr.d == 0.0 ? cplx(mag, 0.0) : std::polar(mag, pn.p[k] * pr.d);
          const double ru = kr.gauss_weight[j] / kr.w[j];
          kk += term;
          gk += rp * term;
          kg += ru * term;
          abs += mag;
        }
      }
      pn.stats[pi] = {std::abs(kk - gk), std::abs(kk - kg), abs, mx};
    }
  }

  const std::vector<Probe>& probes() const { return probes_; }

 private:
  // Reference exponent per probe: the peak of the log-integrand over a dense
  // sample of the domain, so scaled terms stay near or below one.
  void set_references() {
    const Interval pr = domain_.p_range();
    const double eps = domain_.epsilon();
    constexpr std::size_t np = 241, nq = 81;
    for (Probe& probe : probes_) probe.ref = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < np; ++i) {
      const double p = pr.lo + pr.width() * static_cast<double>(i) / (np - 1);
      const double h = domain_.roof(p);
      for (std::size_t j = 0; j < nq; ++j) {
        const double q = eps + (h - eps) * static_cast<double>(j) / (nq - 1);
        const double rho = measure_.density(p, q);
        if (!(rho > 0.0)) continue;
        const double base = std::log(rho) + 2.0 * q * eval_phase({p, q}, y_) * t_;
        for (Probe& probe : probes_) probe.ref = std::max(probe.ref, base - q * probe.s);
      }
    }
    for (Probe& probe : probes_)
      if (!std::isfinite(probe.ref)) probe.ref = 0.0;
  }

  const MeasureSpec& measure_;
  const SpectralDomain& domain_;
  double y_, t_;
  KernelOptions opts_;
  std::vector<Probe> probes_;
};

double panel_priority(const Panel& pn, const std::vector<double>& totals) {
  double pr = 0.0;
  for (std::size_t i = 0; i < pn.stats.size(); ++i) {
    if (!(totals[i] > 0.0)) continue;
    pr = std::max(pr, (pn.stats[i].err_p + pn.stats[i].err_u) / totals[i]);
  }
  return pr;
}

}  // namespace

KernelModel KernelModel::build(const MeasureSpec& measure, const SpectralDomain& domain, double y,
                               double t, KernelWindow window, const KernelOptions& opts) {
  if (!(t > 0.0)) throw DomainError("kernel: t must be positive");
  KernelModel m;
  m.y_ = y;
  m.t_ = t;

  if (measure.density.present()) {
    PanelBuilder builder(measure, domain, y, t, window, opts);
    const std::size_t np = builder.probes().size();
    std::vector<Panel> panels;
    const Interval pr = domain.p_range();
    const std::size_t n0 = std::max<std::size_t>(opts.initial_p_panels, 1);
    for (std::size_t i = 0; i < n0; ++i) {
      const double a = pr.lo + pr.width() * static_cast<double>(i) / static_cast<double>(n0);
      const double b = pr.lo + pr.width() * static_cast<double>(i + 1) / static_cast<double>(n0);
      panels.push_back(builder.make(a, b, 0.0, 1.0));
    }

    auto totals_of = [&](std::vector<double>& abs, std::vector<double>& err) {
      abs.assign(np, 0.0);
      err.assign(np, 0.0);
      for (const Panel& pn : panels) {
        if (!pn.alive) continue;
        for (std::size_t i = 0; i < np; ++i) {
          abs[i] += pn.stats[i].abs;
          err[i] += pn.stats[i].err_p + pn.stats[i].err_u;
        }
      }
    };
    std::vector<double> abs, err;
    totals_of(abs, err);

    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry> heap;
    for (std::size_t i = 0; i < panels.size(); ++i) heap.emplace(panel_priority(panels[i], abs), i);

    auto converged = [&] {
      for (std::size_t i = 0; i < np; ++i)
        if (abs[i] > 0.0 && err[i] > opts.rel_tol * abs[i]) return false;
      return true;
    };

    std::size_t since_resum = 0;
    while (!converged()) {
      if (heap.empty()) break;
      if (panels.size() >= opts.max_panels) {
        const Panel& worst = panels[heap.top().second];
        std::ostringstream os;
        os << "kernel quadrature did not converge within " << opts.max_panels
           << " panels; worst panel p in [" << worst.p0 << ", " << worst.p1 << "], u in ["
           << worst.u0 << ", " << worst.u1 << "], relative error " << heap.top().first;
        throw NumericError(os.str());
      }
      const std::size_t idx = heap.top().second;
      heap.pop();
      Panel& pn = panels[idx];
      if (!pn.alive) continue;
      double ep = 0.0, eu = 0.0;
      for (std::size_t i = 0; i < np; ++i) {
        if (!(abs[i] > 0.0)) continue;
        ep = std::max(ep, pn.stats[i].err_p / abs[i]);
        eu = std::max(eu, pn.stats[i].err_u / abs[i]);
      }
      pn.alive = false;
      for (std::size_t i = 0; i < np; ++i) {
        abs[i] -= pn.stats[i].abs;
        err[i] -= pn.stats[i].err_p + pn.stats[i].err_u;
      }
      const double p0 = pn.p0, p1 = pn.p1, u0 = pn.u0, u1 = pn.u1;
      std::array<Panel, 2> kids =
          ep >= eu ? std::array<Panel, 2>{builder.make(p0, 0.5 * (p0 + p1), u0, u1),
                                          builder.make(0.5 * (p0 + p1), p1, u0, u1)}
                   : std::array<Panel, 2>{builder.make(p0, p1, u0, 0.5 * (u0 + u1)),
                                          builder.make(p0, p1, 0.5 * (u0 + u1), u1)};
      for (Panel& kid : kids) {
        for (std::size_t i = 0; i < np; ++i) {
          abs[i] += kid.stats[i].abs;
          err[i] += kid.stats[i].err_p + kid.stats[i].err_u;
        }
        panels.push_back(std::move(kid));
        heap.emplace(panel_priority(panels.back(), abs), panels.size() - 1);
      }
      // Incremental sums drift; re-add from scratch now and then.
      if (++since_resum == 64) {
        totals_of(abs, err);
        since_resum = 0;
      }
    }
    totals_of(abs, err);

    double qerr = 0.0;
    for (std::size_t i = 0; i < np; ++i)
      if (abs[i] > 0.0) qerr = std::max(qerr, err[i] / abs[i]);

    std::size_t kept = 0;
    std::vector<double> skipped(np, 0.0);
    for (const Panel& pn : panels) {
      if (!pn.alive) continue;
      bool negligible = true;
      for (std::size_t i = 0; i < np; ++i)
        if (pn.stats[i].max_exp > -opts.skip_log) negligible = false;
      if (negligible) {
        for (std::size_t i = 0; i < np; ++i) skipped[i] += pn.stats[i].abs;
        continue;
      }
      ++kept;
      for (std::size_t k = 0; k < kNodes; ++k) {
        if (!std::isfinite(pn.lw[k])) continue;
        m.p_.push_back(pn.p[k]);
        m.q_.push_back(pn.q[k]);
        m.log_w_.push_back(pn.lw[k]);
      }
    }
    double sk = 0.0;
    for (std::size_t i = 0; i < np; ++i)
      if (abs[i] > 0.0) sk = std::max(sk, skipped[i] / abs[i]);
    m.quad_error_ = qerr;
    m.skipped_bound_ = sk;
    m.panels_ = kept;
  }
  m.n_density_ = m.p_.size();
  for (const Atom& a : measure.atoms) {
    if (!(a.weight > 0.0)) throw ValidationError("kernel: atom weights must be positive");
    m.p_.push_back(a.pt.p);
    m.q_.push_back(a.pt.q);
    m.log_w_.push_back(std::log(a.weight));
  }
  m.retime();
  return m;
}

KernelModel KernelModel::from_nodes(std::vector<double> p, std::vector<double> q,
                                    std::vector<double> log_w, std::size_t n_density, double y,
                                    double t, double quad_error, double skipped_bound,
                                    std::size_t panels) {
  if (p.size() != q.size() || p.size() != log_w.size() || n_density > p.size())
    throw ValidationError("kernel: inconsistent node arrays");
  KernelModel m;
  m.p_ = std::move(p);
  m.q_ = std::move(q);
  m.log_w_ = std::move(log_w);
  m.n_density_ = n_density;
  m.y_ = y;
  m.t_ = t;
  m.quad_error_ = quad_error;
  m.skipped_bound_ = skipped_bound;
  m.panels_ = panels;
  m.retime();
  return m;
}

KernelModel KernelModel::at(double y, double t) const {
  if (!(t > 0.0)) throw DomainError("kernel: t must be positive");
  KernelModel m = *this;
  m.y_ = y;
  m.t_ = t;
  m.retime();
  return m;
}

void KernelModel::retime() {
  log_c_.resize(p_.size());
  for (std::size_t k = 0; k < p_.size(); ++k)
    log_c_[k] = log_w_[k] + 2.0 * q_[k] * eval_phase({p_[k], q_[k]}, y_) * t_;
}

KernelField KernelModel::field(double x, double z, int order) const {
  if (order < 0 || order > 3) throw DomainError("kernel: derivative order must be in [0, 3]");
  KernelField out;
  if (p_.empty()) return out;
  const double s = x + z;
  const double d = x - z;
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < p_.size(); ++k) mx = std::max(mx, log_c_[k] - q_[k] * s);
  if (mx > kOverflowLog) throw NumericError("kernel: exponent overflow at x+z=" + std::to_string(s));
  const double scale = std::exp(mx);
  double dens_abs = 0.0;
  const auto ord = static_cast<std::size_t>(order);
  for (std::size_t k = 0; k < p_.size(); ++k) {
    const double mag = std::exp(log_c_[k] - q_[k] * s - mx);
    if (mag == 0.0) continue;
    const cplx term = std::polar(mag, p_[k] * d);
    const bool atom = k >= n_density_;
    (atom ? out.atoms_part : out.density_part) += term;
    if (!atom) dens_abs += mag;
    if (order == 0) continue;
    const cplx a(-q_[k], p_[k]);
    const cplx b(-q_[k], -p_[k]);
    cplx ai = term;
    for (std::size_t i = 0; i <= ord; ++i) {
      cplx aib = ai;
      for (std::size_t j = 0; j <= ord; ++j) {
        out.d[i][j] += aib;
        aib *= b;
      }
      ai *= a;
    }
  }
  out.atoms_part *= scale;
  out.density_part *= scale;
  out.value = out.atoms_part + out.density_part;
  if (order == 0) {
    out.d[0][0] = out.value;
  } else {
    for (auto& row : out.d)
      for (auto& v : row) v *= scale;
  }
  out.quad_error = (quad_error_ + skipped_bound_) * dens_abs * scale;
  return out;
}

cplx KernelModel::value(double x, double z) const { return field(x, z, 0).value; }

void KernelModel::assemble(const std::vector<double>& pts, Eigen::MatrixXcd& fm,
                           Eigen::MatrixXcd* gm) const {
  const auto n = static_cast<Eigen::Index>(pts.size());
  fm.setZero(n, n);
  if (gm != nullptr) gm->setZero(n, n);
  if (p_.empty() || n == 0) return;
  const double x0 = *std::min_element(pts.begin(), pts.end());

  // F(a, b) = sum_k c_k u_k(a) conj(u_k(b)), u_k(a) = exp((i p_k - q_k)(a - x0)),
  // c_k = exp(log_c_k - 2 q_k x0). Every entry is bounded by c_k.
  double mx = -std::numeric_limits<double>::infinity();
  std::vector<double> lc(p_.size());
  for (std::size_t k = 0; k < p_.size(); ++k) {
    lc[k] = log_c_[k] - 2.0 * q_[k] * x0;
    mx = std::max(mx, lc[k]);
  }
  if (mx > kOverflowLog) throw NumericError("kernel: exponent overflow at x=" + std::to_string(x0));
  std::vector<std::size_t> keep;
  keep.reserve(p_.size());
  for (std::size_t k = 0; k < p_.size(); ++k)
    if (lc[k] > mx - kPruneLog) keep.push_back(k);

  const auto nk = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXcd uf(n, nk);
  Eigen::MatrixXcd ug;
  if (gm != nullptr) ug.resize(n, nk);
  for (Eigen::Index c = 0; c < nk; ++c) {
    const std::size_t k = keep[static_cast<std::size_t>(c)];
    const double root = std::exp(0.5 * lc[k]);
    const double groot = root * std::sqrt(2.0 * q_[k]);
    for (Eigen::Index a = 0; a < n; ++a) {
      const double da = pts[static_cast<std::size_t>(a)] - x0;
      const cplx u = std::polar(std::exp(-q_[k] * da), p_[k] * da);
      uf(a, c) = root * u;
      if (gm != nullptr) ug(a, c) = groot * u;
    }
  }
  fm.selfadjointView<Eigen::Lower>().rankUpdate(uf);
  fm.triangularView<Eigen::StrictlyUpper>() = fm.adjoint();
  if (gm != nullptr) {
    // (d/dx + d/dz) multiplies each node by -2 q_k.
    gm->selfadjointView<Eigen::Lower>().rankUpdate(ug, -1.0);
    gm->triangularView<Eigen::StrictlyUpper>() = gm->adjoint();
  }
}

KernelField eval_kernel(const MeasureSpec& measure, const SpectralDomain& domain, double x,
                        double z, double y, double t, int max_deriv_order,
                        const KernelOptions& opts) {
  if (!(t > 0.0)) throw DomainError("kernel: t must be positive");
  const KernelWindow w{std::min(x, z), std::max(x, z)};
  return KernelModel::build(measure, domain, y, t, w, opts).field(x, z, max_deriv_order);
}

LinearResidual linear_system_residual(const KernelModel& model, double x, double z, double h_t,
                                      double h_y) {
  LinearResidual r;
  if (model.empty()) return r;
  const double t = model.t();
  const double y = model.y();
  auto d1 = [](const cplx& m2, const cplx& m1, const cplx& p1, const cplx& p2, double h) {
    return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
  };
  const cplx ft = d1(model.at(y, t - 2 * h_t).value(x, z), model.at(y, t - h_t).value(x, z),
                     model.at(y, t + h_t).value(x, z), model.at(y, t + 2 * h_t).value(x, z), h_t);
  const cplx fy = d1(model.at(y - 2 * h_y, t).value(x, z), model.at(y - h_y, t).value(x, z),
                     model.at(y + h_y, t).value(x, z), model.at(y + 2 * h_y, t).value(x, z), h_y);
  const KernelField f = model.field(x, z, 3);
  const cplx i(0.0, 1.0);
  const cplx sx = f.dx(1) + f.dz(1);
  const cplx dd = f.dx(2) - f.dz(2);
  r.first = ft - y * y / 48.0 * sx - i * y / 4.0 * dd + f.dx(3) + f.dz(3);
  r.second = i * fy - i * y * t / 24.0 * sx + t / 4.0 * dd;
  return r;
}

}  // namespace jlab
