#include "jlab/marchenko.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "jlab/quadrature.hpp"

namespace jlab {

double choose_truncation(const KernelModel& model, double x, double edge_tol, double abs_floor,
                         int ladder_max) {
  const double f0 = std::abs(model.value(x, x));
  if (f0 == 0.0) return 1.0;
  double ratio = 0.0;
  for (int k = 0; k <= ladder_max; ++k) {
    const double L = std::exp2(k / 4.0);
    const double fl = std::abs(model.value(x + L, x + L));
    ratio = fl / f0;
    if (fl < edge_tol * f0 || fl < abs_floor) return L;
  }
  std::ostringstream os;
  os << "choose_truncation: ladder exhausted at L=" << std::exp2(ladder_max / 4.0)
     << " with edge ratio " << ratio;
  throw NumericError(os.str());
}

MarchenkoSolution solve(const KernelModel& model, double x, double L, std::size_t n_nodes,
                        std::size_t panel_order) {
  if (n_nodes < 16) throw DomainError("marchenko: need at least 16 nodes");
  if (!(L > 0.0)) throw DomainError("marchenko: truncation length must be positive");
  const std::size_t panels = (n_nodes + panel_order - 1) / panel_order;
  const quad::Rule r = quad::composite_gauss_legendre(x, x + L, panels, panel_order);
  const auto n = static_cast<Eigen::Index>(r.size());

  MarchenkoSolution sol;
  sol.base_x = x;
  sol.truncation_L = L;
  sol.nodes = r.x;
  sol.weights = r.w;
  sol.K_row = Eigen::VectorXcd::Zero(n);
  sol.F_row = Eigen::VectorXcd::Zero(n);
  if (model.empty()) return sol;

  std::vector<double> pts;
  pts.reserve(r.size() + 1);
  pts.push_back(x);
  pts.insert(pts.end(), r.x.begin(), r.x.end());
  Eigen::MatrixXcd fm, gm;
  model.assemble(pts, fm, &gm);

  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(r.w.data(), n);
  // Row i is the equation at z = z_i: B_ij = w_j F(z_j, z_i).
  const Eigen::MatrixXcd fnodes = fm.bottomRightCorner(n, n);
  const Eigen::MatrixXcd gnodes = gm.bottomRightCorner(n, n);
  Eigen::MatrixXcd a = fnodes.transpose() * w.asDiagonal();
  a.diagonal().array() += 1.0;
  const Eigen::VectorXcd f0 = fm.row(0).tail(n).transpose();  // F(x, z_i)
  const Eigen::VectorXcd g0 = gm.row(0).tail(n).transpose();
  const Eigen::VectorXcd fcol = fm.col(0).tail(n);            // F(z_j, x)
  const Eigen::VectorXcd gcol = gm.col(0).tail(n);

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  const Eigen::VectorXcd k = lu.solve(-f0);
  const Eigen::VectorXcd dbk = gnodes.transpose() * (w.asDiagonal() * k);
  const Eigen::VectorXcd dk = lu.solve(-g0 - dbk);

  const Eigen::VectorXcd wk = w.asDiagonal() * k;
  const Eigen::VectorXcd wdk = w.asDiagonal() * dk;
  sol.K_row = k;
  sol.F_row = f0;
  sol.K_diag = -fm(0, 0) - (wk.transpose() * fcol)(0);
  sol.K_diag_dx = -gm(0, 0) - (wdk.transpose() * fcol)(0) - (wk.transpose() * gcol)(0);

  const double rc = lu.rcond();
  sol.cond_estimate = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  if (!std::isfinite(sol.K_diag.real()) || !std::isfinite(sol.K_diag_dx.real()))
    throw NumericError("marchenko: singular discrete system at x=" + std::to_string(x));

  const Eigen::VectorXd sw = w.cwiseSqrt();
  const Eigen::MatrixXcd s = sw.asDiagonal() * fnodes * sw.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s, Eigen::EigenvaluesOnly);
  sol.min_eig = es.eigenvalues().minCoeff();
  return sol;
}

MarchenkoSolution solve_converged(const KernelModel& model, double x, double L,
                                  const MarchenkoOptions& opts) {
  std::size_t n = opts.n_nodes;
  MarchenkoSolution prev = solve(model, x, L, n, opts.panel_order);
  while (true) {
    n *= 2;
    if (n > opts.max_nodes) {
      std::ostringstream os;
      os << "marchenko: K(x,x) not stable to " << opts.stability_tol << " at " << opts.max_nodes
         << " nodes (x=" << x << ")";
      throw NumericError(os.str());
    }
    MarchenkoSolution next = solve(model, x, L, n, opts.panel_order);
    const double dk = std::abs(next.K_diag - prev.K_diag);
    const double dd = std::abs(next.K_diag_dx - prev.K_diag_dx);
    const bool ok_k = dk <= opts.stability_tol * std::abs(next.K_diag) || dk < opts.abs_floor;
    const bool ok_d = dd <= opts.stability_tol * std::abs(next.K_diag_dx) || dd < opts.abs_floor;
    if (ok_k && ok_d) return next;
    prev = std::move(next);
  }
}

MarchenkoSolution solve(const MeasureSpec& measure, const SpectralDomain& domain, double x,
                        double y, double t, const MarchenkoOptions& opts,
                        const KernelOptions& kopts) {
  constexpr double kFirstWindow = 32.0;
  KernelModel model = KernelModel::build(measure, domain, y, t, {x, x + kFirstWindow}, kopts);
  const double L = choose_truncation(model, x, opts.edge_tol, opts.abs_floor, opts.ladder_max);
  if (L > kFirstWindow) model = KernelModel::build(measure, domain, y, t, {x, x + L}, kopts);
  return solve_converged(model, x, L, opts);
}

double hermitian_energy_check(const MarchenkoSolution& sol) {
  cplx acc{};
  for (Eigen::Index j = 0; j < sol.K_row.size(); ++j)
    acc += sol.weights[static_cast<std::size_t>(j)] * sol.F_row(j) * std::conj(sol.K_row(j));
  return acc.imag();
}

cplx richardson_diag_dx(const KernelModel& model, double x, double L, std::size_t n_nodes,
                        double h) {
  auto kd = [&](double xx) { return solve(model, xx, L, n_nodes).K_diag; };
  const cplx d1 = (kd(x + h) - kd(x - h)) / (2.0 * h);
  const cplx d2 = (kd(x + 0.5 * h) - kd(x - 0.5 * h)) / h;
  return d2 + (d2 - d1) / 3.0;
}

}  // namespace jlab
