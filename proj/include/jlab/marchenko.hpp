#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "jlab/common.hpp"
#include "jlab/kernel.hpp"
#include "jlab/spectral.hpp"

namespace jlab {

struct MarchenkoOptions {
  std::size_t n_nodes = 96;       // starting node count (multiple of panel_order)
  std::size_t panel_order = 16;   // Gauss-Legendre points per panel
  std::size_t max_nodes = 768;
  double stability_tol = 1e-8;    // K(x,x) change allowed under node doubling
  double edge_tol = 1e-12;
  double abs_floor = 1e-250;
  int ladder_max = 48;            // L_k = 2^(k/4), k = 0..ladder_max
};

/// Discrete solution of K(x,z) + F(x,z) + int_x^{x+L} K(x,s) F(s,z) ds = 0.
struct MarchenkoSolution {
  double base_x = 0.0;
  double truncation_L = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;
  Eigen::VectorXcd K_row;  // K(x, node_j)
  Eigen::VectorXcd F_row;  // F(x, node_j)
  cplx K_diag{};
  cplx K_diag_dx{};
  double cond_estimate = 1.0;
  double min_eig = 0.0;
};

/// Smallest L = 2^(k/4) with |F(x+L, x+L)| below edge_tol |F(x, x)| (or
/// below abs_floor). Zero kernels return the first rung.
[[nodiscard]] double choose_truncation(const KernelModel& model, double x, double edge_tol = 1e-12,
                                       double abs_floor = 1e-250, int ladder_max = 48);

/// Nystrom solve on composite Gauss-Legendre nodes over [x, x+L].
///
/// The x-derivative of K(x,x) is the exact derivative of the discrete
/// problem: the nodes move with x, so d/dx acts on every kernel entry as
/// (d/dx + d/dz) F, and one extra solve with the same factorisation gives
/// dK/dx along the row.
[[nodiscard]] MarchenkoSolution solve(const KernelModel& model, double x, double L,
                                      std::size_t n_nodes, std::size_t panel_order = 16);

/// Doubles the node count from opts.n_nodes until K(x,x) and its x-derivative
/// change by less than opts.stability_tol (relative). Throws NumericError
/// past opts.max_nodes.
[[nodiscard]] MarchenkoSolution solve_converged(const KernelModel& model, double x, double L,
                                                const MarchenkoOptions& opts = {});

/// Convenience: builds a kernel model for the point, picks L, solves.
[[nodiscard]] MarchenkoSolution solve(const MeasureSpec& measure, const SpectralDomain& domain,
                                      double x, double y, double t,
                                      const MarchenkoOptions& opts = {},
                                      const KernelOptions& kopts = {});

/// Im of sum_j w_j F(x, z_j) conj(K(x, z_j)); zero for an exact solution.
[[nodiscard]] double hermitian_energy_check(const MarchenkoSolution& sol);

/// Central difference of K(x,x) over re-solves at x +- h, x +- h/2, with one
/// Richardson step. Used as an independent check of K_diag_dx.
[[nodiscard]] cplx richardson_diag_dx(const KernelModel& model, double x, double L,
                                      std::size_t n_nodes, double h);

}  // namespace jlab
