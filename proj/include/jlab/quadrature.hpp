#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "jlab/common.hpp"

namespace jlab::quad {

/// Nodes and weights of a rule on [-1, 1].
struct Rule {
  std::vector<double> x;
  std::vector<double> w;

  [[nodiscard]] std::size_t size() const { return x.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
Rule gauss_legendre(std::size_t n);

/// 15-point Kronrod extension of the 7-point Gauss rule, nodes ascending.
/// `gauss_weight[i]` is the 7-point Gauss weight of node i, or 0 when node i
/// is a Kronrod-only node.
struct KronrodRule {
  std::array<double, 15> x{};
  std::array<double, 15> w{};
  std::array<double, 15> gauss_weight{};
};

const KronrodRule& kronrod15();

/// Composite Gauss-Legendre nodes on [a, b] split into `panels` equal panels.
Rule composite_gauss_legendre(double a, double b, std::size_t panels, std::size_t order);

/// Integrate f over [a, b] with a composite Gauss-Legendre rule.
double integrate(const std::function<double(double)>& f, double a, double b,
                 std::size_t panels = 64, std::size_t order = 20);

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
/// Stops when the summed error estimate is below max(abs_tol, rel_tol*|I|).
/// `error_out`, when given, receives the final error estimate.
double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 0.0, double rel_tol = 1e-12,
                          std::size_t max_intervals = 4000, double* error_out = nullptr);

// ---------------------------------------------------------------------------
// One-dimensional searches.

struct MinResult {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section minimisation on a bracket [a, b]. Stops when the bracket is
/// below rel_tol * max(1, |x|). Ties go to the smaller abscissa.
MinResult golden_section_min(const std::function<double(double)>& f, double a, double b,
                             double rel_tol = 1e-12, int max_iter = 400);

/// Maximise f over [a, b]: dense scan with `samples` points to pick a bracket,
/// then golden-section refinement inside the bracket.
MinResult bracketed_max(const std::function<double(double)>& f, double a, double b,
                        std::size_t samples = 2001, double rel_tol = 1e-12);

/// Root of a monotone increasing function. The bracket is grown geometrically
/// around `guess` until the sign changes, then bisected to rel_tol.
/// Throws NumericError when no sign change is found.
double increasing_root(const std::function<double(double)>& g, double guess,
                       double initial_step = 1.0, double rel_tol = 1e-14,
                       double max_abs = 1e8);

}  // namespace jlab::quad
