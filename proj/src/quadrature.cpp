#include "jlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <queue>

namespace jlab::quad {

Rule gauss_legendre(std::size_t n) {
  if (n == 0) throw DomainError("gauss_legendre: n must be positive");
  static std::mutex mu;
  static std::map<std::size_t, Rule> memo;
  {
    std::lock_guard lock(mu);
    if (auto it = memo.find(n); it != memo.end()) return it->second;
  }

  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n.
    double z = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        const auto jd = static_cast<double>(j);
        p0 = ((2.0 * jd - 1.0) * z * p1 - (jd - 1.0) * p2) / jd;
      }
      dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      const double p2 = p1;
      p1 = p0;
      const auto jd = static_cast<double>(j);
      p0 = ((2.0 * jd - 1.0) * z * p1 - (jd - 1.0) * p2) / jd;
    }
    dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;

  std::lock_guard lock(mu);
  memo.emplace(n, r);
  return r;
}

const KronrodRule& kronrod15() {
  static const KronrodRule rule = [] {
    // QUADPACK qk15 abscissae/weights (positive half, descending).
    constexpr std::array<double, 8> xgk{
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.0};
    constexpr std::array<double, 8> wgk{
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    constexpr std::array<double, 4> wg{
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
    KronrodRule r;
    // Gauss nodes sit at the odd positions of the descending Kronrod list.
    for (int k = 0; k < 8; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      const double g = (k % 2 == 1) ? wg[ku / 2] : 0.0;
      r.x[ku] = -xgk[ku];
      r.w[ku] = wgk[ku];
      r.gauss_weight[ku] = g;
      r.x[14 - ku] = xgk[ku];
      r.w[14 - ku] = wgk[ku];
      r.gauss_weight[14 - ku] = g;
    }
    return r;
  }();
  return rule;
}

Rule composite_gauss_legendre(double a, double b, std::size_t panels, std::size_t order) {
  if (panels == 0) throw DomainError("composite_gauss_legendre: panels must be positive");
  const Rule base = gauss_legendre(order);
  Rule r;
  r.x.reserve(panels * order);
  r.w.reserve(panels * order);
  const double h = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + h * static_cast<double>(p);
    for (std::size_t i = 0; i < order; ++i) {
      r.x.push_back(lo + 0.5 * h * (base.x[i] + 1.0));
      r.w.push_back(0.5 * h * base.w[i]);
    }
  }
  return r;
}

double integrate(const std::function<double(double)>& f, double a, double b, std::size_t panels,
                 std::size_t order) {
  const Rule r = composite_gauss_legendre(a, b, panels, order);
  double sum = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) sum += r.w[i] * f(r.x[i]);
  return sum;
}

namespace {

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15_segment(const std::function<double(double)>& f, double a, double b) {
  const KronrodRule& r = kronrod15();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double k = 0.0;
  double g = 0.0;
  for (std::size_t i = 0; i < 15; ++i) {
    const double v = f(c + h * r.x[i]);
    k += r.w[i] * v;
    g += r.gauss_weight[i] * v;
  }
  return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace

double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, double rel_tol, std::size_t max_intervals,
                          double* error_out) {
  std::priority_queue<Segment> heap;
  Segment first = gk15_segment(f, a, b);
  double total = first.value;
  double err = first.error;
  heap.push(first);
  while (err > std::max(abs_tol, rel_tol * std::abs(total)) && heap.size() < max_intervals) {
    const Segment worst = heap.top();
    // Stop splitting once the interval cannot be halved in floating point.
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) break;
    heap.pop();
    const Segment l = gk15_segment(f, worst.a, mid);
    const Segment r = gk15_segment(f, mid, worst.b);
    total += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
  }
  // Re-sum to shed the drift accumulated by incremental updates.
  total = 0.0;
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  if (error_out != nullptr) *error_out = err;
  return total;
}

MinResult golden_section_min(const std::function<double(double)>& f, double a, double b,
                             double rel_tol, int max_iter) {
  constexpr double invphi = 0.6180339887498948482;
  if (b < a) std::swap(a, b);
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(b - a) <= rel_tol * std::max(1.0, std::abs(0.5 * (a + b)))) break;
    if (fc <= fd) {  // ties toward the smaller abscissa
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  const double x = fc <= fd ? c : d;
  return {x, std::min(fc, fd)};
}

MinResult bracketed_max(const std::function<double(double)>& f, double a, double b,
                        std::size_t samples, double rel_tol) {
  if (samples < 3) samples = 3;
  const double h = (b - a) / static_cast<double>(samples - 1);
  std::size_t best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples; ++i) {
    const double v = f(a + h * static_cast<double>(i));
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const double lo = a + h * static_cast<double>(best == 0 ? 0 : best - 1);
  const double hi = a + h * static_cast<double>(std::min(best + 1, samples - 1));
  auto neg = [&](double x) { return -f(x); };
  MinResult r = golden_section_min(neg, lo, hi, rel_tol);
  r.value = -r.value;
  if (best_val > r.value) return {a + h * static_cast<double>(best), best_val};
  return r;
}

double increasing_root(const std::function<double(double)>& g, double guess, double initial_step,
                       double rel_tol, double max_abs) {
  double lo = guess;
  double hi = guess;
  double glo = g(lo);
  if (glo == 0.0) return lo;
  double step = initial_step;
  if (glo < 0.0) {
    double ghi = glo;
    while (ghi < 0.0) {
      lo = hi;
      hi += step;
      step *= 2.0;
      if (std::abs(hi) > max_abs) throw NumericError("increasing_root: no sign change found");
      ghi = g(hi);
    }
  } else {
    double gl = glo;
    while (gl > 0.0) {
      hi = lo;
      lo -= step;
      step *= 2.0;
      if (std::abs(lo) > max_abs) throw NumericError("increasing_root: no sign change found");
      gl = g(lo);
    }
  }
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::max(1.0, std::abs(mid))) return mid;
    if (mid == lo || mid == hi) return mid;
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if (gm < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace jlab::quad
