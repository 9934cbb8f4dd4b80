#include "jlab/asymptotics.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>

namespace jlab {

namespace mp = boost::multiprecision;

namespace {

mp::cpp_int factorial(int k) {
  mp::cpp_int f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Exact determinant by Gaussian elimination over the rationals.
mp::cpp_rational det_exact(std::vector<std::vector<mp::cpp_rational>> m) {
  const std::size_t n = m.size();
  mp::cpp_rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && m[piv][c] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (m[r][c] == 0) continue;
      const mp::cpp_rational f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

double fact_d(int k) { return std::tgamma(static_cast<double>(k) + 1.0); }

}  // namespace

mp::cpp_rational gamma_det_rational(int n) {
  if (n < 0) throw DomainError("gram: n must be non-negative");
  // Gamma(m + 1/2) = sqrt(pi) (2m)! / (4^m m!), so each even-parity entry is
  // sqrt(pi) times 2 (2m)! / (4^m m!).
  std::vector<std::vector<mp::cpp_rational>> m(static_cast<std::size_t>(n),
                                               std::vector<mp::cpp_rational>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      if ((i + k) % 2 != 0) continue;
      const int h = (i + k) / 2;
      mp::cpp_int pow4 = 1;
      for (int r = 0; r < h; ++r) pow4 *= 4;
      m[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
          mp::cpp_rational(2 * factorial(2 * h), pow4 * factorial(h));
    }
  return det_exact(std::move(m));
}

mp::cpp_int q_det_exact(int n) {
  if (n < 0) throw DomainError("gram: n must be non-negative");
  std::vector<std::vector<mp::cpp_rational>> m(static_cast<std::size_t>(n),
                                               std::vector<mp::cpp_rational>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      m[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = factorial(i + k);
  const mp::cpp_rational d = det_exact(std::move(m));
  return mp::numerator(d);
}

GramPair gram_pair(int n) {
  if (n < 0) throw DomainError("gram: n must be non-negative");
  static std::mutex mu;
  static std::map<int, GramPair> memo;
  {
    std::lock_guard lock(mu);
    if (auto it = memo.find(n); it != memo.end()) return it->second;
  }
  GramPair g;
  g.n = n;
  g.gamma_det = std::pow(kPi, 0.5 * n) * gamma_det_rational(n).convert_to<double>();
  g.q_det = q_det_exact(n).convert_to<double>();
  std::lock_guard lock(mu);
  memo.emplace(n, g);
  return g;
}

// ---------------------------------------------------------------------------

FrontGeometry front_geometry(const SpectralDomain& domain, const MeasureSpec& measure, double y) {
  FrontGeometry geo;
  geo.y = y;
  const ProfileValue c = domain.profile()(y);
  geo.C = c.c;
  geo.dC = c.dc;
  geo.d2C = c.d2c;
  const SpectralPoint tp = tangency_point(domain.profile(), y);
  geo.p0 = tp.p;
  geo.q0 = tp.q;
  geo.g = normalization_g(measure, domain.profile(), y);
  geo.h_pp = domain.roof_pp(tp.p);
  const double q0 = geo.q0;
  const double k = 12.0 * geo.p0 - y;
  const double top = 16.0 * q0 * q0 + k * k;
  geo.j0 = 1.0 / (q0 * std::sqrt(top));
  const double bottom = 2.0 * q0 * (48.0 * q0 * q0 - k * k - 16.0 * geo.h_pp * q0 * q0 * q0);
  if (!(bottom > 0.0))
    throw NumericError("front_geometry: a(y) radicand non-positive (48 q0^2 - (12 p0 - y)^2 - "
                       "16 h_pp q0^3 = " + std::to_string(bottom / (2.0 * q0)) + ")");
  geo.a = std::sqrt(top / bottom);
  return geo;
}

Eigen::MatrixXd psi_matrix(const FrontGeometry& geo, int N) {
  Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(N, N);
  for (int n = 0; n < N; ++n)
    for (int j = 0; j < N; ++j) {
      if ((n + j) % 2 != 0) continue;
      psi(n, j) = geo.g * geo.j0 * std::pow(geo.a, n + j + 1) / (2.0 * fact_d(n) * fact_d(j)) *
                  std::tgamma(0.5 * (n + j + 1)) * 2.0;
    }
  return psi;
}

PsiGeometry psi_and_geometry(const SpectralDomain& domain, const MeasureSpec& measure, double y,
                             int N) {
  PsiGeometry out;
  out.geo = front_geometry(domain, measure, y);
  out.psi = psi_matrix(out.geo, N);
  return out;
}

// ---------------------------------------------------------------------------

std::string to_string(PhaseNormalization n) {
  switch (n) {
    case PhaseNormalization::general: return "general";
    case PhaseNormalization::profile_specific: return "profile_specific";
    case PhaseNormalization::degenerate: return "degenerate";
  }
  return "general";
}

PhaseNormalization phase_normalization_from_string(const std::string& s) {
  if (s == "general") return PhaseNormalization::general;
  if (s == "profile_specific") return PhaseNormalization::profile_specific;
  if (s == "degenerate") return PhaseNormalization::degenerate;
  throw ValidationError("unknown phase normalization '" + s + "'");
}

namespace {

double gram_ratio(int n) {
  const GramPair a = gram_pair(n);
  const GramPair b = gram_pair(n - 1);
  return a.q_det * a.gamma_det / (b.q_det * b.gamma_det);
}

}  // namespace

double phi_n(const AmplitudeProfile& profile, int n, double y) {
  if (n < 1) throw DomainError("phi_n: n must be at least 1");
  const ProfileValue c = profile(y);
  const double b1 = c.c + 48.0 * c.dc * c.dc;
  const double b2 = 1.0 + 24.0 * c.d2c;
  const double b3 = c.c + 12.0 * c.dc * c.dc;
  if (!(b2 > 0.0)) throw NumericError("phi_n: 1 + 24 C'' <= 0 (curvature bound violated)");
  if (!(b3 > 0.0)) throw NumericError("phi_n: C + 12 C'^2 <= 0");
  const double nf = fact_d(n - 1);
  return std::pow(b1, n - 1) * std::pow(b2, n - 0.5) * gram_ratio(n) /
         (std::pow(2.0, (2.0 * n + 5.0) / 2.0) * nf * nf * std::pow(b3, (10.0 * n - 3.0) / 4.0));
}

double phi_n_constant_profile(double b, int n) {
  if (n < 1) throw DomainError("phi_n: n must be at least 1");
  const double nf = fact_d(n - 1);
  return gram_ratio(n) / (std::pow(b, 3.0 * (n - 0.5)) * nf * nf);
}

double phi_n_quadratic_profile(double y, int n) {
  if (n < 1) throw DomainError("phi_n: n must be at least 1");
  const double nf = fact_d(n - 1);
  return std::pow(3.0, n - 0.5) * std::pow(6.0 * y * y + 1.0, n - 1) * gram_ratio(n) /
         (std::pow(2.0, 5.0 * n - 1.5) * std::pow(2.0 * y * y + 1.0, (10.0 * n - 3.0) / 4.0) * nf *
          nf);
}

double phi_n(PhaseNormalization norm, const AmplitudeProfile& profile, const FrontGeometry& geo,
             int n) {
  switch (norm) {
    case PhaseNormalization::general:
      return phi_n(profile, n, geo.y);
    case PhaseNormalization::profile_specific:
      if (profile.kind() == AmplitudeProfile::Kind::constant)
        return phi_n_constant_profile(std::sqrt(profile.a0()), n);
      if (profile.kind() == AmplitudeProfile::Kind::quadratic &&
          std::abs(profile.a2() - 1.0 / 24.0) < 1e-15 && std::abs(profile.a0() - 1.0 / 16.0) < 1e-15)
        return phi_n_quadratic_profile(geo.y, n);
      throw DomainError("phi_n: no profile-specific normalisation for this profile");
    case PhaseNormalization::degenerate: {
      if (n < 1) throw DomainError("phi_n: n must be at least 1");
      const double nf = fact_d(n - 1);
      return 0.5 * geo.j0 * std::pow(geo.a, 2 * n - 1) * std::pow(2.0 * geo.q0, 1 - 2 * n) *
             gram_ratio(n) / (nf * nf);
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

bool in_front_domain(const AmplitudeProfile& profile, double g, double M, double x, double y,
                     double t) {
  if (!(t > 1.0)) throw DomainError("in_front_domain: t must exceed 1");
  if (!(M > 2.0)) throw DomainError("in_front_domain: M must exceed 2");
  if (!(g > 0.0)) return false;
  const SpectralPoint tp = tangency_point(profile, y);
  const double lt = std::log(t);
  return std::abs(std::log(g)) < lt && x > profile(y).c * t - (M + 1.0) * lt / (2.0 * tp.q);
}

SolitonTrain::SolitonTrain(SpectralDomain domain, MeasureSpec measure, double M,
                           PhaseNormalization norm)
    : domain_(std::move(domain)), measure_(std::move(measure)), M_(M), norm_(norm) {
  if (!(M > 2.0)) throw ValidationError("soliton train: M must exceed 2");
  terms_ = static_cast<int>(std::floor(M - 1.0));
}

FrontGeometry SolitonTrain::geometry(double y) const {
  return front_geometry(domain_, measure_, y);
}

double SolitonTrain::phi(int n, double y) const {
  return phi_n(norm_, domain_.profile(), geometry(y), n);
}

double SolitonTrain::phase(int n, double x, double y, double t) const {
  if (!(t > 1.0)) throw DomainError("soliton train: t must exceed 1");
  const FrontGeometry geo = geometry(y);
  const double ph = phi_n(norm_, domain_.profile(), geo, n);
  if (!(ph > 0.0) || !(geo.g > 0.0)) throw NumericError("soliton train: phi_n or g not positive");
  return x - geo.C * t +
         ((n + 0.5) * std::log(t) - std::log(geo.g) - std::log(ph)) / (2.0 * geo.q0);
}

double SolitonTrain::term(int n, double x, double y, double t) const {
  const double q0 = tangency_point(domain_.profile(), y).q;
  const double ch = std::cosh(q0 * phase(n, x, y, t));
  return 2.0 * q0 * q0 / (ch * ch);
}

double SolitonTrain::peak(int n, double y, double t) const { return -phase(n, 0.0, y, t); }

double SolitonTrain::sum(double x, double y, double t, bool* inside) const {
  const FrontGeometry geo = geometry(y);
  if (inside != nullptr) *inside = in_front_domain(domain_.profile(), geo.g, M_, x, y, t);
  return sum(geo, x, t);
}

double SolitonTrain::sum(const FrontGeometry& geo, double x, double t) const {
  if (!(t > 1.0)) throw DomainError("soliton train: t must exceed 1");
  double s = 0.0;
  for (int n = 1; n <= terms_; ++n) {
    const double ph = phi_n(norm_, domain_.profile(), geo, n);
    const double arg = geo.q0 * (x - geo.C * t +
                                 ((n + 0.5) * std::log(t) - std::log(geo.g) - std::log(ph)) /
                                     (2.0 * geo.q0));
    const double ch = std::cosh(arg);
    s += 2.0 * geo.q0 * geo.q0 / (ch * ch);
  }
  return s;
}

Interval subdomain_bounds(double q0, double g, double M, int n, double t, double eps) {
  const int m = static_cast<int>(std::floor(M - 1.0));
  if (n < 1 || n > m) throw DomainError("subdomain_bounds: n out of range");
  auto edge = [&](double power) { return -(power * std::log(t) - std::log(g)) / (2.0 * q0); };
  const double inf = std::numeric_limits<double>::infinity();
  if (n == 1) return {m == 1 ? edge(M) : edge(2.0 + eps), inf};
  if (n < m) return {edge(n + 1.0 + eps), edge(n - eps)};
  return {edge(M), edge(m - eps)};
}

std::optional<int> subdomain_index(const AmplitudeProfile& profile, double g, double M, double x,
                                   double y, double t, double eps) {
  if (!(g > 0.0)) return std::nullopt;
  const double q0 = tangency_point(profile, y).q;
  const double xi = x - profile(y).c * t;
  const int m = static_cast<int>(std::floor(M - 1.0));
  for (int n = 1; n <= m; ++n) {
    const Interval b = subdomain_bounds(q0, g, M, n, t, eps);
    if (xi > b.lo && xi < b.hi) return n;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

int degenerate_rank(double M) { return static_cast<int>(std::floor((4.0 * M - 5.0) / 2.0)); }

std::vector<double> incomplete_moments(int kmax, double q0, double xi) {
  std::vector<double> I(static_cast<std::size_t>(kmax + 1));
  const double e = std::exp(-2.0 * q0 * xi);
  I[0] = e / (2.0 * q0);
  double xk = 1.0;
  for (int k = 1; k <= kmax; ++k) {
    xk *= xi;
    I[static_cast<std::size_t>(k)] = (xk * e + k * I[static_cast<std::size_t>(k - 1)]) / (2.0 * q0);
  }
  return I;
}

DegenerateKernelModel::DegenerateKernelModel(const SpectralDomain& domain,
                                             const MeasureSpec& measure, double M, double y)
    : DegenerateKernelModel(front_geometry(domain, measure, y), degenerate_rank(M)) {}

DegenerateKernelModel::DegenerateKernelModel(FrontGeometry geo, int N)
    : geo_(geo), N_(N), psi_(psi_matrix(geo, N)) {
  if (N < 1) throw ValidationError("degenerate kernel: rank must be at least 1");
}

Eigen::MatrixXd DegenerateKernelModel::matrix(double xi, double t) const {
  const std::vector<double> I = incomplete_moments(2 * N_, geo_.q0, xi);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(N_, N_);
  for (int n = 0; n < N_; ++n)
    for (int m = 0; m < N_; ++m) {
      double s = 0.0;
      for (int j = 0; j < N_ - n; ++j)
        s += psi_(n, j) * std::pow(t, -0.5 * (n + j + 3)) * I[static_cast<std::size_t>(j + m)];
      a(n, m) = s;
    }
  return a;
}

double DegenerateKernelModel::log_det(double xi, double t) const {
  Eigen::MatrixXd a = matrix(xi, t);
  a.diagonal().array() += 1.0;
  const double d = a.partialPivLu().determinant();
  if (!(d > 0.0))
    throw NumericError("degenerate kernel: det(I + A) not positive at xi=" + std::to_string(xi));
  return std::log(d);
}

double logdet_v(const DegenerateKernelModel& model, double x, double t, double h) {
  const double xi = x - model.geometry().C * t;
  const double f0 = model.log_det(xi, t);
  const double d2 = (-model.log_det(xi - 2 * h, t) + 16.0 * model.log_det(xi - h, t) - 30.0 * f0 +
                     16.0 * model.log_det(xi + h, t) - model.log_det(xi + 2 * h, t)) /
                    (12.0 * h * h);
  return 2.0 * d2;
}

}  // namespace jlab
