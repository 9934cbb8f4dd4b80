#include "jlab/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "jlab/cache.hpp"
#include "jlab/svg.hpp"

namespace jlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class F>
void parallel_for(std::size_t n, unsigned workers, F&& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const unsigned k = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  pool.reserve(k);
  for (unsigned w = 0; w < k; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
    });
  for (auto& th : pool) th.join();
}

std::string hexf(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------------------
// Cache records

std::string kernel_key(const PreparedScenario& ps, double y, double t, double x_lo, double x_hi) {
  const Scenario& sc = ps.scenario;
  const json j = to_json(sc);
  std::ostringstream os;
  os << "kernel-v1|" << j["profile"].dump() << '|' << to_string(sc.roof_mode) << '|'
     << hexf(ps.domain.p_range().lo) << ',' << hexf(ps.domain.p_range().hi) << '|'
     << j["measure"]["atoms"].dump() << '|' << j["measure"]["density"].dump() << '|' << hexf(y)
     << ',' << hexf(t) << '|' << hexf(x_lo) << ',' << hexf(x_hi) << '|'
     << hexf(sc.tol.quadrature) << ',' << hexf(sc.tol.solver) << ',' << hexf(sc.tol.edge) << '|'
     << sc.n_nodes << ',' << sc.panel_order << ',' << sc.max_nodes;
  return hex64(fnv1a64(os.str()));
}

std::string encode_field(const MarchenkoField& f) {
  const KernelModel& m = f.model();
  ByteWriter w;
  w.f64s(m.p());
  w.f64s(m.q());
  w.f64s(m.log_w());
  w.u64(m.density_nodes());
  w.f64(m.quad_error());
  w.f64(m.skipped_bound());
  w.u64(m.panels());
  w.f64(f.truncation_L());
  w.u64(f.n_nodes());
  w.u64(f.panel_order());
  return w.bytes();
}

MarchenkoField decode_field(std::string_view bytes, double y, double t) {
  ByteReader r(bytes);
  auto p = r.f64s();
  auto q = r.f64s();
  auto lw = r.f64s();
  const std::size_t nd = r.u64();
  const double qe = r.f64();
  const double sk = r.f64();
  const std::size_t panels = r.u64();
  const double L = r.f64();
  const std::size_t n = r.u64();
  const std::size_t order = r.u64();
  if (!r.done() || p.size() != q.size() || p.size() != lw.size())
    throw std::runtime_error("malformed kernel record");
  return MarchenkoField(
      KernelModel::from_nodes(std::move(p), std::move(q), std::move(lw), nd, y, t, qe, sk, panels),
      L, n, order);
}

std::string encode_rows(const std::vector<Row>& rows) {
  ByteWriter w;
  w.u64(rows.size());
  for (const auto& r : rows) {
    w.f64(r.x);
    w.f64(r.v);
    w.f64(r.reality_resid);
    w.f64(r.quad_err);
    w.f64(r.cond_est);
    w.f64(r.min_eig);
    w.u64(r.failed ? 1 : 0);
    w.str(r.flag);
  }
  return w.bytes();
}

std::vector<Row> decode_rows(std::string_view bytes, double y, double t) {
  ByteReader r(bytes);
  std::vector<Row> rows(r.u64());
  for (auto& row : rows) {
    row.y = y;
    row.t = t;
    row.path = FieldPath::marchenko;
    row.x = r.f64();
    row.v = r.f64();
    row.reality_resid = r.f64();
    row.quad_err = r.f64();
    row.cond_est = r.f64();
    row.min_eig = r.f64();
    row.failed = r.u64() != 0;
    row.flag = r.str();
  }
  if (!r.done()) throw std::runtime_error("malformed sample record");
  return rows;
}

// ---------------------------------------------------------------------------

void add_flag(Row& r, const std::string& f) { r.flag += (r.flag.empty() ? "" : ";") + f; }

Row marchenko_row(const FieldSample& s, const Tolerances& tol) {
  Row r;
  r.x = s.x;
  r.y = s.y;
  r.t = s.t;
  r.path = FieldPath::marchenko;
  r.v = s.v;
  r.reality_resid = s.diag.reality_resid;
  r.quad_err = s.diag.quad_err;
  r.cond_est = s.diag.cond_est;
  r.min_eig = s.diag.min_eig;
  if (!(r.reality_resid < tol.reality)) add_flag(r, "reality");
  if (!(s.diag.im_k_diag < tol.reality)) add_flag(r, "im_k_diag");
  if (!(r.quad_err < 10.0 * tol.quadrature)) add_flag(r, "quadrature");
  if (r.min_eig < -1e-10) add_flag(r, "min_eig");
  if (!(r.cond_est < 1e12)) add_flag(r, "conditioning");
  if (!std::isfinite(r.v)) add_flag(r, "non_finite");
  return r;
}

Row failed_row(double x, double y, double t, FieldPath path, const std::string& why) {
  Row r;
  r.x = x;
  r.y = y;
  r.t = t;
  r.path = path;
  r.v = r.reality_resid = r.quad_err = r.cond_est = r.min_eig = kNaN;
  r.failed = true;
  r.flag = "failed: " + why;
  return r;
}

Row closed_form_row(double x, double y, double t, FieldPath path, double v) {
  Row r;
  r.x = x;
  r.y = y;
  r.t = t;
  r.path = path;
  r.v = v;
  if (!std::isfinite(v)) add_flag(r, "non_finite");
  return r;
}

// Rightmost local maximum reaching half of the slice maximum, refined by a
// parabola through its neighbours.
std::optional<Peak> leading_peak(const std::vector<double>& x, const std::vector<double>& v,
                                 double shift) {
  double vmax = -std::numeric_limits<double>::infinity();
  for (double s : v)
    if (std::isfinite(s)) vmax = std::max(vmax, s);
  if (!(vmax > 0.0)) return std::nullopt;
  for (std::size_t i = x.size(); i-- > 0;) {
    if (!std::isfinite(v[i]) || v[i] < 0.5 * vmax) continue;
    const bool left_ok = i == 0 || !(v[i - 1] > v[i]);
    const bool right_ok = i + 1 == x.size() || !(v[i + 1] > v[i]);
    if (!left_ok || !right_ok) continue;
    Peak pk{x[i], x[i] - shift, v[i]};
    if (i > 0 && i + 1 < x.size() && std::isfinite(v[i - 1]) && std::isfinite(v[i + 1])) {
      const double h = x[i + 1] - x[i];
      const double den = v[i - 1] - 2.0 * v[i] + v[i + 1];
      if (den < 0.0) {
        const double d = 0.5 * (v[i - 1] - v[i + 1]) / den;
        pk.x = x[i] + d * h;
        pk.xi = pk.x - shift;
        pk.v = v[i] - 0.25 * (v[i - 1] - v[i + 1]) * d;
      }
    }
    return pk;
  }
  return std::nullopt;
}

struct SliceOut {
  std::vector<Row> rows;
  SliceSummary summary;
  double kernel_s = 0.0;
  double asym_s = 0.0;
  int hits = 0, misses = 0;
};

class SliceRunner {
 public:
  SliceRunner(const PreparedScenario& ps, const Cache& cache, unsigned workers,
              const std::function<void(const std::string&)>& log)
      : ps_(ps), sc_(ps.scenario), cache_(cache), workers_(workers), log_(log) {}

  SliceOut run(double y, double t) {
    SliceOut out;
    out.summary.y = y;
    out.summary.t = t;
    const AmplitudeProfile& profile = ps_.domain.profile();
    out.summary.C = profile(y).c;
    const double shift = sc_.grid.comoving ? out.summary.C * t : 0.0;
    std::vector<double> xs = sc_.grid.x.values();
    for (auto& x : xs) x += shift;

    std::map<FieldPath, std::vector<double>> values;
    if (sc_.wants(FieldPath::marchenko)) run_marchenko(out, xs, y, t, values);

    const auto t0 = Clock::now();
    std::optional<FrontGeometry> geo;
    std::string geo_error;
    if (sc_.measure.density.present()) {
      try {
        geo = front_geometry(ps_.domain, sc_.measure, y);
        out.summary.q0 = geo->q0;
      } catch (const std::exception& e) {
        geo_error = e.what();
      }
    }
    if (sc_.wants(FieldPath::one_soliton)) {
      const Atom& a = sc_.measure.atoms.front();
      auto& vals = values[FieldPath::one_soliton];
      for (double x : xs) {
        // The Marchenko field of the atom (p, q, c) is the closed form at -p.
        const double v = one_soliton({-a.pt.p, a.pt.q, a.weight}, x, y, t);
        out.rows.push_back(closed_form_row(x, y, t, FieldPath::one_soliton, v));
        vals.push_back(v);
      }
    }
    if (sc_.wants(FieldPath::asymptotic_train)) {
      auto& vals = values[FieldPath::asymptotic_train];
      if (!geo || !(t > 1.0)) {
        const std::string why = !geo ? geo_error : "t must exceed 1";
        for (double x : xs) {
          out.rows.push_back(failed_row(x, y, t, FieldPath::asymptotic_train, why));
          vals.push_back(kNaN);
        }
      } else {
        const SolitonTrain train(ps_.domain, sc_.measure, sc_.M, sc_.normalization);
        for (double x : xs) {
          try {
            const double v = train.sum(*geo, x, t);
            out.rows.push_back(closed_form_row(x, y, t, FieldPath::asymptotic_train, v));
            vals.push_back(v);
          } catch (const std::exception& e) {
            out.rows.push_back(failed_row(x, y, t, FieldPath::asymptotic_train, e.what()));
            vals.push_back(kNaN);
          }
        }
      }
    }
    if (sc_.wants(FieldPath::logdet)) {
      auto& vals = values[FieldPath::logdet];
      vals.assign(xs.size(), kNaN);
      if (!geo) {
        for (double x : xs) out.rows.push_back(failed_row(x, y, t, FieldPath::logdet, geo_error));
      } else {
        const DegenerateKernelModel dk(*geo, degenerate_rank(sc_.M));
        std::vector<Row> rows(xs.size());
        parallel_for(xs.size(), workers_, [&](std::size_t i) {
          try {
            const double v = logdet_v(dk, xs[i], t);
            rows[i] = closed_form_row(xs[i], y, t, FieldPath::logdet, v);
            vals[i] = v;
          } catch (const std::exception& e) {
            rows[i] = failed_row(xs[i], y, t, FieldPath::logdet, e.what());
          }
        });
        out.rows.insert(out.rows.end(), rows.begin(), rows.end());
      }
    }
    out.asym_s = seconds_since(t0);

    for (const auto& [path, v] : values)
      if (auto pk = leading_peak(xs, v, out.summary.C * t))
        out.summary.leading_peak[to_string(path)] = *pk;

    if (geo && t > 1.0) subdomain_stats(out.summary, *geo, xs, t, values);
    return out;
  }

 private:
  void run_marchenko(SliceOut& out, const std::vector<double>& xs, double y, double t,
                     std::map<FieldPath, std::vector<double>>& values) {
    const auto t0 = Clock::now();
    const double x_lo = xs.front(), x_hi = xs.back();
    const std::string key = kernel_key(ps_, y, t, x_lo, x_hi);
    std::string xs_bytes;
    for (double x : xs) xs_bytes += hexf(x) + ",";
    const std::string rows_key = hex64(fnv1a64(key + "|" + xs_bytes));

    std::vector<Row> rows;
    std::optional<MarchenkoField> field;
    auto get_field = [&]() -> const MarchenkoField& {
      if (field) return *field;
      if (auto bytes = cache_.load(key, "kernel")) {
        try {
          field = decode_field(*bytes, y, t);
          if (out.summary.cache_state.empty()) out.summary.cache_state = "kernel";
          return *field;
        } catch (const std::exception& e) {
          if (log_) log_(std::string("warning: unreadable kernel record, recomputing: ") + e.what());
        }
      }
      field.emplace(sc_.measure, ps_.domain, x_lo, x_hi, y, t, sc_.marchenko_options(),
                    sc_.kernel_options());
      cache_.store(key, "kernel", encode_field(*field));
      if (out.summary.cache_state.empty()) out.summary.cache_state = cache_.enabled() ? "miss" : "off";
      return *field;
    };

    if (auto bytes = cache_.load(rows_key, "samples")) {
      try {
        rows = decode_rows(*bytes, y, t);
        if (rows.size() != xs.size()) throw std::runtime_error("sample count mismatch");
        out.summary.cache_state = "hit";
      } catch (const std::exception& e) {
        rows.clear();
        if (log_) log_(std::string("warning: unreadable sample record, recomputing: ") + e.what());
      }
    }
    if (rows.empty()) {
      try {
        const MarchenkoField& f = get_field();
        rows.resize(xs.size());
        parallel_for(xs.size(), workers_, [&](std::size_t i) {
          try {
            rows[i] = marchenko_row(f.sample(xs[i]), sc_.tol);
          } catch (const std::exception& e) {
            rows[i] = failed_row(xs[i], y, t, FieldPath::marchenko, e.what());
          }
        });
        cache_.store(rows_key, "samples", encode_rows(rows));
      } catch (const std::exception& e) {
        if (log_) log_("warning: Marchenko slice failed at y=" + std::to_string(y) +
                       ", t=" + std::to_string(t) + ": " + e.what());
        rows.clear();
        for (double x : xs) rows.push_back(failed_row(x, y, t, FieldPath::marchenko, e.what()));
      }
    }
    if (out.summary.cache_state == "hit") ++out.hits;
    else ++out.misses;

    auto& vals = values[FieldPath::marchenko];
    for (const auto& r : rows) vals.push_back(r.failed ? kNaN : r.v);

    if (sc_.residual_checks > 0 && !rows.front().failed) {
      try {
        const MarchenkoField& f = get_field();
        const Sampler s = f.sampler();
        std::vector<std::size_t> order(xs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::size_t imax = 0;
        for (std::size_t i = 0; i < vals.size(); ++i)
          if (vals[i] > vals[imax]) imax = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
          return std::abs(xs[a] - xs[imax]) < std::abs(xs[b] - xs[imax]);
        });
        const std::size_t k = std::min<std::size_t>(order.size(), static_cast<std::size_t>(sc_.residual_checks));
        std::vector<std::pair<double, double>> res(k);
        parallel_for(k, workers_, [&](std::size_t i) {
          const double x = xs[order[i]];
          res[i] = {x, je_residual(s, x, y, t, sc_.fd_steps)};
        });
        std::sort(res.begin(), res.end());
        out.summary.je_residuals = std::move(res);
      } catch (const std::exception& e) {
        if (log_) log_(std::string("warning: residual check failed: ") + e.what());
      }
    }
    if (field) {
      out.summary.truncation_L = field->truncation_L();
      out.summary.solver_nodes = field->n_nodes();
      out.summary.kernel_nodes = field->model().size();
    }
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
    out.kernel_s = seconds_since(t0);
  }

  void subdomain_stats(SliceSummary& s, const FrontGeometry& geo, const std::vector<double>& xs,
                       double t, const std::map<FieldPath, std::vector<double>>& values) const {
    const int m = static_cast<int>(std::floor(sc_.M - 1.0));
    auto get = [&](FieldPath p) -> const std::vector<double>* {
      auto it = values.find(p);
      return it == values.end() ? nullptr : &it->second;
    };
    const auto* mv = get(FieldPath::marchenko);
    const auto* tv = get(FieldPath::asymptotic_train);
    const auto* lv = get(FieldPath::logdet);
    auto sup = [](double& acc, const std::vector<double>* a, const std::vector<double>* b,
                  std::size_t i) {
      if (!a || !b || !std::isfinite((*a)[i]) || !std::isfinite((*b)[i])) return;
      acc = std::max(acc, std::abs((*a)[i] - (*b)[i]));
    };
    for (int n = 1; n <= m; ++n) {
      SubdomainStat st;
      st.n = n;
      const Interval b = subdomain_bounds(geo.q0, geo.g, sc_.M, n, t);
      st.lo = b.lo;
      st.hi = b.hi;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto idx = subdomain_index(ps_.domain.profile(), geo.g, sc_.M, xs[i], geo.y, t);
        if (!idx || *idx != n) continue;
        ++st.points;
        sup(st.sup_train_vs_marchenko, tv, mv, i);
        sup(st.sup_train_vs_logdet, tv, lv, i);
        sup(st.sup_logdet_vs_marchenko, lv, mv, i);
      }
      s.subdomains.push_back(st);
    }
  }

  const PreparedScenario& ps_;
  const Scenario& sc_;
  const Cache& cache_;
  unsigned workers_;
  const std::function<void(const std::string&)>& log_;
};

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json maybe(double v) { return v < 0.0 || !std::isfinite(v) ? json(nullptr) : json(v); }

}  // namespace

// ---------------------------------------------------------------------------

std::string resolve_cache_dir(const Scenario& sc, const RunOptions& opts) {
  if (opts.cache_dir) return *opts.cache_dir;
  if (const char* env = std::getenv("JLAB_CACHE_DIR"); env != nullptr && *env != '\0') return env;
  if (sc.outputs.cache_dir.empty()) return {};
  const fs::path p(sc.outputs.cache_dir);
  return p.is_absolute() ? p.string() : (fs::path(opts.out_dir) / p).string();
}

RunRecord run(const PreparedScenario& prepared, const RunOptions& opts) {
  if (!prepared.report.ok())
    throw ValidationError("scenario conditions not satisfied:\n" + prepared.report.to_text());
  const auto t0 = Clock::now();
  const Scenario& sc = prepared.scenario;
  Cache cache;
  if (opts.use_cache) {
    const std::string dir = resolve_cache_dir(sc, opts);
    if (!dir.empty()) cache = Cache(dir, opts.log);
  }
  const unsigned workers =
      opts.workers > 0 ? opts.workers : std::max(1u, std::thread::hardware_concurrency());

  RunRecord rec;
  rec.scenario_name = sc.name;
  rec.hash = scenario_hash(sc);
  rec.report = prepared.report;
  SliceRunner runner(prepared, cache, workers, opts.log);
  for (double t : sc.grid.t)
    for (double y : sc.grid.y.values()) {
      if (opts.log) opts.log("slice y=" + fmt(y) + " t=" + fmt(t));
      SliceOut out = runner.run(y, t);
      rec.rows.insert(rec.rows.end(), out.rows.begin(), out.rows.end());
      rec.slices.push_back(std::move(out.summary));
      rec.timing.kernel_seconds += out.kernel_s;
      rec.timing.asymptotic_seconds += out.asym_s;
      rec.timing.cache_hits += out.hits;
      rec.timing.cache_misses += out.misses;
    }
  std::sort(rec.rows.begin(), rec.rows.end(), [](const Row& a, const Row& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.y != b.y) return a.y < b.y;
    if (a.x != b.x) return a.x < b.x;
    return to_string(a.path) < to_string(b.path);
  });
  rec.timing.total_seconds = seconds_since(t0);
  return rec;
}

std::string RunRecord::csv() const {
  std::string out = "x,y,t,path,v,reality_resid,quad_err,cond_est\n";
  for (const auto& r : rows) {
    out += fmt(r.x) + ',' + fmt(r.y) + ',' + fmt(r.t) + ',' + to_string(r.path) + ',' + fmt(r.v) +
           ',' + fmt(r.reality_resid) + ',' + fmt(r.quad_err) + ',' + fmt(r.cond_est) + '\n';
  }
  return out;
}

std::size_t RunRecord::failed_rows() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const Row& r) { return r.failed; }));
}

std::size_t RunRecord::flagged_rows() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const Row& r) { return !r.flag.empty(); }));
}

json RunRecord::summary() const {
  json j;
  j["scenario"] = scenario_name;
  j["hash"] = hash;
  j["conditions_ok"] = report.ok();
  j["p_range"] = {report.p_range.lo, report.p_range.hi};
  j["rows"] = rows.size();
  j["failed_rows"] = failed_rows();

  double max_reality = 0.0, max_quad = 0.0, max_cond = 0.0;
  double min_eig = std::numeric_limits<double>::infinity();
  json flags = json::array();
  for (const auto& r : rows) {
    if (r.path == FieldPath::marchenko && !r.failed) {
      max_reality = std::max(max_reality, r.reality_resid);
      max_quad = std::max(max_quad, r.quad_err);
      max_cond = std::max(max_cond, r.cond_est);
      min_eig = std::min(min_eig, r.min_eig);
    }
    if (!r.flag.empty())
      flags.push_back({{"x", r.x}, {"y", r.y}, {"t", r.t}, {"path", to_string(r.path)}, {"flag", r.flag}});
  }
  double max_je = 0.0;
  for (const auto& s : slices)
    for (const auto& [x, res] : s.je_residuals) max_je = std::max(max_je, std::abs(res));
  j["max"] = {{"reality_resid", max_reality},
              {"quad_err", max_quad},
              {"cond_est", max_cond},
              {"je_residual", max_je}};
  j["min_eig"] = std::isfinite(min_eig) ? json(min_eig) : json(nullptr);
  j["flags"] = flags;

  json sl = json::array();
  for (const auto& s : slices) {
    json e = {{"y", s.y}, {"t", s.t}, {"C", s.C}};
    if (s.q0 > 0.0) {
      e["q0"] = s.q0;
      e["expected_amplitude"] = 2.0 * s.q0 * s.q0;
    }
    json peaks = json::object();
    for (const auto& [path, pk] : s.leading_peak)
      peaks[path] = {{"x", pk.x}, {"xi", pk.xi}, {"v", pk.v}};
    e["leading_peak"] = peaks;
    json subs = json::array();
    for (const auto& st : s.subdomains)
      subs.push_back({{"n", st.n},
                      {"xi_lo", st.lo},
                      {"xi_hi", std::isfinite(st.hi) ? json(st.hi) : json("inf")},
                      {"points", st.points},
                      {"sup_train_vs_marchenko", maybe(st.sup_train_vs_marchenko)},
                      {"sup_train_vs_logdet", maybe(st.sup_train_vs_logdet)},
                      {"sup_logdet_vs_marchenko", maybe(st.sup_logdet_vs_marchenko)}});
    e["subdomains"] = subs;
    if (!s.je_residuals.empty()) {
      json res = json::array();
      for (const auto& [x, r] : s.je_residuals) res.push_back({{"x", x}, {"residual", r}});
      e["je_residuals"] = res;
    }
    if (s.solver_nodes > 0)
      e["marchenko"] = {{"truncation_L", s.truncation_L},
                        {"solver_nodes", s.solver_nodes},
                        {"kernel_nodes", s.kernel_nodes}};
    if (!s.cache_state.empty()) e["cache"] = s.cache_state;
    sl.push_back(e);
  }
  j["slices"] = sl;
  j["timing"] = {{"kernel_seconds", timing.kernel_seconds},
                 {"asymptotic_seconds", timing.asymptotic_seconds},
                 {"total_seconds", timing.total_seconds},
                 {"cache_hits", timing.cache_hits},
                 {"cache_misses", timing.cache_misses}};
  return j;
}

// ---------------------------------------------------------------------------

void write_outputs(const RunRecord& rec, const Scenario& sc, const RunOptions& opts) {
  const fs::path base(opts.out_dir);
  fs::create_directories(base);
  auto resolve = [&](const std::string& p) {
    const fs::path q(p);
    return q.is_absolute() ? q : base / q;
  };
  {
    std::ofstream out(resolve(sc.outputs.csv), std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + resolve(sc.outputs.csv).string());
    out << rec.csv();
  }
  {
    std::ofstream out(resolve(sc.outputs.summary));
    if (!out) throw std::runtime_error("cannot write " + resolve(sc.outputs.summary).string());
    out << rec.summary().dump(2) << '\n';
  }
  if (!opts.plots || sc.outputs.plots.empty()) return;

  const fs::path dir = resolve(sc.outputs.plots);
  fs::create_directories(dir);
  const std::vector<double> ys = sc.grid.y.values();
  for (std::size_t it = 0; it < sc.grid.t.size(); ++it)
    for (std::size_t iy = 0; iy < ys.size(); ++iy) {
      const double t = sc.grid.t[it], y = ys[iy];
      LinePlot plot("v(x) at y = " + fmt(y) + ", t = " + fmt(t),
                    sc.grid.comoving ? "x - C(y) t" : "x", "v");
      const double shift = sc.grid.comoving ? sc.profile.build()(y).c * t : 0.0;
      for (FieldPath p : sc.paths) {
        std::vector<double> xv, vv;
        for (const auto& r : rec.rows)
          if (r.t == t && r.y == y && r.path == p) {
            xv.push_back(r.x - shift);
            vv.push_back(r.v);
          }
        plot.add_series(to_string(p), std::move(xv), std::move(vv));
      }
      plot.write((dir / ("v_y" + std::to_string(iy) + "_t" + std::to_string(it) + ".svg")).string());
    }

  LinePlot front("Leading peak position", "ln t", "x_peak - C(y) t");
  for (std::size_t iy = 0; iy < ys.size(); ++iy)
    for (FieldPath p : sc.paths) {
      std::vector<double> lt, xi;
      for (const auto& s : rec.slices) {
        if (s.y != ys[iy]) continue;
        auto it = s.leading_peak.find(to_string(p));
        if (it == s.leading_peak.end()) continue;
        lt.push_back(std::log(s.t));
        xi.push_back(it->second.xi);
      }
      if (lt.empty()) continue;
      front.add_series(to_string(p) + (ys.size() > 1 ? " y=" + fmt(ys[iy]) : ""), std::move(lt),
                       std::move(xi), true);
    }
  front.write((dir / "front.svg").string());
}

// ---------------------------------------------------------------------------

std::vector<FrontFit> fit_fronts(const RunRecord& rec, const PreparedScenario& prepared) {
  std::vector<FrontFit> fits;
  const Scenario& sc = prepared.scenario;
  if (!sc.measure.density.present()) return fits;
  for (double y : sc.grid.y.values()) {
    std::vector<double> lt, xi;
    for (const auto& s : rec.slices) {
      if (s.y != y) continue;
      auto it = s.leading_peak.find(to_string(FieldPath::marchenko));
      if (it == s.leading_peak.end()) continue;
      lt.push_back(std::log(s.t));
      xi.push_back(it->second.xi);
    }
    if (lt.size() < 2) continue;
    FrontGeometry geo;
    try {
      geo = front_geometry(prepared.domain, sc.measure, y);
    } catch (const std::exception&) {
      continue;
    }
    FrontFit f;
    f.y = y;
    f.q0 = geo.q0;
    f.expected_coefficient = -3.0 / (4.0 * geo.q0);
    const double n = static_cast<double>(lt.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
      sx += lt[i];
      sy += xi[i];
      sxx += lt[i] * lt[i];
      sxy += lt[i] * xi[i];
    }
    f.log_coefficient = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double c = 0.0;
    for (std::size_t i = 0; i < lt.size(); ++i) c += xi[i] - f.expected_coefficient * lt[i];
    f.constant = c / n;
    for (auto norm : {PhaseNormalization::general, PhaseNormalization::profile_specific,
                      PhaseNormalization::degenerate}) {
      try {
        const double phi = phi_n(norm, prepared.domain.profile(), geo, 1);
        f.normalization_constants[to_string(norm)] =
            (std::log(geo.g) + std::log(phi)) / (2.0 * geo.q0);
      } catch (const std::exception&) {
      }
    }
    fits.push_back(f);
  }
  return fits;
}

std::string compare_report(const RunRecord& rec, const PreparedScenario& prepared) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(5);
  os << "scenario " << rec.scenario_name << " (" << rec.hash << ")\n";
  for (const auto& s : rec.slices) {
    os << "\ny = " << s.y << ", t = " << s.t << ", C = " << s.C;
    if (s.q0 > 0.0) os << ", q0 = " << s.q0 << ", 2 q0^2 = " << 2.0 * s.q0 * s.q0;
    os << '\n';
    for (const auto& [path, pk] : s.leading_peak)
      os << "  leading peak " << path << ": x - Ct = " << pk.xi << ", v = " << pk.v << '\n';
    for (const auto& st : s.subdomains) {
      os << "  a_" << st.n << " (" << st.lo << ", " << st.hi << "), " << st.points << " pts:";
      auto put = [&](const char* name, double v) {
        if (v >= 0.0) os << ' ' << name << '=' << v;
      };
      put("|train-marchenko|", st.sup_train_vs_marchenko);
      put("|train-logdet|", st.sup_train_vs_logdet);
      put("|logdet-marchenko|", st.sup_logdet_vs_marchenko);
      os << '\n';
    }
  }
  for (const auto& f : fit_fronts(rec, prepared)) {
    os << "\nfront drift at y = " << f.y << ": fitted ln t coefficient " << f.log_coefficient
       << " (train " << f.expected_coefficient << ")\n";
    os << "  fitted constant " << f.constant << '\n';
    std::string best;
    double best_gap = std::numeric_limits<double>::infinity();
    for (const auto& [name, c] : f.normalization_constants) {
      os << "  " << name << " normalisation constant " << c << " (gap " << std::abs(c - f.constant)
         << ")\n";
      if (std::abs(c - f.constant) < best_gap) {
        best_gap = std::abs(c - f.constant);
        best = name;
      }
    }
    if (!best.empty()) os << "  closest: " << best << '\n';
  }
  return os.str();
}

}  // namespace jlab
