#include "jlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "jlab/cache.hpp"

namespace jlab {

using nlohmann::json;

std::vector<double> GridAxis::values() const {
  if (count < 1) throw ValidationError("grid axis count must be at least 1");
  if (count == 1) return {min};
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    v[static_cast<std::size_t>(i)] = min + (max - min) * static_cast<double>(i) / (count - 1);
  v.back() = max;
  return v;
}

AmplitudeProfile ProfileSpec::build() const {
  AmplitudeProfile p = [&] {
    if (kind == "constant") return AmplitudeProfile::constant(b2, delta, epsilon);
    if (kind == "quadratic") return AmplitudeProfile::quadratic(a2, a0, delta, epsilon);
    if (kind == "tabulated") return AmplitudeProfile::tabulated(s, c, delta, epsilon, spline_order);
    throw ValidationError("unknown profile kind '" + kind + "'");
  }();
  if (working_range) p.set_working_range(*working_range);
  return p;
}

bool Scenario::wants(FieldPath p) const {
  return std::find(paths.begin(), paths.end(), p) != paths.end();
}

MarchenkoOptions Scenario::marchenko_options() const {
  MarchenkoOptions o;
  o.n_nodes = n_nodes;
  o.panel_order = panel_order;
  o.max_nodes = max_nodes;
  o.stability_tol = tol.solver;
  o.edge_tol = tol.edge;
  return o;
}

KernelOptions Scenario::kernel_options() const {
  KernelOptions o;
  o.rel_tol = tol.quadrature;
  return o;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json axis_json(const GridAxis& a) { return {{"min", a.min}, {"max", a.max}, {"count", a.count}}; }

GridAxis axis_from(const json& j) {
  GridAxis a;
  a.min = j.at("min").get<double>();
  a.max = j.value("max", a.min);
  a.count = j.value("count", 1);
  return a;
}

json interval_json(Interval r) { return json::array({r.lo, r.hi}); }

Interval interval_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("expected a [lo, hi] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

json density_json(const Density& d) {
  switch (d.kind) {
    case Density::Kind::none: return nullptr;
    case Density::Kind::gaussian_p:
      return {{"id", d.id()}, {"k", d.k}, {"center", d.center}, {"amplitude", d.amplitude}};
    case Density::Kind::gaussian_pq:
      return {{"id", d.id()}, {"a", d.a}, {"b", d.b}, {"c", d.c}};
    case Density::Kind::algebraic_p:
      return {{"id", d.id()}, {"k", d.k}, {"alpha", d.alpha}, {"amplitude", d.amplitude}};
    case Density::Kind::exp_growth_p:
      return {{"id", d.id()}, {"k", d.k}};
  }
  return nullptr;
}

Density density_from(const json& j) {
  Density d;
  if (j.is_null()) return d;
  d.kind = Density::kind_from_string(j.at("id").get<std::string>());
  d.k = j.value("k", d.k);
  d.center = j.value("center", d.center);
  d.amplitude = j.value("amplitude", d.amplitude);
  d.a = j.value("a", d.a);
  d.b = j.value("b", d.b);
  d.c = j.value("c", d.c);
  d.alpha = j.value("alpha", d.alpha);
  return d;
}

std::string moment_string(MomentCondition m) {
  return m == MomentCondition::exponential ? "exponential" : "algebraic_weak";
}

MomentCondition moment_from(const std::string& s) {
  if (s == "exponential") return MomentCondition::exponential;
  if (s == "algebraic_weak") return MomentCondition::algebraic_weak;
  throw ValidationError("unknown moment condition '" + s + "'");
}

}  // namespace

json to_json(const Scenario& sc) {
  json prof = {{"kind", sc.profile.kind},
               {"delta", sc.profile.delta},
               {"epsilon", sc.profile.epsilon}};
  if (sc.profile.kind == "constant") prof["b2"] = sc.profile.b2;
  if (sc.profile.kind == "quadratic") {
    prof["a2"] = sc.profile.a2;
    prof["a0"] = sc.profile.a0;
  }
  if (sc.profile.kind == "tabulated") {
    prof["s"] = sc.profile.s;
    prof["c"] = sc.profile.c;
    prof["spline_order"] = sc.profile.spline_order;
  }
  if (sc.profile.working_range) prof["working_range"] = interval_json(*sc.profile.working_range);

  json atoms = json::array();
  for (const auto& a : sc.measure.atoms)
    atoms.push_back({{"p", a.pt.p}, {"q", a.pt.q}, {"c", a.weight}});

  json paths = json::array();
  for (auto p : sc.paths) paths.push_back(to_string(p));

  json j;
  j["name"] = sc.name;
  j["profile"] = prof;
  j["domain"] = {{"roof_mode", to_string(sc.roof_mode)},
                 {"p_range", sc.p_range ? interval_json(*sc.p_range) : json("auto")}};
  j["measure"] = {{"atoms", atoms},
                  {"density", density_json(sc.measure.density)},
                  {"moment_condition", moment_string(sc.moment)},
                  {"weak_alpha", sc.weak_alpha}};
  json x = axis_json(sc.grid.x);
  x["frame"] = sc.grid.comoving ? "comoving" : "lab";
  j["grid"] = {{"x", x}, {"y", axis_json(sc.grid.y)}, {"t", sc.grid.t}};
  j["M"] = sc.M;
  j["phase_normalization"] = to_string(sc.normalization);
  j["tolerances"] = {{"quadrature", sc.tol.quadrature},
                     {"solver", sc.tol.solver},
                     {"reality", sc.tol.reality},
                     {"edge", sc.tol.edge}};
  j["solver"] = {{"n_nodes", sc.n_nodes},
                 {"panel_order", sc.panel_order},
                 {"max_nodes", sc.max_nodes}};
  j["fd_steps"] = {{"hx", sc.fd_steps.hx}, {"hy", sc.fd_steps.hy}, {"ht", sc.fd_steps.ht}};
  j["residual_checks"] = sc.residual_checks;
  j["outputs"] = {{"csv", sc.outputs.csv},
                  {"summary", sc.outputs.summary},
                  {"plots", sc.outputs.plots},
                  {"cache_dir", sc.outputs.cache_dir}};
  j["paths"] = paths;
  return j;
}

Scenario scenario_from_json(const json& j) {
  try {
    Scenario sc;
    sc.name = j.value("name", sc.name);

    const json& pj = j.at("profile");
    sc.profile.kind = pj.at("kind").get<std::string>();
    sc.profile.delta = pj.at("delta").get<double>();
    sc.profile.epsilon = pj.at("epsilon").get<double>();
    sc.profile.b2 = pj.value("b2", sc.profile.b2);
    sc.profile.a2 = pj.value("a2", sc.profile.a2);
    sc.profile.a0 = pj.value("a0", sc.profile.a0);
    if (pj.contains("s")) sc.profile.s = pj["s"].get<std::vector<double>>();
    if (pj.contains("c")) sc.profile.c = pj["c"].get<std::vector<double>>();
    sc.profile.spline_order = pj.value("spline_order", sc.profile.spline_order);
    if (pj.contains("working_range")) sc.profile.working_range = interval_from(pj["working_range"]);

    if (j.contains("domain")) {
      const json& dj = j["domain"];
      sc.roof_mode = roof_mode_from_string(dj.value("roof_mode", to_string(sc.roof_mode)));
      if (dj.contains("p_range") && !dj["p_range"].is_string())
        sc.p_range = interval_from(dj["p_range"]);
      else if (dj.contains("p_range") && dj["p_range"].get<std::string>() != "auto")
        throw ValidationError("p_range must be \"auto\" or [lo, hi]");
    }

    if (j.contains("measure")) {
      const json& mj = j["measure"];
      for (const auto& a : mj.value("atoms", json::array()))
        sc.measure.atoms.push_back(
            {{a.at("p").get<double>(), a.at("q").get<double>()}, a.at("c").get<double>()});
      if (mj.contains("density")) sc.measure.density = density_from(mj["density"]);
      sc.moment = moment_from(mj.value("moment_condition", moment_string(sc.moment)));
      sc.weak_alpha = mj.value("weak_alpha", sc.weak_alpha);
    }

    const json& gj = j.at("grid");
    sc.grid.x = axis_from(gj.at("x"));
    const std::string frame = gj["x"].value("frame", "comoving");
    if (frame != "comoving" && frame != "lab")
      throw ValidationError("grid.x.frame must be comoving or lab");
    sc.grid.comoving = frame == "comoving";
    if (gj.contains("y")) sc.grid.y = axis_from(gj["y"]);
    sc.grid.t = gj.at("t").get<std::vector<double>>();

    sc.M = j.value("M", sc.M);
    sc.normalization =
        phase_normalization_from_string(j.value("phase_normalization", to_string(sc.normalization)));
    if (j.contains("tolerances")) {
      const json& tj = j["tolerances"];
      sc.tol.quadrature = tj.value("quadrature", sc.tol.quadrature);
      sc.tol.solver = tj.value("solver", sc.tol.solver);
      sc.tol.reality = tj.value("reality", sc.tol.reality);
      sc.tol.edge = tj.value("edge", sc.tol.edge);
    }
    if (j.contains("solver")) {
      const json& sj = j["solver"];
      sc.n_nodes = sj.value("n_nodes", sc.n_nodes);
      sc.panel_order = sj.value("panel_order", sc.panel_order);
      sc.max_nodes = sj.value("max_nodes", sc.max_nodes);
    }
    if (j.contains("fd_steps")) {
      const json& fj = j["fd_steps"];
      sc.fd_steps.hx = fj.value("hx", sc.fd_steps.hx);
      sc.fd_steps.hy = fj.value("hy", sc.fd_steps.hy);
      sc.fd_steps.ht = fj.value("ht", sc.fd_steps.ht);
    }
    sc.residual_checks = j.value("residual_checks", sc.residual_checks);
    if (j.contains("outputs")) {
      const json& oj = j["outputs"];
      sc.outputs.csv = oj.value("csv", sc.outputs.csv);
      sc.outputs.summary = oj.value("summary", sc.outputs.summary);
      sc.outputs.plots = oj.value("plots", sc.outputs.plots);
      sc.outputs.cache_dir = oj.value("cache_dir", sc.outputs.cache_dir);
    }
    if (j.contains("paths")) {
      sc.paths.clear();
      for (const auto& p : j["paths"]) sc.paths.push_back(field_path_from_string(p.get<std::string>()));
    }
    return sc;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario: ") + e.what());
  }
}

std::string scenario_hash(const Scenario& sc) { return hex64(fnv1a64(to_json(sc).dump())); }

// ---------------------------------------------------------------------------
// Built-ins

std::vector<std::string> builtin_names() { return {"example1", "example2", "example3"}; }

Scenario builtin_scenario(const std::string& name) {
  Scenario sc;
  sc.name = name;
  sc.paths = {FieldPath::marchenko, FieldPath::asymptotic_train, FieldPath::logdet};
  sc.outputs = {name + ".csv", name + "_summary.json", name + "_plots", "cache"};
  sc.M = 3.0;
  if (name == "example1") {
    // C(y) = y^2/24 + 1/16; dmu = exp(-(18 p^2 + 2 q^2 - 1/2)) dp dq.
    sc.profile.kind = "quadratic";
    sc.profile.a2 = 1.0 / 24.0;
    sc.profile.a0 = 1.0 / 16.0;
    sc.profile.delta = 1.0 / 16.0;
    sc.profile.epsilon = 0.2;
    sc.measure.density.kind = Density::Kind::gaussian_pq;
    sc.measure.density.a = 18.0;
    sc.measure.density.b = 2.0;
    sc.measure.density.c = -0.5;
    sc.grid.x = {-30.0, 6.0, 37};
    sc.grid.y = {0.0, 1.0, 2};
    sc.grid.t = {50.0, 200.0};
    return sc;
  }
  if (name == "example2") {
    // C = b^2 = 1; dmu = exp(-(12 p)^2) dp dq.
    sc.profile.kind = "constant";
    sc.profile.b2 = 1.0;
    sc.profile.delta = 1.0;
    sc.profile.epsilon = 0.5;
    sc.measure.density.kind = Density::Kind::gaussian_p;
    sc.measure.density.k = 12.0;
    sc.grid.x = {-10.0, 4.0, 57};
    sc.grid.y = {0.0, 0.0, 1};
    sc.grid.t = {100.0, 1000.0};
    return sc;
  }
  if (name == "example3") {
    // C = b^2 = 1; dmu = dp dq / (1 + (12 p)^(2 alpha)), alpha = 4.
    sc.profile.kind = "constant";
    sc.profile.b2 = 1.0;
    sc.profile.delta = 1.0;
    sc.profile.epsilon = 0.5;
    sc.measure.density.kind = Density::Kind::algebraic_p;
    sc.measure.density.k = 12.0;
    sc.measure.density.alpha = 4;
    sc.moment = MomentCondition::algebraic_weak;
    sc.weak_alpha = 4;
    sc.grid.x = {-10.0, 4.0, 29};
    sc.grid.y = {0.0, 1.0, 2};
    sc.grid.t = {100.0};
    return sc;
  }
  std::string known;
  for (const auto& n : builtin_names()) known += " " + n;
  throw ValidationError("unknown built-in scenario '" + name + "' (known:" + known + ")");
}

Scenario load_scenario(const std::string& path_or_name) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(path_or_name, ec)) {
    std::ifstream in(path_or_name);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ValidationError("cannot parse " + path_or_name + ": " + e.what());
    }
    return scenario_from_json(j);
  }
  return builtin_scenario(path_or_name);
}

// ---------------------------------------------------------------------------

namespace {

void check_axis(const GridAxis& a, const char* what) {
  if (!std::isfinite(a.min) || !std::isfinite(a.max))
    throw ValidationError(std::string("grid.") + what + " bounds must be finite");
  if (a.swept() && a.count < 2)
    throw ValidationError(std::string("grid.") + what + " is swept and needs count >= 2");
  if (!a.swept() && a.count != 1)
    throw ValidationError(std::string("grid.") + what + " has min == max and needs count == 1");
  if (a.max < a.min) throw ValidationError(std::string("grid.") + what + " needs min <= max");
}

Interval default_p_range(const Scenario& sc) {
  if (sc.measure.atoms.empty()) return {-1.0, 1.0};
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& a : sc.measure.atoms) {
    lo = std::min(lo, a.pt.p);
    hi = std::max(hi, a.pt.p);
  }
  return {lo - 0.5, hi + 0.5};
}

}  // namespace

PreparedScenario prepare(const Scenario& sc) {
  check_axis(sc.grid.x, "x");
  check_axis(sc.grid.y, "y");
  if (sc.grid.t.empty()) throw ValidationError("grid.t must not be empty");
  for (std::size_t i = 0; i < sc.grid.t.size(); ++i) {
    if (!(sc.grid.t[i] > 0.0)) throw ValidationError("grid.t values must be positive");
    if (i > 0 && !(sc.grid.t[i] > sc.grid.t[i - 1]))
      throw ValidationError("grid.t values must be strictly increasing");
  }
  if (sc.paths.empty()) throw ValidationError("paths must not be empty");
  const bool asymptotic = sc.wants(FieldPath::asymptotic_train) || sc.wants(FieldPath::logdet);
  if (asymptotic && !(sc.M > 2.0))
    throw ValidationError("M must exceed 2 when asymptotic paths are requested");
  if (asymptotic && !sc.measure.density.present())
    throw ValidationError("asymptotic paths need a continuous density part");
  if (sc.wants(FieldPath::one_soliton) &&
      (sc.measure.atoms.size() != 1 || sc.measure.density.present()))
    throw ValidationError("one_soliton path needs a measure of exactly one atom");
  if (sc.n_nodes == 0 || sc.panel_order == 0 || sc.n_nodes % sc.panel_order != 0)
    throw ValidationError("solver.n_nodes must be a positive multiple of solver.panel_order");
  if (!(sc.tol.quadrature > 0.0) || !(sc.tol.solver > 0.0) || !(sc.tol.reality > 0.0) ||
      !(sc.tol.edge > 0.0))
    throw ValidationError("tolerances must be positive");

  const AmplitudeProfile profile = sc.profile.build();
  SpectralDomain domain(profile, sc.roof_mode, sc.p_range.value_or(default_p_range(sc)));
  if (!sc.p_range && sc.measure.density.present()) {
    const auto chosen = sc.moment == MomentCondition::exponential
                            ? choose_p_range(domain, sc.measure.density)
                            : choose_p_range_weak(domain, sc.measure.density, sc.weak_alpha);
    Interval r = chosen.first;
    for (const auto& a : sc.measure.atoms) {
      r.lo = std::min(r.lo, a.pt.p - 0.5);
      r.hi = std::max(r.hi, a.pt.p + 0.5);
    }
    domain.set_p_range(r);
  }

  ValidationOptions vo;
  vo.moment = sc.moment;
  vo.weak_alpha = sc.weak_alpha;
  vo.require_max_consistency = sc.roof_mode == RoofMode::max_consistent;
  ConditionsReport report = validate_conditions(profile, domain, sc.measure, vo);
  return {sc, std::move(domain), std::move(report)};
}

}  // namespace jlab
