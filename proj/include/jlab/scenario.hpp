#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "jlab/asymptotics.hpp"
#include "jlab/kernel.hpp"
#include "jlab/marchenko.hpp"
#include "jlab/solution.hpp"
#include "jlab/spectral.hpp"

namespace jlab {

struct GridAxis {
  double min = 0.0;
  double max = 0.0;
  int count = 1;

  [[nodiscard]] bool swept() const { return max != min; }
  [[nodiscard]] std::vector<double> values() const;
};

struct Grid {
  GridAxis x{-10.0, 4.0, 57};
  bool comoving = true;  // x is read as x - C(y) t
  GridAxis y{0.0, 0.0, 1};
  std::vector<double> t{100.0};
};

struct Tolerances {
  double quadrature = 1e-9;
  double solver = 1e-8;
  double reality = 1e-8;
  double edge = 1e-12;
};

struct Outputs {
  std::string csv = "out.csv";
  std::string summary = "summary.json";
  std::string plots = "plots";
  std::string cache_dir = "cache";
};

struct ProfileSpec {
  std::string kind = "constant";
  double a2 = 0.0, a0 = 1.0;       // quadratic
  double b2 = 1.0;                 // constant
  std::vector<double> s, c;        // tabulated
  int spline_order = 3;
  double delta = 1.0;
  double epsilon = 0.5;
  std::optional<Interval> working_range;

  [[nodiscard]] AmplitudeProfile build() const;
};

struct Scenario {
  std::string name = "scenario";
  ProfileSpec profile;
  RoofMode roof_mode = RoofMode::max_consistent;
  std::optional<Interval> p_range;  // empty: chosen from the moment ladder
  MeasureSpec measure;
  MomentCondition moment = MomentCondition::exponential;
  int weak_alpha = 4;
  Grid grid;
  double M = 3.0;
  PhaseNormalization normalization = PhaseNormalization::general;
  Tolerances tol;
  std::size_t n_nodes = 96;
  std::size_t panel_order = 16;
  std::size_t max_nodes = 768;
  Steps fd_steps;
  int residual_checks = 0;  // JE residuals per (y, t) slice, at the grid points nearest the peak
  Outputs outputs;
  std::vector<FieldPath> paths{FieldPath::marchenko};

  [[nodiscard]] bool wants(FieldPath p) const;
  [[nodiscard]] MarchenkoOptions marchenko_options() const;
  [[nodiscard]] KernelOptions kernel_options() const;
};

nlohmann::json to_json(const Scenario& sc);
Scenario scenario_from_json(const nlohmann::json& j);

/// Canonical hex digest of the scenario content (FNV-1a over the canonical dump).
std::string scenario_hash(const Scenario& sc);

std::vector<std::string> builtin_names();
/// Throws ValidationError for an unknown name.
Scenario builtin_scenario(const std::string& name);

/// A readable file path, or the name of a built-in scenario.
Scenario load_scenario(const std::string& path_or_name);

/// Everything the run needs once the scenario has been checked.
struct PreparedScenario {
  Scenario scenario;
  SpectralDomain domain;
  ConditionsReport report;
};

/// Checks the grid and path invariants (ValidationError) and evaluates the
/// measure conditions. The report is returned whether or not it passes.
PreparedScenario prepare(const Scenario& sc);

}  // namespace jlab
