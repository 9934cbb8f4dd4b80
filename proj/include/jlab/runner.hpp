#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "jlab/scenario.hpp"

namespace jlab {

struct RunOptions {
  std::string out_dir = ".";
  unsigned workers = 0;                  // 0: hardware concurrency
  std::optional<std::string> cache_dir;  // overrides the scenario (and the environment)
  bool use_cache = true;
  bool plots = true;
  std::function<void(const std::string&)> log;  // progress and warnings
};

/// Resolution order: RunOptions::cache_dir, $JLAB_CACHE_DIR, then the
/// scenario's cache_dir taken relative to out_dir.
std::string resolve_cache_dir(const Scenario& sc, const RunOptions& opts);

struct Row {
  double x = 0.0, y = 0.0, t = 0.0;
  FieldPath path = FieldPath::marchenko;
  double v = 0.0;
  double reality_resid = 0.0;
  double quad_err = 0.0;
  double cond_est = 0.0;
  double min_eig = 0.0;
  bool failed = false;
  std::string flag;  // empty when the row respects every tolerance
};

struct Peak {
  double x = 0.0;   // lab frame
  double xi = 0.0;  // x - C t
  double v = 0.0;
};

struct SubdomainStat {
  int n = 0;
  double lo = 0.0, hi = 0.0;  // in x - C t
  int points = 0;
  double sup_train_vs_marchenko = -1.0;  // -1: not available
  double sup_train_vs_logdet = -1.0;
  double sup_logdet_vs_marchenko = -1.0;
};

struct SliceSummary {
  double y = 0.0, t = 0.0;
  double C = 0.0;
  double q0 = 0.0;  // 0 when no asymptotic geometry is available
  std::map<std::string, Peak> leading_peak;
  std::vector<SubdomainStat> subdomains;
  std::vector<std::pair<double, double>> je_residuals;  // (x, residual)
  double truncation_L = 0.0;
  std::size_t solver_nodes = 0;
  std::size_t kernel_nodes = 0;
  std::string cache_state;  // hit, nodes, miss, off
};

struct Timing {
  double kernel_seconds = 0.0;      // kernel quadrature plus Marchenko solves
  double asymptotic_seconds = 0.0;  // closed forms and log-determinants
  double total_seconds = 0.0;
  int cache_hits = 0;
  int cache_misses = 0;
};

struct RunRecord {
  std::string scenario_name;
  std::string hash;
  ConditionsReport report;
  std::vector<Row> rows;  // sorted by (t, y, x, path)
  std::vector<SliceSummary> slices;
  Timing timing;

  [[nodiscard]] std::string csv() const;
  [[nodiscard]] nlohmann::json summary() const;
  [[nodiscard]] std::size_t failed_rows() const;
  [[nodiscard]] std::size_t flagged_rows() const;
};

/// Evaluates every requested path on the grid. Requires prepared.report.ok().
RunRecord run(const PreparedScenario& prepared, const RunOptions& opts = {});

/// CSV, summary JSON and SVG plots under opts.out_dir.
void write_outputs(const RunRecord& rec, const Scenario& sc, const RunOptions& opts);

/// Fitted drift of the leading Marchenko peak against the train's prediction,
/// one entry per swept y with at least two times.
struct FrontFit {
  double y = 0.0;
  double q0 = 0.0;
  double log_coefficient = 0.0;  // fitted d(x_peak - C t)/d ln t
  double expected_coefficient = 0.0;
  double constant = 0.0;         // fitted with the coefficient pinned to the expected one
  std::map<std::string, double> normalization_constants;  // (ln g + ln phi_1) / (2 q0)
};

std::vector<FrontFit> fit_fronts(const RunRecord& rec, const PreparedScenario& prepared);

/// Plain-text train vs numeric report for the compare verb.
std::string compare_report(const RunRecord& rec, const PreparedScenario& prepared);

}  // namespace jlab
