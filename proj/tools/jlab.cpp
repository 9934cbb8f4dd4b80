// jlab: scenario runner for the Johnson-equation lab.
//
//   jlab validate <scenario>
//   jlab run <scenario> [--out-dir DIR] [--workers N] [--cache-dir DIR] [--no-cache] [--no-plots]
//   jlab compare <scenario> [same options as run]
//   jlab dump-builtin <name>
//
// <scenario> is a JSON file or the name of a built-in. Exit codes: 0 success,
// 2 validation failure, 3 numeric failure.

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "jlab/runner.hpp"
#include "jlab/scenario.hpp"

namespace {

constexpr int kValidationFailure = 2;
constexpr int kNumericFailure = 3;

struct RunArgs {
  std::string scenario;
  std::string out_dir = ".";
  unsigned workers = 0;
  std::string cache_dir;
  bool no_cache = false;
  bool no_plots = false;
  bool quiet = false;
};

void add_run_options(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("scenario", a.scenario, "scenario file or built-in name")->required();
  cmd->add_option("-o,--out-dir", a.out_dir, "directory for CSV, summary and plots");
  cmd->add_option("-j,--workers", a.workers, "worker threads (default: all cores)");
  cmd->add_option("--cache-dir", a.cache_dir, "cache directory (overrides JLAB_CACHE_DIR)");
  cmd->add_flag("--no-cache", a.no_cache, "disable the kernel cache");
  cmd->add_flag("--no-plots", a.no_plots, "skip SVG output");
  cmd->add_flag("-q,--quiet", a.quiet, "suppress progress messages");
}

jlab::RunOptions run_options(const RunArgs& a) {
  jlab::RunOptions o;
  o.out_dir = a.out_dir;
  o.workers = a.workers;
  if (!a.cache_dir.empty()) o.cache_dir = a.cache_dir;
  o.use_cache = !a.no_cache;
  o.plots = !a.no_plots;
  const bool quiet = a.quiet;
  o.log = [quiet](const std::string& msg) {
    if (!quiet || msg.rfind("warning", 0) == 0) std::cerr << msg << '\n';
  };
  return o;
}

jlab::PreparedScenario prepare_checked(const std::string& name) {
  jlab::PreparedScenario ps = jlab::prepare(jlab::load_scenario(name));
  if (!ps.report.ok()) throw jlab::ValidationError("conditions not satisfied:\n" + ps.report.to_text());
  return ps;
}

int do_run(const RunArgs& a, bool compare) {
  const jlab::PreparedScenario ps = prepare_checked(a.scenario);
  const jlab::RunOptions opts = run_options(a);
  const jlab::RunRecord rec = jlab::run(ps, opts);
  jlab::write_outputs(rec, ps.scenario, opts);
  if (compare) std::cout << jlab::compare_report(rec, ps);
  else
    std::cout << ps.scenario.name << ": " << rec.rows.size() << " rows, " << rec.failed_rows()
              << " failed, " << rec.flagged_rows() << " flagged, kernel "
              << rec.timing.kernel_seconds << " s, total " << rec.timing.total_seconds << " s\n";
  return rec.failed_rows() > 0 ? kNumericFailure : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Johnson-equation lab: Marchenko fields and asymptotic soliton trains"};
  app.require_subcommand(1);

  std::string validate_name;
  auto* validate = app.add_subcommand("validate", "check a scenario and print the conditions report");
  validate->add_option("scenario", validate_name, "scenario file or built-in name")->required();

  RunArgs run_args, compare_args;
  auto* run = app.add_subcommand("run", "evaluate every requested path on the grid");
  add_run_options(run, run_args);
  auto* compare = app.add_subcommand("compare", "run, then print the train vs numeric summary");
  add_run_options(compare, compare_args);

  std::string dump_name;
  auto* dump = app.add_subcommand("dump-builtin", "print a built-in scenario as JSON");
  dump->add_option("name", dump_name, "example1, example2 or example3")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      const jlab::PreparedScenario ps = jlab::prepare(jlab::load_scenario(validate_name));
      std::cout << ps.report.to_text();
      return ps.report.ok() ? 0 : kValidationFailure;
    }
    if (*run) return do_run(run_args, false);
    if (*compare) return do_run(compare_args, true);
    if (*dump) {
      std::cout << jlab::to_json(jlab::builtin_scenario(dump_name)).dump(2) << '\n';
      return 0;
    }
  } catch (const jlab::ValidationError& e) {
    std::cerr << "validation failure: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const jlab::Error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
