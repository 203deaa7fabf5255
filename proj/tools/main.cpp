#include <atomic>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "restore/bounds.hpp"
#include "restore/instance_io.hpp"
#include "restore/randomized.hpp"
#include "restore/report.hpp"
#include "restore/restoration.hpp"
#include "restore/sequencing.hpp"

// Exit codes: 0 success, 1 domain failure (infeasible model, invalid
// instance), 2 usage or I/O error.

namespace {

constexpr int kOk = 0;
constexpr int kDomainFailure = 1;
constexpr int kUsageError = 2;

using namespace restore;

struct CommonFlags {
  std::string backend = "reference";
  std::string timings = "none";
  bool critical_windows = false;
  std::optional<double> balance_mw;

  ModelOptions options() const {
    ModelOptions opt;
    opt.critical_windows = critical_windows;
    opt.balance_limit_mw = balance_mw;
    return opt;
  }
  bool wall_timings() const { return timings == "wall"; }
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--backend", flags.backend, "MILP backend")
      ->check(CLI::IsMember({"reference", "external"}))
      ->capture_default_str();
  cmd->add_option("--timings", flags.timings,
                  "wall timings in emitted files break byte reproducibility")
      ->check(CLI::IsMember({"none", "wall"}))
      ->capture_default_str();
  cmd->add_flag("--critical-windows", flags.critical_windows,
                "enforce earliest/latest start windows from the instance");
  cmd->add_option("--balance-mw", flags.balance_mw,
                  "enforce per-island net generation within +/- this limit");
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write file: " + path);
  out << content;
}

void emit(const std::optional<std::string>& path, const std::string& content) {
  if (path)
    write_text(*path, content);
  else
    std::cout << content;
}

Instance load_or_die(const std::string& path) {
  return load_instance_file(path);
}

void warn_unused_options(const Instance& instance, const CommonFlags& flags) {
  if (flags.critical_windows && instance.windows.empty())
    std::cerr << "warning: --critical-windows given but the instance has no "
                 "critical_windows\n";
  if (flags.balance_mw &&
      (!instance.balance || instance.balance->net_mw.empty()))
    std::cerr << "warning: --balance-mw given but the instance has no "
                 "balance net_mw data\n";
}

// Aggregated lower bound with horizon doubling; nullopt when infeasible even
// at the cap. Throws on backend failures (including a spent deadline).
std::optional<int> aggregate_with_growth(const Instance& instance, int t0,
                                         milp::Backend& backend,
                                         const ModelOptions& options,
                                         int max_horizon, int* used_horizon,
                                         const Deadline& deadline = {}) {
  int horizon = std::max(1, t0);
  while (horizon <= max_horizon) {
    const auto island = make_aggregate_island(instance, horizon, options);
    milp::SolveOptions solve_options;
    if (auto remaining = deadline.remaining_sec())
      solve_options.time_limit_sec = remaining;
    const auto result = solve_startup(island, backend, solve_options);
    // Only a proven optimum is a valid bound; an unproven incumbent from a
    // time-limited solve is not.
    if (result.status == milp::SolveStatus::Optimal && result.schedule) {
      if (used_horizon) *used_horizon = horizon;
      return result.schedule->rt;
    }
    if (result.status != milp::SolveStatus::Infeasible)
      throw ParseError("aggregate bound not proven: " +
                       milp::to_string(result.status) +
                       (result.message.empty() ? "" : " " + result.message));
    horizon *= 2;
  }
  return std::nullopt;
}

int cmd_validate(const std::string& instance_path) {
  const Instance instance = parse_instance_file(instance_path);
  const auto report = validate_instance(instance);
  for (const auto& warning : report.warnings)
    std::cout << "warning: " << warning << "\n";
  if (!report.ok()) {
    for (const auto& violation : report.violations)
      std::cout << "violation: " << violation << "\n";
    return kDomainFailure;
  }
  std::cout << "ok: " << instance.name << " (" << instance.buses.size()
            << " buses, " << instance.lines.size() << " lines, "
            << instance.bs.size() << " BS, " << instance.nbs.size()
            << " NBS, " << instance.critical_loads.size()
            << " critical loads)\n";
  return kOk;
}

int cmd_gss(const std::string& instance_path, int horizon,
            const CommonFlags& flags, const std::optional<std::string>& out) {
  const Instance instance = load_or_die(instance_path);
  warn_unused_options(instance, flags);
  const auto bs_nodes = instance.bs_nodes();
  if (bs_nodes.size() != 1) {
    std::cerr << "gss needs exactly one BS bus; instance has "
              << bs_nodes.size() << "\n";
    return kDomainFailure;
  }
  const auto island = make_island(instance, bs_nodes.front(), instance.buses,
                                  horizon, flags.options());
  const auto backend = milp::make_backend(flags.backend);
  const auto result = solve_startup(island, *backend);
  if (!result.schedule) {
    std::cout << "status=" << milp::to_string(result.status) << "\n";
    if (!result.message.empty()) std::cerr << result.message << "\n";
    return result.status == milp::SolveStatus::Infeasible ? kDomainFailure
                                                          : kUsageError;
  }
  emit(out, schedule_to_json(island, *result.schedule));
  std::cout << "status=" << milp::to_string(result.status)
            << " rt=" << result.schedule->rt << "\n";
  return kOk;
}

int cmd_solve(const std::string& instance_path, const std::string& mode,
              int t0, std::optional<double> deadline_sec, std::uint64_t seed,
              int runs, int jobs, int max_horizon, const CommonFlags& flags,
              const std::optional<std::string>& out,
              const std::optional<std::string>& log_path) {
  const Instance instance = load_or_die(instance_path);
  warn_unused_options(instance, flags);
  const auto options = flags.options();
  const auto backend = milp::make_backend(flags.backend);
  BoundLog lower_log(flags.wall_timings());
  std::vector<BoundEvent> upper_log_rows;
  const Deadline deadline = deadline_sec
                                ? Deadline::after_seconds(*deadline_sec)
                                : Deadline::none();

  // The aggregate bound is the entry ticket for both tracks; the wall-clock
  // budget governs the tracks themselves.
  int aggregate_horizon = 0;
  const auto t_low = aggregate_with_growth(instance, t0, *backend, options,
                                           max_horizon, &aggregate_horizon);
  if (!t_low) {
    std::cerr << "aggregated system is infeasible for every horizon up to "
              << max_horizon << "; no restoration plan exists\n";
    return kDomainFailure;
  }
  lower_log.add("lower", "aggregate", *t_low);

  std::optional<PpsrSolution> best;
  int lower_bound = *t_low;
  bool complete = false;

  if (mode == "exact") {
    const auto scan = lower_bound_scan(instance, *backend, *t_low, options,
                                       deadline, max_horizon, &lower_log);
    lower_bound = scan.lower_bound;
    best = scan.solution;
    complete = scan.stop == ScanStop::Optimal;
  } else {
    // bounds mode: upper track (seeded pipeline iterations), then raise the
    // lower bound with the remaining budget until it meets the upper bound.
    // The shared log records only global incumbent improvements, tagged with
    // the seed of the iteration that produced them.
    auto run_upper = [&]() {
      for (int i = 0; i < runs; ++i) {
        if (deadline.expired()) break;
        const auto run_seed = seed + static_cast<std::uint64_t>(i);
        Rng rng(run_seed);
        BoundLog iteration_log(flags.wall_timings());
        const auto pipeline =
            upper_bound_pipeline(instance, *t_low, *backend, rng, options,
                                 deadline, &iteration_log, max_horizon);
        int incumbent = best ? best->rt : std::numeric_limits<int>::max();
        for (const auto& row : iteration_log.rows()) {
          if (row.value < incumbent) {
            incumbent = static_cast<int>(row.value);
            BoundEvent tagged = row;
            tagged.event += "(seed=" + std::to_string(run_seed) + ")";
            upper_log_rows.push_back(std::move(tagged));
          }
        }
        if (pipeline.best && (!best || pipeline.best->rt < best->rt))
          best = pipeline.best;
      }
    };
    if (jobs > 1) {
      // the two tracks run side by side; each owns its backend handle
      std::optional<PpsrSolution> scan_solution;
      int scan_lb = lower_bound;
      std::thread lower_thread([&]() {
        const auto scan_backend = milp::make_backend(flags.backend);
        const auto scan =
            lower_bound_scan(instance, *scan_backend, *t_low, options,
                             deadline, max_horizon, &lower_log);
        scan_lb = scan.lower_bound;
        scan_solution = scan.solution;
      });
      run_upper();
      lower_thread.join();
      lower_bound = scan_lb;
      if (scan_solution && (!best || scan_solution->rt < best->rt))
        best = scan_solution;
    } else {
      run_upper();
      while (!deadline.expired() && best && lower_bound < best->rt) {
        milp::SolveOptions probe_options;
        if (auto remaining = deadline.remaining_sec())
          probe_options.time_limit_sec = remaining;
        const auto probe = solve_ppsr(instance, lower_bound, *backend, options,
                                      nullptr, probe_options);
        if (probe.status == milp::SolveStatus::Infeasible) {
          ++lower_bound;
          lower_log.add("lower", "probe_infeasible", lower_bound);
        } else if (probe.solution) {
          lower_log.add("lower", "optimal", lower_bound);
          if (probe.solution->rt < best->rt) best = probe.solution;
          break;
        } else {
          break;  // out of budget
        }
      }
    }
    complete = best && lower_bound >= best->rt;
  }

  if (log_path) {
    std::vector<BoundEvent> rows = lower_log.rows();
    rows.insert(rows.end(), upper_log_rows.begin(), upper_log_rows.end());
    std::ostringstream csv;
    write_bound_log_csv(rows, csv);
    write_text(*log_path, csv.str());
  }

  if (best) {
    if (out)
      write_text(*out, plan_to_json(instance, best->plan, best->schedules,
                                    best->island_rt, best->rt,
                                    best->bottleneck));
    std::cout << "lower_bound=" << lower_bound << " upper_bound=" << best->rt
              << " gap=" << best->rt - lower_bound
              << (complete ? " optimal" : "") << "\n";
    return kOk;
  }
  std::cout << "lower_bound=" << lower_bound << " upper_bound=none\n";
  return kDomainFailure;
}

int cmd_randomized(const std::string& instance_path, int horizon, int runs,
                   std::optional<double> deadline_sec, std::uint64_t seed,
                   int jobs, int max_attempts, const CommonFlags& flags,
                   const std::optional<std::string>& out,
                   const std::optional<std::string>& log_path) {
  const Instance instance = load_or_die(instance_path);
  warn_unused_options(instance, flags);
  RunConfig config;
  config.horizon = horizon;
  config.max_attempts = max_attempts;
  config.deadline_sec = deadline_sec;
  config.options = flags.options();

  const auto result =
      orchestrate(instance, runs, seed, config, flags.backend, jobs);

  std::vector<RunRow> rows;
  double time_sum = 0.0;
  int timed = 0;
  for (const auto& run : result.runs) {
    RunRow row;
    row.run_index = run.run_index;
    row.seed = run.seed;
    row.feasible = run.found_feasible;
    row.time_to_feasible_sec = run.time_to_feasible_sec;
    row.initial_rt = run.initial_rt;
    row.final_rt = run.final_rt;
    row.ls_improved = run.improved_by_ls;
    rows.push_back(row);
    if (run.time_to_feasible_sec) {
      time_sum += *run.time_to_feasible_sec;
      ++timed;
    }
  }
  if (log_path) {
    std::ostringstream csv;
    write_run_report_csv(rows, flags.wall_timings(), csv);
    write_text(*log_path, csv.str());
  }

  // The aggregate bound is auxiliary here; give it one run's budget at most
  // so a hard aggregate cannot block the report.
  const auto backend = milp::make_backend(flags.backend);
  std::optional<int> lower;
  bool lower_known = true;
  try {
    const Deadline aggregate_budget =
        deadline_sec ? Deadline::after_seconds(*deadline_sec)
                     : Deadline::none();
    lower = aggregate_with_growth(instance, horizon, *backend, flags.options(),
                                  horizon, nullptr, aggregate_budget);
  } catch (const ParseError&) {
    lower_known = false;
  }

  std::ostringstream summary;
  summary << "n_feasible=" << result.n_feasible << "/" << runs;
  if (result.best_run_index) {
    const auto& best =
        result.runs[static_cast<std::size_t>(*result.best_run_index)];
    summary << " upper_bound=" << *best.final_rt;
  } else {
    summary << " upper_bound=none";
  }
  if (!lower_known)
    summary << " lower_bound=unknown";
  else if (lower)
    summary << " lower_bound=" << *lower;
  else
    summary << " lower_bound=>" << horizon;
  if (flags.wall_timings() && timed > 0)
    summary << " mean_time_to_feasible=" << time_sum / timed;
  std::cout << summary.str() << "\n";

  if (!result.best_run_index) {
    std::cerr << "no feasible plan found in " << runs << " runs\n";
    return kDomainFailure;
  }
  if (out) {
    const auto& best =
        result.runs[static_cast<std::size_t>(*result.best_run_index)];
    int rt = *best.final_rt;
    std::vector<int> bottleneck;
    for (const auto& [bs, island_rt] : best.final_island_rt)
      if (rt > 0 && island_rt == rt) bottleneck.push_back(bs);
    write_text(*out,
               plan_to_json(instance, best.final_plan, best.final_schedules,
                            best.final_island_rt, rt, bottleneck));
  }
  return kOk;
}

int cmd_gen(const std::string& case_path, const std::string& template_path,
            int bs_count, std::uint64_t seed,
            const std::optional<std::string>& out) {
  const auto topology = import_topology_file(case_path);
  for (const auto& warning : topology.warnings)
    std::cerr << "warning: " << warning << "\n";
  const auto tmpl = load_template_file(template_path);
  const Instance instance = generate_instance(topology, tmpl, bs_count, seed);
  const auto report = validate_instance(instance);
  if (!report.ok()) {
    for (const auto& violation : report.violations)
      std::cerr << "violation: " << violation << "\n";
    return kDomainFailure;
  }
  emit(out, instance_to_json(instance));
  return kOk;
}

int cmd_report(const std::string& log_path,
               const std::optional<std::string>& out) {
  std::ifstream in(log_path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + log_path);
  const auto rows = read_bound_log_csv(in);
  std::ostringstream csv;
  try {
    write_tidy_bounds_csv(rows, csv);
  } catch (const std::runtime_error& error) {
    std::cerr << "inconsistent bound log: " << error.what() << "\n";
    return kDomainFailure;
  }
  emit(out, csv.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"power system restoration planning toolkit"};
  app.require_subcommand(1);

  std::string instance_path, case_path, template_path, mode = "exact";
  std::optional<std::string> out_path, log_path;
  int horizon = 60;
  int runs = 8;
  int jobs = 1;
  int bs_count = 1;
  int max_attempts = 1000;
  int max_horizon = 4096;
  std::uint64_t seed = 0;
  std::optional<double> deadline_sec;
  CommonFlags flags;

  auto* validate = app.add_subcommand("validate", "check instance invariants");
  validate->add_option("instance", instance_path)->required();

  auto* gss = app.add_subcommand(
      "gss", "startup sequencing on a single-BS instance");
  gss->add_option("instance", instance_path)->required();
  gss->add_option("--horizon", horizon, "periods")->required();
  gss->add_option("--out", out_path, "schedule file");
  add_common_flags(gss, flags);

  auto* solve = app.add_subcommand(
      "solve", "sectionalize and schedule (exact or bounds)");
  solve->add_option("instance", instance_path)->required();
  solve->add_option("--mode", mode)->check(CLI::IsMember({"exact", "bounds"}));
  solve->add_option("--horizon", horizon,
                    "initial horizon for the aggregate bound")
      ->capture_default_str();
  solve->add_option("--max-horizon", max_horizon)->capture_default_str();
  solve->add_option("--deadline-sec", deadline_sec);
  solve->add_option("--seed", seed)->capture_default_str();
  solve->add_option("--runs", runs, "upper-bound iterations (bounds mode)")
      ->capture_default_str();
  solve->add_option("--jobs", jobs)->capture_default_str();
  solve->add_option("--out", out_path, "plan file");
  solve->add_option("--log", log_path, "bound-evolution CSV");
  add_common_flags(solve, flags);

  auto* randomized = app.add_subcommand(
      "randomized", "multi-start randomized sectionalizing");
  randomized->add_option("instance", instance_path)->required();
  randomized->add_option("--horizon", horizon, "periods")->required();
  randomized->add_option("--runs", runs)->capture_default_str();
  randomized->add_option("--deadline-sec", deadline_sec, "per-run budget");
  randomized->add_option("--seed", seed)->capture_default_str();
  randomized->add_option("--jobs", jobs)->capture_default_str();
  randomized->add_option("--max-attempts", max_attempts)
      ->capture_default_str();
  randomized->add_option("--out", out_path, "best plan file");
  randomized->add_option("--log", log_path, "run report CSV");
  add_common_flags(randomized, flags);

  auto* gen = app.add_subcommand("gen", "synthesize an instance");
  gen->add_option("--case", case_path, "matrix-case topology file")->required();
  gen->add_option("--template", template_path, "generator template file")
      ->required();
  gen->add_option("--bs-count", bs_count)->required();
  gen->add_option("--seed", seed)->capture_default_str();
  gen->add_option("--out", out_path, "instance file");

  auto* report = app.add_subcommand("report", "tidy a bound log for plotting");
  report->add_option("--log", log_path, "bound-evolution CSV")->required();
  report->add_option("--out", out_path, "tidy CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(instance_path);
    if (gss->parsed()) return cmd_gss(instance_path, horizon, flags, out_path);
    if (solve->parsed())
      return cmd_solve(instance_path, mode, horizon, deadline_sec, seed, runs,
                       jobs, max_horizon, flags, out_path, log_path);
    if (randomized->parsed())
      return cmd_randomized(instance_path, horizon, runs, deadline_sec, seed,
                            jobs, max_attempts, flags, out_path, log_path);
    if (gen->parsed())
      return cmd_gen(case_path, template_path, bs_count, seed, out_path);
    if (report->parsed()) return cmd_report(*log_path, out_path);
  } catch (const ValidationError& error) {
    std::cerr << "invalid instance: " << error.what() << "\n";
    return kDomainFailure;
  } catch (const ParseError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kUsageError;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}
