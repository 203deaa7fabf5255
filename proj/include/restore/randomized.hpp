#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "restore/bounds.hpp"
#include "restore/grid.hpp"
#include "restore/plan.hpp"
#include "restore/restoration.hpp"
#include "restore/util.hpp"

namespace restore {

// Grows islands from the BS buses: every round draws a fresh uniform weight
// for each (unassigned bus, island) pair where the island already touches the
// bus, and attaches the argmax pair. Terminates with a full connected
// partition. Ties (possible with finite precision) break toward the lowest
// bus, then the lowest BS bus.
SectionalizingPlan random_sectionalizing_plan(const Instance& instance,
                                              Rng& rng);

struct PlanEvaluation {
  bool feasible = false;
  int rt = 0;
  std::optional<int> bottleneck;  // first island attaining rt (or failing)
  std::map<int, Schedule> schedules;
  std::map<int, int> island_rt;
  std::string message;
};

// Per-island startup solve at the given horizon; stops at the first
// infeasible island. Island solves receive the remaining deadline budget as
// their time limit; running out of budget reports the plan as not evaluated
// (infeasible result with a TimedOut message).
PlanEvaluation evaluate_plan(const Instance& instance,
                             const SectionalizingPlan& plan, int horizon,
                             milp::Backend& backend,
                             const ModelOptions& options = {},
                             const Deadline& deadline = {});

struct RunResult {
  int run_index = 0;
  std::uint64_t seed = 0;
  bool found_feasible = false;
  int attempts = 0;
  std::optional<double> time_to_feasible_sec;
  std::optional<int> initial_rt;
  std::optional<int> final_rt;
  bool improved_by_ls = false;
  SectionalizingPlan initial_plan;
  SectionalizingPlan final_plan;
  std::map<int, Schedule> final_schedules;
  std::map<int, int> final_island_rt;
};

struct RunConfig {
  int horizon = 1;
  int max_attempts = 1000;        // plan draws per run without a deadline
  std::optional<double> deadline_sec;  // per-run wall budget
  ModelOptions options;
};

// Draws plans until one is feasible (or the attempt/deadline budget runs
// out), then improves it by local search for the rest of the budget.
RunResult run_once(const Instance& instance, std::uint64_t seed,
                   const RunConfig& config, milp::Backend& backend);

struct OrchestrationResult {
  std::vector<RunResult> runs;
  std::optional<int> best_run_index;  // feasible run with the lowest final rt
  int n_feasible = 0;
};

// Independent runs seeded base_seed + i over the shared immutable instance.
// `jobs` > 1 executes runs on worker threads; results are identical to the
// sequential order because runs share nothing but the instance.
OrchestrationResult orchestrate(const Instance& instance, int n_runs,
                                std::uint64_t base_seed,
                                const RunConfig& config,
                                const std::string& backend_selector,
                                int jobs = 1);

}  // namespace restore
