#include "restore/randomized.hpp"

#include <algorithm>
#include <atomic>
#include <set>
#include <stdexcept>
#include <thread>

namespace restore {

SectionalizingPlan random_sectionalizing_plan(const Instance& instance,
                                              Rng& rng) {
  const auto bs_nodes = instance.bs_nodes();
  if (bs_nodes.empty())
    throw std::invalid_argument("instance has no BS generator");

  const Adjacency adj(instance.buses, instance.lines);
  SectionalizingPlan plan;
  std::map<int, std::set<int>> islands;  // bs -> members
  for (int bs : bs_nodes) {
    plan.assign[bs] = bs;
    islands[bs] = {bs};
  }
  std::set<int> waiting;
  for (int bus : instance.buses)
    if (!instance.bs.count(bus)) waiting.insert(bus);

  while (!waiting.empty()) {
    // Fresh weights each round for every adjacent (bus, island) pair.
    int best_bus = -1, best_bs = -1;
    double best_weight = -1.0;
    for (int bus : waiting) {
      for (int bs : bs_nodes) {
        bool adjacent = false;
        for (int neighbor : adj.neighbors(bus)) {
          if (islands[bs].count(neighbor)) {
            adjacent = true;
            break;
          }
        }
        if (!adjacent) continue;
        const double weight = rng.uniform01();
        if (weight > best_weight) {
          best_weight = weight;
          best_bus = bus;
          best_bs = bs;
        }
      }
    }
    if (best_bus < 0)
      throw std::invalid_argument("graph is disconnected");
    plan.assign[best_bus] = best_bs;
    islands[best_bs].insert(best_bus);
    waiting.erase(best_bus);
  }
  return plan;
}

PlanEvaluation evaluate_plan(const Instance& instance,
                             const SectionalizingPlan& plan, int horizon,
                             milp::Backend& backend,
                             const ModelOptions& options,
                             const Deadline& deadline) {
  PlanEvaluation eval;
  eval.feasible = true;
  for (const auto& [bs, members] : plan.islands(instance)) {
    const auto island = make_island(instance, bs, members, horizon, options);
    if (island.units.empty()) {
      eval.schedules[bs] = Schedule{};
      eval.island_rt[bs] = 0;
      continue;
    }
    milp::SolveOptions solve_options;
    if (auto remaining = deadline.remaining_sec())
      solve_options.time_limit_sec = remaining;
    const auto result = solve_startup(island, backend, solve_options);
    if (!result.schedule) {
      eval.feasible = false;
      eval.bottleneck = bs;
      eval.message = to_string(result.status);
      eval.rt = 0;
      return eval;  // stop at the first failing island
    }
    eval.schedules[bs] = *result.schedule;
    eval.island_rt[bs] = result.schedule->rt;
    if (result.schedule->rt > eval.rt) {
      eval.rt = result.schedule->rt;
      eval.bottleneck = bs;
    }
  }
  return eval;
}

RunResult run_once(const Instance& instance, std::uint64_t seed,
                   const RunConfig& config, milp::Backend& backend) {
  RunResult result;
  result.seed = seed;
  Rng rng(seed);
  const Deadline deadline = config.deadline_sec
                                ? Deadline::after_seconds(*config.deadline_sec)
                                : Deadline::none();
  Stopwatch watch;

  SectionalizingPlan plan;
  PlanEvaluation eval;
  while (result.attempts < config.max_attempts && !deadline.expired()) {
    ++result.attempts;
    plan = random_sectionalizing_plan(instance, rng);
    eval = evaluate_plan(instance, plan, config.horizon, backend,
                         config.options, deadline);
    if (eval.feasible) {
      result.found_feasible = true;
      break;
    }
  }
  if (!result.found_feasible) return result;

  result.time_to_feasible_sec = watch.elapsed_sec();
  result.initial_rt = eval.rt;
  result.initial_plan = plan;

  const auto ls = local_search(instance, plan, eval.rt, backend,
                               config.options, deadline, nullptr);
  result.final_rt = ls.rt;
  result.final_plan = ls.plan;
  result.final_schedules = ls.schedules;
  result.final_island_rt = ls.island_rt;
  result.improved_by_ls = ls.rt < eval.rt;
  return result;
}

OrchestrationResult orchestrate(const Instance& instance, int n_runs,
                                std::uint64_t base_seed,
                                const RunConfig& config,
                                const std::string& backend_selector,
                                int jobs) {
  if (n_runs < 1) throw std::invalid_argument("n_runs must be >= 1");
  OrchestrationResult result;
  result.runs.resize(static_cast<std::size_t>(n_runs));

  auto work = [&](int index) {
    const auto backend = milp::make_backend(backend_selector);
    result.runs[static_cast<std::size_t>(index)] =
        run_once(instance, base_seed + static_cast<std::uint64_t>(index),
                 config, *backend);
    result.runs[static_cast<std::size_t>(index)].run_index = index;
  };

  if (jobs <= 1) {
    for (int i = 0; i < n_runs; ++i) work(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    const int n_workers = std::min(jobs, n_runs);
    workers.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) {
      workers.emplace_back([&]() {
        for (int i = next.fetch_add(1); i < n_runs; i = next.fetch_add(1))
          work(i);
      });
    }
    for (auto& worker : workers) worker.join();
  }

  for (int i = 0; i < n_runs; ++i) {
    const RunResult& run = result.runs[static_cast<std::size_t>(i)];
    if (!run.found_feasible) continue;
    ++result.n_feasible;
    if (!result.best_run_index ||
        *run.final_rt <
            *result.runs[static_cast<std::size_t>(*result.best_run_index)]
                 .final_rt)
      result.best_run_index = i;
  }
  return result;
}

}  // namespace restore
