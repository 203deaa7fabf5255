#include "restore/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace restore {

namespace {

struct DisjointSets {
  std::map<int, int> parent;
  int find(int a) {
    auto it = parent.find(a);
    if (it == parent.end()) {
      parent[a] = a;
      return a;
    }
    while (it->second != a) {
      a = it->second;
      it = parent.find(a);
    }
    return a;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

}  // namespace

SpanningTree random_spanning_tree(const std::vector<int>& buses,
                                  const std::vector<Line>& lines, Rng& rng) {
  std::vector<std::pair<double, std::size_t>> weighted(lines.size());
  for (std::size_t l = 0; l < lines.size(); ++l)
    weighted[l] = {rng.uniform01(), l};
  std::sort(weighted.begin(), weighted.end());

  SpanningTree tree;
  DisjointSets sets;
  for (const auto& [weight, l] : weighted) {
    if (sets.unite(lines[l].u, lines[l].v)) tree.edges.push_back(lines[l]);
  }
  if (tree.edges.size() + 1 != buses.size())
    throw std::invalid_argument("graph is disconnected");
  std::sort(tree.edges.begin(), tree.edges.end());

  tree.root = *std::min_element(buses.begin(), buses.end());
  const Adjacency adj(buses, tree.edges);
  const std::set<int> all(buses.begin(), buses.end());
  tree.parent = bfs_tree(adj, tree.root, all);
  return tree;
}

namespace {

// GSS re-solve for one island at the given horizon; throws when the island
// cannot be scheduled (the local-search precondition).
std::pair<int, Schedule> island_schedule(const Instance& instance, int bs,
                                         const std::vector<int>& members,
                                         int horizon, milp::Backend& backend,
                                         const ModelOptions& options) {
  const auto island =
      make_island(instance, bs, members, std::max(1, horizon), options);
  if (island.units.empty()) return {0, Schedule{}};
  const auto result = solve_startup(island, backend);
  if (!result.schedule)
    throw std::invalid_argument("island " + std::to_string(bs) +
                                " is not schedulable within " +
                                std::to_string(horizon) + " periods");
  return {result.schedule->rt, *result.schedule};
}

int max_island_rt(const std::map<int, int>& island_rt) {
  int rt = 0;
  for (const auto& [bs, value] : island_rt) rt = std::max(rt, value);
  return rt;
}

}  // namespace

LocalSearchResult local_search(const Instance& instance,
                               const SectionalizingPlan& plan0, int rt0,
                               milp::Backend& backend,
                               const ModelOptions& options, Deadline deadline,
                               BoundLog* log) {
  LocalSearchResult state;
  state.plan = plan0;

  auto islands = state.plan.islands(instance);
  for (const auto& [bs, members] : islands) {
    auto [rt, schedule] =
        island_schedule(instance, bs, members, rt0, backend, options);
    state.island_rt[bs] = rt;
    state.schedules[bs] = std::move(schedule);
  }
  state.rt = max_island_rt(state.island_rt);

  const Adjacency adj(instance.buses, instance.lines);
  bool improved = true;
  while (improved) {
    ++state.outer_iterations;
    improved = false;

    // bottleneck island; ties broken toward the lowest BS bus
    int j_max = -1, rt_max = -1;
    for (const auto& [bs, rt] : state.island_rt) {
      if (rt > rt_max) {
        rt_max = rt;
        j_max = bs;
      }
    }
    if (rt_max <= 0) break;  // nothing to improve

    // candidates ascending by restoration time, then BS bus
    std::vector<std::pair<int, int>> order;  // (rt, bs)
    for (const auto& [bs, rt] : state.island_rt)
      if (bs != j_max) order.push_back({rt, bs});
    std::sort(order.begin(), order.end());

    for (const auto& [rt_small, j_small] : order) {
      if (deadline.expired()) {
        state.hit_deadline = true;
        return state;
      }
      std::set<int> merged(islands[j_max].begin(), islands[j_max].end());
      merged.insert(islands[j_small].begin(), islands[j_small].end());
      if (!is_connected_subset(adj, merged)) continue;

      const auto sub = induced_subinstance(instance, merged);
      WarmStart warm;
      for (int bus : islands[j_max]) warm.plan.assign[bus] = j_max;
      for (int bus : islands[j_small]) warm.plan.assign[bus] = j_small;
      warm.schedules[j_max] = state.schedules[j_max];
      warm.schedules[j_small] = state.schedules[j_small];
      warm.rt = rt_max;

      milp::SolveOptions solve_options;
      if (auto remaining = deadline.remaining_sec())
        solve_options.time_limit_sec = remaining;
      const auto pair_result =
          solve_ppsr(sub, rt_max, backend, options, &warm, solve_options);
      if (!pair_result.solution) continue;
      const auto& two = *pair_result.solution;
      if (two.rt >= rt_max) continue;

      // accept: rewrite the two islands
      for (int bus : islands[j_max])
        if (bus != j_max) state.plan.assign.erase(bus);
      for (int bus : islands[j_small])
        if (bus != j_small) state.plan.assign.erase(bus);
      for (const auto& [bus, bs] : two.plan.assign) state.plan.assign[bus] = bs;

      islands = state.plan.islands(instance);
      for (int bs : {j_max, j_small}) {
        state.island_rt[bs] = two.island_rt.count(bs) ? two.island_rt.at(bs) : 0;
        state.schedules[bs] = two.schedules.count(bs) ? two.schedules.at(bs)
                                                      : Schedule{};
      }
      improved = true;
      const int global_rt = max_island_rt(state.island_rt);
      if (global_rt < state.rt && log)
        log->add("upper", "local_search", global_rt);
      state.rt = global_rt;
      break;
    }
  }

  state.rt = max_island_rt(state.island_rt);
  return state;
}

ReducedGraph reduced_subgraph(const Instance& instance,
                              const SectionalizingPlan& plan) {
  const Adjacency adj(instance.buses, instance.lines);
  std::set<Line> kept;

  for (const auto& [bs, members] : plan.islands(instance)) {
    const std::set<int> member_set(members.begin(), members.end());
    const auto parent = bfs_tree(adj, bs, member_set);
    for (const auto& [node, par] : parent) {
      if (node == par) continue;
      kept.insert({std::min(node, par), std::max(node, par)});
    }
  }

  // every edge not interior to one island (cut edges, plus edges touching
  // unassigned buses, which keep the reduced graph connected)
  for (const Line& line : instance.lines) {
    const auto a = plan.island_of(line.u);
    const auto b = plan.island_of(line.v);
    const bool interior = a && b && *a == *b;
    if (!interior) kept.insert(line);
  }

  ReducedGraph out;
  out.buses = instance.buses;
  out.lines.assign(kept.begin(), kept.end());
  return out;
}

PipelineResult upper_bound_pipeline(const Instance& instance, int t_low,
                                    milp::Backend& backend, Rng& rng,
                                    const ModelOptions& options,
                                    Deadline deadline, BoundLog* log,
                                    int max_horizon) {
  PipelineResult result;
  if (t_low < 1) throw std::invalid_argument("t_low must be >= 1");

  const auto tree = random_spanning_tree(instance.buses, instance.lines, rng);

  // Step 1: sectionalize the spanning tree, doubling the horizon until the
  // tree model is feasible. A tree that severed every workable route stays
  // infeasible at any horizon, so the doubling stops well above the typical
  // 2 * t_low rather than at the caller's full scan cap.
  SectionalizingPlan plan0;
  int horizon = 2 * t_low;
  const int doubling_cap = std::min(max_horizon, std::max(16 * t_low, 16));
  bool have_plan = false;
  while (horizon <= doubling_cap) {
    if (deadline.expired()) {
      result.hit_deadline = true;
      return result;
    }
    PartitionModelLayout layout;
    auto model =
        build_tree_partition_model(instance, tree.edges, horizon, options, &layout);
    milp::SolveOptions solve_options;
    if (auto remaining = deadline.remaining_sec())
      solve_options.time_limit_sec = remaining;
    const auto outcome = milp::solve(model, backend, solve_options);
    if (outcome.status == milp::SolveStatus::Infeasible) {
      horizon *= 2;
      continue;
    }
    if (!outcome.has_solution()) {
      result.hit_deadline = true;
      return result;
    }
    plan0 = extract_plan(instance, layout, outcome.values);
    result.tree_horizon = horizon;
    have_plan = true;
    break;
  }
  if (!have_plan) return result;

  // Evaluate the tree plan with per-island schedules.
  std::map<int, Schedule> schedules0;
  std::map<int, int> island_rt0;
  int rt0 = 0;
  for (const auto& [bs, members] : plan0.islands(instance)) {
    auto [rt, schedule] =
        island_schedule(instance, bs, members, horizon, backend, options);
    island_rt0[bs] = rt;
    schedules0[bs] = std::move(schedule);
    rt0 = std::max(rt0, rt);
  }
  if (log) log->add("upper", "spanning_tree", rt0);

  PpsrSolution incumbent;
  incumbent.plan = plan0;
  incumbent.schedules = schedules0;
  incumbent.island_rt = island_rt0;
  incumbent.rt = rt0;
  if (rt0 > 0)
    for (const auto& [bs, rt] : island_rt0)
      if (rt == rt0) incumbent.bottleneck.push_back(bs);
  result.best = incumbent;
  if (deadline.expired()) {
    result.hit_deadline = true;
    return result;
  }

  // Step 2: local search.
  const auto ls =
      local_search(instance, plan0, rt0, backend, options, deadline, log);
  if (ls.rt <= incumbent.rt) {
    incumbent.plan = ls.plan;
    incumbent.schedules = ls.schedules;
    incumbent.island_rt = ls.island_rt;
    incumbent.rt = ls.rt;
    incumbent.bottleneck.clear();
    if (ls.rt > 0)
      for (const auto& [bs, rt] : ls.island_rt)
        if (rt == ls.rt) incumbent.bottleneck.push_back(bs);
    result.best = incumbent;
  }
  if (ls.hit_deadline || deadline.expired()) {
    result.hit_deadline = true;
    return result;
  }

  // Step 3: re-solve on the reduced subgraph, warm-started with the
  // local-search plan.
  const auto reduced = reduced_subgraph(instance, incumbent.plan);
  const auto sub = restrict_lines(instance, reduced.lines);
  WarmStart warm;
  warm.plan = incumbent.plan;
  warm.schedules = incumbent.schedules;
  warm.rt = incumbent.rt;
  milp::SolveOptions solve_options;
  if (auto remaining = deadline.remaining_sec())
    solve_options.time_limit_sec = remaining;
  const auto final_result = solve_ppsr(sub, std::max(1, incumbent.rt), backend,
                                       options, &warm, solve_options);
  if (final_result.solution && final_result.solution->rt <= incumbent.rt) {
    result.best = *final_result.solution;
    if (log) log->add("upper", "reduced_graph", final_result.solution->rt);
  }
  return result;
}

}  // namespace restore
