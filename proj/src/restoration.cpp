#include "restore/restoration.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace restore {

namespace {

using milp::Sense;
using milp::Term;
using milp::VarKind;

struct BuildSpec {
  const Instance* instance = nullptr;
  int horizon = 1;
  ModelOptions options;
  std::vector<int> unit_buses;           // the I set carrying s variables
  bool flow = false;                     // add line/flow connectivity
  const std::vector<Line>* tree = nullptr;  // add path rows along this tree
};

NbsParams unit_params(const Instance& instance, int bus, int horizon) {
  if (instance.is_startup_node(bus))
    return instance.startup_params(bus, horizon);
  NbsParams zero;
  zero.ramp_periods = 0;  // transshipment: no crank, no output
  return zero;
}

milp::MilpModel build_partition_model(const BuildSpec& spec,
                                      PartitionModelLayout* layout_out) {
  const Instance& instance = *spec.instance;
  const int T = spec.horizon;
  if (T < 1) throw std::invalid_argument("horizon must be >= 1");
  const auto bs_nodes = instance.bs_nodes();
  if (bs_nodes.empty())
    throw std::invalid_argument("instance has no BS generator");
  const auto& units = spec.unit_buses;
  const int n_units = static_cast<int>(units.size());

  milp::MilpModel model;
  PartitionModelLayout layout;
  layout.horizon = T;
  layout.lines = instance.lines;

  auto name2 = [](const char* p, int a, int b) {
    return std::string(p) + "_" + std::to_string(a) + "_" + std::to_string(b);
  };
  auto name3 = [](const char* p, int a, int b, int c) {
    return std::string(p) + "_" + std::to_string(a) + "_" + std::to_string(b) +
           "_" + std::to_string(c);
  };

  // x(v,j) for every bus and BS node
  for (int bus : instance.buses)
    for (int bs : bs_nodes)
      layout.x[{bus, bs}] = model.add_binary(name2("x", bus, bs));

  // line membership and flow, per BS node
  if (spec.flow) {
    for (std::size_t l = 0; l < instance.lines.size(); ++l) {
      const Line& line = instance.lines[l];
      for (int bs : bs_nodes)
        layout.y[{l, bs}] =
            model.add_binary(name3("y", line.u, line.v, bs));
    }
    for (std::size_t l = 0; l < instance.lines.size(); ++l) {
      const Line& line = instance.lines[l];
      for (int bs : bs_nodes)
        layout.f[{l, bs}] = model.add_variable(
            VarKind::Integer, -static_cast<double>(n_units),
            static_cast<double>(n_units), name3("f", line.u, line.v, bs));
    }
  }

  // s_i^j(t)
  for (int bus : units)
    for (int bs : bs_nodes)
      for (int t = 1; t <= T; ++t)
        layout.s[{bus, bs, t}] = model.add_binary(name3("s", bus, bs, t));

  layout.rt_var = model.add_variable(VarKind::Continuous, 0.0,
                                     static_cast<double>(T), "RT");

  // BS buses root their own islands.
  for (int bs : bs_nodes) {
    model.add_constraint({{layout.x[{bs, bs}], 1.0}}, Sense::Eq, 1.0,
                         name2("root", bs, bs));
    for (int other : bs_nodes) {
      if (other == bs) continue;
      model.add_constraint({{layout.x[{bs, other}], 1.0}}, Sense::Eq, 0.0,
                           name2("root", bs, other));
    }
  }

  // Every unit bus joins exactly one island; transshipment at most one.
  const std::set<int> unit_set(units.begin(), units.end());
  for (int bus : units) {
    std::vector<Term> terms;
    for (int bs : bs_nodes) terms.push_back({layout.x[{bus, bs}], 1.0});
    model.add_constraint(std::move(terms), Sense::Eq, 1.0,
                         "partition_" + std::to_string(bus));
  }
  for (int bus : instance.buses) {
    if (unit_set.count(bus) || instance.bs.count(bus)) continue;
    std::vector<Term> terms;
    for (int bs : bs_nodes) terms.push_back({layout.x[{bus, bs}], 1.0});
    model.add_constraint(std::move(terms), Sense::Le, 1.0,
                         "optional_" + std::to_string(bus));
  }

  // Start variables select membership.
  for (int bus : units) {
    for (int bs : bs_nodes) {
      std::vector<Term> terms;
      for (int t = 1; t <= T; ++t) terms.push_back({layout.s[{bus, bs, t}], 1.0});
      terms.push_back({layout.x[{bus, bs}], -1.0});
      model.add_constraint(std::move(terms), Sense::Eq, 0.0,
                           name2("link", bus, bs));
    }
  }

  // Per-island non-negative total capacity.
  std::vector<std::vector<double>> caps(static_cast<std::size_t>(n_units));
  for (int i = 0; i < n_units; ++i) {
    const auto params = unit_params(instance, units[static_cast<std::size_t>(i)], T);
    caps[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(T) + 1);
    for (int k = 1; k <= T; ++k)
      caps[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
          capacity_at(params, k);
  }
  for (int bs : bs_nodes) {
    const BsCurve& curve = instance.bs.at(bs);
    for (int t = 1; t <= T; ++t) {
      std::vector<Term> terms;
      for (int i = 0; i < n_units; ++i) {
        for (int t0 = 1; t0 <= t; ++t0) {
          const double coef =
              caps[static_cast<std::size_t>(i)][static_cast<std::size_t>(t - t0 + 1)];
          if (coef != 0.0)
            terms.push_back({layout.s[{units[static_cast<std::size_t>(i)], bs, t0}], coef});
        }
      }
      model.add_constraint(std::move(terms), Sense::Ge, -curve.at(t),
                           name2("cap", bs, t));
    }
  }

  // Start times bound the restoration time.
  for (int bus : units) {
    std::vector<Term> terms;
    for (int bs : bs_nodes)
      for (int t = 1; t <= T; ++t)
        terms.push_back({layout.s[{bus, bs, t}], static_cast<double>(t)});
    terms.push_back({layout.rt_var, -1.0});
    model.add_constraint(std::move(terms), Sense::Le, 0.0,
                         "start_" + std::to_string(bus));
  }

  if (spec.flow) {
    // Net flow out of a unit bus matches its membership.
    for (int bus : units) {
      for (int bs : bs_nodes) {
        std::vector<Term> terms;
        for (std::size_t l = 0; l < instance.lines.size(); ++l) {
          if (instance.lines[l].u == bus)
            terms.push_back({layout.f[{l, bs}], 1.0});
          else if (instance.lines[l].v == bus)
            terms.push_back({layout.f[{l, bs}], -1.0});
        }
        terms.push_back({layout.x[{bus, bs}], -1.0});
        model.add_constraint(std::move(terms), Sense::Eq, 0.0,
                             name2("supply", bus, bs));
      }
    }
    // Conservation through transshipment buses.
    for (int bus : instance.buses) {
      if (unit_set.count(bus) || instance.bs.count(bus)) continue;
      for (int bs : bs_nodes) {
        std::vector<Term> terms;
        for (std::size_t l = 0; l < instance.lines.size(); ++l) {
          if (instance.lines[l].u == bus)
            terms.push_back({layout.f[{l, bs}], 1.0});
          else if (instance.lines[l].v == bus)
            terms.push_back({layout.f[{l, bs}], -1.0});
        }
        model.add_constraint(std::move(terms), Sense::Eq, 0.0,
                             name2("conserve", bus, bs));
      }
    }
    // Inflow at each BS node counts its island's unit buses.
    for (int bs : bs_nodes) {
      std::vector<Term> terms;
      for (std::size_t l = 0; l < instance.lines.size(); ++l) {
        if (instance.lines[l].v == bs)
          terms.push_back({layout.f[{l, bs}], 1.0});
        else if (instance.lines[l].u == bs)
          terms.push_back({layout.f[{l, bs}], -1.0});
      }
      for (int bus : units) terms.push_back({layout.x[{bus, bs}], -1.0});
      model.add_constraint(std::move(terms), Sense::Eq, 0.0,
                           "sink_" + std::to_string(bs));
    }
    // Flow only on island lines; island lines need both ends inside.
    for (std::size_t l = 0; l < instance.lines.size(); ++l) {
      const Line& line = instance.lines[l];
      for (int bs : bs_nodes) {
        model.add_constraint({{layout.f[{l, bs}], 1.0},
                              {layout.y[{l, bs}], -static_cast<double>(n_units)}},
                             Sense::Le, 0.0, name3("flow_ub", line.u, line.v, bs));
        model.add_constraint({{layout.f[{l, bs}], 1.0},
                              {layout.y[{l, bs}], static_cast<double>(n_units)}},
                             Sense::Ge, 0.0, name3("flow_lb", line.u, line.v, bs));
        model.add_constraint(
            {{layout.y[{l, bs}], 1.0}, {layout.x[{line.u, bs}], -1.0}},
            Sense::Le, 0.0, name3("end_u", line.u, line.v, bs));
        model.add_constraint(
            {{layout.y[{l, bs}], 1.0}, {layout.x[{line.v, bs}], -1.0}},
            Sense::Le, 0.0, name3("end_v", line.u, line.v, bs));
      }
    }
  }

  if (spec.tree) {
    // Path closure: a node joins an island only together with its neighbor
    // on the unique tree path toward that island's BS node.
    Adjacency tree_adj(instance.buses, *spec.tree);
    const std::set<int> all(instance.buses.begin(), instance.buses.end());
    for (int bs : bs_nodes) {
      const auto parent = bfs_tree(tree_adj, bs, all);
      if (parent.size() != all.size())
        throw std::invalid_argument("tree does not span the instance");
      for (int bus : instance.buses) {
        if (instance.bs.count(bus)) continue;
        const int toward = parent.at(bus);
        if (toward == bs) continue;  // adjacent to the root: vacuous
        model.add_constraint(
            {{layout.x[{bus, bs}], 1.0}, {layout.x[{toward, bs}], -1.0}},
            Sense::Le, 0.0, name2("path", bus, bs));
      }
    }
  }

  if (spec.options.critical_windows) {
    for (int bus : units) {
      const auto it = instance.windows.find(bus);
      if (it == instance.windows.end()) continue;
      std::vector<Term> terms;
      for (int bs : bs_nodes)
        for (int t = 1; t <= T; ++t)
          terms.push_back({layout.s[{bus, bs, t}], static_cast<double>(t)});
      model.add_constraint(terms, Sense::Ge,
                           static_cast<double>(it->second.earliest),
                           "win_lo_" + std::to_string(bus));
      model.add_constraint(std::move(terms), Sense::Le,
                           static_cast<double>(it->second.latest),
                           "win_hi_" + std::to_string(bus));
    }
  }

  if (spec.options.balance_limit_mw) {
    const double limit = *spec.options.balance_limit_mw;
    for (int bs : bs_nodes) {
      std::vector<Term> terms;
      for (int bus : instance.buses) {
        if (instance.bs.count(bus)) continue;
        const double net = instance.net_mw(bus);
        if (net != 0.0) terms.push_back({layout.x[{bus, bs}], net});
      }
      model.add_constraint(terms, Sense::Le, limit,
                           "balance_hi_" + std::to_string(bs));
      model.add_constraint(std::move(terms), Sense::Ge, -limit,
                           "balance_lo_" + std::to_string(bs));
    }
  }

  model.set_objective({{layout.rt_var, 1.0}});
  if (layout_out) *layout_out = std::move(layout);
  return model;
}

}  // namespace

milp::MilpModel build_ppsr_model(const Instance& instance, int horizon,
                                 const ModelOptions& options,
                                 PartitionModelLayout* layout) {
  BuildSpec spec;
  spec.instance = &instance;
  spec.horizon = horizon;
  spec.options = options;
  spec.unit_buses = instance.startup_nodes();
  spec.flow = true;
  return build_partition_model(spec, layout);
}

milp::MilpModel build_tree_partition_model(const Instance& instance,
                                           const std::vector<Line>& tree_edges,
                                           int horizon,
                                           const ModelOptions& options,
                                           PartitionModelLayout* layout) {
  if (tree_edges.size() + 1 != instance.buses.size())
    throw std::invalid_argument("tree does not span the instance");
  BuildSpec spec;
  spec.instance = &instance;
  spec.horizon = horizon;
  spec.options = options;
  for (int bus : instance.buses)
    if (!instance.bs.count(bus)) spec.unit_buses.push_back(bus);
  std::sort(spec.unit_buses.begin(), spec.unit_buses.end());
  spec.flow = false;
  spec.tree = &tree_edges;
  return build_partition_model(spec, layout);
}

SectionalizingPlan extract_plan(const Instance& instance,
                                const PartitionModelLayout& layout,
                                const std::vector<double>& values) {
  SectionalizingPlan plan;
  for (int bs : instance.bs_nodes()) plan.assign[bs] = bs;
  for (const auto& [key, var] : layout.x) {
    const auto& [bus, bs] = key;
    if (bus == bs) continue;
    if (instance.bs.count(bus)) continue;
    if (values[static_cast<std::size_t>(var)] > 0.5) plan.assign[bus] = bs;
  }

  // A transshipment member without a path to its BS bus carries no flow and
  // adds nothing; record it as unassigned so islands stay connected.
  const Adjacency adj(instance.buses, instance.lines);
  for (const auto& [bs, members] : plan.islands(instance)) {
    const std::set<int> member_set(members.begin(), members.end());
    const auto tree = bfs_tree(adj, bs, member_set);
    for (int bus : members) {
      if (tree.count(bus)) continue;
      if (instance.role(bus) == BusRole::Transshipment) plan.assign.erase(bus);
    }
  }
  return plan;
}

std::vector<double> warm_start_values(const Instance& instance,
                                      const PartitionModelLayout& layout,
                                      std::size_t num_vars,
                                      const WarmStart& warm) {
  std::vector<double> values(num_vars, 0.0);
  auto island_of = [&](int bus) -> std::optional<int> {
    if (instance.bs.count(bus)) return bus;
    return warm.plan.island_of(bus);
  };

  for (const auto& [key, var] : layout.x) {
    const auto& [bus, bs] = key;
    const auto island = island_of(bus);
    values[static_cast<std::size_t>(var)] =
        island && *island == bs ? 1.0 : 0.0;
  }

  for (const auto& [key, var] : layout.s) {
    const auto& [bus, bs, t] = key;
    const auto island = island_of(bus);
    if (!island || *island != bs) continue;
    int start = 1;  // zero-output units may start immediately
    if (auto sched = warm.schedules.find(bs); sched != warm.schedules.end()) {
      if (auto it = sched->second.start.find(bus);
          it != sched->second.start.end())
        start = it->second;
    }
    values[static_cast<std::size_t>(var)] = (t == start) ? 1.0 : 0.0;
  }

  for (const auto& [key, var] : layout.y) {
    const auto& [line_index, bs] = key;
    const Line& line = layout.lines[line_index];
    const auto a = island_of(line.u), b = island_of(line.v);
    values[static_cast<std::size_t>(var)] =
        (a && b && *a == bs && *b == bs) ? 1.0 : 0.0;
  }

  if (!layout.f.empty()) {
    std::map<std::pair<int, int>, std::size_t> line_index;
    for (std::size_t l = 0; l < layout.lines.size(); ++l)
      line_index[{layout.lines[l].u, layout.lines[l].v}] = l;
    const Adjacency adj(instance.buses, layout.lines);
    for (const auto& [bs, members] : warm.plan.islands(instance)) {
      const std::set<int> member_set(members.begin(), members.end());
      const auto parent = bfs_tree(adj, bs, member_set);
      for (int bus : members) {
        if (bus == bs || !instance.is_startup_node(bus)) continue;
        int node = bus;
        while (node != bs) {
          const int next = parent.at(node);
          const auto key = std::minmax(node, next);
          const std::size_t l = line_index.at({key.first, key.second});
          const int var = layout.f.at({l, bs});
          // one unit from node toward next
          values[static_cast<std::size_t>(var)] +=
              layout.lines[l].u == node ? 1.0 : -1.0;
          node = next;
        }
      }
    }
  }

  if (layout.rt_var >= 0)
    values[static_cast<std::size_t>(layout.rt_var)] =
        static_cast<double>(warm.rt);
  return values;
}

namespace {

// Re-optimizes each island's startup schedule at the incumbent restoration
// time and assembles the solution record.
std::optional<PpsrSolution> finalize_solution(const Instance& instance,
                                              const SectionalizingPlan& plan,
                                              int incumbent_rt,
                                              milp::Backend& backend,
                                              const ModelOptions& options) {
  PpsrSolution solution;
  solution.plan = plan;
  const int horizon = std::max(1, incumbent_rt);
  for (const auto& [bs, members] : plan.islands(instance)) {
    const auto island = make_island(instance, bs, members, horizon, options);
    if (island.units.empty()) {
      solution.schedules[bs] = Schedule{};
      solution.island_rt[bs] = 0;
      continue;
    }
    const auto result = solve_startup(island, backend);
    if (!result.schedule) return std::nullopt;
    solution.island_rt[bs] = result.schedule->rt;
    solution.rt = std::max(solution.rt, result.schedule->rt);
    solution.schedules[bs] = *result.schedule;
  }
  if (solution.rt > 0)
    for (const auto& [bs, rt] : solution.island_rt)
      if (rt == solution.rt) solution.bottleneck.push_back(bs);
  return solution;
}

}  // namespace

PpsrResult solve_ppsr(const Instance& instance, int horizon,
                      milp::Backend& backend, const ModelOptions& options,
                      const WarmStart* warm,
                      const milp::SolveOptions& solve_options) {
  PartitionModelLayout layout;
  auto model = build_ppsr_model(instance, horizon, options, &layout);
  if (warm)
    model.set_warm_start(
        warm_start_values(instance, layout, model.num_vars(), *warm));

  const auto outcome = milp::solve(model, backend, solve_options);
  PpsrResult result;
  result.status = outcome.status;
  result.message = outcome.message;
  if (!outcome.has_solution()) return result;

  const auto plan = extract_plan(instance, layout, outcome.values);
  const int rt_model = static_cast<int>(
      std::llround(outcome.values[static_cast<std::size_t>(layout.rt_var)]));
  auto solution = finalize_solution(instance, plan, rt_model, backend, options);
  if (!solution) {
    result.status = milp::SolveStatus::Error;
    result.message = "island schedule post-processing failed";
    return result;
  }
  result.solution = std::move(solution);
  return result;
}

ScanResult lower_bound_scan(const Instance& instance, milp::Backend& backend,
                            int t_low, const ModelOptions& options,
                            Deadline deadline, int max_horizon,
                            BoundLog* log) {
  ScanResult result;
  result.lower_bound = t_low;
  for (int horizon = t_low; horizon <= max_horizon; ++horizon) {
    if (deadline.expired()) {
      result.stop = ScanStop::Deadline;
      return result;
    }
    milp::SolveOptions solve_options;
    if (auto remaining = deadline.remaining_sec())
      solve_options.time_limit_sec = remaining;
    const auto probe = solve_ppsr(instance, horizon, backend, options, nullptr,
                                  solve_options);
    if (probe.status == milp::SolveStatus::Infeasible) {
      result.lower_bound = horizon + 1;
      if (log) log->add("lower", "probe_infeasible", result.lower_bound);
      continue;
    }
    if (probe.solution) {
      result.lower_bound = horizon;
      result.solution = probe.solution;
      result.stop = ScanStop::Optimal;
      if (log) log->add("lower", "optimal", horizon);
      return result;
    }
    result.stop = ScanStop::Deadline;  // timed out or backend error
    return result;
  }
  result.stop = ScanStop::HorizonCap;
  return result;
}

PpsrResult ppsr_bruteforce(const Instance& instance, int horizon,
                           const ModelOptions& options, int max_buses,
                           int max_bs) {
  const auto bs_nodes = instance.bs_nodes();
  if (static_cast<int>(instance.buses.size()) > max_buses ||
      static_cast<int>(bs_nodes.size()) > max_bs)
    throw std::invalid_argument("instance too large for brute force");
  if (bs_nodes.empty())
    throw std::invalid_argument("instance has no BS generator");

  const auto unit_buses = instance.startup_nodes();
  std::vector<int> optional_buses;
  for (int bus : instance.buses)
    if (!instance.bs.count(bus) && !instance.is_startup_node(bus))
      optional_buses.push_back(bus);
  std::sort(optional_buses.begin(), optional_buses.end());

  // Choice index per position: unit buses pick a BS island; optional
  // (transshipment) buses additionally may stay unassigned.
  const int n_positions =
      static_cast<int>(unit_buses.size() + optional_buses.size());
  const int n_bs = static_cast<int>(bs_nodes.size());
  std::vector<int> choice(static_cast<std::size_t>(n_positions), 0);

  const Adjacency adj(instance.buses, instance.lines);
  std::optional<PpsrSolution> best;

  bool done = false;
  while (!done) {
    SectionalizingPlan plan;
    for (int bs : bs_nodes) plan.assign[bs] = bs;
    for (std::size_t p = 0; p < unit_buses.size(); ++p)
      plan.assign[unit_buses[p]] = bs_nodes[static_cast<std::size_t>(choice[p])];
    for (std::size_t q = 0; q < optional_buses.size(); ++q) {
      const int c = choice[unit_buses.size() + q];
      if (c < n_bs)
        plan.assign[optional_buses[q]] = bs_nodes[static_cast<std::size_t>(c)];
    }

    bool ok = true;
    const auto islands = plan.islands(instance);
    for (const auto& [bs, members] : islands) {
      const std::set<int> member_set(members.begin(), members.end());
      if (bfs_tree(adj, bs, member_set).size() != member_set.size()) {
        ok = false;
        break;
      }
      if (options.balance_limit_mw) {
        double net = 0.0;
        for (int bus : members)
          if (bus != bs) net += instance.net_mw(bus);
        if (std::fabs(net) > *options.balance_limit_mw + 1e-9) {
          ok = false;
          break;
        }
      }
    }

    if (ok) {
      PpsrSolution candidate;
      candidate.plan = plan;
      bool feasible = true;
      for (const auto& [bs, members] : islands) {
        const auto island = make_island(instance, bs, members, horizon, options);
        if (island.units.empty()) {
          candidate.schedules[bs] = Schedule{};
          candidate.island_rt[bs] = 0;
          continue;
        }
        const auto sched = startup_bruteforce(island, max_buses, 32);
        if (!sched.schedule) {
          feasible = false;
          break;
        }
        candidate.schedules[bs] = *sched.schedule;
        candidate.island_rt[bs] = sched.schedule->rt;
        candidate.rt = std::max(candidate.rt, sched.schedule->rt);
      }
      if (feasible && (!best || candidate.rt < best->rt)) {
        if (candidate.rt > 0)
          for (const auto& [bs, rt] : candidate.island_rt)
            if (rt == candidate.rt) candidate.bottleneck.push_back(bs);
        best = std::move(candidate);
      }
    }

    // odometer over positions
    int p = 0;
    for (; p < n_positions; ++p) {
      const int limit = p < static_cast<int>(unit_buses.size()) ? n_bs - 1 : n_bs;
      if (choice[static_cast<std::size_t>(p)] < limit) {
        ++choice[static_cast<std::size_t>(p)];
        break;
      }
      choice[static_cast<std::size_t>(p)] = 0;
    }
    if (p == n_positions) done = true;
  }

  PpsrResult result;
  if (best) {
    result.status = milp::SolveStatus::Optimal;
    result.solution = std::move(best);
  } else {
    result.status = milp::SolveStatus::Infeasible;
  }
  return result;
}

}  // namespace restore
