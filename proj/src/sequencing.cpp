#include "restore/sequencing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace restore {

namespace {

std::optional<Window> window_for(const Instance& instance, int bus,
                                 const ModelOptions& options) {
  if (!options.critical_windows) return std::nullopt;
  if (auto it = instance.windows.find(bus); it != instance.windows.end())
    return it->second;
  return std::nullopt;
}

}  // namespace

IslandView make_island(const Instance& instance, int bs_bus,
                       const std::vector<int>& members, int horizon,
                       const ModelOptions& options) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  IslandView island;
  island.horizon = horizon;
  island.bs_bus = bs_bus;
  const auto curve = instance.bs.find(bs_bus);
  if (curve == instance.bs.end())
    throw std::invalid_argument("bus " + std::to_string(bs_bus) +
                                " carries no BS generator");
  island.bs_supply.resize(static_cast<std::size_t>(horizon));
  for (int t = 1; t <= horizon; ++t)
    island.bs_supply[static_cast<std::size_t>(t - 1)] = curve->second.at(t);

  std::vector<int> sorted(members.begin(), members.end());
  std::sort(sorted.begin(), sorted.end());
  for (int bus : sorted) {
    if (bus == bs_bus || !instance.is_startup_node(bus)) continue;
    StartupUnit unit;
    unit.bus = bus;
    unit.params = instance.startup_params(bus, horizon);
    unit.window = window_for(instance, bus, options);
    island.units.push_back(std::move(unit));
  }
  return island;
}

IslandView make_aggregate_island(const Instance& instance, int horizon,
                                 const ModelOptions& options) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  IslandView island;
  island.horizon = horizon;
  island.bs_bus = -1;
  island.bs_supply.assign(static_cast<std::size_t>(horizon), 0.0);
  for (const auto& [bus, curve] : instance.bs)
    for (int t = 1; t <= horizon; ++t)
      island.bs_supply[static_cast<std::size_t>(t - 1)] += curve.at(t);

  for (int bus : instance.startup_nodes()) {
    StartupUnit unit;
    unit.bus = bus;
    unit.params = instance.startup_params(bus, horizon);
    unit.window = window_for(instance, bus, options);
    island.units.push_back(std::move(unit));
  }
  return island;
}

milp::MilpModel build_startup_model(const IslandView& island) {
  using milp::Sense;
  using milp::Term;
  using milp::VarKind;

  const int T = island.horizon;
  const int n_units = static_cast<int>(island.units.size());
  milp::MilpModel model;

  // s_{i,t}: unit-major, period-minor; RT last.
  auto s_var = [T](int unit, int t) { return unit * T + (t - 1); };
  for (int i = 0; i < n_units; ++i) {
    const int bus = island.units[static_cast<std::size_t>(i)].bus;
    for (int t = 1; t <= T; ++t)
      model.add_binary("s_" + std::to_string(bus) + "_" + std::to_string(t));
  }
  const int rt_var = model.add_variable(VarKind::Continuous, 0.0,
                                        static_cast<double>(T), "RT");

  for (int i = 0; i < n_units; ++i) {
    std::vector<Term> terms;
    for (int t = 1; t <= T; ++t) terms.push_back({s_var(i, t), 1.0});
    model.add_constraint(
        std::move(terms), Sense::Eq, 1.0,
        "assign_" + std::to_string(island.units[static_cast<std::size_t>(i)].bus));
  }

  for (int t = 1; t <= T; ++t) {
    std::vector<Term> terms;
    for (int i = 0; i < n_units; ++i) {
      const auto& params = island.units[static_cast<std::size_t>(i)].params;
      for (int t0 = 1; t0 <= t; ++t0) {
        const double coef = capacity_at(params, t - t0 + 1);
        if (coef != 0.0) terms.push_back({s_var(i, t0), coef});
      }
    }
    if (terms.empty() && island.supply_at(t) >= 0.0) continue;
    model.add_constraint(std::move(terms), Sense::Ge, -island.supply_at(t),
                         "cap_" + std::to_string(t));
  }

  for (int i = 0; i < n_units; ++i) {
    std::vector<Term> terms;
    for (int t = 1; t <= T; ++t)
      terms.push_back({s_var(i, t), static_cast<double>(t)});
    terms.push_back({rt_var, -1.0});
    model.add_constraint(
        std::move(terms), Sense::Le, 0.0,
        "start_" + std::to_string(island.units[static_cast<std::size_t>(i)].bus));
  }

  for (int i = 0; i < n_units; ++i) {
    const auto& unit = island.units[static_cast<std::size_t>(i)];
    if (!unit.window) continue;
    std::vector<Term> terms;
    for (int t = 1; t <= T; ++t)
      terms.push_back({s_var(i, t), static_cast<double>(t)});
    model.add_constraint(terms, Sense::Ge,
                         static_cast<double>(unit.window->earliest),
                         "win_lo_" + std::to_string(unit.bus));
    model.add_constraint(std::move(terms), Sense::Le,
                         static_cast<double>(unit.window->latest),
                         "win_hi_" + std::to_string(unit.bus));
  }

  model.set_objective({{rt_var, 1.0}});
  return model;
}

StartupResult solve_startup(const IslandView& island, milp::Backend& backend,
                            const milp::SolveOptions& options) {
  StartupResult result;
  if (island.units.empty()) {
    // No units to crank; by convention the restoration time is zero.
    result.status = milp::SolveStatus::Optimal;
    result.schedule = Schedule{};
    return result;
  }

  const auto model = build_startup_model(island);
  const auto outcome = milp::solve(model, backend, options);
  result.status = outcome.status;
  result.message = outcome.message;
  if (!outcome.has_solution()) return result;

  const int T = island.horizon;
  Schedule schedule;
  for (std::size_t i = 0; i < island.units.size(); ++i) {
    for (int t = 1; t <= T; ++t) {
      const double value =
          outcome.values[i * static_cast<std::size_t>(T) +
                         static_cast<std::size_t>(t - 1)];
      if (value > 0.5) {
        schedule.start[island.units[i].bus] = t;
        break;
      }
    }
  }
  schedule.rt = 0;
  for (const auto& [bus, start] : schedule.start)
    schedule.rt = std::max(schedule.rt, start);

  const auto check = validate_schedule(island, schedule);
  if (!check.feasible || schedule.start.size() != island.units.size()) {
    result.status = milp::SolveStatus::Error;
    result.message = "backend schedule failed validation";
    result.schedule.reset();
    return result;
  }
  result.schedule = std::move(schedule);
  return result;
}

ScheduleCheck validate_schedule(const IslandView& island,
                                const Schedule& schedule) {
  const int T = island.horizon;
  for (const auto& unit : island.units) {
    const auto it = schedule.start.find(unit.bus);
    if (it == schedule.start.end())
      throw std::invalid_argument("schedule misses unit at bus " +
                                  std::to_string(unit.bus));
    if (it->second < 1 || it->second > T)
      throw std::invalid_argument("start period out of range for bus " +
                                  std::to_string(unit.bus));
  }

  ScheduleCheck check;
  check.trace.resize(static_cast<std::size_t>(T));
  check.feasible = true;
  for (int t = 1; t <= T; ++t) {
    double total = island.supply_at(t);
    for (const auto& unit : island.units) {
      const int start = schedule.start.at(unit.bus);
      if (t >= start) total += capacity_at(unit.params, t - start + 1);
    }
    check.trace[static_cast<std::size_t>(t - 1)] = total;
    if (total < 0.0 && check.first_violation_period == 0) {
      check.feasible = false;
      check.first_violation_period = t;
    }
  }
  return check;
}

StartupResult startup_bruteforce(const IslandView& island, int max_units,
                                 int max_horizon) {
  const int n = static_cast<int>(island.units.size());
  const int T = island.horizon;
  if (n > max_units || T > max_horizon)
    throw std::invalid_argument("island too large for brute force");

  StartupResult result;
  if (n == 0) {
    result.status = milp::SolveStatus::Optimal;
    result.schedule = Schedule{};
    return result;
  }

  std::vector<int> starts(static_cast<std::size_t>(n), 1);
  std::optional<Schedule> best;
  bool done = false;
  while (!done) {
    bool window_ok = true;
    int rt = 0;
    for (int i = 0; i < n; ++i) {
      const auto& unit = island.units[static_cast<std::size_t>(i)];
      const int start = starts[static_cast<std::size_t>(i)];
      rt = std::max(rt, start);
      if (unit.window &&
          (start < unit.window->earliest || start > unit.window->latest))
        window_ok = false;
    }
    if (window_ok && (!best || rt < best->rt)) {
      Schedule candidate;
      for (int i = 0; i < n; ++i)
        candidate.start[island.units[static_cast<std::size_t>(i)].bus] =
            starts[static_cast<std::size_t>(i)];
      candidate.rt = rt;
      if (validate_schedule(island, candidate).feasible)
        best = std::move(candidate);
    }
    // odometer
    int i = 0;
    for (; i < n; ++i) {
      if (starts[static_cast<std::size_t>(i)] < T) {
        ++starts[static_cast<std::size_t>(i)];
        break;
      }
      starts[static_cast<std::size_t>(i)] = 1;
    }
    if (i == n) done = true;
  }

  if (best) {
    result.status = milp::SolveStatus::Optimal;
    result.schedule = std::move(best);
  } else {
    result.status = milp::SolveStatus::Infeasible;
  }
  return result;
}

StartupResult aggregate_lower_bound(const Instance& instance, int horizon,
                                    milp::Backend& backend,
                                    const ModelOptions& options) {
  const auto island = make_aggregate_island(instance, horizon, options);
  return solve_startup(island, backend);
}

}  // namespace restore
