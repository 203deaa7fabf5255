#pragma once

#include <map>
#include <optional>
#include <vector>

#include "restore/grid.hpp"
#include "restore/milp.hpp"

namespace restore {

struct StartupUnit {
  int bus = 0;
  NbsParams params;
  std::optional<Window> window;
};

// A single-root island: one black-start supply curve plus the units that must
// be cranked (NBS generators and critical loads).
struct IslandView {
  int horizon = 1;                // T >= 1
  int bs_bus = -1;                // -1 for the aggregated system
  std::vector<double> bs_supply;  // r(t) for t = 1..horizon
  std::vector<StartupUnit> units; // ascending bus id

  double supply_at(int period) const {
    return bs_supply[static_cast<std::size_t>(period - 1)];
  }
};

IslandView make_island(const Instance& instance, int bs_bus,
                       const std::vector<int>& members, int horizon,
                       const ModelOptions& options = {});

// Whole system with all BS curves summed into one central source.
IslandView make_aggregate_island(const Instance& instance, int horizon,
                                 const ModelOptions& options = {});

struct Schedule {
  std::map<int, int> start;  // unit bus -> start period in 1..T
  int rt = 0;                // max start period; 0 when no units
};

struct ScheduleCheck {
  bool feasible = false;
  std::vector<double> trace;       // total capacity per period 1..T
  int first_violation_period = 0;  // 0 when feasible
};

// Model with binaries s_{i,t} and continuous RT: per-unit single-start rows,
// per-period non-negative total capacity rows, per-unit start-time rows
// bounding RT, plus earliest/latest window rows when present.
milp::MilpModel build_startup_model(const IslandView& island);

struct StartupResult {
  milp::SolveStatus status = milp::SolveStatus::Error;
  std::optional<Schedule> schedule;
  std::string message;
};

StartupResult solve_startup(const IslandView& island, milp::Backend& backend,
                            const milp::SolveOptions& options = {});

// Evaluates the total-capacity trace of a schedule; every unit must have a
// start period within 1..T.
ScheduleCheck validate_schedule(const IslandView& island,
                                const Schedule& schedule);

// Exact optimum by enumerating all T^|units| start vectors.
StartupResult startup_bruteforce(const IslandView& island, int max_units = 6,
                                 int max_horizon = 14);

// Optimal restoration time of the aggregated single-source system; a lower
// bound for the partitioned problem. Infeasible means the horizon was too
// small (the caller may retry with a doubled horizon).
StartupResult aggregate_lower_bound(const Instance& instance, int horizon,
                                    milp::Backend& backend,
                                    const ModelOptions& options = {});

}  // namespace restore
