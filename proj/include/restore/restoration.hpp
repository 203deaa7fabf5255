#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "restore/grid.hpp"
#include "restore/milp.hpp"
#include "restore/plan.hpp"
#include "restore/report.hpp"
#include "restore/sequencing.hpp"
#include "restore/util.hpp"

namespace restore {

// Variable ids of a sectionalization model, for warm starts and extraction.
struct PartitionModelLayout {
  int horizon = 0;
  std::vector<Line> lines;                        // orientation used by f
  std::map<std::pair<int, int>, int> x;           // (bus, bs) -> var
  std::map<std::tuple<int, int, int>, int> s;     // (bus, bs, t) -> var
  std::map<std::pair<std::size_t, int>, int> y;   // (line index, bs) -> var
  std::map<std::pair<std::size_t, int>, int> f;   // (line index, bs) -> var
  int rt_var = -1;
};

// Integrated sectionalization + startup model: binaries x(v,j) and s_i^j(t),
// line binaries y^j(u,v), integer flows f^j(u,v) in [-|I|, |I|], continuous
// RT. Island connectivity is enforced by a single-commodity flow into each
// BS node.
milp::MilpModel build_ppsr_model(const Instance& instance, int horizon,
                                 const ModelOptions& options = {},
                                 PartitionModelLayout* layout = nullptr);

// Tree variant: startup rows on I = V \ J (transshipment buses become
// zero-output units) plus path-closure rows along the unique tree paths; no
// line or flow variables. `tree_edges` must form a spanning tree.
milp::MilpModel build_tree_partition_model(const Instance& instance,
                                           const std::vector<Line>& tree_edges,
                                           int horizon,
                                           const ModelOptions& options = {},
                                           PartitionModelLayout* layout = nullptr);

// Reads the x variables out of a solution and normalizes: transshipment
// members that carry no path to their BS bus (possible because they carry no
// flow) are recorded as unassigned rather than as disconnected members.
SectionalizingPlan extract_plan(const Instance& instance,
                                const PartitionModelLayout& layout,
                                const std::vector<double>& values);

struct WarmStart {
  SectionalizingPlan plan;
  std::map<int, Schedule> schedules;  // bs -> schedule
  int rt = 0;
};

// Full assignment for every model variable implied by a plan + schedules;
// flows route one unit per startup node along its island BFS path.
std::vector<double> warm_start_values(const Instance& instance,
                                      const PartitionModelLayout& layout,
                                      std::size_t num_vars,
                                      const WarmStart& warm);

struct PpsrSolution {
  SectionalizingPlan plan;
  std::map<int, Schedule> schedules;  // bs -> island schedule
  std::map<int, int> island_rt;       // bs -> island restoration time
  int rt = 0;
  std::vector<int> bottleneck;  // BS buses whose island attains rt
};

struct PpsrResult {
  milp::SolveStatus status = milp::SolveStatus::Error;
  std::optional<PpsrSolution> solution;
  std::string message;
};

// Build + solve + extract; per-island startup schedules are re-optimized at
// the incumbent restoration time afterwards.
PpsrResult solve_ppsr(const Instance& instance, int horizon,
                      milp::Backend& backend, const ModelOptions& options = {},
                      const WarmStart* warm = nullptr,
                      const milp::SolveOptions& solve_options = {});

enum class ScanStop { Optimal, Deadline, HorizonCap };

struct ScanResult {
  int lower_bound = 0;
  std::optional<PpsrSolution> solution;
  ScanStop stop = ScanStop::Deadline;
};

// Probes horizons t_low, t_low+1, ...: every proven-infeasible probe raises
// the lower bound; the first feasible probe is the exact optimum.
ScanResult lower_bound_scan(const Instance& instance, milp::Backend& backend,
                            int t_low, const ModelOptions& options = {},
                            Deadline deadline = Deadline::none(),
                            int max_horizon = 1 << 12,
                            BoundLog* log = nullptr);

// Exact optimum by enumerating all island assignments (including optional
// transshipment membership), keeping connected ones, and evaluating each
// island by schedule enumeration.
PpsrResult ppsr_bruteforce(const Instance& instance, int horizon,
                           const ModelOptions& options = {},
                           int max_buses = 10, int max_bs = 3);

}  // namespace restore
