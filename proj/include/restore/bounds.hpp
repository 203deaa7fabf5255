#pragma once

#include <map>
#include <optional>
#include <vector>

#include "restore/grid.hpp"
#include "restore/milp.hpp"
#include "restore/plan.hpp"
#include "restore/report.hpp"
#include "restore/restoration.hpp"
#include "restore/util.hpp"

namespace restore {

struct SpanningTree {
  int root = 0;
  std::map<int, int> parent;  // node -> parent; root maps to itself
  std::vector<Line> edges;
};

// Minimum-weight spanning tree under i.i.d. uniform edge weights drawn from
// `rng` in line order; deterministic given the seed. Throws on a
// disconnected graph.
SpanningTree random_spanning_tree(const std::vector<int>& buses,
                                  const std::vector<Line>& lines, Rng& rng);

struct LocalSearchResult {
  SectionalizingPlan plan;
  std::map<int, Schedule> schedules;
  std::map<int, int> island_rt;
  int rt = 0;
  int outer_iterations = 0;
  bool hit_deadline = false;
};

// Pairwise island-merge improvement: repeatedly re-sectionalizes the
// bottleneck island together with another island (ascending restoration
// time) whenever the pair induces a connected subgraph. Every accepted merge
// strictly reduces the pair's maximum restoration time. The input plan must
// be feasible (every island schedulable within rt0 periods).
LocalSearchResult local_search(const Instance& instance,
                               const SectionalizingPlan& plan, int rt0,
                               milp::Backend& backend,
                               const ModelOptions& options = {},
                               Deadline deadline = Deadline::none(),
                               BoundLog* log = nullptr);

struct ReducedGraph {
  std::vector<int> buses;
  std::vector<Line> lines;
};

// Per-island BFS trees (rooted at the BS bus, neighbors in ascending bus id)
// plus every edge not interior to a single island.
ReducedGraph reduced_subgraph(const Instance& instance,
                              const SectionalizingPlan& plan);

struct PipelineResult {
  std::optional<PpsrSolution> best;
  int tree_horizon = 0;  // horizon at which the tree model became feasible
  bool hit_deadline = false;
};

// One upper-bound iteration: sectionalize a random spanning tree at horizon
// 2 * t_low (doubling while infeasible), improve by local search, then
// re-solve on the reduced subgraph warm-started with the local-search plan.
PipelineResult upper_bound_pipeline(const Instance& instance, int t_low,
                                    milp::Backend& backend, Rng& rng,
                                    const ModelOptions& options = {},
                                    Deadline deadline = Deadline::none(),
                                    BoundLog* log = nullptr,
                                    int max_horizon = 1 << 12);

}  // namespace restore
