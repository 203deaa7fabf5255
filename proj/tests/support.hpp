#pragma once

// Shared fixtures and random generators for the test suites. The worked
// three-bus system (one constant-10 BS source plus a 60 MW and a 180 MW NBS
// unit on a triangle) doubles as the data/demo3.json file.

#include <algorithm>
#include <set>
#include <vector>

#include "restore/grid.hpp"
#include "restore/sequencing.hpp"
#include "restore/util.hpp"

namespace testsupport {

inline restore::Instance demo3() {
  restore::Instance instance;
  instance.name = "demo3";
  instance.buses = {1, 2, 3};
  instance.lines = {{1, 2}, {1, 3}, {2, 3}};
  instance.bs[1] = restore::BsCurve::constant_curve(10.0);
  instance.nbs[2] = {10.0, 2, 3, 60.0};
  instance.nbs[3] = {30.0, 6, 9, 180.0};
  return instance;
}

inline restore::IslandView demo3_island(int horizon) {
  return restore::make_island(demo3(), 1, {1, 2, 3}, horizon);
}

// Connected graph on buses 1..n: a random tree plus a few extra edges.
inline std::vector<restore::Line> random_connected_lines(restore::Rng& rng,
                                                         int n,
                                                         int extra_edges) {
  std::set<std::pair<int, int>> edges;
  for (int v = 2; v <= n; ++v) {
    const int parent = rng.uniform_int(1, v - 1);
    edges.insert({std::min(parent, v), std::max(parent, v)});
  }
  for (int e = 0; e < extra_edges; ++e) {
    const int a = rng.uniform_int(1, n);
    const int b = rng.uniform_int(1, n);
    if (a == b) continue;
    edges.insert({std::min(a, b), std::max(a, b)});
  }
  std::vector<restore::Line> lines;
  for (const auto& [u, v] : edges) lines.push_back({u, v});
  return lines;
}

// Cranking demands routinely exceed the initial source output, so optimal
// schedules must stagger starts behind ramped units.
inline restore::NbsParams random_unit(restore::Rng& rng) {
  restore::NbsParams params;
  params.crank_mw = rng.uniform_int(2, 12);
  params.crank_periods = rng.uniform_int(0, 3);
  params.ramp_periods = rng.uniform_int(1, 4);
  params.max_mw = rng.uniform_int(6, 30);
  return params;
}

inline restore::BsCurve random_bs_curve(restore::Rng& rng) {
  if (rng.uniform_int(0, 2) == 0) {
    // ramping source: starts small, grows for a few periods
    std::vector<double> series;
    double level = rng.uniform_int(1, 4);
    const int growth = rng.uniform_int(1, 4);
    const int steps = rng.uniform_int(2, 5);
    for (int t = 0; t < steps; ++t) {
      series.push_back(level);
      level += growth;
    }
    return restore::BsCurve::from_series(std::move(series));
  }
  return restore::BsCurve::constant_curve(rng.uniform_int(2, 8));
}

inline restore::IslandView random_island(restore::Rng& rng, int max_units,
                                         int max_horizon) {
  const int horizon = rng.uniform_int(3, max_horizon);
  const int n_units = rng.uniform_int(0, max_units);
  restore::IslandView island;
  island.horizon = horizon;
  island.bs_bus = 1;
  const auto curve = random_bs_curve(rng);
  island.bs_supply.resize(static_cast<std::size_t>(horizon));
  for (int t = 1; t <= horizon; ++t)
    island.bs_supply[static_cast<std::size_t>(t - 1)] = curve.at(t);
  for (int i = 0; i < n_units; ++i) {
    restore::StartupUnit unit;
    unit.bus = 100 + i;
    unit.params = random_unit(rng);
    island.units.push_back(unit);
  }
  return island;
}

// Instance with 4..max_buses buses, 1..max_bs BS sources, up to max_units
// NBS units, remaining buses transshipment.
inline restore::Instance random_instance(restore::Rng& rng, int max_buses,
                                         int max_bs, int max_units) {
  const int n = rng.uniform_int(4, max_buses);
  restore::Instance instance;
  instance.name = "random";
  for (int v = 1; v <= n; ++v) instance.buses.push_back(v);
  instance.lines = random_connected_lines(rng, n, rng.uniform_int(0, 3));

  std::vector<int> shuffled = instance.buses;
  for (std::size_t i = shuffled.size(); i > 1; --i)
    std::swap(shuffled[i - 1],
              shuffled[static_cast<std::size_t>(rng.uniform_int(
                  0, static_cast<int>(i) - 1))]);

  const int n_bs = rng.uniform_int(1, max_bs);
  std::size_t next = 0;
  for (int j = 0; j < n_bs && next < shuffled.size(); ++j, ++next)
    instance.bs[shuffled[next]] = random_bs_curve(rng);
  const int n_units =
      std::min(rng.uniform_int(1, max_units),
               static_cast<int>(shuffled.size() - next));
  for (int i = 0; i < n_units && next < shuffled.size(); ++i, ++next)
    instance.nbs[shuffled[next]] = random_unit(rng);
  return instance;
}

}  // namespace testsupport
