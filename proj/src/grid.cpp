#include "restore/grid.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace restore {

double capacity_at(const NbsParams& unit, int offset) {
  assert(offset >= 1);
  if (offset <= unit.crank_periods) return -unit.crank_mw;
  const int past_crank = offset - unit.crank_periods;  // >= 1
  if (unit.ramp_periods > 0 && past_crank <= unit.ramp_periods) {
    return static_cast<double>(past_crank - 1) * unit.max_mw /
           static_cast<double>(unit.ramp_periods);
  }
  return unit.max_mw;
}

double BsCurve::at(int period) const {
  assert(period >= 1);
  if (is_constant()) return constant;
  const auto idx = static_cast<std::size_t>(period - 1);
  return idx < series.size() ? series[idx] : series.back();
}

BsCurve BsCurve::constant_curve(double mw) {
  BsCurve c;
  c.constant = mw;
  return c;
}

BsCurve BsCurve::from_series(std::vector<double> values) {
  BsCurve c;
  c.series = std::move(values);
  return c;
}

BusRole Instance::role(int bus) const {
  if (bs.count(bus)) return BusRole::BlackStart;
  if (nbs.count(bus) || critical_loads.count(bus)) return BusRole::NonBlackStart;
  return BusRole::Transshipment;
}

bool Instance::is_startup_node(int bus) const {
  return nbs.count(bus) != 0 || critical_loads.count(bus) != 0;
}

std::vector<int> Instance::startup_nodes() const {
  std::vector<int> out;
  for (const auto& [bus, params] : nbs) out.push_back(bus);
  for (const auto& [bus, demand] : critical_loads) out.push_back(bus);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> Instance::bs_nodes() const {
  std::vector<int> out;
  for (const auto& [bus, curve] : bs) out.push_back(bus);
  return out;  // map iteration is already ascending
}

std::vector<int> Instance::transshipment_nodes() const {
  std::vector<int> out;
  for (int bus : buses) {
    if (role(bus) == BusRole::Transshipment) out.push_back(bus);
  }
  std::sort(out.begin(), out.end());
  return out;
}

NbsParams Instance::startup_params(int bus, int horizon) const {
  if (auto it = nbs.find(bus); it != nbs.end()) return it->second;
  if (auto it = critical_loads.find(bus); it != critical_loads.end()) {
    NbsParams load;
    load.crank_mw = it->second;
    load.crank_periods = horizon;
    load.ramp_periods = 0;
    load.max_mw = 0.0;
    return load;
  }
  throw std::invalid_argument("bus " + std::to_string(bus) +
                              " carries no NBS unit or critical load");
}

double Instance::net_mw(int bus) const {
  if (!balance) return 0.0;
  auto it = balance->net_mw.find(bus);
  return it != balance->net_mw.end() ? it->second : 0.0;
}

namespace {

std::string bus_str(int bus) { return std::to_string(bus); }

}  // namespace

ValidationReport validate_instance(const Instance& instance) {
  ValidationReport report;
  auto violation = [&report](const std::string& text) {
    report.violations.push_back(text);
  };

  std::set<int> bus_set;
  for (int bus : instance.buses) {
    if (!bus_set.insert(bus).second)
      violation("duplicate bus id " + bus_str(bus));
  }
  if (instance.buses.empty()) violation("instance has no buses");

  std::set<std::pair<int, int>> seen_lines;
  for (const Line& line : instance.lines) {
    if (line.u == line.v)
      violation("self-loop line at bus " + bus_str(line.u));
    if (!bus_set.count(line.u) || !bus_set.count(line.v))
      violation("line (" + bus_str(line.u) + "," + bus_str(line.v) +
                ") references unknown bus");
    const auto key = std::minmax(line.u, line.v);
    if (line.u != line.v && !seen_lines.insert(key).second)
      violation("duplicate line (" + bus_str(key.first) + "," +
                bus_str(key.second) + ")");
  }

  if (instance.bs.empty()) violation("no black-start generator");
  for (const auto& [bus, curve] : instance.bs) {
    if (!bus_set.count(bus))
      violation("BS generator at unknown bus " + bus_str(bus));
    if (curve.is_constant()) {
      if (curve.constant < 0.0)
        violation("BS curve at bus " + bus_str(bus) + " is negative");
    } else {
      bool negative = false, decreasing = false;
      for (std::size_t i = 0; i < curve.series.size(); ++i) {
        if (curve.series[i] < 0.0) negative = true;
        if (i > 0 && curve.series[i] < curve.series[i - 1]) decreasing = true;
      }
      if (curve.series.empty())
        violation("BS curve at bus " + bus_str(bus) + " is empty");
      if (negative)
        violation("BS curve at bus " + bus_str(bus) + " has a negative entry");
      if (decreasing)
        report.warnings.push_back("BS curve at bus " + bus_str(bus) +
                                  " is decreasing");
    }
  }

  for (const auto& [bus, params] : instance.nbs) {
    if (!bus_set.count(bus))
      violation("NBS generator at unknown bus " + bus_str(bus));
    if (instance.bs.count(bus))
      violation("bus " + bus_str(bus) + " carries both BS and NBS generators");
    if (instance.critical_loads.count(bus))
      violation("bus " + bus_str(bus) +
                " carries both an NBS generator and a critical load");
    if (!std::isfinite(params.crank_mw) || params.crank_mw < 0.0)
      violation("NBS at bus " + bus_str(bus) + ": crank_mw must be >= 0");
    if (params.crank_periods < 0)
      violation("NBS at bus " + bus_str(bus) + ": crank_periods must be >= 0");
    if (params.ramp_periods < 1)
      violation("NBS at bus " + bus_str(bus) + ": ramp_periods must be >= 1");
    if (!std::isfinite(params.max_mw) || params.max_mw <= 0.0)
      violation("NBS at bus " + bus_str(bus) + ": max_mw must be > 0");
  }

  for (const auto& [bus, demand] : instance.critical_loads) {
    if (!bus_set.count(bus))
      violation("critical load at unknown bus " + bus_str(bus));
    if (instance.bs.count(bus))
      violation("bus " + bus_str(bus) +
                " carries both a BS generator and a critical load");
    if (!std::isfinite(demand) || demand <= 0.0)
      violation("critical load at bus " + bus_str(bus) +
                ": demand_mw must be > 0");
  }

  for (const auto& [bus, window] : instance.windows) {
    if (!bus_set.count(bus))
      violation("critical window at unknown bus " + bus_str(bus));
    else if (!instance.is_startup_node(bus))
      violation("critical window at bus " + bus_str(bus) +
                " which carries no NBS unit or critical load");
    if (window.earliest > window.latest)
      violation("critical window at bus " + bus_str(bus) +
                ": earliest > latest");
    if (window.earliest < 1)
      violation("critical window at bus " + bus_str(bus) + ": earliest < 1");
  }

  if (instance.balance) {
    for (const auto& [bus, mw] : instance.balance->net_mw) {
      if (!bus_set.count(bus))
        violation("balance entry at unknown bus " + bus_str(bus));
    }
    if (instance.balance->limit_mw < 0.0)
      violation("balance limit_mw must be >= 0");
  }

  if (!instance.buses.empty() &&
      !is_connected(instance.buses, instance.lines))
    violation("disconnected graph");

  return report;
}

Adjacency::Adjacency(const std::vector<int>& buses,
                     const std::vector<Line>& lines) {
  for (int bus : buses) adj_[bus];
  for (const Line& line : lines) {
    if (line.u == line.v) continue;
    adj_[line.u].push_back(line.v);
    adj_[line.v].push_back(line.u);
  }
  for (auto& [bus, neighbors] : adj_) {
    std::sort(neighbors.begin(), neighbors.end());
    neighbors.erase(std::unique(neighbors.begin(), neighbors.end()),
                    neighbors.end());
  }
}

const std::vector<int>& Adjacency::neighbors(int bus) const {
  auto it = adj_.find(bus);
  return it != adj_.end() ? it->second : empty_;
}

bool is_connected(const std::vector<int>& buses,
                  const std::vector<Line>& lines) {
  if (buses.empty()) return true;
  Adjacency adj(buses, lines);
  std::set<int> members(buses.begin(), buses.end());
  const auto tree = bfs_tree(adj, buses.front(), members);
  return tree.size() == members.size();
}

bool is_connected_subset(const Adjacency& adj, const std::set<int>& members) {
  if (members.empty()) return true;
  const auto tree = bfs_tree(adj, *members.begin(), members);
  return tree.size() == members.size();
}

Instance induced_subinstance(const Instance& instance,
                             const std::set<int>& members) {
  Instance sub;
  sub.name = instance.name;
  sub.period_minutes = instance.period_minutes;
  for (int bus : instance.buses)
    if (members.count(bus)) sub.buses.push_back(bus);
  for (const Line& line : instance.lines)
    if (members.count(line.u) && members.count(line.v))
      sub.lines.push_back(line);
  for (const auto& [bus, curve] : instance.bs)
    if (members.count(bus)) sub.bs.emplace(bus, curve);
  for (const auto& [bus, params] : instance.nbs)
    if (members.count(bus)) sub.nbs.emplace(bus, params);
  for (const auto& [bus, demand] : instance.critical_loads)
    if (members.count(bus)) sub.critical_loads.emplace(bus, demand);
  for (const auto& [bus, window] : instance.windows)
    if (members.count(bus)) sub.windows.emplace(bus, window);
  if (instance.balance) {
    Balance balance;
    balance.limit_mw = instance.balance->limit_mw;
    for (const auto& [bus, mw] : instance.balance->net_mw)
      if (members.count(bus)) balance.net_mw.emplace(bus, mw);
    sub.balance = std::move(balance);
  }
  return sub;
}

Instance restrict_lines(const Instance& instance,
                        const std::vector<Line>& lines) {
  Instance sub = instance;
  sub.lines = lines;
  return sub;
}

std::map<int, int> bfs_tree(const Adjacency& adj, int root,
                            const std::set<int>& members) {
  std::map<int, int> parent;
  if (!members.count(root)) return parent;
  parent[root] = root;
  std::deque<int> frontier{root};
  while (!frontier.empty()) {
    const int node = frontier.front();
    frontier.pop_front();
    for (int next : adj.neighbors(node)) {
      if (!members.count(next) || parent.count(next)) continue;
      parent[next] = node;
      frontier.push_back(next);
    }
  }
  return parent;
}

}  // namespace restore
