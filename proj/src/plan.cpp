#include "restore/plan.hpp"

#include <algorithm>
#include <set>

namespace restore {

std::map<int, std::vector<int>> SectionalizingPlan::islands(
    const Instance& instance) const {
  std::map<int, std::vector<int>> out;
  for (int bs : instance.bs_nodes()) out[bs].push_back(bs);
  for (const auto& [bus, bs] : assign) {
    if (bus == bs) continue;  // BS self-assignment already covered
    auto it = out.find(bs);
    if (it != out.end()) it->second.push_back(bus);
  }
  for (auto& [bs, members] : out) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
  }
  return out;
}

std::vector<int> SectionalizingPlan::unassigned(const Instance& instance) const {
  std::vector<int> out;
  for (int bus : instance.transshipment_nodes())
    if (!assign.count(bus)) out.push_back(bus);
  return out;
}

std::vector<std::string> validate_plan(const Instance& instance,
                                       const SectionalizingPlan& plan) {
  std::vector<std::string> violations;
  const std::set<int> bus_set(instance.buses.begin(), instance.buses.end());
  const auto bs_nodes = instance.bs_nodes();
  const std::set<int> bs_set(bs_nodes.begin(), bs_nodes.end());

  for (const auto& [bus, bs] : plan.assign) {
    if (!bus_set.count(bus))
      violations.push_back("assignment references unknown bus " +
                           std::to_string(bus));
    if (!bs_set.count(bs))
      violations.push_back("bus " + std::to_string(bus) +
                           " assigned to non-BS bus " + std::to_string(bs));
  }

  for (int bs : bs_nodes) {
    const auto island = plan.island_of(bs);
    if (island && *island != bs)
      violations.push_back("BS bus " + std::to_string(bs) +
                           " assigned to a different island");
  }

  for (int bus : instance.startup_nodes()) {
    if (!plan.island_of(bus))
      violations.push_back("bus " + std::to_string(bus) +
                           " (NBS or critical load) is unassigned");
  }

  const Adjacency adj(instance.buses, instance.lines);
  for (const auto& [bs, members] : plan.islands(instance)) {
    const std::set<int> member_set(members.begin(), members.end());
    const auto tree = bfs_tree(adj, bs, member_set);
    if (tree.size() != member_set.size())
      violations.push_back("island " + std::to_string(bs) +
                           " is disconnected");
  }
  return violations;
}

}  // namespace restore
