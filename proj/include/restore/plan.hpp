#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "restore/grid.hpp"

namespace restore {

// Assignment of buses to black-start-rooted islands. BS buses always belong
// to their own island; transshipment buses may stay unassigned.
struct SectionalizingPlan {
  std::map<int, int> assign;  // bus -> BS bus

  std::optional<int> island_of(int bus) const {
    auto it = assign.find(bus);
    if (it == assign.end()) return std::nullopt;
    return it->second;
  }

  // bs -> ascending members (always includes the BS bus itself).
  std::map<int, std::vector<int>> islands(const Instance& instance) const;

  // Transshipment buses with no island, ascending.
  std::vector<int> unassigned(const Instance& instance) const;
};

// Checks the plan invariants: assignments reference BS buses, each BS bus
// roots its own island, every NBS/critical bus is assigned, and each island
// induces a connected subgraph containing its BS bus (by graph search,
// independent of any flow model). Returns the violated invariants.
std::vector<std::string> validate_plan(const Instance& instance,
                                       const SectionalizingPlan& plan);

}  // namespace restore
