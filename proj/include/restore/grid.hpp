#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace restore {

enum class BusRole { BlackStart, NonBlackStart, Transshipment };

// Transmission line with its stored orientation. Orientation is normalized at
// load time (lowest bus id first) so flow variables are reproducible.
struct Line {
  int u = 0;
  int v = 0;

  friend bool operator==(const Line& a, const Line& b) {
    return a.u == b.u && a.v == b.v;
  }
  friend bool operator<(const Line& a, const Line& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  }
};

// Non-black-start unit: consumes crank_mw for crank_periods, then ramps
// linearly from zero over ramp_periods up to max_mw.
struct NbsParams {
  double crank_mw = 0.0;
  int crank_periods = 0;
  int ramp_periods = 1;
  double max_mw = 0.0;
};

// Output of a unit at the given offset since its start period (offset >= 1).
// Offsets 1..crank_periods consume crank_mw; the ramp is linear starting at 0,
// reaching max_mw one period past the ramp window and holding it thereafter.
double capacity_at(const NbsParams& unit, int offset);

// Black-start supply curve r(t). Either a constant or an explicit series;
// a series shorter than the horizon holds its last value.
struct BsCurve {
  std::vector<double> series;
  double constant = 0.0;

  bool is_constant() const { return series.empty(); }
  double at(int period) const;

  static BsCurve constant_curve(double mw);
  static BsCurve from_series(std::vector<double> values);
};

// Earliest/latest admissible start period for a unit.
struct Window {
  int earliest = 1;
  int latest = 1;
};

// Optional load-generation balance data: per-bus net generation d_i
// (positive generation, negative load) and the admissible island imbalance.
struct Balance {
  double limit_mw = 0.0;
  std::map<int, double> net_mw;
};

// Toggles for the optional constraint families.
struct ModelOptions {
  bool critical_windows = false;
  std::optional<double> balance_limit_mw;
};

struct Instance {
  std::string name;
  int period_minutes = 5;
  std::vector<int> buses;
  std::vector<Line> lines;
  std::map<int, BsCurve> bs;            // black-start bus -> supply curve
  std::map<int, NbsParams> nbs;         // NBS generator bus -> parameters
  std::map<int, double> critical_loads; // bus -> demand_mw
  std::map<int, Window> windows;
  std::optional<Balance> balance;

  BusRole role(int bus) const;
  bool is_startup_node(int bus) const;   // member of I: NBS unit or critical load
  std::vector<int> startup_nodes() const;  // set I, ascending
  std::vector<int> bs_nodes() const;       // set J, ascending
  std::vector<int> transshipment_nodes() const;  // ascending

  // Parameters of an I-member; critical loads are encoded against the model
  // horizon (crank for the whole horizon, never produce).
  NbsParams startup_params(int bus, int horizon) const;

  double net_mw(int bus) const;  // 0 when no balance data for the bus
};

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_instance(const Instance& instance);

// --- graph helpers -------------------------------------------------------

class Adjacency {
 public:
  Adjacency(const std::vector<int>& buses, const std::vector<Line>& lines);

  bool contains(int bus) const { return adj_.count(bus) != 0; }
  // Neighbors in ascending bus id.
  const std::vector<int>& neighbors(int bus) const;

 private:
  std::map<int, std::vector<int>> adj_;
  std::vector<int> empty_;
};

bool is_connected(const std::vector<int>& buses, const std::vector<Line>& lines);

// True when the induced subgraph on `members` is connected (empty -> true).
bool is_connected_subset(const Adjacency& adj, const std::set<int>& members);

// BFS tree over the induced subgraph on `members`, rooted at `root`
// (which must be a member). Neighbors are explored in ascending bus id.
// Returns parent map for reached nodes; parent of the root is the root.
std::map<int, int> bfs_tree(const Adjacency& adj, int root,
                            const std::set<int>& members);

// Sub-instance on a bus subset: induced lines, restricted generators, loads,
// windows and balance data.
Instance induced_subinstance(const Instance& instance,
                             const std::set<int>& members);

// Same buses, lines restricted to the given subset.
Instance restrict_lines(const Instance& instance,
                        const std::vector<Line>& lines);

}  // namespace restore
