#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "restore/grid.hpp"
#include "restore/report.hpp"

namespace restore {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses and validates an instance document. Throws ParseError on malformed
// input (naming the field) and ValidationError naming the first violated
// invariant.
Instance load_instance(const std::string& text);
Instance load_instance_file(const std::string& path);

// Parse without validation (for reporting the full violation list).
Instance parse_instance(const std::string& text);
Instance parse_instance_file(const std::string& path);

std::string instance_to_json(const Instance& instance);

// --- topology import --------------------------------------------------------

struct CaseGenerator {
  int bus = 0;
  double pmax = 0.0;
  double ramp = 0.0;
};

struct CaseTopology {
  std::string name;
  std::vector<int> buses;
  std::map<int, double> demand_mw;  // Pd per bus
  std::vector<Line> lines;          // parallel branches collapsed, loops dropped
  std::vector<CaseGenerator> generators;
  std::vector<std::string> warnings;
};

// Reads the bus/branch/gen tables of a matrix-case text (the layout used by
// the common power-flow toolkits). Throws ParseError with the offending row.
CaseTopology import_topology(const std::string& case_text);
CaseTopology import_topology_file(const std::string& path);

// --- synthetic instances -----------------------------------------------------

struct GeneratorTemplate {
  std::vector<double> bs_capacities_mw;
  std::vector<NbsParams> nbs_units;
  std::vector<double> critical_loads_mw;
};

GeneratorTemplate load_template(const std::string& text);
GeneratorTemplate load_template_file(const std::string& path);

// Synthesizes an instance on the imported topology: BS curves (all equal to
// the template's maximum BS capacity) at the bs_count highest-degree buses,
// template NBS units rank-matched onto generator buses by descending
// capacity attribute, and template loads rank-matched onto the highest-demand
// remaining buses. Deterministic for fixed arguments.
Instance generate_instance(const CaseTopology& topology,
                           const GeneratorTemplate& tmpl, int bs_count,
                           std::uint64_t seed);

}  // namespace restore
