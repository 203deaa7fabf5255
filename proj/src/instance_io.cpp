#include "restore/instance_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace restore {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& error) {
    throw ParseError(std::string(what) + ": " + error.what());
  }
}

int require_int(const json& node, const char* field) {
  if (!node.contains(field) || !node[field].is_number_integer())
    throw ParseError(std::string("field '") + field +
                     "' missing or not an integer");
  return node[field].get<int>();
}

double require_number(const json& node, const char* field) {
  if (!node.contains(field) || !node[field].is_number())
    throw ParseError(std::string("field '") + field +
                     "' missing or not a number");
  return node[field].get<double>();
}

}  // namespace

Instance parse_instance(const std::string& text) {
  const json doc = parse_json(text, "instance");
  if (!doc.is_object()) throw ParseError("instance: top level must be an object");

  Instance instance;
  instance.name = doc.value("name", std::string("unnamed"));
  instance.period_minutes = doc.value("period_minutes", 5);

  if (!doc.contains("buses") || !doc["buses"].is_array())
    throw ParseError("field 'buses' missing or not an array");
  for (const auto& bus : doc["buses"]) {
    if (!bus.is_number_integer())
      throw ParseError("field 'buses': entries must be integers");
    instance.buses.push_back(bus.get<int>());
  }

  if (doc.contains("lines")) {
    if (!doc["lines"].is_array())
      throw ParseError("field 'lines' must be an array of pairs");
    for (const auto& pair : doc["lines"]) {
      if (!pair.is_array() || pair.size() != 2 ||
          !pair[0].is_number_integer() || !pair[1].is_number_integer())
        throw ParseError("field 'lines': entries must be [u, v] bus id pairs");
      Line line;
      line.u = pair[0].get<int>();
      line.v = pair[1].get<int>();
      if (line.u > line.v) std::swap(line.u, line.v);  // stored orientation
      instance.lines.push_back(line);
    }
  }

  if (doc.contains("bs")) {
    for (const auto& entry : doc["bs"]) {
      const int bus = require_int(entry, "bus");
      if (entry.contains("constant")) {
        instance.bs[bus] = BsCurve::constant_curve(require_number(entry, "constant"));
      } else if (entry.contains("curve") && entry["curve"].is_array()) {
        std::vector<double> series;
        for (const auto& value : entry["curve"]) {
          if (!value.is_number())
            throw ParseError("field 'bs.curve': entries must be numbers");
          series.push_back(value.get<double>());
        }
        instance.bs[bus] = BsCurve::from_series(std::move(series));
      } else {
        throw ParseError("bs entry needs 'constant' or 'curve'");
      }
    }
  }

  if (doc.contains("nbs")) {
    for (const auto& entry : doc["nbs"]) {
      const int bus = require_int(entry, "bus");
      NbsParams params;
      params.crank_mw = require_number(entry, "crank_mw");
      params.crank_periods = require_int(entry, "crank_periods");
      params.ramp_periods = require_int(entry, "ramp_periods");
      params.max_mw = require_number(entry, "max_mw");
      instance.nbs[bus] = params;
    }
  }

  if (doc.contains("critical_loads")) {
    for (const auto& entry : doc["critical_loads"]) {
      const int bus = require_int(entry, "bus");
      instance.critical_loads[bus] = require_number(entry, "demand_mw");
    }
  }

  if (doc.contains("critical_windows")) {
    for (const auto& entry : doc["critical_windows"]) {
      const int bus = require_int(entry, "bus");
      Window window;
      window.earliest = require_int(entry, "earliest");
      window.latest = require_int(entry, "latest");
      instance.windows[bus] = window;
    }
  }

  if (doc.contains("balance")) {
    const auto& node = doc["balance"];
    Balance balance;
    balance.limit_mw = require_number(node, "limit_mw");
    if (node.contains("net_mw")) {
      for (const auto& [key, value] : node["net_mw"].items()) {
        try {
          balance.net_mw[std::stoi(key)] = value.get<double>();
        } catch (const std::exception&) {
          throw ParseError("field 'balance.net_mw': keys must be bus ids");
        }
      }
    }
    instance.balance = std::move(balance);
  }

  return instance;
}

Instance load_instance(const std::string& text) {
  Instance instance = parse_instance(text);
  const auto report = validate_instance(instance);
  if (!report.ok()) throw ValidationError(report.violations.front());
  return instance;
}

Instance load_instance_file(const std::string& path) {
  return load_instance(read_file(path));
}

Instance parse_instance_file(const std::string& path) {
  return parse_instance(read_file(path));
}

std::string instance_to_json(const Instance& instance) {
  nlohmann::ordered_json doc;
  doc["name"] = instance.name;
  doc["period_minutes"] = instance.period_minutes;
  doc["buses"] = instance.buses;
  auto lines = nlohmann::ordered_json::array();
  for (const Line& line : instance.lines)
    lines.push_back({line.u, line.v});
  doc["lines"] = std::move(lines);

  auto bs = nlohmann::ordered_json::array();
  for (const auto& [bus, curve] : instance.bs) {
    nlohmann::ordered_json entry;
    entry["bus"] = bus;
    if (curve.is_constant())
      entry["constant"] = curve.constant;
    else
      entry["curve"] = curve.series;
    bs.push_back(std::move(entry));
  }
  doc["bs"] = std::move(bs);

  auto nbs = nlohmann::ordered_json::array();
  for (const auto& [bus, params] : instance.nbs) {
    nbs.push_back({{"bus", bus},
                   {"crank_mw", params.crank_mw},
                   {"crank_periods", params.crank_periods},
                   {"ramp_periods", params.ramp_periods},
                   {"max_mw", params.max_mw}});
  }
  doc["nbs"] = std::move(nbs);

  if (!instance.critical_loads.empty()) {
    auto loads = nlohmann::ordered_json::array();
    for (const auto& [bus, demand] : instance.critical_loads)
      loads.push_back({{"bus", bus}, {"demand_mw", demand}});
    doc["critical_loads"] = std::move(loads);
  }
  if (!instance.windows.empty()) {
    auto windows = nlohmann::ordered_json::array();
    for (const auto& [bus, window] : instance.windows)
      windows.push_back({{"bus", bus},
                         {"earliest", window.earliest},
                         {"latest", window.latest}});
    doc["critical_windows"] = std::move(windows);
  }
  if (instance.balance) {
    nlohmann::ordered_json net;
    for (const auto& [bus, mw] : instance.balance->net_mw)
      net[std::to_string(bus)] = mw;
    doc["balance"] = {{"limit_mw", instance.balance->limit_mw},
                      {"net_mw", std::move(net)}};
  }
  return doc.dump(2) + "\n";
}

// --- topology import ---------------------------------------------------------

namespace {

// Extracts the numeric rows of "<anything>.<table> = [ ... ];".
std::vector<std::vector<double>> read_matrix(const std::string& text,
                                             const std::string& table,
                                             bool required) {
  const std::string key = "." + table;
  std::size_t pos = 0;
  std::size_t found = std::string::npos;
  while ((pos = text.find(key, pos)) != std::string::npos) {
    std::size_t after = pos + key.size();
    while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after])))
      ++after;
    if (after < text.size() && text[after] == '=') {
      found = after;
      break;
    }
    pos += key.size();
  }
  if (found == std::string::npos) {
    if (required) throw ParseError("case text: table '" + table + "' not found");
    return {};
  }
  const std::size_t open = text.find('[', found);
  const std::size_t close = text.find("];", open);
  if (open == std::string::npos || close == std::string::npos)
    throw ParseError("case text: table '" + table + "' is not terminated");

  std::vector<std::vector<double>> rows;
  std::istringstream body(text.substr(open + 1, close - open - 1));
  std::string line;
  int row_index = 0;
  while (std::getline(body, line)) {
    if (const auto comment = line.find('%'); comment != std::string::npos)
      line = line.substr(0, comment);
    std::replace(line.begin(), line.end(), ';', ' ');
    std::istringstream fields(line);
    std::vector<double> row;
    double value;
    while (fields >> value) row.push_back(value);
    if (!fields.eof()) {
      throw ParseError("case text: table '" + table + "' row " +
                       std::to_string(row_index + 1) + " has a malformed field");
    }
    if (!row.empty()) {
      rows.push_back(std::move(row));
      ++row_index;
    }
  }
  return rows;
}

}  // namespace

CaseTopology import_topology(const std::string& case_text) {
  CaseTopology topo;

  if (const auto fn = case_text.find("function mpc ="); fn != std::string::npos) {
    std::istringstream rest(case_text.substr(fn + 14));
    rest >> topo.name;
  }

  const auto bus_rows = read_matrix(case_text, "bus", true);
  std::set<int> bus_set;
  int row_index = 0;
  for (const auto& row : bus_rows) {
    ++row_index;
    if (row.size() < 3)
      throw ParseError("case text: bus row " + std::to_string(row_index) +
                       " has too few columns");
    const int bus = static_cast<int>(row[0]);
    if (!bus_set.insert(bus).second)
      throw ParseError("case text: duplicate bus " + std::to_string(bus) +
                       " in row " + std::to_string(row_index));
    topo.buses.push_back(bus);
    topo.demand_mw[bus] = row[2];  // Pd column
  }

  const auto branch_rows = read_matrix(case_text, "branch", true);
  std::set<std::pair<int, int>> seen;
  row_index = 0;
  for (const auto& row : branch_rows) {
    ++row_index;
    if (row.size() < 2)
      throw ParseError("case text: branch row " + std::to_string(row_index) +
                       " has too few columns");
    int u = static_cast<int>(row[0]);
    int v = static_cast<int>(row[1]);
    // branch status column (11) honored when present
    if (row.size() > 10 && row[10] == 0.0) {
      topo.warnings.push_back("branch row " + std::to_string(row_index) +
                              " is out of service; skipped");
      continue;
    }
    if (u == v) {
      topo.warnings.push_back("self-loop branch at bus " + std::to_string(u) +
                              " dropped");
      continue;
    }
    if (!bus_set.count(u) || !bus_set.count(v))
      throw ParseError("case text: branch row " + std::to_string(row_index) +
                       " references an unknown bus");
    if (u > v) std::swap(u, v);
    if (!seen.insert({u, v}).second) {
      topo.warnings.push_back("parallel branch (" + std::to_string(u) + "," +
                              std::to_string(v) + ") collapsed");
      continue;
    }
    topo.lines.push_back({u, v});
  }

  const auto gen_rows = read_matrix(case_text, "gen", false);
  row_index = 0;
  for (const auto& row : gen_rows) {
    ++row_index;
    if (row.size() < 2)
      throw ParseError("case text: gen row " + std::to_string(row_index) +
                       " has too few columns");
    CaseGenerator gen;
    gen.bus = static_cast<int>(row[0]);
    if (!bus_set.count(gen.bus))
      throw ParseError("case text: gen row " + std::to_string(row_index) +
                       " references an unknown bus");
    gen.pmax = row.size() > 8 ? row[8] : 0.0;      // PMAX column
    gen.ramp = row.size() > 16 ? row[16] : 0.0;    // RAMP_10 column
    topo.generators.push_back(gen);
  }

  return topo;
}

CaseTopology import_topology_file(const std::string& path) {
  return import_topology(read_file(path));
}

// --- synthetic instances -------------------------------------------------------

GeneratorTemplate load_template(const std::string& text) {
  const json doc = parse_json(text, "template");
  GeneratorTemplate tmpl;
  if (!doc.contains("bs_capacities_mw") || !doc["bs_capacities_mw"].is_array())
    throw ParseError("template: field 'bs_capacities_mw' missing");
  for (const auto& value : doc["bs_capacities_mw"])
    tmpl.bs_capacities_mw.push_back(value.get<double>());
  if (doc.contains("nbs")) {
    for (const auto& entry : doc["nbs"]) {
      NbsParams params;
      params.crank_mw = require_number(entry, "crank_mw");
      params.crank_periods = require_int(entry, "crank_periods");
      params.ramp_periods = require_int(entry, "ramp_periods");
      params.max_mw = require_number(entry, "max_mw");
      tmpl.nbs_units.push_back(params);
    }
  }
  if (doc.contains("critical_loads_mw")) {
    for (const auto& value : doc["critical_loads_mw"])
      tmpl.critical_loads_mw.push_back(value.get<double>());
  }
  if (tmpl.bs_capacities_mw.empty())
    throw ParseError("template: no BS capacities");
  return tmpl;
}

GeneratorTemplate load_template_file(const std::string& path) {
  return load_template(read_file(path));
}

namespace {

// rank -> rank quantile mapping between collections of different sizes
std::size_t rank_match(std::size_t rank, std::size_t targets,
                       std::size_t sources) {
  if (sources <= 1 || targets <= 1) return 0;
  return (rank * (sources - 1) + (targets - 1) / 2) / (targets - 1);
}

}  // namespace

Instance generate_instance(const CaseTopology& topology,
                           const GeneratorTemplate& tmpl, int bs_count,
                           std::uint64_t seed) {
  if (bs_count < 1) throw std::invalid_argument("bs_count must be >= 1");
  if (bs_count > static_cast<int>(topology.buses.size()))
    throw std::invalid_argument("bs_count exceeds the number of buses");
  if (tmpl.bs_capacities_mw.empty())
    throw std::invalid_argument("template has no BS capacities");

  Instance instance;
  instance.name = (topology.name.empty() ? "case" : topology.name) + "-bs" +
                  std::to_string(bs_count) + "-s" + std::to_string(seed);
  instance.buses = topology.buses;
  instance.lines = topology.lines;

  // BS buses: highest degree, ties toward the lowest bus id.
  std::map<int, int> degree;
  for (const Line& line : topology.lines) {
    ++degree[line.u];
    ++degree[line.v];
  }
  std::vector<int> by_degree = topology.buses;
  std::sort(by_degree.begin(), by_degree.end(), [&degree](int a, int b) {
    const int da = degree.count(a) ? degree.at(a) : 0;
    const int db = degree.count(b) ? degree.at(b) : 0;
    if (da != db) return da > db;
    return a < b;
  });
  const double bs_capacity = *std::max_element(tmpl.bs_capacities_mw.begin(),
                                               tmpl.bs_capacities_mw.end());
  std::set<int> bs_set;
  for (int i = 0; i < bs_count; ++i) {
    const int bus = by_degree[static_cast<std::size_t>(i)];
    instance.bs[bus] = BsCurve::constant_curve(bs_capacity);
    bs_set.insert(bus);
  }

  // NBS units rank-matched onto generator buses by descending capacity
  // attribute (Pmax, falling back to the ramp rate).
  std::map<int, double> attribute;
  for (const CaseGenerator& gen : topology.generators) {
    if (bs_set.count(gen.bus)) continue;
    const double value = gen.pmax > 0.0 ? gen.pmax : gen.ramp;
    attribute[gen.bus] += value;
  }
  std::vector<int> gen_buses;
  for (const auto& [bus, value] : attribute) gen_buses.push_back(bus);
  std::sort(gen_buses.begin(), gen_buses.end(), [&attribute](int a, int b) {
    if (attribute.at(a) != attribute.at(b))
      return attribute.at(a) > attribute.at(b);
    return a < b;
  });
  std::vector<NbsParams> ranked_units = tmpl.nbs_units;
  std::sort(ranked_units.begin(), ranked_units.end(),
            [](const NbsParams& a, const NbsParams& b) {
              return a.max_mw > b.max_mw;
            });
  if (!ranked_units.empty()) {
    for (std::size_t r = 0; r < gen_buses.size(); ++r) {
      const auto source = rank_match(r, gen_buses.size(), ranked_units.size());
      instance.nbs[gen_buses[r]] = ranked_units[source];
    }
  }

  // Critical loads rank-matched onto the highest-demand remaining buses.
  std::vector<double> ranked_loads = tmpl.critical_loads_mw;
  std::sort(ranked_loads.begin(), ranked_loads.end(), std::greater<>());
  if (!ranked_loads.empty()) {
    std::vector<int> load_buses;
    for (const auto& [bus, demand] : topology.demand_mw) {
      if (demand <= 0.0 || bs_set.count(bus) || instance.nbs.count(bus))
        continue;
      load_buses.push_back(bus);
    }
    std::sort(load_buses.begin(), load_buses.end(),
              [&topology](int a, int b) {
                const double da = topology.demand_mw.at(a);
                const double db = topology.demand_mw.at(b);
                if (da != db) return da > db;
                return a < b;
              });
    const std::size_t n_loads =
        std::min(ranked_loads.size(), load_buses.size());
    for (std::size_t r = 0; r < n_loads; ++r)
      instance.critical_loads[load_buses[r]] = ranked_loads[r];
  }

  return instance;
}

}  // namespace restore
