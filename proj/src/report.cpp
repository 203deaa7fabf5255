#include "restore/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace restore {

namespace {

std::string format_number(double value) {
  if (std::fabs(value - std::round(value)) < 1e-9) {
    std::ostringstream out;
    out << static_cast<long long>(std::llround(value));
    return out.str();
  }
  std::ostringstream out;
  out << std::setprecision(9) << value;
  return out.str();
}

std::string format_elapsed(const std::optional<double>& elapsed) {
  if (!elapsed) return "";
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << *elapsed;
  return out.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace

void write_bound_log_csv(const std::vector<BoundEvent>& rows,
                         std::ostream& out) {
  out << "elapsed_sec,track,event,value\n";
  for (const BoundEvent& row : rows) {
    out << format_elapsed(row.elapsed_sec) << "," << row.track << ","
        << row.event << "," << format_number(row.value) << "\n";
  }
}

std::vector<BoundEvent> read_bound_log_csv(std::istream& in) {
  std::vector<BoundEvent> rows;
  std::string line;
  int line_number = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("elapsed_sec,", 0) != 0)
        throw ParseError("bound log line 1: expected header "
                         "'elapsed_sec,track,event,value'");
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 4)
      throw ParseError("bound log line " + std::to_string(line_number) +
                       ": expected 4 fields, found " +
                       std::to_string(fields.size()));
    BoundEvent row;
    if (!fields[0].empty()) {
      try {
        row.elapsed_sec = std::stod(fields[0]);
      } catch (const std::exception&) {
        throw ParseError("bound log line " + std::to_string(line_number) +
                         ": bad elapsed_sec '" + fields[0] + "'");
      }
    }
    row.track = fields[1];
    row.event = fields[2];
    if (row.track != "lower" && row.track != "upper")
      throw ParseError("bound log line " + std::to_string(line_number) +
                       ": unknown track '" + row.track + "'");
    try {
      row.value = std::stod(fields[3]);
    } catch (const std::exception&) {
      throw ParseError("bound log line " + std::to_string(line_number) +
                       ": bad value '" + fields[3] + "'");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_tidy_bounds_csv(const std::vector<BoundEvent>& rows,
                           std::ostream& out) {
  out << "track,seq,elapsed_sec,value\n";
  std::map<std::string, int> seq;
  std::map<std::string, double> last;
  for (const BoundEvent& row : rows) {
    const int index = seq[row.track]++;
    if (auto it = last.find(row.track); it != last.end()) {
      if (row.track == "lower" && row.value < it->second - 1e-9)
        throw std::runtime_error("lower bound decreased at " + row.event);
      if (row.track == "upper" && row.value > it->second + 1e-9)
        throw std::runtime_error("upper bound increased at " + row.event);
    }
    last[row.track] = row.value;
    out << row.track << "," << index << "," << format_elapsed(row.elapsed_sec)
        << "," << format_number(row.value) << "\n";
  }
}

std::string schedule_to_json(const IslandView& island,
                             const Schedule& schedule) {
  nlohmann::ordered_json doc;
  doc["island_bs"] = island.bs_bus;
  doc["rt"] = schedule.rt;
  auto starts = nlohmann::ordered_json::array();
  for (const auto& [bus, period] : schedule.start)
    starts.push_back({{"bus", bus}, {"period", period}});
  doc["starts"] = std::move(starts);
  const auto check = validate_schedule(island, schedule);
  doc["trace"] = check.trace;
  return doc.dump(2) + "\n";
}

std::string plan_to_json(const Instance& instance,
                         const SectionalizingPlan& plan,
                         const std::map<int, Schedule>& schedules,
                         const std::map<int, int>& island_rt, int overall_rt,
                         const std::vector<int>& bottleneck) {
  nlohmann::ordered_json doc;
  doc["instance"] = instance.name;
  doc["overall_rt"] = overall_rt;
  doc["bottleneck_bs"] = bottleneck;
  auto islands = nlohmann::ordered_json::array();
  for (const auto& [bs, members] : plan.islands(instance)) {
    nlohmann::ordered_json island;
    island["bs"] = bs;
    island["members"] = members;
    if (auto it = island_rt.find(bs); it != island_rt.end())
      island["rt"] = it->second;
    if (auto it = schedules.find(bs); it != schedules.end()) {
      auto starts = nlohmann::ordered_json::array();
      for (const auto& [bus, period] : it->second.start)
        starts.push_back({{"bus", bus}, {"period", period}});
      island["schedule"] = {{"rt", it->second.rt},
                            {"starts", std::move(starts)}};
    }
    islands.push_back(std::move(island));
  }
  doc["islands"] = std::move(islands);
  doc["unassigned_transshipment"] = plan.unassigned(instance);
  return doc.dump(2) + "\n";
}

void write_run_report_csv(std::vector<RunRow> rows, bool wall_timings,
                          std::ostream& out) {
  std::sort(rows.begin(), rows.end(), [](const RunRow& a, const RunRow& b) {
    const double fa =
        a.feasible ? static_cast<double>(*a.final_rt) : 1e18;
    const double fb =
        b.feasible ? static_cast<double>(*b.final_rt) : 1e18;
    if (fa != fb) return fa > fb;  // worst first
    return a.run_index < b.run_index;
  });
  out << "run_index,seed,feasible,time_to_feasible_sec,initial_rt,final_rt,"
         "ls_improved\n";
  for (const RunRow& row : rows) {
    out << row.run_index << "," << row.seed << ","
        << (row.feasible ? "yes" : "no") << ",";
    if (wall_timings && row.time_to_feasible_sec)
      out << format_elapsed(row.time_to_feasible_sec);
    out << ",";
    if (row.initial_rt) out << *row.initial_rt;
    out << ",";
    if (row.final_rt) out << *row.final_rt;
    out << "," << (row.ls_improved ? "yes" : "no") << "\n";
  }
}

}  // namespace restore
