#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "restore/grid.hpp"
#include "restore/plan.hpp"
#include "restore/sequencing.hpp"
#include "restore/util.hpp"

namespace restore {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One bound-evolution event. elapsed_sec stays empty unless wall timings are
// enabled, which keeps emitted files byte-reproducible for seeded runs.
struct BoundEvent {
  std::optional<double> elapsed_sec;
  std::string track;  // "lower" or "upper"
  std::string event;
  double value = 0.0;
};

class BoundLog {
 public:
  explicit BoundLog(bool wall_timings = false) : wall_(wall_timings) {}

  void add(const std::string& track, const std::string& event, double value) {
    BoundEvent row;
    if (wall_) row.elapsed_sec = watch_.elapsed_sec();
    row.track = track;
    row.event = event;
    row.value = value;
    rows_.push_back(std::move(row));
  }

  const std::vector<BoundEvent>& rows() const { return rows_; }
  bool wall_timings() const { return wall_; }

 private:
  bool wall_ = false;
  Stopwatch watch_;
  std::vector<BoundEvent> rows_;
};

void write_bound_log_csv(const std::vector<BoundEvent>& rows,
                         std::ostream& out);
// Throws ParseError naming the offending line.
std::vector<BoundEvent> read_bound_log_csv(std::istream& in);

// Tidy per-track series (track,seq,elapsed_sec,value) for plotting. Validates
// that the lower track is non-decreasing and the upper track non-increasing;
// throws std::runtime_error naming the first offending row otherwise.
void write_tidy_bounds_csv(const std::vector<BoundEvent>& rows,
                           std::ostream& out);

// --- schedule / plan files -------------------------------------------------

std::string schedule_to_json(const IslandView& island,
                             const Schedule& schedule);

// Plan file: islands with members, per-island schedule and restoration time,
// unassigned transshipment buses, the overall restoration time and the
// bottleneck BS buses.
std::string plan_to_json(const Instance& instance,
                         const SectionalizingPlan& plan,
                         const std::map<int, Schedule>& schedules,
                         const std::map<int, int>& island_rt, int overall_rt,
                         const std::vector<int>& bottleneck);

// --- randomized run reports -------------------------------------------------

struct RunRow {
  int run_index = 0;
  std::uint64_t seed = 0;
  bool feasible = false;
  std::optional<double> time_to_feasible_sec;
  std::optional<int> initial_rt;
  std::optional<int> final_rt;
  bool ls_improved = false;
};

// Rows are emitted sorted by final value, worst first (infeasible runs lead),
// ties by run index. Timing cells stay empty unless wall timings are on.
void write_run_report_csv(std::vector<RunRow> rows, bool wall_timings,
                          std::ostream& out);

}  // namespace restore
