#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "restore/report.hpp"
#include "support.hpp"

using namespace restore;

TEST_CASE("bound log round trip") {
  BoundLog log;
  log.add("lower", "aggregate", 4);
  log.add("upper", "spanning_tree", 9);
  log.add("upper", "local_search", 6);
  log.add("lower", "probe_infeasible", 5);

  std::ostringstream out;
  write_bound_log_csv(log.rows(), out);
  const auto text = out.str();
  CHECK(text.rfind("elapsed_sec,track,event,value\n", 0) == 0);
  CHECK(text.find(",lower,aggregate,4\n") != std::string::npos);

  std::istringstream in(text);
  const auto rows = read_bound_log_csv(in);
  REQUIRE(rows.size() == 4);
  CHECK(rows[2].event == "local_search");
  CHECK(rows[2].value == 6.0);
  CHECK_FALSE(rows[0].elapsed_sec.has_value());  // timings default off
}

TEST_CASE("bound log parse errors carry the line number") {
  SUBCASE("bad header") {
    std::istringstream in("nope\n");
    CHECK_THROWS_WITH_AS(read_bound_log_csv(in),
                         doctest::Contains("line 1"), ParseError);
  }
  SUBCASE("wrong field count") {
    std::istringstream in("elapsed_sec,track,event,value\n1.0,lower,x\n");
    CHECK_THROWS_WITH_AS(read_bound_log_csv(in), doctest::Contains("line 2"),
                         ParseError);
  }
  SUBCASE("bad value") {
    std::istringstream in(
        "elapsed_sec,track,event,value\n,lower,aggregate,abc\n");
    CHECK_THROWS_WITH_AS(read_bound_log_csv(in), doctest::Contains("line 2"),
                         ParseError);
  }
  SUBCASE("unknown track") {
    std::istringstream in("elapsed_sec,track,event,value\n,middle,x,1\n");
    CHECK_THROWS_AS(read_bound_log_csv(in), ParseError);
  }
}

TEST_CASE("tidy bound series") {
  SUBCASE("empty log gives a header-only file") {
    std::ostringstream out;
    write_tidy_bounds_csv({}, out);
    CHECK(out.str() == "track,seq,elapsed_sec,value\n");
  }
  SUBCASE("interleaved tracks become two monotone series") {
    std::vector<BoundEvent> rows = {
        {std::nullopt, "lower", "aggregate", 4},
        {std::nullopt, "upper", "spanning_tree", 9},
        {std::nullopt, "lower", "probe_infeasible", 5},
        {std::nullopt, "upper", "local_search", 6},
        {std::nullopt, "upper", "reduced_graph", 6},
    };
    std::ostringstream out;
    write_tidy_bounds_csv(rows, out);
    const auto text = out.str();
    CHECK(text.find("lower,0,,4\n") != std::string::npos);
    CHECK(text.find("lower,1,,5\n") != std::string::npos);
    CHECK(text.find("upper,2,,6\n") != std::string::npos);
  }
  SUBCASE("a decreasing lower bound is rejected") {
    std::vector<BoundEvent> rows = {
        {std::nullopt, "lower", "a", 5},
        {std::nullopt, "lower", "b", 4},
    };
    std::ostringstream out;
    CHECK_THROWS_AS(write_tidy_bounds_csv(rows, out), std::runtime_error);
  }
  SUBCASE("an increasing upper bound is rejected") {
    std::vector<BoundEvent> rows = {
        {std::nullopt, "upper", "a", 5},
        {std::nullopt, "upper", "b", 6},
    };
    std::ostringstream out;
    CHECK_THROWS_AS(write_tidy_bounds_csv(rows, out), std::runtime_error);
  }
}

TEST_CASE("run report emission") {
  std::vector<RunRow> rows(3);
  rows[0] = {0, 100, true, 2.5, 6, 4, true};
  rows[1] = {1, 101, false, std::nullopt, std::nullopt, std::nullopt, false};
  rows[2] = {2, 102, true, 1.0, 5, 5, false};

  std::ostringstream out;
  write_run_report_csv(rows, /*wall_timings=*/false, out);
  const auto text = out.str();
  CHECK(text.rfind("run_index,seed,feasible,time_to_feasible_sec,initial_rt,"
                   "final_rt,ls_improved\n",
                   0) == 0);
  // infeasible first, then descending final value
  const auto line1 = text.find("\n1,101,no,,,,no\n");
  const auto line2 = text.find("\n2,102,yes,,5,5,no\n");
  const auto line3 = text.find("\n0,100,yes,,6,4,yes\n");
  CHECK(line1 != std::string::npos);
  CHECK(line2 != std::string::npos);
  CHECK(line3 != std::string::npos);
  CHECK(line1 < line2);
  CHECK(line2 < line3);

  SUBCASE("wall timings fill the column") {
    std::ostringstream timed;
    write_run_report_csv(rows, /*wall_timings=*/true, timed);
    CHECK(timed.str().find("0,100,yes,2.500,6,4,yes") != std::string::npos);
  }
}

TEST_CASE("schedule and plan documents") {
  const auto instance = testsupport::demo3();
  const auto island = testsupport::demo3_island(20);
  Schedule schedule;
  schedule.start[2] = 1;
  schedule.start[3] = 4;
  schedule.rt = 4;

  const auto schedule_doc = schedule_to_json(island, schedule);
  CHECK(schedule_doc.find("\"island_bs\": 1") != std::string::npos);
  CHECK(schedule_doc.find("\"rt\": 4") != std::string::npos);
  CHECK(schedule_doc.find("\"trace\"") != std::string::npos);
  CHECK(schedule_doc.find("250.0") != std::string::npos);

  SectionalizingPlan plan;
  for (int bus : instance.buses) plan.assign[bus] = 1;
  const auto plan_doc = plan_to_json(instance, plan, {{1, schedule}},
                                     {{1, 4}}, 4, {1});
  CHECK(plan_doc.find("\"overall_rt\": 4") != std::string::npos);
  CHECK(plan_doc.find("\"bottleneck_bs\"") != std::string::npos);
  CHECK(plan_doc.find("\"members\"") != std::string::npos);
  CHECK(plan_doc.find("\"unassigned_transshipment\"") != std::string::npos);
}
