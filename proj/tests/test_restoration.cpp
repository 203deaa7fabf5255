#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "restore/restoration.hpp"
#include "restore/util.hpp"
#include "support.hpp"

using namespace restore;

namespace {

std::unique_ptr<milp::Backend> reference() {
  return milp::make_reference_backend();
}

Instance two_node() {
  Instance instance;
  instance.name = "pair";
  instance.buses = {1, 2};
  instance.lines = {{1, 2}};
  instance.bs[1] = BsCurve::constant_curve(10.0);
  instance.nbs[2] = {5.0, 1, 1, 20.0};
  return instance;
}

Instance demo3_path() {
  auto instance = testsupport::demo3();
  instance.lines = {{1, 2}, {2, 3}};
  return instance;
}

// Two sources, one oversized unit stuck behind the weak one.
Instance hopeless() {
  Instance instance;
  instance.name = "hopeless";
  instance.buses = {1, 2, 3};
  instance.lines = {{1, 2}, {2, 3}};
  instance.bs[1] = BsCurve::constant_curve(100.0);
  instance.bs[2] = BsCurve::constant_curve(1.0);
  instance.nbs[3] = {50.0, 2, 2, 60.0};
  return instance;
}

}  // namespace

TEST_CASE("model shape on the two-node system") {
  PartitionModelLayout layout;
  const auto model = build_ppsr_model(two_node(), 3, {}, &layout);
  CHECK(layout.x.size() == 2);
  CHECK(layout.s.size() == 3);
  CHECK(layout.y.size() == 1);
  CHECK(layout.f.size() == 1);
  CHECK(model.num_vars() == 2 + 3 + 1 + 1 + 1);
}

TEST_CASE("two-node optimum") {
  const auto backend = reference();
  const auto result = solve_ppsr(two_node(), 3, *backend);
  REQUIRE(result.solution);
  CHECK(result.solution->rt == 1);
  CHECK(result.solution->plan.island_of(2) == 1);
}

TEST_CASE("single-source system on a path solves to four periods") {
  const auto backend = reference();
  const auto result = solve_ppsr(demo3_path(), 6, *backend);
  REQUIRE(result.solution);
  CHECK(result.solution->rt == 4);
  CHECK(result.solution->island_rt.at(1) == 4);
  CHECK(result.solution->bottleneck == std::vector<int>{1});
  CHECK(validate_plan(demo3_path(), result.solution->plan).empty());

  SUBCASE("horizon below the optimum is infeasible") {
    CHECK(solve_ppsr(demo3_path(), 3, *backend).status ==
          milp::SolveStatus::Infeasible);
  }
}

TEST_CASE("one island means the flow fixes every bus") {
  Instance instance;
  instance.buses = {1, 2, 3, 4};
  instance.lines = {{1, 2}, {2, 3}, {3, 4}, {1, 4}};
  instance.bs[1] = BsCurve::constant_curve(8.0);
  instance.nbs[2] = {4.0, 1, 2, 30.0};
  instance.nbs[3] = {6.0, 2, 2, 20.0};
  instance.nbs[4] = {2.0, 0, 1, 10.0};

  const auto backend = reference();
  const auto joint = solve_ppsr(instance, 8, *backend);
  REQUIRE(joint.solution);
  for (int bus : instance.buses)
    CHECK(joint.solution->plan.island_of(bus) == 1);

  const auto island = make_island(instance, 1, instance.buses, 8);
  const auto direct = solve_startup(island, *backend);
  REQUIRE(direct.schedule);
  CHECK(joint.solution->rt == direct.schedule->rt);
}

TEST_CASE("structurally impossible instances are proven infeasible") {
  const auto backend = reference();
  for (int horizon : {2, 5, 8}) {
    CHECK(solve_ppsr(hopeless(), horizon, *backend).status ==
          milp::SolveStatus::Infeasible);
    CHECK(ppsr_bruteforce(hopeless(), horizon).status ==
          milp::SolveStatus::Infeasible);
  }
}

TEST_CASE("plan validation catches broken plans") {
  const auto instance = demo3_path();
  SectionalizingPlan plan;
  plan.assign[1] = 1;
  plan.assign[2] = 1;
  plan.assign[3] = 1;
  CHECK(validate_plan(instance, plan).empty());

  SUBCASE("island missing the connecting bus") {
    SectionalizingPlan broken;
    broken.assign[1] = 1;
    broken.assign[3] = 1;  // bus 2 missing: 3 unreachable
    const auto violations = validate_plan(instance, broken);
    REQUIRE_FALSE(violations.empty());
    bool disconnected = false, unassigned = false;
    for (const auto& violation : violations) {
      if (violation.find("disconnected") != std::string::npos)
        disconnected = true;
      if (violation.find("unassigned") != std::string::npos) unassigned = true;
    }
    CHECK(disconnected);
    CHECK(unassigned);  // bus 2 is an NBS bus here
  }
  SUBCASE("assignment to a non-BS bus") {
    SectionalizingPlan broken;
    broken.assign[1] = 1;
    broken.assign[2] = 3;
    broken.assign[3] = 3;
    const auto violations = validate_plan(instance, broken);
    REQUIRE_FALSE(violations.empty());
    CHECK(violations.front().find("non-BS") != std::string::npos);
  }
}

TEST_CASE("warm starts satisfy the model they seed") {
  Rng rng(314);
  const auto backend = reference();
  int checked = 0;
  for (int trial = 0; trial < 30 && checked < 12; ++trial) {
    const auto instance = testsupport::random_instance(rng, 7, 2, 3);
    const int horizon = rng.uniform_int(4, 8);
    const auto exact = solve_ppsr(instance, horizon, *backend);
    if (!exact.solution) continue;
    ++checked;

    PartitionModelLayout layout;
    const auto model = build_ppsr_model(instance, horizon, {}, &layout);
    WarmStart warm;
    warm.plan = exact.solution->plan;
    warm.schedules = exact.solution->schedules;
    warm.rt = exact.solution->rt;
    const auto values =
        warm_start_values(instance, layout, model.num_vars(), warm);
    CHECK(milp::satisfies(model, values));
    CHECK(milp::objective_value(model, values) ==
          doctest::Approx(exact.solution->rt));
  }
  CHECK(checked >= 8);
}

TEST_CASE("solver matches the enumeration oracle on random instances") {
  Rng rng(777);
  const auto backend = reference();
  int feasible = 0, infeasible = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const auto instance = testsupport::random_instance(rng, 7, 2, 3);
    const int horizon = rng.uniform_int(3, 8);
    const auto brute = ppsr_bruteforce(instance, horizon);
    const auto solved = solve_ppsr(instance, horizon, *backend);
    REQUIRE(solved.status == brute.status);
    if (brute.solution) {
      ++feasible;
      CHECK(solved.solution->rt == brute.solution->rt);
      CHECK(validate_plan(instance, solved.solution->plan).empty());
    } else {
      ++infeasible;
    }
  }
  CHECK(feasible >= 5);
}

TEST_CASE("infeasibility is monotone in the horizon") {
  Rng rng(909);
  const auto backend = reference();
  int shown = 0;
  for (int trial = 0; trial < 30 && shown < 6; ++trial) {
    const auto instance = testsupport::random_instance(rng, 7, 2, 3);
    const int horizon = rng.uniform_int(4, 8);
    const auto at_t = solve_ppsr(instance, horizon, *backend);
    if (at_t.status != milp::SolveStatus::Infeasible) continue;
    ++shown;
    const auto below = solve_ppsr(instance, horizon - 1, *backend);
    CHECK(below.status == milp::SolveStatus::Infeasible);
  }
  CHECK(shown >= 3);
}

TEST_CASE("critical loads extend the restoration time") {
  // BS of 10 MW, one 60 MW unit, and a 25 MW critical demand: the demand can
  // be picked up only after the unit ramps far enough, and serving it is part
  // of the restoration time.
  Instance instance;
  instance.buses = {1, 2, 3};
  instance.lines = {{1, 2}, {2, 3}};
  instance.bs[1] = BsCurve::constant_curve(10.0);
  instance.nbs[2] = {10.0, 2, 3, 60.0};
  instance.critical_loads[3] = 25.0;

  const auto backend = reference();
  const int horizon = 10;
  const auto solved = solve_ppsr(instance, horizon, *backend);
  const auto brute = ppsr_bruteforce(instance, horizon);
  REQUIRE(solved.solution);
  REQUIRE(brute.solution);
  CHECK(solved.solution->rt == brute.solution->rt);
  // the unit starts at 1 and reaches 20 MW in period 4, the first period
  // where 10 + 20 covers the 25 MW demand
  CHECK(solved.solution->rt == 4);
  const auto& schedule = solved.solution->schedules.at(1);
  CHECK(schedule.start.at(2) == 1);
  CHECK(schedule.start.at(3) == 4);
}

TEST_CASE("aggregate bound never exceeds the exact optimum") {
  Rng rng(555);
  const auto backend = reference();
  int checked = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const auto instance = testsupport::random_instance(rng, 7, 2, 3);
    const int horizon = rng.uniform_int(3, 8);
    const auto brute = ppsr_bruteforce(instance, horizon);
    if (!brute.solution) continue;
    const auto aggregate = aggregate_lower_bound(instance, horizon, *backend);
    REQUIRE(aggregate.schedule);
    CHECK(aggregate.schedule->rt <= brute.solution->rt);
    ++checked;
  }
  CHECK(checked >= 5);
}

TEST_CASE("lower bound scan") {
  const auto backend = reference();
  SUBCASE("single-source system closes on the first probe") {
    const auto scan = lower_bound_scan(demo3_path(), *backend, 4);
    CHECK(scan.lower_bound == 4);
    CHECK(scan.stop == ScanStop::Optimal);
    REQUIRE(scan.solution);
    CHECK(scan.solution->rt == 4);
  }
  SUBCASE("slack aggregate bound needs one infeasible probe") {
    // Aggregated, the two sources crank the unit immediately; alone, either
    // source must first grow to period 2.
    Instance instance;
    instance.buses = {1, 2, 3};
    instance.lines = {{1, 3}, {2, 3}};
    instance.bs[1] = BsCurve::from_series({3.0, 6.0});
    instance.bs[2] = BsCurve::from_series({3.0, 6.0});
    instance.nbs[3] = {5.0, 1, 1, 9.0};

    const auto aggregate = aggregate_lower_bound(instance, 8, *backend);
    REQUIRE(aggregate.schedule);
    const int t_low = aggregate.schedule->rt;
    CHECK(t_low == 1);

    const auto brute = ppsr_bruteforce(instance, 8);
    REQUIRE(brute.solution);
    CHECK(brute.solution->rt == 2);  // wait for one source to reach 6 MW

    BoundLog log;
    const auto scan =
        lower_bound_scan(instance, *backend, t_low, {}, Deadline::none(),
                         1 << 12, &log);
    CHECK(scan.stop == ScanStop::Optimal);
    CHECK(scan.lower_bound == 2);
    REQUIRE(scan.solution);
    CHECK(scan.solution->rt == 2);
    REQUIRE(log.rows().size() == 2);
    CHECK(log.rows()[0].event == "probe_infeasible");
    CHECK(log.rows()[1].event == "optimal");
  }
  SUBCASE("expired deadline returns the entry bound") {
    const auto scan =
        lower_bound_scan(demo3_path(), *backend, 4, {},
                         Deadline::after_seconds(0.0));
    CHECK(scan.lower_bound == 4);
    CHECK_FALSE(scan.solution);
    CHECK(scan.stop == ScanStop::Deadline);
  }
}

TEST_CASE("options reach the integrated model") {
  const auto backend = reference();
  SUBCASE("windows delay the schedule") {
    auto instance = demo3_path();
    instance.windows[2] = {2, 9};
    ModelOptions options;
    options.critical_windows = true;
    const auto constrained = solve_ppsr(instance, 9, *backend, options);
    REQUIRE(constrained.solution);
    CHECK(constrained.solution->rt == 5);
    const auto relaxed = solve_ppsr(instance, 9, *backend);
    REQUIRE(relaxed.solution);
    CHECK(relaxed.solution->rt == 4);
  }
  SUBCASE("balance limits forbid lopsided islands") {
    // Two identical sources; both units generate 30 net. Without a limit
    // both may share an island; with limit 35 they must split.
    Instance instance;
    instance.buses = {1, 2, 3, 4};
    instance.lines = {{1, 3}, {3, 4}, {2, 4}};
    instance.bs[1] = BsCurve::constant_curve(10.0);
    instance.bs[2] = BsCurve::constant_curve(10.0);
    instance.nbs[3] = {4.0, 1, 1, 30.0};
    instance.nbs[4] = {4.0, 1, 1, 30.0};
    Balance balance;
    balance.limit_mw = 0.0;
    balance.net_mw = {{3, 30.0}, {4, 30.0}};
    instance.balance = balance;

    ModelOptions options;
    options.balance_limit_mw = 35.0;
    const auto result = solve_ppsr(instance, 6, *backend, options);
    REQUIRE(result.solution);
    CHECK(result.solution->plan.island_of(3) != result.solution->plan.island_of(4));

    const auto brute = ppsr_bruteforce(instance, 6, options);
    REQUIRE(brute.solution);
    CHECK(brute.solution->rt == result.solution->rt);
  }
}
