#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "restore/grid.hpp"
#include "restore/instance_io.hpp"
#include "restore/util.hpp"
#include "support.hpp"

using namespace restore;

TEST_CASE("capacity curve of a cranking unit") {
  const NbsParams unit{10.0, 2, 3, 60.0};
  CHECK(capacity_at(unit, 1) == -10.0);
  CHECK(capacity_at(unit, 2) == -10.0);
  CHECK(capacity_at(unit, 3) == 0.0);
  CHECK(capacity_at(unit, 4) == 20.0);
  CHECK(capacity_at(unit, 5) == 40.0);
  CHECK(capacity_at(unit, 6) == 60.0);
  CHECK(capacity_at(unit, 7) == 60.0);
}

TEST_CASE("capacity curve properties") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto unit = testsupport::random_unit(rng);
    const int plateau = unit.crank_periods + unit.ramp_periods;
    double previous = capacity_at(unit, 1);
    for (int offset = 1; offset <= plateau + 5; ++offset) {
      const double value = capacity_at(unit, offset);
      if (offset <= unit.crank_periods) CHECK(value == -unit.crank_mw);
      if (offset > unit.crank_periods) CHECK(value >= previous);
      if (offset > plateau) CHECK(value == unit.max_mw);
      previous = value;
    }
  }
}

TEST_CASE("critical loads never produce power") {
  Instance instance = testsupport::demo3();
  instance.critical_loads[3] = 25.0;
  instance.nbs.erase(3);
  const int horizon = 12;
  const auto params = instance.startup_params(3, horizon);
  for (int offset = 1; offset <= horizon; ++offset)
    CHECK(capacity_at(params, offset) == -25.0);
}

TEST_CASE("BS curve series holds its last value") {
  const auto curve = BsCurve::from_series({5.0, 7.0, 9.0});
  CHECK(curve.at(1) == 5.0);
  CHECK(curve.at(3) == 9.0);
  CHECK(curve.at(10) == 9.0);
  CHECK(BsCurve::constant_curve(4.0).at(17) == 4.0);
}

TEST_CASE("instance validation catches the named violations") {
  SUBCASE("valid") {
    CHECK(validate_instance(testsupport::demo3()).ok());
  }
  SUBCASE("duplicate bus") {
    auto instance = testsupport::demo3();
    instance.buses.push_back(2);
    const auto report = validate_instance(instance);
    REQUIRE_FALSE(report.ok());
    CHECK(report.violations.front().find("duplicate bus") != std::string::npos);
  }
  SUBCASE("disconnected graph") {
    auto instance = testsupport::demo3();
    instance.buses.push_back(9);
    const auto report = validate_instance(instance);
    REQUIRE_FALSE(report.ok());
    CHECK(report.violations.front().find("disconnected") != std::string::npos);
  }
  SUBCASE("window earliest after latest") {
    auto instance = testsupport::demo3();
    instance.windows[2] = {5, 3};
    const auto report = validate_instance(instance);
    REQUIRE_FALSE(report.ok());
    CHECK(report.violations.front().find("earliest > latest") !=
          std::string::npos);
  }
  SUBCASE("negative crank power") {
    auto instance = testsupport::demo3();
    instance.nbs[2].crank_mw = -1.0;
    CHECK_FALSE(validate_instance(instance).ok());
  }
  SUBCASE("decreasing BS curve warns") {
    auto instance = testsupport::demo3();
    instance.bs[1] = BsCurve::from_series({10.0, 8.0});
    const auto report = validate_instance(instance);
    CHECK(report.ok());
    REQUIRE_FALSE(report.warnings.empty());
  }
}

TEST_CASE("instance document round trip") {
  const std::string text = R"({
    "name": "demo3",
    "period_minutes": 5,
    "buses": [1, 2, 3],
    "lines": [[1, 2], [1, 3], [2, 3]],
    "bs": [{"bus": 1, "constant": 10.0}],
    "nbs": [
      {"bus": 2, "crank_mw": 10, "crank_periods": 2, "ramp_periods": 3, "max_mw": 60},
      {"bus": 3, "crank_mw": 30, "crank_periods": 6, "ramp_periods": 9, "max_mw": 180}
    ]
  })";
  const auto instance = load_instance(text);
  CHECK(instance.bs_nodes() == std::vector<int>{1});
  CHECK(instance.startup_nodes() == std::vector<int>{2, 3});
  CHECK(instance.lines.size() == 3);

  const auto again = load_instance(instance_to_json(instance));
  CHECK(instance_to_json(again) == instance_to_json(instance));
}

TEST_CASE("instance document errors") {
  CHECK_THROWS_AS(load_instance("not json"), ParseError);
  CHECK_THROWS_AS(load_instance(R"({"buses": "nope"})"), ParseError);
  // duplicate bus id
  CHECK_THROWS_AS(load_instance(R"({"buses": [1, 1], "lines": [],
                                    "bs": [{"bus": 1, "constant": 5}]})"),
                  ValidationError);
  // two components
  CHECK_THROWS_WITH_AS(
      load_instance(R"({"buses": [1, 2, 3], "lines": [[1, 2]],
                        "bs": [{"bus": 1, "constant": 5}]})"),
      "disconnected graph", ValidationError);
}

TEST_CASE("topology import") {
  const std::string case_text = R"(
function mpc = tiny3
mpc.baseMVA = 100;
mpc.bus = [
  1 3 0.0  0 0 0 1 1 0 115 1 1.1 0.9;
  2 1 40.0 0 0 0 1 1 0 115 1 1.1 0.9;
  3 1 25.0 0 0 0 1 1 0 115 1 1.1 0.9;
];
mpc.gen = [
  1 0 0 10 -10 1 100 1 80 0;
  3 0 0 10 -10 1 100 1 50 0;
];
mpc.branch = [
  1 2 0.01 0.1 0 250 250 250 0 0 1 -360 360;
  2 3 0.01 0.1 0 250 250 250 0 0 1 -360 360;
  1 2 0.02 0.2 0 250 250 250 0 0 1 -360 360;
];
)";
  const auto topo = import_topology(case_text);
  CHECK(topo.name == "tiny3");
  CHECK(topo.buses == std::vector<int>{1, 2, 3});
  CHECK(topo.lines.size() == 2);  // parallel branch collapsed
  REQUIRE(topo.generators.size() == 2);
  CHECK(topo.generators[0].pmax == 80.0);
  CHECK(topo.demand_mw.at(2) == 40.0);
  CHECK_FALSE(topo.warnings.empty());

  SUBCASE("self loop dropped with a warning") {
    const auto with_loop = import_topology(R"(
mpc.bus = [
  5 1 0 0 0 0 1 1 0 115 1 1.1 0.9;
  6 1 0 0 0 0 1 1 0 115 1 1.1 0.9;
];
mpc.branch = [
  5 5 0.01 0.1 0 250 250 250 0 0 1 -360 360;
  5 6 0.01 0.1 0 250 250 250 0 0 1 -360 360;
];
)");
    CHECK(with_loop.lines.size() == 1);
    bool mentioned = false;
    for (const auto& warning : with_loop.warnings)
      if (warning.find("self-loop") != std::string::npos) mentioned = true;
    CHECK(mentioned);
  }

  SUBCASE("malformed row reports its index") {
    CHECK_THROWS_AS(import_topology(R"(
mpc.bus = [
  1 3 0.0 x;
];
mpc.branch = [
];
)"),
                    ParseError);
  }

  SUBCASE("isolated bus imports but fails downstream validation") {
    const auto isolated = import_topology(R"(
mpc.bus = [
  1 3 0 0 0 0 1 1 0 115 1 1.1 0.9;
  2 1 10 0 0 0 1 1 0 115 1 1.1 0.9;
  3 1 10 0 0 0 1 1 0 115 1 1.1 0.9;
];
mpc.gen = [
  1 0 0 10 -10 1 100 1 80 0;
];
mpc.branch = [
  1 2 0.01 0.1 0 250 250 250 0 0 1 -360 360;
];
)");
    CHECK(isolated.buses.size() == 3);
    GeneratorTemplate tmpl;
    tmpl.bs_capacities_mw = {20.0};
    tmpl.nbs_units = {{5.0, 1, 1, 30.0}};
    const auto instance = generate_instance(isolated, tmpl, 1, 0);
    const auto report = validate_instance(instance);
    REQUIRE_FALSE(report.ok());
    CHECK(report.violations.front().find("disconnected") != std::string::npos);
  }
}

TEST_CASE("synthetic instance generation") {
  const std::string case_text = R"(
function mpc = gencase
mpc.bus = [
  1 1 10 0 0 0 1 1 0 115 1 1.1 0.9;
  2 1 50 0 0 0 1 1 0 115 1 1.1 0.9;
  3 1 30 0 0 0 1 1 0 115 1 1.1 0.9;
  4 1  0 0 0 0 1 1 0 115 1 1.1 0.9;
  5 1 20 0 0 0 1 1 0 115 1 1.1 0.9;
];
mpc.gen = [
  2 0 0 10 -10 1 100 1 120 0;
  3 0 0 10 -10 1 100 1  60 0;
];
mpc.branch = [
  1 2 0 0.1 0 0 0 0 0 0 1;
  2 3 0 0.1 0 0 0 0 0 0 1;
  3 4 0 0.1 0 0 0 0 0 0 1;
  4 5 0 0.1 0 0 0 0 0 0 1;
  2 4 0 0.1 0 0 0 0 0 0 1;
];
)";
  const auto topo = import_topology(case_text);
  GeneratorTemplate tmpl;
  tmpl.bs_capacities_mw = {12.36, 8.87, 32.39, 15.05, 48.49, 15.13};
  tmpl.nbs_units = {{10.0, 2, 3, 60.0}, {30.0, 6, 9, 180.0}};
  tmpl.critical_loads_mw = {25.0};

  const auto instance = generate_instance(topo, tmpl, 1, 3);

  // every BS bus gets the template's maximum capacity as a constant curve
  REQUIRE(instance.bs.size() == 1);
  for (const auto& [bus, curve] : instance.bs) {
    CHECK(curve.is_constant());
    CHECK(curve.constant == doctest::Approx(48.49));
  }
  // highest-degree bus (2 or 4 have degree 3; tie toward 2) is the BS bus
  CHECK(instance.bs.count(2) == 1);
  // largest template unit lands on the remaining generator bus
  REQUIRE(instance.nbs.count(3) == 1);
  CHECK(instance.nbs.at(3).max_mw == 180.0);
  // the critical load lands on the highest-demand non-generator bus
  REQUIRE(instance.critical_loads.size() == 1);
  CHECK(instance.critical_loads.count(5) == 1);

  SUBCASE("deterministic in all arguments") {
    const auto again = generate_instance(topo, tmpl, 1, 3);
    CHECK(instance_to_json(again) == instance_to_json(instance));
  }
  SUBCASE("every bus can be a BS bus") {
    const auto all_bs = generate_instance(topo, tmpl, 5, 0);
    CHECK(all_bs.bs.size() == 5);
    CHECK(all_bs.nbs.empty());
    CHECK(all_bs.startup_nodes().empty());
  }
  SUBCASE("bad arguments") {
    CHECK_THROWS_AS(generate_instance(topo, tmpl, 0, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(generate_instance(topo, GeneratorTemplate{}, 1, 0),
                    std::invalid_argument);
  }
}

TEST_CASE("graph helpers") {
  const auto instance = testsupport::demo3();
  CHECK(is_connected(instance.buses, instance.lines));
  CHECK_FALSE(is_connected({1, 2, 3}, {{1, 2}}));

  const Adjacency adj(instance.buses, instance.lines);
  const auto tree = bfs_tree(adj, 1, {1, 2, 3});
  CHECK(tree.size() == 3);
  CHECK(tree.at(1) == 1);
  CHECK(tree.at(2) == 1);
  CHECK(tree.at(3) == 1);

  const auto sub = induced_subinstance(instance, {1, 2});
  CHECK(sub.buses == std::vector<int>{1, 2});
  CHECK(sub.lines.size() == 1);
  CHECK(sub.nbs.count(2) == 1);
  CHECK(sub.nbs.count(3) == 0);
}
