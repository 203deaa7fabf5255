#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "restore/milp.hpp"
#include "restore/util.hpp"

using namespace restore;
using namespace restore::milp;

namespace {

MilpModel tiny_binary_model() {
  MilpModel model;
  const int x = model.add_binary("x");
  model.add_constraint({{x, 1.0}}, Sense::Ge, 1.0, "at_least_one");
  model.set_objective({{x, 1.0}});
  return model;
}

// Random mixed model: a handful of binaries, sometimes a small general
// integer, sometimes a continuous variable that no constraint shares with
// another continuous one.
MilpModel random_model(Rng& rng) {
  MilpModel model;
  const int n_bin = rng.uniform_int(2, 7);
  std::vector<int> ints;
  for (int i = 0; i < n_bin; ++i)
    ints.push_back(model.add_binary("b" + std::to_string(i)));
  if (rng.uniform_int(0, 1) == 1)
    ints.push_back(model.add_variable(VarKind::Integer, -3, 3, "g"));
  int cont = -1;
  if (rng.uniform_int(0, 1) == 1)
    cont = model.add_variable(VarKind::Continuous, 0.0, 12.0, "z");

  const int n_rows = rng.uniform_int(1, 6);
  for (int r = 0; r < n_rows; ++r) {
    std::vector<Term> terms;
    for (int v : ints)
      if (rng.uniform_int(0, 2) != 0)
        terms.push_back({v, static_cast<double>(rng.uniform_int(-3, 3))});
    if (cont >= 0 && rng.uniform_int(0, 2) == 0)
      terms.push_back({cont, static_cast<double>(rng.uniform_int(1, 2))});
    if (terms.empty()) continue;
    const Sense sense = static_cast<Sense>(rng.uniform_int(0, 2));
    model.add_constraint(std::move(terms), sense,
                         static_cast<double>(rng.uniform_int(-4, 6)));
  }

  std::vector<Term> objective;
  for (int v : ints)
    objective.push_back({v, static_cast<double>(rng.uniform_int(-3, 3))});
  if (cont >= 0)
    objective.push_back({cont, static_cast<double>(rng.uniform_int(0, 2))});
  model.set_objective(std::move(objective));
  return model;
}

}  // namespace

TEST_CASE("empty model is trivially optimal") {
  MilpModel model;
  for (const auto& outcome :
       {exhaustive_solve(model), branch_and_bound_solve(model)}) {
    CHECK(outcome.status == SolveStatus::Optimal);
    CHECK(outcome.objective == 0.0);
  }
}

TEST_CASE("single binary with a lower bound") {
  const auto model = tiny_binary_model();
  const auto outcome = branch_and_bound_solve(model);
  REQUIRE(outcome.status == SolveStatus::Optimal);
  CHECK(outcome.objective == doctest::Approx(1.0));
  CHECK(outcome.values[0] == doctest::Approx(1.0));
  CHECK(satisfies(model, outcome.values));
}

TEST_CASE("contradictory bounds prove infeasibility") {
  MilpModel model;
  const int x = model.add_binary("x");
  model.add_constraint({{x, 1.0}}, Sense::Ge, 1.0);
  model.add_constraint({{x, 1.0}}, Sense::Le, 0.0);
  model.set_objective({{x, 1.0}});
  CHECK(branch_and_bound_solve(model).status == SolveStatus::Infeasible);
  CHECK(exhaustive_solve(model).status == SolveStatus::Infeasible);
}

TEST_CASE("warm start dominance") {
  MilpModel model;
  const int a = model.add_binary("a");
  const int b = model.add_binary("b");
  model.add_constraint({{a, 1.0}, {b, 1.0}}, Sense::Ge, 1.0);
  model.set_objective({{a, 1.0}, {b, 2.0}});
  model.set_warm_start({0.0, 1.0});  // objective 2, not optimal
  const auto outcome = branch_and_bound_solve(model);
  REQUIRE(outcome.status == SolveStatus::Optimal);
  CHECK(outcome.objective <= 2.0);
  CHECK(outcome.objective == doctest::Approx(1.0));
}

TEST_CASE("reference solver agrees with exhaustive enumeration") {
  Rng rng(42);
  int solved = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const auto model = random_model(rng);
    const auto exact = exhaustive_solve(model);
    const auto bnb = branch_and_bound_solve(model);
    REQUIRE(exact.status != SolveStatus::Error);
    CHECK(bnb.status == exact.status);
    if (exact.status == SolveStatus::Optimal) {
      ++solved;
      CHECK(bnb.objective == doctest::Approx(exact.objective).epsilon(1e-6));
      CHECK(satisfies(model, bnb.values));
    }
  }
  CHECK(solved > 20);  // the generator must exercise feasible models
}

TEST_CASE("selection structures agree with enumeration") {
  // exactly-one, at-most-one and linked selection rows, with random side
  // constraints over the same binaries
  Rng rng(555777);
  int optimal = 0;
  for (int trial = 0; trial < 400; ++trial) {
    MilpModel model;
    std::vector<int> all;
    const int n_groups = rng.uniform_int(1, 3);
    for (int g = 0; g < n_groups; ++g) {
      std::vector<Term> row;
      const int size = rng.uniform_int(2, 5);
      for (int i = 0; i < size; ++i) {
        const int v = model.add_binary("m" + std::to_string(g) + "_" +
                                       std::to_string(i));
        row.push_back({v, 1.0});
        all.push_back(v);
      }
      const int kind = rng.uniform_int(0, 2);
      if (kind == 0) {
        model.add_constraint(std::move(row), Sense::Eq, 1.0);
      } else if (kind == 1) {
        model.add_constraint(std::move(row), Sense::Le, 1.0);
      } else {
        const int link = model.add_binary("link" + std::to_string(g));
        row.push_back({link, -1.0});
        model.add_constraint(std::move(row), Sense::Eq, 0.0);
        all.push_back(link);
      }
    }
    for (int r = rng.uniform_int(1, 4); r > 0; --r) {
      std::vector<Term> terms;
      for (int v : all)
        if (rng.uniform_int(0, 2) != 0)
          terms.push_back({v, static_cast<double>(rng.uniform_int(-4, 4))});
      if (terms.empty()) continue;
      model.add_constraint(std::move(terms),
                           static_cast<Sense>(rng.uniform_int(0, 2)),
                           static_cast<double>(rng.uniform_int(-4, 6)));
    }
    std::vector<Term> objective;
    for (int v : all)
      objective.push_back({v, static_cast<double>(rng.uniform_int(-3, 3))});
    model.set_objective(std::move(objective));

    const auto exact = exhaustive_solve(model);
    const auto bnb = branch_and_bound_solve(model);
    REQUIRE(bnb.status == exact.status);
    if (exact.status == SolveStatus::Optimal) {
      ++optimal;
      CHECK(bnb.objective == doctest::Approx(exact.objective).epsilon(1e-6));
      CHECK(satisfies(model, bnb.values));
    }
  }
  CHECK(optimal > 80);
}

TEST_CASE("enumeration cap yields an error, not a wrong answer") {
  MilpModel model;
  for (int i = 0; i < 30; ++i) model.add_binary("b" + std::to_string(i));
  model.set_objective({});
  const auto outcome = exhaustive_solve(model, 1u << 10);
  CHECK(outcome.status == SolveStatus::Error);
  CHECK(outcome.message.find("cap") != std::string::npos);
}

TEST_CASE("coupled continuous variables are rejected") {
  MilpModel model;
  const int y = model.add_variable(VarKind::Continuous, 0, 1, "y");
  const int z = model.add_variable(VarKind::Continuous, 0, 1, "z");
  model.add_constraint({{y, 1.0}, {z, 1.0}}, Sense::Le, 1.0);
  model.set_objective({{y, 1.0}});
  CHECK(exhaustive_solve(model).status == SolveStatus::Error);
  CHECK(branch_and_bound_solve(model).status == SolveStatus::Error);
}

TEST_CASE("node limit reports an honest resource status") {
  Rng rng(5);
  MilpModel model;
  std::vector<Term> row;
  for (int i = 0; i < 16; ++i) {
    const int v = model.add_binary("b" + std::to_string(i));
    row.push_back({v, static_cast<double>(1 + (i % 5))});
  }
  model.add_constraint(row, Sense::Eq, 23.0);
  model.set_objective({row});
  SolveOptions options;
  options.node_limit = 3;
  const auto outcome = branch_and_bound_solve(model, options);
  CHECK((outcome.status == SolveStatus::TimedOut ||
         outcome.status == SolveStatus::Feasible));
  CHECK(outcome.message.find("limit") != std::string::npos);
}

TEST_CASE("unknown variable ids are rejected at build time") {
  MilpModel model;
  model.add_binary("x");
  CHECK_THROWS_AS(model.add_constraint({{5, 1.0}}, Sense::Le, 1.0),
                  std::out_of_range);
  CHECK_THROWS_AS(model.set_objective({{-1, 1.0}}), std::out_of_range);
}

TEST_CASE("LP export") {
  MilpModel model;
  const int x = model.add_binary("pick_x");
  const int z = model.add_variable(VarKind::Integer, -2, 4, "z");
  model.add_constraint({{x, 2.0}, {z, -1.0}}, Sense::Le, 3.0, "cap row");
  model.set_objective({{x, 1.0}, {z, 1.0}});
  std::ostringstream out;
  write_lp(model, out);
  const auto text = out.str();
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("pick_x") != std::string::npos);
  CHECK(text.find("cap_row:") != std::string::npos);
  CHECK(text.find("Generals") != std::string::npos);
  CHECK(text.find("Binaries") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);
}

TEST_CASE("external backend without a solver reports a diagnostic") {
  const char* saved = std::getenv("RESTORE_SOLVER");
  ::unsetenv("RESTORE_SOLVER");
  auto backend = make_external_backend();
  const auto outcome = solve(tiny_binary_model(), *backend);
  CHECK(outcome.status == SolveStatus::Error);
  CHECK(outcome.message.find("unavailable") != std::string::npos);
  if (saved) ::setenv("RESTORE_SOLVER", saved, 1);
}

TEST_CASE("external backend subprocess plumbing") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "restore_fake_solver";
  fs::create_directories(dir);

  auto write_script = [&dir](const std::string& name,
                             const std::string& body) {
    const auto path = dir / name;
    std::ofstream out(path);
    out << "#!/bin/sh\n" << body;
    out.close();
    fs::permissions(path, fs::perms::owner_all, fs::perm_options::add);
    return path.string();
  };

  SUBCASE("CBC-style optimal answer is parsed and verified") {
    // last argument is the solution file
    const auto path = write_script("cbc_ok",
                                   "for last; do :; done\n"
                                   "printf 'Optimal - objective value 1.00\\n"
                                   "     0 x  1  0\\n' > \"$last\"\n");
    auto backend = make_external_backend(path);
    const auto outcome = solve(tiny_binary_model(), *backend);
    REQUIRE(outcome.status == SolveStatus::Optimal);
    CHECK(outcome.objective == doctest::Approx(1.0));
    CHECK(outcome.values[0] == doctest::Approx(1.0));
  }
  SUBCASE("CBC-style infeasible answer maps to Infeasible") {
    const auto path = write_script(
        "cbc_inf",
        "for last; do :; done\nprintf 'Infeasible - objective value 0\\n' > "
        "\"$last\"\n");
    auto backend = make_external_backend(path);
    CHECK(solve(tiny_binary_model(), *backend).status ==
          SolveStatus::Infeasible);
  }
  SUBCASE("an assignment violating the model is rejected") {
    const auto path = write_script("cbc_bad",
                                   "for last; do :; done\n"
                                   "printf 'Optimal - objective value 0.00\\n"
                                   "     0 x  0  0\\n' > \"$last\"\n");
    auto backend = make_external_backend(path);
    const auto outcome = solve(tiny_binary_model(), *backend);
    CHECK(outcome.status == SolveStatus::Error);
    CHECK(outcome.message.find("violating") != std::string::npos);
  }
  SUBCASE("GLPK-style output is parsed by column name") {
    const auto path = write_script(
        "fake_glpsol",
        "out=\"$4\"\n"
        "printf 'Status:     INTEGER OPTIMAL\\n\\n"
        "   No. Column name       Activity\\n"
        "------ ------------    -------------\\n"
        "     1 x            *              1\\n' > \"$out\"\n");
    auto backend = make_external_backend(path);
    const auto outcome = solve(tiny_binary_model(), *backend);
    REQUIRE(outcome.status == SolveStatus::Optimal);
    CHECK(outcome.values[0] == doctest::Approx(1.0));
  }
  SUBCASE("a solver that writes nothing is an error") {
    const auto path = write_script("cbc_silent", "exit 3\n");
    auto backend = make_external_backend(path);
    const auto outcome = solve(tiny_binary_model(), *backend);
    CHECK(outcome.status == SolveStatus::Error);
    CHECK(outcome.message.find("no solution file") != std::string::npos);
  }
}

TEST_CASE("external backend matches the oracle when configured") {
  const char* path = std::getenv("RESTORE_SOLVER");
  if (!path) return;  // no solver in this environment
  auto backend = make_external_backend();
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const auto model = random_model(rng);
    const auto exact = exhaustive_solve(model);
    const auto external = solve(model, *backend);
    CHECK(external.status == exact.status);
    if (exact.status == SolveStatus::Optimal)
      CHECK(external.objective ==
            doctest::Approx(exact.objective).epsilon(1e-6));
  }
}
