#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace restore::milp {

enum class VarKind { Binary, Integer, Continuous };
enum class Sense { Le, Eq, Ge };

struct Term {
  int var = -1;
  double coef = 0.0;
};

struct Variable {
  VarKind kind = VarKind::Continuous;
  double lb = 0.0;
  double ub = 0.0;
  std::string name;
};

struct Constraint {
  std::vector<Term> terms;
  Sense sense = Sense::Le;
  double rhs = 0.0;
  std::string name;
};

// Backend-neutral model; objective is always minimization.
class MilpModel {
 public:
  int add_variable(VarKind kind, double lb, double ub, std::string name);
  int add_binary(std::string name) {
    return add_variable(VarKind::Binary, 0.0, 1.0, std::move(name));
  }
  void add_constraint(std::vector<Term> terms, Sense sense, double rhs,
                      std::string name = "");
  void set_objective(std::vector<Term> terms);
  void set_warm_start(std::vector<double> values);

  const std::vector<Variable>& vars() const { return vars_; }
  const std::vector<Constraint>& rows() const { return rows_; }
  const std::vector<Term>& objective() const { return objective_; }
  const std::optional<std::vector<double>>& warm_start() const {
    return warm_start_;
  }
  std::size_t num_vars() const { return vars_.size(); }
  std::size_t num_rows() const { return rows_.size(); }

 private:
  void check_terms(const std::vector<Term>& terms) const;

  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  std::vector<Term> objective_;
  std::optional<std::vector<double>> warm_start_;
};

enum class SolveStatus { Optimal, Feasible, Infeasible, TimedOut, Error };
std::string to_string(SolveStatus status);

struct SolveOutcome {
  SolveStatus status = SolveStatus::Error;
  double objective = 0.0;
  std::vector<double> values;  // present iff status is Optimal or Feasible
  double wall_seconds = 0.0;
  std::string message;

  bool has_solution() const {
    return status == SolveStatus::Optimal || status == SolveStatus::Feasible;
  }
};

struct SolveOptions {
  std::optional<double> time_limit_sec;
  std::optional<long long> node_limit;
};

inline constexpr double kFeasibilityTol = 1e-6;
inline constexpr double kIntegralityTol = 1e-5;

// Row-by-row verification, independent of any solver.
bool satisfies(const MilpModel& model, const std::vector<double>& x,
               double tol = kFeasibilityTol);
double objective_value(const MilpModel& model, const std::vector<double>& x);

// Exact optimum by enumeration of all integer assignments. Continuous
// variables are supported only when no constraint couples two of them (each
// is then pinned by interval reasoning given the integers). Models whose
// integer domain product exceeds `enumeration_cap` yield Error.
SolveOutcome exhaustive_solve(const MilpModel& model,
                              std::uint64_t enumeration_cap = 1ull << 24);

// Exact depth-first branch and bound with bounds propagation and independent
// subproblem decomposition. Same continuous-variable restriction as above.
SolveOutcome branch_and_bound_solve(const MilpModel& model,
                                    const SolveOptions& options = {});

// LP-format export for debugging.
void write_lp(const MilpModel& model, std::ostream& out);

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  virtual SolveOutcome solve_raw(const MilpModel& model,
                                 const SolveOptions& options) = 0;
};

// Solves through the backend and re-verifies any returned assignment against
// the stored constraints; a failing assignment downgrades the outcome to
// Error rather than trusting the backend.
SolveOutcome solve(const MilpModel& model, Backend& backend,
                   const SolveOptions& options = {});

std::unique_ptr<Backend> make_reference_backend();
// `solver_path` empty: taken from the RESTORE_SOLVER environment variable.
std::unique_ptr<Backend> make_external_backend(std::string solver_path = "");
// selector: "reference" or "external".
std::unique_ptr<Backend> make_backend(const std::string& selector);

}  // namespace restore::milp
