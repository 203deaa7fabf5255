#include "restore/milp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <stdexcept>

#include "restore/util.hpp"

namespace restore::milp {

int MilpModel::add_variable(VarKind kind, double lb, double ub,
                            std::string name) {
  if (kind != VarKind::Continuous &&
      (!std::isfinite(lb) || !std::isfinite(ub)))
    throw std::invalid_argument("integer variable '" + name +
                                "' needs finite bounds");
  if (lb > ub)
    throw std::invalid_argument("variable '" + name + "' has lb > ub");
  Variable var;
  var.kind = kind;
  var.lb = lb;
  var.ub = ub;
  var.name = std::move(name);
  vars_.push_back(std::move(var));
  return static_cast<int>(vars_.size()) - 1;
}

void MilpModel::check_terms(const std::vector<Term>& terms) const {
  for (const Term& term : terms) {
    if (term.var < 0 || term.var >= static_cast<int>(vars_.size()))
      throw std::out_of_range("unknown variable id " +
                              std::to_string(term.var));
  }
}

void MilpModel::add_constraint(std::vector<Term> terms, Sense sense,
                               double rhs, std::string name) {
  check_terms(terms);
  Constraint row;
  row.terms = std::move(terms);
  row.sense = sense;
  row.rhs = rhs;
  row.name = std::move(name);
  rows_.push_back(std::move(row));
}

void MilpModel::set_objective(std::vector<Term> terms) {
  check_terms(terms);
  objective_ = std::move(terms);
}

void MilpModel::set_warm_start(std::vector<double> values) {
  if (values.size() != vars_.size())
    throw std::invalid_argument("warm start length does not match model");
  warm_start_ = std::move(values);
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Feasible: return "Feasible";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::TimedOut: return "TimedOut";
    case SolveStatus::Error: return "Error";
  }
  return "Unknown";
}

bool satisfies(const MilpModel& model, const std::vector<double>& x,
               double tol) {
  if (x.size() != model.num_vars()) return false;
  const auto& vars = model.vars();
  for (std::size_t k = 0; k < vars.size(); ++k) {
    if (x[k] < vars[k].lb - tol || x[k] > vars[k].ub + tol) return false;
    if (vars[k].kind != VarKind::Continuous &&
        std::fabs(x[k] - std::round(x[k])) > kIntegralityTol)
      return false;
  }
  for (const Constraint& row : model.rows()) {
    double activity = 0.0;
    for (const Term& term : row.terms) activity += term.coef * x[term.var];
    switch (row.sense) {
      case Sense::Le:
        if (activity > row.rhs + tol) return false;
        break;
      case Sense::Ge:
        if (activity < row.rhs - tol) return false;
        break;
      case Sense::Eq:
        if (std::fabs(activity - row.rhs) > tol) return false;
        break;
    }
  }
  return true;
}

double objective_value(const MilpModel& model, const std::vector<double>& x) {
  double value = 0.0;
  for (const Term& term : model.objective()) value += term.coef * x[term.var];
  return value;
}

namespace {

// True when no constraint couples two continuous variables; required by the
// built-in solvers.
bool continuous_structure_ok(const MilpModel& model) {
  for (const Constraint& row : model.rows()) {
    int continuous = 0;
    for (const Term& term : row.terms)
      if (model.vars()[term.var].kind == VarKind::Continuous) ++continuous;
    if (continuous > 1) return false;
  }
  return true;
}

// Pins each continuous variable to its objective-optimal bound given fixed
// integers. Returns false when some row leaves an empty interval.
bool pin_continuous(const MilpModel& model, std::vector<double>& x) {
  const auto& vars = model.vars();
  std::vector<double> obj_coef(vars.size(), 0.0);
  for (const Term& term : model.objective()) obj_coef[term.var] += term.coef;

  for (std::size_t c = 0; c < vars.size(); ++c) {
    if (vars[c].kind != VarKind::Continuous) continue;
    double lo = vars[c].lb, hi = vars[c].ub;
    for (const Constraint& row : model.rows()) {
      double coef = 0.0, others = 0.0;
      for (const Term& term : row.terms) {
        if (term.var == static_cast<int>(c))
          coef += term.coef;
        else
          others += term.coef * x[term.var];
      }
      if (coef == 0.0) continue;
      const double bound = (row.rhs - others) / coef;
      const bool upper = (row.sense == Sense::Le) == (coef > 0.0);
      if (row.sense == Sense::Eq) {
        lo = std::max(lo, bound);
        hi = std::min(hi, bound);
      } else if (upper) {
        hi = std::min(hi, bound);
      } else {
        lo = std::max(lo, bound);
      }
    }
    if (lo > hi + kFeasibilityTol) return false;
    if (lo > hi) hi = lo;  // collapse a tolerance-sized gap
    x[c] = obj_coef[c] >= 0.0 ? lo : hi;
  }
  return true;
}

}  // namespace

SolveOutcome exhaustive_solve(const MilpModel& model,
                              std::uint64_t enumeration_cap) {
  Stopwatch watch;
  SolveOutcome out;

  if (!continuous_structure_ok(model)) {
    out.status = SolveStatus::Error;
    out.message = "a constraint couples two continuous variables";
    return out;
  }

  const auto& vars = model.vars();
  std::vector<int> int_vars;
  long double domain_product = 1.0L;
  for (std::size_t k = 0; k < vars.size(); ++k) {
    if (vars[k].kind == VarKind::Continuous) continue;
    int_vars.push_back(static_cast<int>(k));
    const double span = std::floor(vars[k].ub) - std::ceil(vars[k].lb) + 1.0;
    if (span <= 0.0) {
      out.status = SolveStatus::Infeasible;
      out.wall_seconds = watch.elapsed_sec();
      return out;
    }
    domain_product *= static_cast<long double>(span);
    if (domain_product > static_cast<long double>(enumeration_cap)) {
      out.status = SolveStatus::Error;
      out.message = "enumeration cap exceeded";
      return out;
    }
  }

  std::vector<double> x(vars.size(), 0.0);
  std::vector<long long> lo(int_vars.size()), hi(int_vars.size()),
      cur(int_vars.size());
  for (std::size_t i = 0; i < int_vars.size(); ++i) {
    lo[i] = static_cast<long long>(std::ceil(vars[int_vars[i]].lb));
    hi[i] = static_cast<long long>(std::floor(vars[int_vars[i]].ub));
    cur[i] = lo[i];
  }

  bool found = false;
  double best_obj = 0.0;
  std::vector<double> best_x;
  bool done = false;
  while (!done) {
    for (std::size_t i = 0; i < int_vars.size(); ++i)
      x[int_vars[i]] = static_cast<double>(cur[i]);
    if (pin_continuous(model, x) && satisfies(model, x)) {
      const double obj = objective_value(model, x);
      if (!found || obj < best_obj - 1e-12) {
        found = true;
        best_obj = obj;
        best_x = x;
      }
    }
    // odometer increment
    std::size_t i = 0;
    for (; i < int_vars.size(); ++i) {
      if (cur[i] < hi[i]) {
        ++cur[i];
        break;
      }
      cur[i] = lo[i];
    }
    if (i == int_vars.size()) done = true;
  }

  if (found) {
    out.status = SolveStatus::Optimal;
    out.objective = best_obj;
    out.values = std::move(best_x);
  } else {
    out.status = SolveStatus::Infeasible;
  }
  out.wall_seconds = watch.elapsed_sec();
  return out;
}

namespace {

std::string lp_name(const std::string& name, const char* prefix, int index) {
  if (name.empty()) return std::string(prefix) + std::to_string(index);
  std::string cleaned = name;
  for (char& ch : cleaned) {
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_')
      ch = '_';
  }
  return cleaned;
}

void write_expr(std::ostream& out, const std::vector<Term>& terms,
                const MilpModel& model) {
  bool first = true;
  for (const Term& term : terms) {
    if (term.coef == 0.0) continue;
    const double coef = term.coef;
    if (first) {
      if (coef < 0.0) out << "- ";
    } else {
      out << (coef < 0.0 ? " - " : " + ");
    }
    const double mag = std::fabs(coef);
    if (mag != 1.0) out << mag << " ";
    out << lp_name(model.vars()[term.var].name, "x", term.var);
    first = false;
  }
  if (first) out << "0";
}

}  // namespace

void write_lp(const MilpModel& model, std::ostream& out) {
  out << "Minimize\n obj: ";
  write_expr(out, model.objective(), model);
  out << "\nSubject To\n";
  int row_index = 0;
  for (const Constraint& row : model.rows()) {
    out << " " << lp_name(row.name, "c", row_index) << ": ";
    write_expr(out, row.terms, model);
    switch (row.sense) {
      case Sense::Le: out << " <= "; break;
      case Sense::Ge: out << " >= "; break;
      case Sense::Eq: out << " = "; break;
    }
    out << row.rhs << "\n";
    ++row_index;
  }
  out << "Bounds\n";
  for (std::size_t k = 0; k < model.num_vars(); ++k) {
    const Variable& var = model.vars()[k];
    out << " " << var.lb << " <= "
        << lp_name(var.name, "x", static_cast<int>(k)) << " <= " << var.ub
        << "\n";
  }
  bool have_general = false;
  for (const Variable& var : model.vars())
    if (var.kind == VarKind::Integer) have_general = true;
  if (have_general) {
    out << "Generals\n";
    for (std::size_t k = 0; k < model.num_vars(); ++k)
      if (model.vars()[k].kind == VarKind::Integer)
        out << " " << lp_name(model.vars()[k].name, "x", static_cast<int>(k))
            << "\n";
  }
  bool have_binary = false;
  for (const Variable& var : model.vars())
    if (var.kind == VarKind::Binary) have_binary = true;
  if (have_binary) {
    out << "Binaries\n";
    for (std::size_t k = 0; k < model.num_vars(); ++k)
      if (model.vars()[k].kind == VarKind::Binary)
        out << " " << lp_name(model.vars()[k].name, "x", static_cast<int>(k))
            << "\n";
  }
  out << "End\n";
}

SolveOutcome solve(const MilpModel& model, Backend& backend,
                   const SolveOptions& options) {
  SolveOutcome out = backend.solve_raw(model, options);
  if (out.has_solution() && !satisfies(model, out.values)) {
    SolveOutcome error;
    error.status = SolveStatus::Error;
    error.message = "backend '" + backend.name() +
                    "' returned an assignment violating the model";
    error.wall_seconds = out.wall_seconds;
    return error;
  }
  return out;
}

namespace {

class ReferenceBackend final : public Backend {
 public:
  std::string name() const override { return "reference"; }
  SolveOutcome solve_raw(const MilpModel& model,
                         const SolveOptions& options) override {
    return branch_and_bound_solve(model, options);
  }
};

}  // namespace

std::unique_ptr<Backend> make_reference_backend() {
  return std::make_unique<ReferenceBackend>();
}

std::unique_ptr<Backend> make_backend(const std::string& selector) {
  if (selector == "reference") return make_reference_backend();
  if (selector == "external") return make_external_backend();
  throw std::invalid_argument("unknown backend '" + selector +
                              "' (expected reference or external)");
}

}  // namespace restore::milp
