#include <unistd.h>

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "restore/milp.hpp"
#include "restore/util.hpp"

// External backend: writes the model in LP format and shells out to a solver
// executable named by RESTORE_SOLVER (or an explicit path). The CBC and GLPK
// command-line conventions are supported; the returned assignment is parsed
// by variable name and re-verified by the caller.

namespace restore::milp {

namespace {

namespace fs = std::filesystem;

std::string sanitize_name(const std::string& name, const char* prefix,
                          int index) {
  if (name.empty()) return std::string(prefix) + std::to_string(index);
  std::string cleaned = name;
  for (char& ch : cleaned)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') ch = '_';
  return cleaned;
}

class ExternalBackend final : public Backend {
 public:
  explicit ExternalBackend(std::string solver_path)
      : solver_path_(std::move(solver_path)) {
    if (solver_path_.empty()) {
      if (const char* env = std::getenv("RESTORE_SOLVER")) solver_path_ = env;
    }
  }

  std::string name() const override { return "external"; }

  SolveOutcome solve_raw(const MilpModel& model,
                         const SolveOptions& options) override {
    Stopwatch watch;
    SolveOutcome out;
    if (solver_path_.empty() || !fs::exists(solver_path_)) {
      out.status = SolveStatus::Error;
      out.message =
          "external backend unavailable: set RESTORE_SOLVER to a CBC or GLPK "
          "executable (looked for '" +
          solver_path_ + "')";
      return out;
    }

    const auto dir = fs::temp_directory_path();
    const auto tag = std::to_string(
        std::hash<std::string>{}(solver_path_ + std::to_string(counter_++)) ^
        static_cast<std::size_t>(::getpid()));
    const fs::path lp_path = dir / ("restore_" + tag + ".lp");
    const fs::path sol_path = dir / ("restore_" + tag + ".sol");

    {
      std::ofstream lp(lp_path);
      write_lp(model, lp);
    }

    const std::string base = fs::path(solver_path_).filename().string();
    const bool glpk = base.find("glpsol") != std::string::npos;
    std::ostringstream cmd;
    if (glpk) {
      cmd << "'" << solver_path_ << "' --lp '" << lp_path.string()
          << "' --output '" << sol_path.string() << "'";
      if (options.time_limit_sec)
        cmd << " --tmlim " << static_cast<long>(*options.time_limit_sec + 1);
    } else {
      cmd << "'" << solver_path_ << "' '" << lp_path.string() << "'";
      if (options.time_limit_sec) cmd << " sec " << *options.time_limit_sec;
      cmd << " solve printingOptions all solution '" << sol_path.string()
          << "'";
    }
    cmd << " > /dev/null 2>&1";

    const int rc = std::system(cmd.str().c_str());
    std::error_code ec;
    if (!fs::exists(sol_path)) {
      out.status = SolveStatus::Error;
      out.message = "external solver produced no solution file (exit " +
                    std::to_string(rc) + ")";
      fs::remove(lp_path, ec);
      return out;
    }

    out = glpk ? parse_glpk(model, sol_path) : parse_cbc(model, sol_path);
    fs::remove(lp_path, ec);
    fs::remove(sol_path, ec);
    out.wall_seconds = watch.elapsed_sec();
    return out;
  }

 private:
  static SolveOutcome parse_cbc(const MilpModel& model, const fs::path& path) {
    SolveOutcome out;
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    if (header.find("Infeasible") != std::string::npos ||
        header.find("infeasible") != std::string::npos) {
      out.status = SolveStatus::Infeasible;
      return out;
    }
    const bool optimal = header.find("Optimal") != std::string::npos;
    const bool stopped = header.find("Stopped") != std::string::npos;
    if (!optimal && !stopped) {
      out.status = SolveStatus::Error;
      out.message = "unrecognized CBC status line: " + header;
      return out;
    }
    out.values = read_named_values(model, in, /*skip_columns=*/1);
    out.objective = objective_value(model, out.values);
    out.status = optimal ? SolveStatus::Optimal : SolveStatus::Feasible;
    return out;
  }

  static SolveOutcome parse_glpk(const MilpModel& model, const fs::path& path) {
    SolveOutcome out;
    std::ifstream in(path);
    std::string line;
    bool optimal = false, feasible = false;
    while (std::getline(in, line)) {
      if (line.rfind("Status:", 0) == 0) {
        optimal = line.find("OPTIMAL") != std::string::npos;
        feasible = optimal || line.find("FEASIBLE") != std::string::npos;
        if (line.find("EMPTY") != std::string::npos ||
            line.find("UNDEFINED") != std::string::npos ||
            line.find("INFEASIBLE") != std::string::npos) {
          out.status = SolveStatus::Infeasible;
          return out;
        }
        break;
      }
    }
    if (!feasible) {
      out.status = SolveStatus::Error;
      out.message = "unrecognized GLPK status";
      return out;
    }
    // Column section rows look like: "     1 name         *     value ..."
    std::map<std::string, double> by_name;
    bool in_columns = false;
    while (std::getline(in, line)) {
      if (line.find("Column name") != std::string::npos) {
        in_columns = true;
        std::getline(in, line);  // separator dashes
        continue;
      }
      if (!in_columns) continue;
      std::istringstream row(line);
      long index;
      std::string name;
      if (!(row >> index >> name)) {
        if (!line.empty() && line.find_first_not_of(" -") == std::string::npos)
          continue;
        if (line.empty()) break;
        continue;
      }
      std::string token;
      double value = 0.0;
      while (row >> token) {
        try {
          value = std::stod(token);
          break;
        } catch (...) {
          continue;
        }
      }
      by_name[name] = value;
    }
    out.values.assign(model.num_vars(), 0.0);
    for (std::size_t k = 0; k < model.num_vars(); ++k) {
      const auto name =
          sanitize_name(model.vars()[k].name, "x", static_cast<int>(k));
      if (auto it = by_name.find(name); it != by_name.end())
        out.values[k] = it->second;
    }
    out.objective = objective_value(model, out.values);
    out.status = optimal ? SolveStatus::Optimal : SolveStatus::Feasible;
    return out;
  }

  static std::vector<double> read_named_values(const MilpModel& model,
                                               std::istream& in,
                                               int skip_columns) {
    std::map<std::string, double> by_name;
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream row(line);
      std::string name;
      double value;
      for (int i = 0; i < skip_columns; ++i) {
        std::string skip;
        row >> skip;
      }
      if (row >> name >> value) by_name[name] = value;
    }
    std::vector<double> values(model.num_vars(), 0.0);
    for (std::size_t k = 0; k < model.num_vars(); ++k) {
      const auto name =
          sanitize_name(model.vars()[k].name, "x", static_cast<int>(k));
      if (auto it = by_name.find(name); it != by_name.end())
        values[k] = it->second;
    }
    return values;
  }

  std::string solver_path_;
  int counter_ = 0;
};

}  // namespace

std::unique_ptr<Backend> make_external_backend(std::string solver_path) {
  return std::make_unique<ExternalBackend>(std::move(solver_path));
}

}  // namespace restore::milp
