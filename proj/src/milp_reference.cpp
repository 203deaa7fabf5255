#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "restore/milp.hpp"
#include "restore/util.hpp"

// Depth-first branch and bound over the integer variables with bounds
// propagation at every node.
//
// Two structural features carry the search:
//  - exactly-one groups (rows of the form sum x = 1 over binaries) give
//    group-aware activity bounds: a row's contribution from a group is the
//    best single member, not the sum of per-variable ranges, which is what
//    makes time-indexed scheduling rows prune;
//  - whenever the remaining free variables fall apart into constraint-wise
//    independent blocks, the blocks are solved separately and recombined, so
//    unrelated subproblems (say routing and scheduling) do not multiply each
//    other's search trees.
//
// Continuous variables are never branched: the caller guarantees that no
// constraint couples two of them, so interval propagation pins each one given
// the integers.

namespace restore::milp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = 1e-9;

struct CompSolution {
  bool found = false;
  double obj = kInf;
  std::vector<double> values;  // parallel to the component's variable list
};

class BnbSolver {
 public:
  BnbSolver(const MilpModel& model, const SolveOptions& options)
      : model_(model), options_(options) {}

  SolveOutcome run() {
    SolveOutcome out;

    const auto& vars = model_.vars();
    n_ = static_cast<int>(vars.size());
    lo_.resize(n_);
    hi_.resize(n_);
    is_int_.resize(n_);
    obj_coef_.assign(n_, 0.0);
    for (int k = 0; k < n_; ++k) {
      const Variable& var = vars[k];
      is_int_[k] = var.kind != VarKind::Continuous;
      lo_[k] = is_int_[k] ? std::ceil(var.lb - 1e-6) : var.lb;
      hi_[k] = is_int_[k] ? std::floor(var.ub + 1e-6) : var.ub;
      if (lo_[k] > hi_[k]) {
        out.status = SolveStatus::Infeasible;
        out.wall_seconds = watch_.elapsed_sec();
        return out;
      }
    }
    for (const Term& term : model_.objective()) obj_coef_[term.var] += term.coef;

    if (!build_rows(&out)) return out;
    detect_groups();
    build_layouts();

    // A verified warm start seeds the incumbent; invalid ones are ignored.
    std::vector<int> all_vars(n_);
    for (int k = 0; k < n_; ++k) all_vars[k] = k;
    CompSolution best;
    if (model_.warm_start() && satisfies(model_, *model_.warm_start())) {
      best.found = true;
      best.obj = objective_value(model_, *model_.warm_start());
      best.values = *model_.warm_start();
    }

    for (std::size_t r = 0; r < rows_.size(); ++r) enqueue(static_cast<int>(r));
    bool completed = true;
    if (propagate())
      completed = search(all_vars, kInf, best, count_unfixed(all_vars), 0);

    if (best.found) {
      out.values = best.values;
      // Exact re-pinning of continuous variables removes any propagation
      // rounding before the final verification.
      pin_exact(out.values);
      out.objective = objective_value(model_, out.values);
      out.status = completed ? SolveStatus::Optimal : SolveStatus::Feasible;
    } else {
      out.status = completed ? SolveStatus::Infeasible : SolveStatus::TimedOut;
    }
    if (!completed) out.message = limit_message_;
    out.wall_seconds = watch_.elapsed_sec();
    return out;
  }

 private:
  struct Row {
    std::vector<Term> terms;  // duplicate variables merged, zeros dropped
    Sense sense = Sense::Le;
    double rhs = 0.0;
  };

  // Row terms split into plain terms and per-group slices.
  struct Slice {
    int gid = -1;
    std::vector<Term> terms;
  };
  struct Layout {
    std::vector<Term> plain;
    std::vector<Slice> slices;
  };

  bool build_rows(SolveOutcome* out) {
    rows_.reserve(model_.num_rows());
    rows_of_var_.assign(n_, {});
    for (const Constraint& source : model_.rows()) {
      Row row;
      row.sense = source.sense;
      row.rhs = source.rhs;
      std::map<int, double> merged;
      for (const Term& term : source.terms) merged[term.var] += term.coef;
      int continuous = 0;
      for (const auto& [var, coef] : merged) {
        if (coef == 0.0) continue;
        row.terms.push_back({var, coef});
        if (!is_int_[var]) ++continuous;
      }
      if (continuous > 1) {
        out->status = SolveStatus::Error;
        out->message = "a constraint couples two continuous variables";
        return false;
      }
      const int index = static_cast<int>(rows_.size());
      for (const Term& term : row.terms)
        rows_of_var_[term.var].push_back(index);
      rows_.push_back(std::move(row));
    }
    in_queue_.assign(rows_.size(), false);
    return true;
  }

  // Selection groups over binaries with unit coefficients:
  //   sum x  = 1   exactly one member is selected,
  //   sum x <= 1   at most one member is selected,
  //   sum x  = y   one member is selected iff the link binary y is on.
  // Each variable joins at most one group.
  struct Group {
    std::vector<int> members;
    int link = kSelectFree;  // kSelectAlways, kSelectFree, or a link var id
  };
  static constexpr int kSelectAlways = -2;
  static constexpr int kSelectFree = -1;

  bool binary_var(int var) const {
    return is_int_[var] && lo_[var] >= 0.0 && hi_[var] <= 1.0;
  }

  void detect_groups() {
    group_of_.assign(n_, -1);
    for (const Row& row : rows_) {
      int link = kSelectFree;
      if (row.sense == Sense::Eq && row.rhs == 1.0) {
        link = kSelectAlways;
      } else if (row.sense == Sense::Le && row.rhs == 1.0) {
        link = kSelectFree;
      } else if (row.sense == Sense::Eq && row.rhs == 0.0) {
        link = -3;  // resolved below from the -1 coefficient term
      } else {
        continue;
      }

      std::vector<int> members;
      bool eligible = true;
      for (const Term& term : row.terms) {
        if (term.coef == 1.0 && binary_var(term.var) &&
            group_of_[term.var] < 0) {
          members.push_back(term.var);
        } else if (link == -3 && term.coef == -1.0 && binary_var(term.var)) {
          link = term.var;
        } else {
          eligible = false;
          break;
        }
      }
      if (link == -3) eligible = false;  // no link term found
      if (!eligible || members.size() < 2) continue;
      const int gid = static_cast<int>(groups_.size());
      for (int var : members) group_of_[var] = gid;
      Group group;
      group.members = std::move(members);
      group.link = link;
      groups_.push_back(std::move(group));
    }
    avail_.resize(groups_.size());
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      int count = 0;
      for (int var : groups_[g].members)
        if (hi_[var] >= 0.5) ++count;
      avail_[g] = count;
    }
  }

  // True when the group may select no member at all.
  bool may_select_nothing(const Group& group) const {
    if (group.link == kSelectAlways) return false;
    if (group.link == kSelectFree) return true;
    return lo_[group.link] < 0.5;
  }

  // True when the group must select some member.
  bool must_select(const Group& group) const {
    if (group.link == kSelectAlways) return true;
    if (group.link == kSelectFree) return false;
    return lo_[group.link] >= 0.5;
  }

  void build_layouts() {
    layouts_.resize(rows_.size());
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      Layout& layout = layouts_[r];
      std::map<int, std::size_t> slice_of;
      for (const Term& term : rows_[r].terms) {
        const int gid = group_of_[term.var];
        if (gid < 0) {
          layout.plain.push_back(term);
          continue;
        }
        auto it = slice_of.find(gid);
        if (it == slice_of.end()) {
          it = slice_of.emplace(gid, layout.slices.size()).first;
          layout.slices.push_back({gid, {}});
        }
        layout.slices[it->second].terms.push_back(term);
      }
    }
  }

  // --- bounds state with trail-based backtracking --------------------------

  struct TrailEntry {
    int var;
    bool upper;
    double old_value;
  };

  bool is_fixed(int var) const {
    return hi_[var] - lo_[var] <= (is_int_[var] ? 0.5 : kEps);
  }

  void set_bound(int var, bool upper, double value) {
    trail_.push_back({var, upper, upper ? hi_[var] : lo_[var]});
    if (upper) {
      const int gid = group_of_[var];
      if (gid >= 0 && hi_[var] >= 0.5 && value < 0.5) --avail_[gid];
      hi_[var] = value;
    } else {
      lo_[var] = value;
    }
    for (int row : rows_of_var_[var]) enqueue(row);
  }

  void undo_to(std::size_t mark) {
    while (trail_.size() > mark) {
      const TrailEntry& entry = trail_.back();
      if (entry.upper) {
        const int gid = group_of_[entry.var];
        if (gid >= 0 && hi_[entry.var] < 0.5 && entry.old_value >= 0.5)
          ++avail_[gid];
        hi_[entry.var] = entry.old_value;
      } else {
        lo_[entry.var] = entry.old_value;
      }
      trail_.pop_back();
    }
  }

  // --- propagation ----------------------------------------------------------

  void enqueue(int row) {
    if (!in_queue_[row]) {
      in_queue_[row] = true;
      queue_.push_back(row);
    }
  }

  // Tightens bounds to fixpoint; false on a proven empty domain or row. The
  // queue is always drained (or cleared) before returning.
  bool propagate() {
    std::size_t head = 0;
    while (head < queue_.size()) {
      const int r = queue_[head++];
      in_queue_[r] = false;
      if (!propagate_row(r)) {
        for (std::size_t i = head; i < queue_.size(); ++i)
          in_queue_[queue_[i]] = false;
        queue_.clear();
        return false;
      }
      if (head > 1024 && head * 2 > queue_.size()) {
        queue_.erase(queue_.begin(), queue_.begin() + head);
        head = 0;
      }
    }
    queue_.clear();
    return true;
  }

  // Scratch per slice, refilled on every row visit.
  struct SliceEval {
    double cont_min = 0.0, cont_max = 0.0;
    double min1 = kInf, min2 = kInf;    // two smallest candidate contributions
    double max1 = -kInf, max2 = -kInf;  // two largest
    int argmin = -1, argmax = -1;       // candidate variable of min1 / max1
    bool forced = false;                // some member already fixed to one
  };

  bool propagate_row(int r) {
    const Row& row = rows_[static_cast<std::size_t>(r)];
    const Layout& layout = layouts_[static_cast<std::size_t>(r)];
    const bool need_le = row.sense != Sense::Ge;  // activity <= rhs applies
    const bool need_ge = row.sense != Sense::Le;  // activity >= rhs applies

    double min_act = 0.0, max_act = 0.0;
    for (const Term& term : layout.plain) {
      if (term.coef > 0.0) {
        min_act += term.coef * lo_[term.var];
        max_act += term.coef * hi_[term.var];
      } else {
        min_act += term.coef * hi_[term.var];
        max_act += term.coef * lo_[term.var];
      }
    }

    slice_evals_.assign(layout.slices.size(), SliceEval{});
    for (std::size_t s = 0; s < layout.slices.size(); ++s) {
      const Slice& slice = layout.slices[s];
      const Group& group = groups_[static_cast<std::size_t>(slice.gid)];
      SliceEval& eval = slice_evals_[s];
      if (avail_[slice.gid] <= 0) {
        if (must_select(group)) return false;  // group unsatisfiable
        eval.min1 = eval.max1 = 0.0;           // nothing selected
        continue;
      }
      int in_avail = 0;
      for (const Term& term : slice.terms) {
        if (lo_[term.var] >= 0.5) {
          // member fixed to one: the group contributes exactly this term
          if (eval.forced) return false;  // two selected members
          eval.forced = true;
          eval.cont_min = eval.cont_max = term.coef;
          eval.min1 = eval.max1 = term.coef;
          eval.argmin = eval.argmax = term.var;
          continue;
        }
        if (eval.forced) continue;
        if (hi_[term.var] < 0.5) continue;
        ++in_avail;
        if (term.coef < eval.min1) {
          eval.min2 = eval.min1;
          eval.min1 = term.coef;
          eval.argmin = term.var;
        } else if (term.coef < eval.min2) {
          eval.min2 = term.coef;
        }
        if (term.coef > eval.max1) {
          eval.max2 = eval.max1;
          eval.max1 = term.coef;
          eval.argmax = term.var;
        } else if (term.coef > eval.max2) {
          eval.max2 = term.coef;
        }
      }
      if (!eval.forced) {
        // A zero contribution is possible when an out-of-row member can be
        // selected or the group may select nothing at all.
        if (avail_[slice.gid] > in_avail || may_select_nothing(group)) {
          if (0.0 < eval.min1) {
            eval.min2 = eval.min1;
            eval.min1 = 0.0;
            eval.argmin = -1;
          } else if (0.0 < eval.min2) {
            eval.min2 = 0.0;
          }
          if (0.0 > eval.max1) {
            eval.max2 = eval.max1;
            eval.max1 = 0.0;
            eval.argmax = -1;
          } else if (0.0 > eval.max2) {
            eval.max2 = 0.0;
          }
        }
        eval.cont_min = eval.min1;
        eval.cont_max = eval.max1;
      }
      min_act += eval.cont_min;
      max_act += eval.cont_max;
    }

    if (need_le && min_act > row.rhs + kFeasibilityTol) return false;
    if (need_ge && max_act < row.rhs - kFeasibilityTol) return false;

    // Plain variables: interval tightening against the residual activity.
    for (const Term& term : layout.plain) {
      const int k = term.var;
      const double a = term.coef;
      if (need_le) {
        const double slack = row.rhs - min_act;
        if (a > 0.0) {
          double new_hi = lo_[k] + slack / a;
          if (is_int_[k]) new_hi = std::floor(new_hi + 1e-6);
          if (new_hi < hi_[k] - (is_int_[k] ? 0.5 : kEps)) {
            max_act += a * (new_hi - hi_[k]);
            set_bound(k, true, new_hi);
          }
        } else {
          double new_lo = hi_[k] + slack / a;
          if (is_int_[k]) new_lo = std::ceil(new_lo - 1e-6);
          if (new_lo > lo_[k] + (is_int_[k] ? 0.5 : kEps)) {
            max_act += a * (new_lo - lo_[k]);
            set_bound(k, false, new_lo);
          }
        }
        if (lo_[k] > hi_[k]) return false;
      }
      if (need_ge) {
        const double surplus = max_act - row.rhs;
        if (a > 0.0) {
          double new_lo = hi_[k] - surplus / a;
          if (is_int_[k]) new_lo = std::ceil(new_lo - 1e-6);
          if (new_lo > lo_[k] + (is_int_[k] ? 0.5 : kEps)) {
            min_act += a * (new_lo - lo_[k]);
            set_bound(k, false, new_lo);
          }
        } else {
          double new_hi = lo_[k] - surplus / a;
          if (is_int_[k]) new_hi = std::floor(new_hi + 1e-6);
          if (new_hi < hi_[k] - (is_int_[k] ? 0.5 : kEps)) {
            min_act += a * (new_hi - hi_[k]);
            set_bound(k, true, new_hi);
          }
        }
        if (lo_[k] > hi_[k]) return false;
      }
    }

    // Group candidates: rule out members whose selection would violate the
    // row, and force a member whose non-selection would. Stale slice stats
    // after a change stay on the safe side; the row re-queues itself.
    for (std::size_t s = 0; s < layout.slices.size(); ++s) {
      const Slice& slice = layout.slices[s];
      const SliceEval& eval = slice_evals_[s];
      if (eval.forced) {
        // a selected member rules out every other member of its group
        for (const Term& term : slice.terms)
          if (term.var != eval.argmin && hi_[term.var] >= 0.5)
            set_bound(term.var, true, 0.0);
        continue;
      }
      for (const Term& term : slice.terms) {
        const int k = term.var;
        if (hi_[k] < 0.5 || lo_[k] >= 0.5) continue;
        if (need_le) {
          const double hyp = min_act - eval.cont_min + term.coef;
          if (hyp > row.rhs + kFeasibilityTol) {
            set_bound(k, true, 0.0);
            continue;
          }
          // contribution if k is not selected
          const double without =
              (k == eval.argmin) ? eval.min2 : eval.min1;
          if (min_act - eval.cont_min + without > row.rhs + kFeasibilityTol)
            set_bound(k, false, 1.0);
        }
        if (need_ge && hi_[k] >= 0.5) {
          const double hyp = max_act - eval.cont_max + term.coef;
          if (hyp < row.rhs - kFeasibilityTol) {
            set_bound(k, true, 0.0);
            continue;
          }
          const double without =
              (k == eval.argmax) ? eval.max2 : eval.max1;
          if (max_act - eval.cont_max + without < row.rhs - kFeasibilityTol)
            set_bound(k, false, 1.0);
        }
        if (lo_[k] > hi_[k]) return false;
      }
    }
    return true;
  }

  // --- search ---------------------------------------------------------------

  int count_unfixed(const std::vector<int>& active) const {
    int unfixed = 0;
    for (int var : active)
      if (is_int_[var] && !is_fixed(var)) ++unfixed;
    return unfixed;
  }

  double objective_lb(const std::vector<int>& active) const {
    double lb = 0.0;
    for (int var : active) {
      const double coef = obj_coef_[var];
      if (coef > 0.0)
        lb += coef * lo_[var];
      else if (coef < 0.0)
        lb += coef * hi_[var];
    }
    return lb;
  }

  bool limits_hit() {
    ++nodes_;
    if (options_.node_limit && nodes_ > *options_.node_limit) {
      limit_message_ = "node limit reached";
      return true;
    }
    if (options_.time_limit_sec && nodes_ % 512 == 0 &&
        watch_.elapsed_sec() > *options_.time_limit_sec) {
      limit_message_ = "time limit reached";
      return true;
    }
    return false;
  }

  // Splits the active free variables into constraint-wise independent blocks.
  // Returns an empty list when they form a single block.
  std::vector<std::vector<int>> split_components(
      const std::vector<int>& active) const {
    std::vector<int> free_vars;
    for (int var : active)
      if (!is_int_[var] || !is_fixed(var)) free_vars.push_back(var);
    if (free_vars.size() < 2) return {};

    std::vector<int> slot(n_, -1);
    for (std::size_t i = 0; i < free_vars.size(); ++i)
      slot[free_vars[i]] = static_cast<int>(i);
    std::vector<int> parent(free_vars.size());
    for (std::size_t i = 0; i < parent.size(); ++i)
      parent[i] = static_cast<int>(i);
    auto find = [&parent](int a) {
      while (parent[a] != a) {
        parent[a] = parent[parent[a]];
        a = parent[a];
      }
      return a;
    };

    for (const Row& row : rows_) {
      int first = -1;
      for (const Term& term : row.terms) {
        const int s = slot[term.var];
        if (s < 0) continue;
        if (first < 0)
          first = s;
        else
          parent[find(s)] = find(first);
      }
    }

    std::map<int, std::vector<int>> groups;
    for (std::size_t i = 0; i < free_vars.size(); ++i)
      groups[find(static_cast<int>(i))].push_back(free_vars[i]);
    if (groups.size() < 2) return {};
    std::vector<std::vector<int>> comps;
    comps.reserve(groups.size());
    for (auto& [root, members] : groups) comps.push_back(std::move(members));
    std::sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) {
      return a.front() < b.front();
    });
    return comps;
  }

  // Minimizes the objective restricted to `active`. Only solutions strictly
  // below `cutoff` (and the shared incumbent in `best`) are recorded.
  // Returns false when a resource limit aborted the search.
  bool search(const std::vector<int>& active, double cutoff, CompSolution& best,
              int last_split_count, std::size_t scan_hint) {
    if (limits_hit()) return false;

    const double effective_cutoff =
        best.found ? std::min(cutoff, best.obj) : cutoff;
    if (objective_lb(active) >= effective_cutoff - kEps) return true;

    // Attempt block decomposition on a halving schedule of the number of
    // still-unfixed integers.
    const int unfixed = count_unfixed(active);
    if (unfixed >= 2 && (scan_hint == 0 || unfixed * 2 <= last_split_count)) {
      const auto comps = split_components(active);
      if (!comps.empty())
        return solve_components(active, comps, effective_cutoff, best);
      last_split_count = unfixed;
    }

    // first unfixed integer in creation order
    int branch_var = -1;
    std::size_t pos = scan_hint;
    for (; pos < active.size(); ++pos) {
      const int var = active[pos];
      if (is_int_[var] && !is_fixed(var)) {
        branch_var = var;
        break;
      }
    }
    if (branch_var < 0) return record_leaf(active, effective_cutoff, best);

    for (double value : value_order(branch_var)) {
      const std::size_t mark = trail_.size();
      set_bound(branch_var, false, value);
      set_bound(branch_var, true, value);
      bool child_completed = true;
      if (propagate())
        child_completed = search(active, cutoff, best, last_split_count, pos);
      undo_to(mark);
      if (!child_completed) return false;
    }
    return true;
  }

  // All active integers fixed: pin continuous members and record the leaf.
  bool record_leaf(const std::vector<int>& active, double effective_cutoff,
                   CompSolution& best) {
    double obj = 0.0;
    std::vector<double> values(active.size());
    for (std::size_t i = 0; i < active.size(); ++i) {
      const int var = active[i];
      const double value = is_int_[var]
                               ? lo_[var]
                               : (obj_coef_[var] >= 0.0 ? lo_[var] : hi_[var]);
      values[i] = value;
      obj += obj_coef_[var] * value;
    }
    if (obj < effective_cutoff - kEps &&
        (!best.found || obj < best.obj - kEps)) {
      best.found = true;
      best.obj = obj;
      best.values = std::move(values);
    }
    return true;
  }

  bool solve_components(const std::vector<int>& active,
                        const std::vector<std::vector<int>>& comps,
                        double effective_cutoff, CompSolution& best) {
    double fixed_part = 0.0;
    for (int var : active)
      if (is_int_[var] && is_fixed(var)) fixed_part += obj_coef_[var] * lo_[var];

    std::vector<double> comp_lb(comps.size(), 0.0);
    for (std::size_t c = 0; c < comps.size(); ++c)
      comp_lb[c] = objective_lb(comps[c]);

    std::vector<CompSolution> solutions(comps.size());
    double solved_sum = 0.0;
    for (std::size_t c = 0; c < comps.size(); ++c) {
      double rest_lb = 0.0;
      for (std::size_t d = c + 1; d < comps.size(); ++d) rest_lb += comp_lb[d];
      const double comp_cutoff =
          effective_cutoff - fixed_part - solved_sum - rest_lb;
      if (!search(comps[c], comp_cutoff, solutions[c], count_unfixed(comps[c]),
                  0))
        return false;
      if (!solutions[c].found) return true;  // nothing improving through here
      solved_sum += solutions[c].obj;
    }

    const double total = fixed_part + solved_sum;
    if (best.found && total >= best.obj - kEps) return true;
    best.found = true;
    best.obj = total;
    best.values.assign(active.size(), 0.0);
    std::vector<double> by_var(n_, 0.0);
    std::vector<char> in_comp(n_, 0);
    for (std::size_t c = 0; c < comps.size(); ++c) {
      for (std::size_t i = 0; i < comps[c].size(); ++i) {
        by_var[comps[c][i]] = solutions[c].values[i];
        in_comp[comps[c][i]] = 1;
      }
    }
    for (std::size_t i = 0; i < active.size(); ++i) {
      const int var = active[i];
      if (in_comp[var])
        best.values[i] = by_var[var];
      else if (is_int_[var])
        best.values[i] = lo_[var];
      else
        best.values[i] = obj_coef_[var] >= 0.0 ? lo_[var] : hi_[var];
    }
    return true;
  }

  std::vector<double> value_order(int var) const {
    std::vector<double> values;
    const long long lo = static_cast<long long>(lo_[var]);
    const long long hi = static_cast<long long>(hi_[var]);
    auto push_unique = [&values](double v) {
      if (std::find(values.begin(), values.end(), v) == values.end())
        values.push_back(v);
    };
    if (model_.warm_start()) {
      const double w = std::round((*model_.warm_start())[var]);
      if (w >= lo_[var] - 0.5 && w <= hi_[var] + 0.5) push_unique(w);
    }
    if (lo >= 0 && hi <= 1) {
      if (hi >= 1) push_unique(1.0);  // binaries: try "on" first
      if (lo <= 0) push_unique(0.0);
    } else {
      const long long top = std::max(std::llabs(lo), std::llabs(hi));
      for (long long mag = 0; mag <= top; ++mag) {
        if (mag >= lo && mag <= hi) push_unique(static_cast<double>(mag));
        if (mag != 0 && -mag >= lo && -mag <= hi)
          push_unique(static_cast<double>(-mag));
      }
    }
    return values;
  }

  // Exact interval pinning of the continuous variables for the final answer.
  void pin_exact(std::vector<double>& x) const {
    const auto& vars = model_.vars();
    for (int c = 0; c < n_; ++c) {
      if (is_int_[c]) {
        x[c] = std::round(x[c]);
        continue;
      }
      double lo = vars[c].lb, hi = vars[c].ub;
      for (int r : rows_of_var_[c]) {
        const Row& row = rows_[static_cast<std::size_t>(r)];
        double coef = 0.0, others = 0.0;
        for (const Term& term : row.terms) {
          if (term.var == c)
            coef += term.coef;
          else
            others += term.coef * x[term.var];
        }
        if (coef == 0.0) continue;
        const double bound = (row.rhs - others) / coef;
        if (row.sense == Sense::Eq) {
          lo = std::max(lo, bound);
          hi = std::min(hi, bound);
        } else if ((row.sense == Sense::Le) == (coef > 0.0)) {
          hi = std::min(hi, bound);
        } else {
          lo = std::max(lo, bound);
        }
      }
      if (lo > hi) hi = lo;
      x[c] = obj_coef_[c] >= 0.0 ? lo : hi;
    }
  }

  const MilpModel& model_;
  const SolveOptions& options_;
  Stopwatch watch_;

  int n_ = 0;
  std::vector<double> lo_, hi_;
  std::vector<char> is_int_;
  std::vector<double> obj_coef_;
  std::vector<Row> rows_;
  std::vector<Layout> layouts_;
  std::vector<std::vector<int>> rows_of_var_;

  std::vector<int> group_of_;
  std::vector<Group> groups_;
  std::vector<int> avail_;
  std::vector<SliceEval> slice_evals_;

  std::vector<TrailEntry> trail_;
  std::vector<int> queue_;
  std::vector<char> in_queue_;

  long long nodes_ = 0;
  std::string limit_message_;
};

}  // namespace

SolveOutcome branch_and_bound_solve(const MilpModel& model,
                                    const SolveOptions& options) {
  BnbSolver solver(model, options);
  return solver.run();
}

}  // namespace restore::milp
