#pragma once

// Dense two-phase primal simplex for small and medium linear programs,
// plus a CPLEX-LP text writer for cross-checking with external solvers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "bce/errors.hpp"

namespace bce::lp {

enum class Sense { LessEqual, GreaterEqual, Equal };

struct Row {
  std::vector<std::pair<std::size_t, double>> coeffs;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
  std::string name;
};

/// minimize objective . x  subject to rows, x >= 0.
struct LinearProgram {
  std::vector<std::string> var_names;
  std::vector<double> objective;
  std::vector<Row> rows;

  std::size_t add_variable(std::string name, double cost) {
    var_names.push_back(std::move(name));
    objective.push_back(cost);
    return var_names.size() - 1;
  }
  std::size_t variables() const noexcept { return var_names.size(); }
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit, Numerical };

inline std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration_limit";
    case Status::Numerical: return "numerical";
  }
  return "unknown";
}

struct Solution {
  Status status = Status::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  std::size_t iterations = 0;
};

struct Options {
  std::size_t max_iterations = 200000;
  double pivot_tolerance = 1e-9;
  double cost_tolerance = 1e-11;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t degenerate_switch = 50;
  /// Objective level treated as zero when the objective is bounded below by 0.
  double zero_objective_tolerance = 1e-13;
  /// Pivots between rebuilds of the tableau from the original rows.
  std::size_t reinvert_every = 100;
  /// Largest negative basic level accepted in the final solution.
  double feasibility_tolerance = 1e-9;
};

namespace detail {

/// Dense simplex tableau with the constraint rows followed by one cost row.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return a_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return a_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double rhs(std::size_t r) const { return at(r, cols_); }
  // Row `rows_` holds reduced costs; its rhs entry is -objective.
  double& cost(std::size_t c) { return at(rows_, c); }
  double cost(std::size_t c) const { return at(rows_, c); }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::vector<std::size_t>& basis() noexcept { return basis_; }

  /// Snapshot of the constraint rows, used to rebuild the tableau.
  void freeze() { original_.assign(a_.begin(), a_.begin() + static_cast<std::ptrdiff_t>(rows_ * (cols_ + 1))); }

  void pivot(std::size_t pr, std::size_t pc) {
    const std::size_t w = cols_ + 1;
    double* prow = &a_[pr * w];
    const double inv = 1.0 / prow[pc];
    for (std::size_t c = 0; c < w; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      double* row = &a_[r * w];
      const double factor = row[pc];
      if (factor == 0.0) continue;
      for (std::size_t c = 0; c < w; ++c) {
        if (prow[c] != 0.0) row[c] -= factor * prow[c];
      }
      row[pc] = 0.0;
      // Rounding can push a basic level just below zero.
      if (r < rows_ && row[cols_] < 0.0 && row[cols_] > -1e-9) row[cols_] = 0.0;
    }
    basis_[pr] = pc;
  }

  /// Recomputes B^-1 [A | b] from the frozen rows for the current basis and
  /// rebuilds the cost row from `costs`. False if the basis is singular.
  bool reinvert(const std::vector<double>& costs) {
    const std::vector<std::size_t> basic = basis_;
    std::copy(original_.begin(), original_.end(), a_.begin());
    std::fill(a_.begin() + static_cast<std::ptrdiff_t>(rows_ * (cols_ + 1)), a_.end(), 0.0);
    std::vector<bool> assigned(rows_, false);
    for (std::size_t col : basic) {
      std::size_t pr = rows_;
      double best = 1e-11;
      for (std::size_t r = 0; r < rows_; ++r) {
        if (!assigned[r] && std::abs(at(r, col)) > best) {
          best = std::abs(at(r, col));
          pr = r;
        }
      }
      if (pr == rows_) return false;
      pivot(pr, col);
      assigned[pr] = true;
    }
    for (std::size_t c = 0; c < cols_; ++c) cost(c) = costs[c];
    rhs(rows_) = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      const double cb = costs[basis_[r]];
      if (cb == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) at(rows_, c) -= cb * at(r, c);
    }
    return true;
  }

  /// Simplex iterations restricted to entering columns [0, active_cols).
  /// With `zero_floor` the objective is known to be nonnegative, so reaching
  /// zero is optimal even while degenerate improving columns remain.
  Status optimize(std::size_t active_cols, const std::vector<double>& costs, const Options& opt,
                  std::size_t& iterations, bool zero_floor) {
    std::size_t degenerate_run = 0;
    std::size_t since_reinvert = 0;
    while (true) {
      if (since_reinvert >= opt.reinvert_every) {
        if (!reinvert(costs)) return Status::Numerical;
        since_reinvert = 0;
      }
      std::size_t pc = active_cols;
      if (!(zero_floor && -rhs(rows_) <= opt.zero_objective_tolerance)) {
        const bool bland = degenerate_run >= opt.degenerate_switch;
        double best = -opt.cost_tolerance;
        for (std::size_t c = 0; c < active_cols; ++c) {
          const double rc = cost(c);
          if (rc < best) {
            pc = c;
            if (bland) break;
            best = rc;
          }
        }
      }
      if (pc == active_cols) {
        // Confirm on a freshly rebuilt tableau before declaring optimality.
        if (since_reinvert == 0) return Status::Optimal;
        if (!reinvert(costs)) return Status::Numerical;
        since_reinvert = 0;
        continue;
      }
      if (iterations >= opt.max_iterations) return Status::IterationLimit;

      // Two-pass ratio test: find the minimum ratio, then among rows within
      // tolerance of it prefer the largest pivot (or the lowest basic index
      // under Bland's rule).
      const bool bland = degenerate_run >= opt.degenerate_switch;
      double min_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows_; ++r) {
        const double a = at(r, pc);
        if (a > opt.pivot_tolerance) min_ratio = std::min(min_ratio, std::max(rhs(r), 0.0) / a);
      }
      if (min_ratio == std::numeric_limits<double>::infinity()) return Status::Unbounded;
      std::size_t pr = rows_;
      for (std::size_t r = 0; r < rows_; ++r) {
        const double a = at(r, pc);
        if (a <= opt.pivot_tolerance || std::max(rhs(r), 0.0) / a > min_ratio + 1e-12) continue;
        if (pr == rows_ || (bland ? basis_[r] < basis_[pr] : a > at(pr, pc))) pr = r;
      }
      degenerate_run = min_ratio <= 1e-12 ? degenerate_run + 1 : 0;
      pivot(pr, pc);
      ++iterations;
      ++since_reinvert;
    }
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> a_;
  std::vector<double> original_;
  std::vector<std::size_t> basis_;
};

}  // namespace detail

inline Solution solve(const LinearProgram& lp, const Options& opt = {}) {
  const std::size_t n = lp.variables();
  const std::size_t m = lp.rows.size();
  if (lp.objective.size() != n) throw InputError("LP objective length differs from variable count");

  // Normalize to nonnegative right-hand sides.
  std::vector<Sense> sense(m);
  std::vector<double> sign(m, 1.0);
  std::size_t slack_count = 0;
  std::size_t art_count = 0;
  for (std::size_t r = 0; r < m; ++r) {
    sense[r] = lp.rows[r].sense;
    if (lp.rows[r].rhs < 0.0) {
      sign[r] = -1.0;
      if (sense[r] == Sense::LessEqual) {
        sense[r] = Sense::GreaterEqual;
      } else if (sense[r] == Sense::GreaterEqual) {
        sense[r] = Sense::LessEqual;
      }
    }
    if (sense[r] != Sense::Equal) ++slack_count;
    if (sense[r] != Sense::LessEqual) ++art_count;
  }

  const std::size_t art_begin = n + slack_count;
  const std::size_t cols = art_begin + art_count;
  detail::Tableau t(m, cols);
  std::size_t slack = n;
  std::size_t art = art_begin;
  for (std::size_t r = 0; r < m; ++r) {
    for (const auto& [c, v] : lp.rows[r].coeffs) {
      if (c >= n) throw InputError("LP row references an unknown variable");
      t.at(r, c) += sign[r] * v;
    }
    t.rhs(r) = sign[r] * lp.rows[r].rhs;
    switch (sense[r]) {
      case Sense::LessEqual:
        t.at(r, slack) = 1.0;
        t.basis()[r] = slack++;
        break;
      case Sense::GreaterEqual:
        t.at(r, slack++) = -1.0;
        t.at(r, art) = 1.0;
        t.basis()[r] = art++;
        break;
      case Sense::Equal:
        t.at(r, art) = 1.0;
        t.basis()[r] = art++;
        break;
    }
  }

  t.freeze();
  Solution sol;
  // Phase 1: minimize the sum of artificials.
  if (art_count > 0) {
    std::vector<double> phase1(cols, 0.0);
    for (std::size_t c = art_begin; c < cols; ++c) phase1[c] = 1.0;
    t.reinvert(phase1);
    const Status s = t.optimize(cols, phase1, opt, sol.iterations, true);
    if (s == Status::IterationLimit) {
      sol.status = s;
      return sol;
    }
    if (-t.rhs(m) > 1e-8) {
      sol.status = Status::Infeasible;
      return sol;
    }
    // Drive remaining zero-level artificials out of the basis where possible.
    for (std::size_t r = 0; r < m; ++r) {
      if (t.basis()[r] < art_begin) continue;
      for (std::size_t c = 0; c < art_begin; ++c) {
        if (std::abs(t.at(r, c)) > opt.pivot_tolerance) {
          t.pivot(r, c);
          break;
        }
      }
    }
  }

  // Phase 2: original objective over non-artificial columns. A row whose basic
  // variable is still artificial is redundant and stays at level zero.
  std::vector<double> phase2(cols, 0.0);
  std::copy(lp.objective.begin(), lp.objective.end(), phase2.begin());
  if (!t.reinvert(phase2)) {
    sol.status = Status::Numerical;
    return sol;
  }
  const bool nonnegative_costs =
      std::all_of(lp.objective.begin(), lp.objective.end(), [](double c) { return c >= 0.0; });
  sol.status = t.optimize(art_begin, phase2, opt, sol.iterations, nonnegative_costs);
  if (sol.status != Status::Optimal) return sol;

  sol.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (t.rhs(r) < -opt.feasibility_tolerance) {
      sol.status = Status::Numerical;
      return sol;
    }
    if (t.basis()[r] < n) sol.x[t.basis()[r]] = std::max(t.rhs(r), 0.0);
  }
  sol.objective = 0.0;
  for (std::size_t c = 0; c < n; ++c) sol.objective += lp.objective[c] * sol.x[c];
  return sol;
}

/// CPLEX LP text format.
inline void write_lp_format(std::ostream& out, const LinearProgram& lp) {
  auto term = [&](double v, const std::string& name, bool first) {
    if (v < 0) {
      out << " - " << -v << ' ' << name;
    } else {
      out << (first ? " " : " + ") << v << ' ' << name;
    }
  };
  out.precision(17);
  out << "Minimize\n obj:";
  bool first = true;
  for (std::size_t c = 0; c < lp.variables(); ++c) {
    if (lp.objective[c] == 0.0) continue;
    term(lp.objective[c], lp.var_names[c], first);
    first = false;
  }
  if (first) out << " 0 " << lp.var_names.front();
  out << "\nSubject To\n";
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    const auto& row = lp.rows[r];
    out << ' ' << (row.name.empty() ? "c" + std::to_string(r) : row.name) << ':';
    first = true;
    for (const auto& [c, v] : row.coeffs) {
      term(v, lp.var_names[c], first);
      first = false;
    }
    if (first) out << " 0 " << lp.var_names.front();
    out << (row.sense == Sense::LessEqual ? " <= " : row.sense == Sense::GreaterEqual ? " >= " : " = ")
        << row.rhs << '\n';
  }
  out << "End\n";
}

}  // namespace bce::lp
