#pragma once

// Bounded-variable revised simplex (primal two-phase and dual) with an explicit
// dense basis inverse.
//
// Every row r is turned into a_r x - s_r = 0 with a logical column s_r whose
// bounds carry the row sense. The dual value reported for row r is the
// reduced cost of s_r, so duals of >= rows are non-negative at a minimizing
// optimum and duals of <= rows are non-positive.
//
// A solver keeps its final basis. Changing right-hand sides or column bounds
// and calling solve() again restarts from that basis with the dual simplex,
// which is how the per-agent subproblems and branch-and-bound nodes are
// re-solved cheaply.

#include <cstdint>
#include <string>
#include <vector>

#include "pdvrp/linear_model.hpp"

namespace pdvrp {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> primal;         // one per model variable
  std::vector<double> duals;          // one per model row
  std::vector<double> reduced_costs;  // one per model variable
  double objective = 0.0;
  int iterations = 0;
  int iteration_limit = 0;
};

struct SimplexOptions {
  int iteration_limit = 200000;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-7;
  int refactor_interval = 100;
  // Degenerate pivots in a row before switching to Bland's rule.
  int degenerate_limit = 50;
  // Use the dual simplex whenever the starting basis is dual feasible.
  bool prefer_dual = true;
};

class SimplexSolver {
 public:
  explicit SimplexSolver(const LinearModel& model, SimplexOptions options = {});

  int num_rows() const { return m_; }
  int num_columns() const { return n_; }

  void set_row_rhs(int row, double rhs);
  void set_column_bounds(int column, double lower, double upper);
  double column_lower(int column) const { return lo_[column]; }
  double column_upper(int column) const { return hi_[column]; }

  LpSolution solve();

  // Drops the stored basis; the next solve starts from the slack basis.
  void reset_basis() { has_basis_ = false; }
  bool has_basis() const { return has_basis_; }

  // Human-readable basis listing (basic column per position and nonbasic
  // bound status).
  std::string dump_basis() const;

  std::uint64_t total_iterations() const { return total_iterations_; }
  int basis_repairs() const { return repairs_; }

 private:
  enum class Status : std::uint8_t { Basic, AtLower, AtUpper, Free };
  enum class Outcome { Optimal, Infeasible, Unbounded, Limit, Restart };
  struct BasisRepaired {};

  int total_columns() const { return n_ + m_; }
  bool is_logical(int j) const { return j >= n_; }

  void slack_basis();
  void place_nonbasic(int j);
  // With `repair`, a singular basis gets its dependent structural columns
  // replaced by logicals instead of failing.
  bool refactor(bool repair = false);
  void compute_basic_values();
  void compute_duals(const std::vector<double>& basic_costs, std::vector<double>& pi) const;
  void compute_reduced_costs();
  void ftran(int j, std::vector<double>& out) const;
  double row_dot(const std::vector<double>& rho, int j) const;
  void pivot_update(int position, const std::vector<double>& alpha);
  double primal_infeasibility(int j) const;
  bool make_dual_feasible();

  Outcome run_primal(int& iterations);
  Outcome run_dual(int& iterations);
  void count_update(bool& refactored);

  SimplexOptions opt_;
  int m_ = 0;
  int n_ = 0;

  // Structural columns in compressed sparse column form.
  std::vector<int> col_start_;
  std::vector<int> col_row_;
  std::vector<double> col_val_;

  std::vector<double> cost_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<Sense> sense_;

  bool has_basis_ = false;
  std::vector<int> head_;  // basic column at each position
  std::vector<int> pos_;   // basis position of a column or -1
  std::vector<Status> status_;
  std::vector<double> binv_;  // row-major m x m
  std::vector<double> x_;
  std::vector<double> d_;
  int updates_since_refactor_ = 0;
  int repairs_ = 0;
  std::uint64_t total_iterations_ = 0;

  // scratch
  std::vector<double> alpha_;
  std::vector<double> rho_;
  std::vector<double> work_;
  std::vector<double> pi_;
  std::vector<double> cb_;
};

LpSolution solve_lp(const LinearModel& model, SimplexOptions options = {});

}  // namespace pdvrp
