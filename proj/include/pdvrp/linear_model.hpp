#pragma once

// Generic sparse linear / mixed-integer model: minimize c'x subject to rows
// a'x {<=, >=, =} rhs and column bounds.

#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pdvrp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense { LessEqual, GreaterEqual, Equal };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
  double cost = 0.0;
  bool integer = false;
};

struct Term {
  int column = 0;
  double coef = 0.0;
};

struct Row {
  std::string name;
  std::vector<Term> terms;  // sorted by column, no duplicates
  Sense sense = Sense::GreaterEqual;
  double rhs = 0.0;
};

class LinearModel {
 public:
  int add_variable(Variable v);
  // Terms are merged by column and sorted; zero coefficients are dropped.
  int add_row(std::string name, std::vector<Term> terms, Sense sense, double rhs);

  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }

  const Variable& variable(int j) const { return variables_[j]; }
  Variable& variable(int j) { return variables_[j]; }
  const Row& row(int r) const { return rows_[r]; }
  Row& row(int r) { return rows_[r]; }
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Row>& rows() const { return rows_; }

  bool has_integers() const;
  double objective(std::span<const double> x) const;
  double row_activity(int r, std::span<const double> x) const;

  // Signed violation of row r at x (0 when satisfied).
  double row_violation(int r, std::span<const double> x) const;
  // Largest row or bound violation at x.
  double max_violation(std::span<const double> x) const;
  // Index of every row violated by more than tol.
  std::vector<int> violated_rows(std::span<const double> x, double tol) const;

  // Writes the model in CPLEX LP text format; numbers use fixed-point
  // notation with 12 decimals.
  void write_lp_format(std::ostream& out) const;

  friend bool operator==(const LinearModel&, const LinearModel&);

 private:
  std::vector<Variable> variables_;
  std::vector<Row> rows_;
};

bool operator==(const Variable& a, const Variable& b);
bool operator==(const Term& a, const Term& b);
bool operator==(const Row& a, const Row& b);

// Same model with integrality dropped; integer columns keep their bounds
// intersected with [0, 1] when they were binary.
LinearModel lp_relaxation(const LinearModel& model);

}  // namespace pdvrp
