#include "pdvrp/linear_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace pdvrp {

int LinearModel::add_variable(Variable v) {
  if (v.lower > v.upper) throw std::invalid_argument("variable " + v.name + ": lower > upper");
  variables_.push_back(std::move(v));
  return num_variables() - 1;
}

int LinearModel::add_row(std::string name, std::vector<Term> terms, Sense sense, double rhs) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.column < b.column; });
  std::vector<Term> merged;
  merged.reserve(terms.size());
  for (const Term& t : terms) {
    if (t.column < 0 || t.column >= num_variables())
      throw std::invalid_argument("row " + name + " references undeclared column");
    if (!merged.empty() && merged.back().column == t.column) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  rows_.push_back({std::move(name), std::move(merged), sense, rhs});
  return num_rows() - 1;
}

bool LinearModel::has_integers() const {
  return std::any_of(variables_.begin(), variables_.end(),
                     [](const Variable& v) { return v.integer; });
}

double LinearModel::objective(std::span<const double> x) const {
  double total = 0.0;
  for (int j = 0; j < num_variables(); ++j) total += variables_[j].cost * x[j];
  return total;
}

double LinearModel::row_activity(int r, std::span<const double> x) const {
  double total = 0.0;
  for (const Term& t : rows_[r].terms) total += t.coef * x[t.column];
  return total;
}

double LinearModel::row_violation(int r, std::span<const double> x) const {
  const double lhs = row_activity(r, x);
  const Row& row = rows_[r];
  switch (row.sense) {
    case Sense::LessEqual:
      return std::max(0.0, lhs - row.rhs);
    case Sense::GreaterEqual:
      return std::max(0.0, row.rhs - lhs);
    case Sense::Equal:
      return std::abs(lhs - row.rhs);
  }
  return 0.0;
}

double LinearModel::max_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (int r = 0; r < num_rows(); ++r) worst = std::max(worst, row_violation(r, x));
  for (int j = 0; j < num_variables(); ++j) {
    worst = std::max(worst, variables_[j].lower - x[j]);
    worst = std::max(worst, x[j] - variables_[j].upper);
  }
  return worst;
}

std::vector<int> LinearModel::violated_rows(std::span<const double> x, double tol) const {
  std::vector<int> out;
  for (int r = 0; r < num_rows(); ++r) {
    if (row_violation(r, x) > tol) out.push_back(r);
  }
  return out;
}

namespace {

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", v);
  return buf;
}

std::string lp_name(const std::string& name, char prefix, int index) {
  if (name.empty()) return std::string(1, prefix) + std::to_string(index);
  std::string out = name;
  for (char& c : out) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) c = '_';
  }
  return out;
}

void write_terms(std::ostream& out, const std::vector<std::pair<double, std::string>>& terms) {
  if (terms.empty()) {
    out << " 0";
    return;
  }
  int on_line = 0;
  for (const auto& [coef, name] : terms) {
    out << (coef < 0 ? " - " : " + ") << fixed(std::abs(coef)) << ' ' << name;
    if (++on_line % 6 == 0) out << "\n   ";
  }
}

}  // namespace

void LinearModel::write_lp_format(std::ostream& out) const {
  std::vector<std::string> names(variables_.size());
  for (int j = 0; j < num_variables(); ++j) names[j] = lp_name(variables_[j].name, 'x', j);

  out << "\\ generated by pdvrp\nMinimize\n obj:";
  std::vector<std::pair<double, std::string>> terms;
  for (int j = 0; j < num_variables(); ++j) {
    if (variables_[j].cost != 0.0) terms.emplace_back(variables_[j].cost, names[j]);
  }
  write_terms(out, terms);
  out << "\nSubject To\n";
  for (int r = 0; r < num_rows(); ++r) {
    const Row& row = rows_[r];
    out << ' ' << lp_name(row.name, 'c', r) << ':';
    terms.clear();
    for (const Term& t : row.terms) terms.emplace_back(t.coef, names[t.column]);
    write_terms(out, terms);
    const char* op = row.sense == Sense::LessEqual ? " <= " : row.sense == Sense::GreaterEqual ? " >= " : " = ";
    out << op << fixed(row.rhs) << '\n';
  }
  out << "Bounds\n";
  for (int j = 0; j < num_variables(); ++j) {
    const Variable& v = variables_[j];
    const bool lo_inf = std::isinf(v.lower);
    const bool hi_inf = std::isinf(v.upper);
    if (lo_inf && hi_inf) {
      out << ' ' << names[j] << " free\n";
    } else if (v.lower == v.upper) {
      out << ' ' << names[j] << " = " << fixed(v.lower) << '\n';
    } else {
      out << ' ' << (lo_inf ? std::string("-inf") : fixed(v.lower)) << " <= " << names[j]
          << " <= " << (hi_inf ? std::string("+inf") : fixed(v.upper)) << '\n';
    }
  }
  std::vector<std::string> ints;
  for (int j = 0; j < num_variables(); ++j) {
    if (variables_[j].integer) ints.push_back(names[j]);
  }
  if (!ints.empty()) {
    out << "General\n";
    for (std::size_t k = 0; k < ints.size(); ++k) {
      out << ' ' << ints[k];
      if ((k + 1) % 8 == 0 || k + 1 == ints.size()) out << '\n';
    }
  }
  out << "End\n";
}

bool operator==(const Variable& a, const Variable& b) {
  return a.name == b.name && a.lower == b.lower && a.upper == b.upper && a.cost == b.cost &&
         a.integer == b.integer;
}

bool operator==(const Term& a, const Term& b) { return a.column == b.column && a.coef == b.coef; }

bool operator==(const Row& a, const Row& b) {
  return a.name == b.name && a.terms == b.terms && a.sense == b.sense && a.rhs == b.rhs;
}

bool operator==(const LinearModel& a, const LinearModel& b) {
  return a.variables_ == b.variables_ && a.rows_ == b.rows_;
}

LinearModel lp_relaxation(const LinearModel& model) {
  LinearModel relaxed = model;
  for (int j = 0; j < relaxed.num_variables(); ++j) {
    Variable& v = relaxed.variable(j);
    if (!v.integer) continue;
    v.integer = false;
    if (v.lower >= 0.0 && v.upper <= 1.0) {
      v.lower = std::max(v.lower, 0.0);
      v.upper = std::min(v.upper, 1.0);
    }
  }
  return relaxed;
}

}  // namespace pdvrp
