#include "pdvrp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

namespace pdvrp {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal:
      return "optimal";
    case LpStatus::Infeasible:
      return "infeasible";
    case LpStatus::Unbounded:
      return "unbounded";
    case LpStatus::IterationLimit:
      return "iteration_limit";
  }
  return "unknown";
}

SimplexSolver::SimplexSolver(const LinearModel& model, SimplexOptions options)
    : opt_(options), m_(model.num_rows()), n_(model.num_variables()) {
  const int total = n_ + m_;
  cost_.assign(total, 0.0);
  lo_.assign(total, 0.0);
  hi_.assign(total, 0.0);
  sense_.resize(m_);

  std::vector<int> count(n_ + 1, 0);
  for (const Row& row : model.rows()) {
    for (const Term& t : row.terms) ++count[t.column + 1];
  }
  col_start_.assign(n_ + 1, 0);
  for (int j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + count[j + 1];
  col_row_.resize(col_start_[n_]);
  col_val_.resize(col_start_[n_]);
  std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
  for (int r = 0; r < m_; ++r) {
    for (const Term& t : model.row(r).terms) {
      col_row_[fill[t.column]] = r;
      col_val_[fill[t.column]] = t.coef;
      ++fill[t.column];
    }
  }

  for (int j = 0; j < n_; ++j) {
    const Variable& v = model.variable(j);
    cost_[j] = v.cost;
    lo_[j] = v.lower;
    hi_[j] = v.upper;
  }
  for (int r = 0; r < m_; ++r) {
    sense_[r] = model.row(r).sense;
    set_row_rhs(r, model.row(r).rhs);
  }

  head_.assign(m_, 0);
  pos_.assign(total, -1);
  status_.assign(total, Status::AtLower);
  x_.assign(total, 0.0);
  d_.assign(total, 0.0);
  alpha_.assign(m_, 0.0);
  rho_.assign(m_, 0.0);
  work_.assign(std::max(m_, total), 0.0);
  pi_.assign(m_, 0.0);
  cb_.assign(m_, 0.0);
}

void SimplexSolver::set_row_rhs(int row, double rhs) {
  const int j = n_ + row;
  switch (sense_[row]) {
    case Sense::GreaterEqual:
      lo_[j] = rhs;
      hi_[j] = kInfinity;
      break;
    case Sense::LessEqual:
      lo_[j] = -kInfinity;
      hi_[j] = rhs;
      break;
    case Sense::Equal:
      lo_[j] = rhs;
      hi_[j] = rhs;
      break;
  }
}

void SimplexSolver::set_column_bounds(int column, double lower, double upper) {
  if (lower > upper) throw std::invalid_argument("set_column_bounds: lower > upper");
  lo_[column] = lower;
  hi_[column] = upper;
}

void SimplexSolver::slack_basis() {
  const int total = total_columns();
  std::fill(pos_.begin(), pos_.end(), -1);
  for (int j = 0; j < total; ++j) status_[j] = Status::AtLower;
  for (int p = 0; p < m_; ++p) {
    head_[p] = n_ + p;
    pos_[n_ + p] = p;
    status_[n_ + p] = Status::Basic;
  }
  binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
  for (int p = 0; p < m_; ++p) binv_[static_cast<std::size_t>(p) * m_ + p] = -1.0;
  updates_since_refactor_ = 0;
  has_basis_ = true;
}

void SimplexSolver::place_nonbasic(int j) {
  const bool lo_fin = std::isfinite(lo_[j]);
  const bool hi_fin = std::isfinite(hi_[j]);
  Status& s = status_[j];
  if (s == Status::AtLower && !lo_fin) s = hi_fin ? Status::AtUpper : Status::Free;
  if (s == Status::AtUpper && !hi_fin) s = lo_fin ? Status::AtLower : Status::Free;
  if (s == Status::Free && (lo_fin || hi_fin)) s = lo_fin ? Status::AtLower : Status::AtUpper;
  x_[j] = s == Status::AtLower ? lo_[j] : s == Status::AtUpper ? hi_[j] : 0.0;
}

bool SimplexSolver::refactor(bool repair) {
  // Basis columns are either logical (-e_r) or structural. With L the rows
  // covered by basic logicals and U the remaining rows, the structural block
  // restricted to U is square; only that block needs a dense factorization.
  std::vector<int> logical_pos(m_, -1);
  std::vector<int> structural;
  for (int p = 0; p < m_; ++p) {
    if (is_logical(head_[p])) {
      logical_pos[head_[p] - n_] = p;
    } else {
      structural.push_back(p);
    }
  }
  std::vector<int> u_rows;
  std::vector<int> u_index(m_, -1);
  for (int r = 0; r < m_; ++r) {
    if (logical_pos[r] < 0) {
      u_index[r] = static_cast<int>(u_rows.size());
      u_rows.push_back(r);
    }
  }
  const int k = static_cast<int>(structural.size());
  if (static_cast<int>(u_rows.size()) != k) return false;

  std::fill(binv_.begin(), binv_.end(), 0.0);
  for (int r = 0; r < m_; ++r) {
    if (logical_pos[r] >= 0) binv_[static_cast<std::size_t>(logical_pos[r]) * m_ + r] = -1.0;
  }
  if (k > 0) {
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(k, k);
    for (int s = 0; s < k; ++s) {
      const int j = head_[structural[s]];
      for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
        const int u = u_index[col_row_[e]];
        if (u >= 0) block(u, s) = col_val_[e];
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(block);
    const auto diag = lu.matrixLU().diagonal().cwiseAbs();
    if (!(diag.minCoeff() > 1e-11 * std::max(1.0, diag.maxCoeff()))) {
      if (!repair) return false;
      // Swap dependent structural columns for logicals of uncovered rows.
      Eigen::FullPivLU<Eigen::MatrixXd> full(block);
      full.setThreshold(1e-9);
      const int rank = static_cast<int>(full.rank());
      std::vector<int> free_rows;
      for (int u = 0; u < k; ++u) {
        if (full.permutationP().indices()[u] >= rank) free_rows.push_back(u_rows[u]);
      }
      for (int i = rank; i < k; ++i) {
        const int p = structural[full.permutationQ().indices()[i]];
        const int old = head_[p];
        const int r = free_rows[i - rank];
        pos_[old] = -1;
        status_[old] = Status::AtLower;
        place_nonbasic(old);
        head_[p] = n_ + r;
        pos_[n_ + r] = p;
        status_[n_ + r] = Status::Basic;
      }
      ++repairs_;
      return refactor(false);
    }
    const Eigen::MatrixXd inv = lu.inverse();
    for (int s = 0; s < k; ++s) {
      double* out = &binv_[static_cast<std::size_t>(structural[s]) * m_];
      for (int u = 0; u < k; ++u) out[u_rows[u]] = inv(s, u);
    }
    for (int s = 0; s < k; ++s) {
      const int j = head_[structural[s]];
      for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
        const int p = logical_pos[col_row_[e]];
        if (p < 0) continue;
        double* out = &binv_[static_cast<std::size_t>(p) * m_];
        const double v = col_val_[e];
        for (int u = 0; u < k; ++u) out[u_rows[u]] += v * inv(s, u);
      }
    }
  }
  updates_since_refactor_ = 0;
  return true;
}

void SimplexSolver::compute_basic_values() {
  std::fill(work_.begin(), work_.begin() + m_, 0.0);
  for (int j = 0; j < total_columns(); ++j) {
    if (status_[j] == Status::Basic || x_[j] == 0.0) continue;
    if (is_logical(j)) {
      work_[j - n_] -= x_[j];
    } else {
      for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) work_[col_row_[e]] += col_val_[e] * x_[j];
    }
  }
  for (int p = 0; p < m_; ++p) {
    const double* row = &binv_[static_cast<std::size_t>(p) * m_];
    double sum = 0.0;
    for (int r = 0; r < m_; ++r) sum += row[r] * work_[r];
    x_[head_[p]] = -sum;
  }
}

void SimplexSolver::compute_duals(const std::vector<double>& basic_costs,
                                  std::vector<double>& pi) const {
  std::fill(pi.begin(), pi.end(), 0.0);
  for (int p = 0; p < m_; ++p) {
    const double c = basic_costs[p];
    if (c == 0.0) continue;
    const double* row = &binv_[static_cast<std::size_t>(p) * m_];
    for (int r = 0; r < m_; ++r) pi[r] += c * row[r];
  }
}

void SimplexSolver::compute_reduced_costs() {
  for (int p = 0; p < m_; ++p) cb_[p] = cost_[head_[p]];
  compute_duals(cb_, pi_);
  for (int j = 0; j < total_columns(); ++j) {
    if (status_[j] == Status::Basic) {
      d_[j] = 0.0;
    } else if (is_logical(j)) {
      d_[j] = pi_[j - n_];
    } else {
      double s = cost_[j];
      for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) s -= pi_[col_row_[e]] * col_val_[e];
      d_[j] = s;
    }
  }
}

void SimplexSolver::ftran(int j, std::vector<double>& out) const {
  if (is_logical(j)) {
    const int r = j - n_;
    for (int p = 0; p < m_; ++p) out[p] = -binv_[static_cast<std::size_t>(p) * m_ + r];
    return;
  }
  const int b = col_start_[j];
  const int e = col_start_[j + 1];
  for (int p = 0; p < m_; ++p) {
    const double* row = &binv_[static_cast<std::size_t>(p) * m_];
    double s = 0.0;
    for (int k = b; k < e; ++k) s += row[col_row_[k]] * col_val_[k];
    out[p] = s;
  }
}

double SimplexSolver::row_dot(const std::vector<double>& rho, int j) const {
  if (is_logical(j)) return -rho[j - n_];
  double s = 0.0;
  for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) s += rho[col_row_[e]] * col_val_[e];
  return s;
}

void SimplexSolver::pivot_update(int position, const std::vector<double>& alpha) {
  double* prow = &binv_[static_cast<std::size_t>(position) * m_];
  const double inv = 1.0 / alpha[position];
  for (int r = 0; r < m_; ++r) prow[r] *= inv;
  for (int p = 0; p < m_; ++p) {
    if (p == position || alpha[p] == 0.0) continue;
    const double f = alpha[p];
    double* row = &binv_[static_cast<std::size_t>(p) * m_];
    for (int r = 0; r < m_; ++r) row[r] -= f * prow[r];
  }
  ++updates_since_refactor_;
}

double SimplexSolver::primal_infeasibility(int j) const {
  return std::max({lo_[j] - x_[j], x_[j] - hi_[j], 0.0});
}

bool SimplexSolver::make_dual_feasible() {
  const double tol = opt_.optimality_tol;
  bool moved = false;
  for (int j = 0; j < total_columns(); ++j) {
    const Status s = status_[j];
    if (s == Status::Basic || lo_[j] == hi_[j]) continue;
    const double dj = d_[j];
    if ((s == Status::AtLower || s == Status::Free) && dj < -tol) {
      if (!std::isfinite(hi_[j])) return false;
      status_[j] = Status::AtUpper;
      x_[j] = hi_[j];
      moved = true;
    } else if ((s == Status::AtUpper || s == Status::Free) && dj > tol) {
      if (!std::isfinite(lo_[j])) return false;
      status_[j] = Status::AtLower;
      x_[j] = lo_[j];
      moved = true;
    }
  }
  if (moved) compute_basic_values();
  return true;
}

void SimplexSolver::count_update(bool& refactored) {
  refactored = false;
  if (updates_since_refactor_ < opt_.refactor_interval) return;
  const int before = repairs_;
  if (!refactor(true)) throw std::runtime_error("simplex: basis repair failed");
  compute_basic_values();
  refactored = true;
  if (repairs_ != before) throw BasisRepaired{};
}

SimplexSolver::Outcome SimplexSolver::run_primal(int& iterations) {
  const double ftol = opt_.feasibility_tol;
  const double otol = opt_.optimality_tol;
  const int total = total_columns();
  bool bland = false;
  int degenerate = 0;

  for (;;) {
    if (iterations >= opt_.iteration_limit) return Outcome::Limit;

    bool phase1 = false;
    for (int p = 0; p < m_; ++p) {
      const int j = head_[p];
      if (x_[j] < lo_[j] - ftol) {
        cb_[p] = -1.0;
        phase1 = true;
      } else if (x_[j] > hi_[j] + ftol) {
        cb_[p] = 1.0;
        phase1 = true;
      } else {
        cb_[p] = 0.0;
      }
    }
    if (!phase1) {
      for (int p = 0; p < m_; ++p) cb_[p] = cost_[head_[p]];
    }
    compute_duals(cb_, pi_);

    int q = -1;
    int dir = 0;
    double best = 0.0;
    for (int j = 0; j < total; ++j) {
      const Status s = status_[j];
      if (s == Status::Basic || lo_[j] == hi_[j]) continue;
      double dj = phase1 ? 0.0 : cost_[j];
      if (is_logical(j)) {
        dj += pi_[j - n_];
      } else {
        for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) dj -= pi_[col_row_[e]] * col_val_[e];
      }
      int jdir = 0;
      if ((s == Status::AtLower || s == Status::Free) && dj < -otol) jdir = 1;
      if ((s == Status::AtUpper || s == Status::Free) && dj > otol) jdir = -1;
      if (jdir == 0) continue;
      if (bland) {
        q = j;
        dir = jdir;
        break;
      }
      if (std::abs(dj) > best) {
        best = std::abs(dj);
        q = j;
        dir = jdir;
      }
    }
    if (q < 0) return phase1 ? Outcome::Infeasible : Outcome::Optimal;

    ftran(q, alpha_);

    // Ratio test. Candidate limits come from basic variables reaching a
    // bound; in phase 1 an infeasible variable stops at the bound where it
    // becomes feasible.
    const double flip = (std::isfinite(lo_[q]) && std::isfinite(hi_[q])) ? hi_[q] - lo_[q] : kInfinity;
    double harris = kInfinity;
    for (int p = 0; p < m_; ++p) {
      const double a = alpha_[p];
      if (std::abs(a) <= opt_.pivot_tol) continue;
      const double rate = -dir * a;
      const int j = head_[p];
      const double v = x_[j];
      double h = kInfinity;
      if (phase1 && v < lo_[j] - ftol) {
        if (rate > 0) h = (lo_[j] - v) / rate;
      } else if (phase1 && v > hi_[j] + ftol) {
        if (rate < 0) h = (v - hi_[j]) / -rate;
      } else if (rate < 0 && std::isfinite(lo_[j])) {
        h = (v - lo_[j] + ftol) / -rate;
      } else if (rate > 0 && std::isfinite(hi_[j])) {
        h = (hi_[j] - v + ftol) / rate;
      }
      harris = std::min(harris, h);
    }

    int leave = -1;
    double leave_ratio = kInfinity;
    double leave_bound = 0.0;
    double best_pivot = 0.0;
    for (int p = 0; p < m_; ++p) {
      const double a = alpha_[p];
      if (std::abs(a) <= opt_.pivot_tol) continue;
      const double rate = -dir * a;
      const int j = head_[p];
      const double v = x_[j];
      double ratio = kInfinity;
      double bound = 0.0;
      if (phase1 && v < lo_[j] - ftol) {
        if (rate > 0) {
          ratio = (lo_[j] - v) / rate;
          bound = lo_[j];
        }
      } else if (phase1 && v > hi_[j] + ftol) {
        if (rate < 0) {
          ratio = (v - hi_[j]) / -rate;
          bound = hi_[j];
        }
      } else if (rate < 0 && std::isfinite(lo_[j])) {
        ratio = (v - lo_[j]) / -rate;
        bound = lo_[j];
      } else if (rate > 0 && std::isfinite(hi_[j])) {
        ratio = (hi_[j] - v) / rate;
        bound = hi_[j];
      }
      if (!std::isfinite(ratio)) continue;
      bool take;
      if (bland) {
        take = leave < 0 || ratio < leave_ratio ||
               (ratio == leave_ratio && j < head_[leave]);
      } else {
        if (ratio > harris) continue;
        take = leave < 0 || std::abs(a) > best_pivot ||
               (std::abs(a) == best_pivot && j < head_[leave]);
      }
      if (take) {
        leave = p;
        leave_ratio = ratio;
        leave_bound = bound;
        best_pivot = std::abs(a);
      }
    }

    const bool bound_flip = flip <= leave_ratio && std::isfinite(flip);
    if (leave < 0 && !bound_flip) {
      if (phase1) throw std::runtime_error("simplex: unbounded phase-1 ray");
      return Outcome::Unbounded;
    }
    const double theta = bound_flip ? flip : std::max(0.0, leave_ratio);

    if (theta != 0.0) {
      for (int p = 0; p < m_; ++p) x_[head_[p]] -= dir * theta * alpha_[p];
    }
    if (bound_flip) {
      status_[q] = dir > 0 ? Status::AtUpper : Status::AtLower;
      x_[q] = dir > 0 ? hi_[q] : lo_[q];
    } else {
      x_[q] += dir * theta;
      const int out = head_[leave];
      x_[out] = leave_bound;
      status_[out] = (leave_bound == lo_[out]) ? Status::AtLower : Status::AtUpper;
      pos_[out] = -1;
      head_[leave] = q;
      pos_[q] = leave;
      status_[q] = Status::Basic;
      pivot_update(leave, alpha_);
    }
    ++iterations;

    if (theta <= 1e-12) {
      if (++degenerate > opt_.degenerate_limit) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }
    bool refactored = false;
    count_update(refactored);
  }
}

SimplexSolver::Outcome SimplexSolver::run_dual(int& iterations) {
  const double ftol = opt_.feasibility_tol;
  const double otol = opt_.optimality_tol;
  const int total = total_columns();
  std::vector<double>& arow = work_;
  int degenerate = 0;

  for (;;) {
    if (iterations >= opt_.iteration_limit) return Outcome::Limit;

    // Leaving row: largest bound violation (Bland-style lowest column after
    // a long run of degenerate dual steps).
    int leave = -1;
    double worst = ftol;
    const bool cautious = degenerate > opt_.degenerate_limit;
    for (int p = 0; p < m_; ++p) {
      const double inf = primal_infeasibility(head_[p]);
      if (inf <= ftol) continue;
      if (cautious) {
        if (leave < 0 || head_[p] < head_[leave]) leave = p;
      } else if (inf > worst || (inf == worst && leave >= 0 && head_[p] < head_[leave])) {
        worst = inf;
        leave = p;
      }
    }
    if (leave < 0) return Outcome::Optimal;

    const int out = head_[leave];
    const bool below = x_[out] < lo_[out];
    const double target = below ? lo_[out] : hi_[out];
    std::copy_n(&binv_[static_cast<std::size_t>(leave) * m_], m_, rho_.begin());

    double harris = kInfinity;
    for (int j = 0; j < total; ++j) {
      arow[j] = 0.0;
      const Status s = status_[j];
      if (s == Status::Basic) continue;
      const double a = row_dot(rho_, j);
      arow[j] = a;
      if (lo_[j] == hi_[j] || std::abs(a) <= opt_.pivot_tol) continue;
      const double dj = d_[j];
      double h = kInfinity;
      if (s == Status::Free) {
        h = (std::abs(dj) + otol) / std::abs(a);
      } else if (s == Status::AtLower) {
        if (below ? a < 0 : a > 0) h = (std::max(dj, 0.0) + otol) / std::abs(a);
      } else if (below ? a > 0 : a < 0) {
        h = (std::max(-dj, 0.0) + otol) / std::abs(a);
      }
      harris = std::min(harris, h);
    }
    int q = -1;
    double best_pivot = 0.0;
    double best_ratio = kInfinity;
    for (int j = 0; j < total; ++j) {
      const Status s = status_[j];
      if (s == Status::Basic || lo_[j] == hi_[j]) continue;
      const double a = arow[j];
      if (std::abs(a) <= opt_.pivot_tol) continue;
      const double dj = d_[j];
      double ratio = kInfinity;
      if (s == Status::Free) {
        ratio = std::abs(dj) / std::abs(a);
      } else if (s == Status::AtLower) {
        if (below ? a < 0 : a > 0) ratio = std::max(dj, 0.0) / std::abs(a);
      } else if (below ? a > 0 : a < 0) {
        ratio = std::max(-dj, 0.0) / std::abs(a);
      }
      if (!std::isfinite(ratio)) continue;
      if (cautious) {
        // smallest ratio, lowest column on ties
        if (q < 0 || ratio < best_ratio) {
          q = j;
          best_ratio = ratio;
        }
        continue;
      }
      if (ratio > harris) continue;
      if (q < 0 || std::abs(a) > best_pivot) {
        q = j;
        best_pivot = std::abs(a);
      }
    }
    if (q < 0) return Outcome::Infeasible;

    ftran(q, alpha_);
    const double apq = arow[q];
    if (std::abs(alpha_[leave] - apq) > 1e-7 * (1.0 + std::abs(apq)) && updates_since_refactor_ > 0) {
      const int before = repairs_;
      if (!refactor(true)) throw std::runtime_error("simplex: basis repair failed");
      compute_basic_values();
      compute_reduced_costs();
      if (repairs_ != before) return Outcome::Restart;
      continue;
    }

    const double theta_d = d_[q] / apq;
    const double theta_p = (x_[out] - target) / alpha_[leave];
    if (theta_p != 0.0) {
      for (int p = 0; p < m_; ++p) x_[head_[p]] -= theta_p * alpha_[p];
    }
    x_[q] += theta_p;
    x_[out] = target;

    if (theta_d != 0.0) {
      for (int j = 0; j < total; ++j) {
        if (status_[j] != Status::Basic && arow[j] != 0.0) d_[j] -= theta_d * arow[j];
      }
    }
    d_[q] = 0.0;
    d_[out] = -theta_d;
    status_[out] = (target == lo_[out]) ? Status::AtLower : Status::AtUpper;
    pos_[out] = -1;
    head_[leave] = q;
    pos_[q] = leave;
    status_[q] = Status::Basic;
    pivot_update(leave, alpha_);
    ++iterations;

    if (std::abs(theta_d) <= 1e-12) {
      ++degenerate;
    } else {
      degenerate = 0;
    }
    bool refactored = false;
    count_update(refactored);
    if (refactored) {
      compute_reduced_costs();
      for (int j = 0; j < total; ++j) {
        const Status s = status_[j];
        if (s == Status::Basic || lo_[j] == hi_[j]) continue;
        if (((s == Status::AtLower || s == Status::Free) && d_[j] < -otol) ||
            ((s == Status::AtUpper || s == Status::Free) && d_[j] > otol)) {
          return Outcome::Restart;
        }
      }
    }
  }
}

LpSolution SimplexSolver::solve() {
  const bool fresh = !has_basis_;
  if (fresh) slack_basis();
  for (int j = 0; j < total_columns(); ++j) {
    if (status_[j] != Status::Basic) place_nonbasic(j);
  }
  if (fresh) refactor(true);
  compute_basic_values();
  compute_reduced_costs();

  int iterations = 0;
  Outcome outcome = Outcome::Restart;
  const double ftol = opt_.feasibility_tol;
  const double otol = opt_.optimality_tol;
  for (int attempt = 0; attempt < 6; ++attempt) {
    const bool dual = opt_.prefer_dual && attempt < 4 && make_dual_feasible();
    try {
      outcome = dual ? run_dual(iterations) : run_primal(iterations);
    } catch (const BasisRepaired&) {
      outcome = Outcome::Restart;
    }
    if (outcome == Outcome::Restart) {
      compute_basic_values();
      compute_reduced_costs();
      continue;
    }
    if (outcome != Outcome::Optimal) break;

    // Clean recomputation before declaring optimality; a failed check
    // retries from a fresh factorization.
    compute_basic_values();
    compute_reduced_costs();
    bool primal_ok = true;
    for (int p = 0; p < m_; ++p) primal_ok = primal_ok && primal_infeasibility(head_[p]) <= 10 * ftol;
    bool dual_ok = true;
    for (int j = 0; j < total_columns(); ++j) {
      const Status s = status_[j];
      if (s == Status::Basic || lo_[j] == hi_[j]) continue;
      if (((s == Status::AtLower || s == Status::Free) && d_[j] < -10 * otol) ||
          ((s == Status::AtUpper || s == Status::Free) && d_[j] > 10 * otol))
        dual_ok = false;
    }
    if (primal_ok && dual_ok) break;
    if (!refactor(true)) throw std::runtime_error("simplex: basis repair failed");
    compute_basic_values();
    compute_reduced_costs();
    outcome = Outcome::Restart;
  }
  total_iterations_ += static_cast<std::uint64_t>(iterations);

  LpSolution sol;
  sol.iterations = iterations;
  sol.iteration_limit = opt_.iteration_limit;
  switch (outcome) {
    case Outcome::Optimal:
      sol.status = LpStatus::Optimal;
      break;
    case Outcome::Infeasible:
      sol.status = LpStatus::Infeasible;
      break;
    case Outcome::Unbounded:
      sol.status = LpStatus::Unbounded;
      break;
    case Outcome::Limit:
    case Outcome::Restart:
      sol.status = LpStatus::IterationLimit;
      break;
  }
  sol.primal.assign(x_.begin(), x_.begin() + n_);
  if (sol.status == LpStatus::Optimal) {
    sol.duals.resize(m_);
    for (int r = 0; r < m_; ++r) {
      sol.duals[r] = status_[n_ + r] == Status::Basic ? 0.0 : d_[n_ + r];
    }
    sol.reduced_costs.resize(n_);
    for (int j = 0; j < n_; ++j) sol.reduced_costs[j] = status_[j] == Status::Basic ? 0.0 : d_[j];
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += cost_[j] * x_[j];
    sol.objective = obj;
  }
  return sol;
}

std::string SimplexSolver::dump_basis() const {
  std::ostringstream out;
  out << "basis rows=" << m_ << " columns=" << n_ << '\n';
  for (int p = 0; p < m_; ++p) {
    const int j = head_[p];
    out << "  pos " << p << ": " << (is_logical(j) ? "row " : "col ") << (is_logical(j) ? j - n_ : j)
        << " = " << x_[j] << '\n';
  }
  for (int j = 0; j < total_columns(); ++j) {
    if (status_[j] == Status::Basic) continue;
    const char* tag = status_[j] == Status::AtLower ? "lower" : status_[j] == Status::AtUpper ? "upper" : "free";
    out << "  " << (is_logical(j) ? "row " : "col ") << (is_logical(j) ? j - n_ : j) << " at " << tag
        << '\n';
  }
  return out.str();
}

LpSolution solve_lp(const LinearModel& model, SimplexOptions options) {
  if (model.has_integers()) throw std::invalid_argument("solve_lp: model has integer columns");
  SimplexSolver solver(model, options);
  return solver.solve();
}

}  // namespace pdvrp
