#include "adi/lp.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>

namespace adi {

int LinearProgram::add_variable(std::string name, double lower, double upper, VarType type) {
  variables.push_back({std::move(name), lower, upper, type});
  return static_cast<int>(variables.size()) - 1;
}

void LinearProgram::add_constraint(std::string name, Terms terms, Relation relation, double rhs) {
  constraints.push_back({std::move(name), std::move(terms), relation, rhs});
}

void LinearProgram::check() const {
  const int n = static_cast<int>(variables.size());
  auto check_terms = [&](const Terms& t) {
    for (auto [j, a] : t) {
      if (j < 0 || j >= n) throw std::invalid_argument("term references unknown variable");
      if (!std::isfinite(a)) throw std::invalid_argument("non-finite coefficient");
    }
  };
  for (const auto& v : variables) {
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper)
      throw std::invalid_argument("bad bounds on " + v.name);
    if (v.type == VarType::Binary && (v.lower < 0.0 || v.upper > 1.0))
      throw std::invalid_argument("binary " + v.name + " must lie in [0,1]");
  }
  check_terms(objective);
  for (const auto& c : constraints) {
    check_terms(c.terms);
    if (!std::isfinite(c.rhs)) throw std::invalid_argument("non-finite rhs in " + c.name);
  }
}

double LinearProgram::evaluate(const std::vector<double>& x) const {
  double s = 0.0;
  for (auto [j, a] : objective) s += a * x[j];
  return s;
}

const char* status_name(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
    case LpStatus::NodeLimit: return "node_limit";
  }
  return "?";
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kFeasTol = 1e-9;
constexpr int kDegenerateStreak = 50;

enum class At { Lower, Upper, Free, Basic };

class Simplex {
 public:
  Simplex(const LinearProgram& lp, const std::vector<double>& lower, const std::vector<double>& upper)
      : m_(static_cast<int>(lp.constraints.size())), n_(static_cast<int>(lp.variables.size())) {
    a_.assign(static_cast<std::size_t>(m_) * n_, 0.0);
    rhs_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      for (auto [j, v] : lp.constraints[i].terms) a_[idx(i, j)] += v;
      rhs_[i] = lp.constraints[i].rhs;
    }
    // structural, then one slack per row, then artificials
    lo_ = lower;
    up_ = upper;
    for (int i = 0; i < m_; ++i) {
      switch (lp.constraints[i].relation) {
        case Relation::LessEqual: lo_.push_back(0.0); up_.push_back(kInf); break;
        case Relation::GreaterEqual: lo_.push_back(-kInf); up_.push_back(0.0); break;
        case Relation::Equal: lo_.push_back(0.0); up_.push_back(0.0); break;
      }
    }
    x_.assign(n_ + m_, 0.0);
    at_.assign(n_ + m_, At::Lower);
    for (int j = 0; j < n_ + m_; ++j) place_at_bound(j);

    std::vector<int> art_row;
    std::vector<double> resid(m_);
    for (int i = 0; i < m_; ++i) {
      double r = rhs_[i];
      for (int j = 0; j < n_; ++j) r -= a_[idx(i, j)] * x_[j];
      resid[i] = r;
      const int s = n_ + i;
      if (r < lo_[s] - kFeasTol || r > up_[s] + kFeasTol) art_row.push_back(i);
    }
    N_ = n_ + m_ + static_cast<int>(art_row.size());
    sigma_.assign(m_, 1.0);
    art_of_row_.assign(m_, -1);
    t_.assign(static_cast<std::size_t>(m_) * N_, 0.0);
    beta_.assign(m_, 0.0);
    basis_.assign(m_, -1);
    for (std::size_t k = 0; k < art_row.size(); ++k) {
      const int i = art_row[k];
      const int col = n_ + m_ + static_cast<int>(k);
      art_of_row_[i] = col;
      sigma_[i] = resid[i] > 0 ? 1.0 : -1.0;
      lo_.push_back(0.0);
      up_.push_back(kInf);
      x_.push_back(0.0);
      at_.push_back(At::Lower);
    }
    for (int i = 0; i < m_; ++i) {
      const bool art = art_of_row_[i] >= 0;
      const double scale = art ? sigma_[i] : 1.0;  // B^-1 is diagonal here
      for (int j = 0; j < n_; ++j) t_[tidx(i, j)] = a_[idx(i, j)] / scale;
      t_[tidx(i, n_ + i)] = 1.0 / scale;
      if (art) {
        t_[tidx(i, art_of_row_[i])] = 1.0;
        basis_[i] = art_of_row_[i];
        beta_[i] = std::abs(resid[i]);
      } else {
        basis_[i] = n_ + i;
        beta_[i] = resid[i];
      }
      at_[basis_[i]] = At::Basic;
    }
  }

  LpStatus run(const LinearProgram& lp, std::size_t& iterations) {
    limit_ = 1000 + 100 * static_cast<std::size_t>(m_ + N_);
    if (N_ > n_ + m_) {
      cost_.assign(N_, 0.0);
      for (int j = n_ + m_; j < N_; ++j) cost_[j] = 1.0;
      LpStatus s = iterate(iterations);
      if (s != LpStatus::Optimal) return s == LpStatus::Unbounded ? LpStatus::Infeasible : s;
      refresh();
      double infeas = 0.0;
      for (int j = n_ + m_; j < N_; ++j) infeas += value(j);
      double scale = 1.0;
      for (double r : rhs_) scale = std::max(scale, std::abs(r));
      if (infeas > 1e-7 * scale) return LpStatus::Infeasible;
      drive_out_artificials();
    }
    cost_.assign(N_, 0.0);
    const double sign = lp.sense == Sense::Maximize ? -1.0 : 1.0;
    for (auto [j, c] : lp.objective) cost_[j] += sign * c;
    LpStatus s = iterate(iterations);
    refresh();
    return s;
  }

  std::vector<double> solution() const {
    std::vector<double> x(n_);
    for (int j = 0; j < n_; ++j) {
      double v = value(j);
      if (v < lo_[j] && v > lo_[j] - 1e-7) v = lo_[j];
      if (v > up_[j] && v < up_[j] + 1e-7) v = up_[j];
      x[j] = v;
    }
    return x;
  }

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }
  std::size_t tidx(int i, int j) const { return static_cast<std::size_t>(i) * N_ + j; }

  void place_at_bound(int j) {
    if (std::isfinite(lo_[j])) {
      x_[j] = lo_[j];
      at_[j] = At::Lower;
    } else if (std::isfinite(up_[j])) {
      x_[j] = up_[j];
      at_[j] = At::Upper;
    } else {
      x_[j] = 0.0;
      at_[j] = At::Free;
    }
  }

  double value(int j) const {
    if (at_[j] == At::Basic)
      for (int i = 0; i < m_; ++i)
        if (basis_[i] == j) return beta_[i];
    return x_[j];
  }

  void reduced_costs() {
    d_ = cost_;
    for (int i = 0; i < m_; ++i) {
      const double cb = cost_[basis_[i]];
      if (cb == 0.0) continue;
      for (int j = 0; j < N_; ++j) d_[j] -= cb * t_[tidx(i, j)];
    }
  }

  // beta = B^-1 (rhs - N x_N); the slack columns of the tableau hold B^-1.
  void refresh() {
    std::vector<double> r = rhs_;
    for (int j = 0; j < N_; ++j) {
      if (at_[j] == At::Basic || x_[j] == 0.0) continue;
      if (j < n_) {
        for (int i = 0; i < m_; ++i) r[i] -= a_[idx(i, j)] * x_[j];
      } else if (j < n_ + m_) {
        r[j - n_] -= x_[j];
      } else {
        const int row = std::find(art_of_row_.begin(), art_of_row_.end(), j) - art_of_row_.begin();
        r[row] -= sigma_[row] * x_[j];
      }
    }
    for (int i = 0; i < m_; ++i) {
      double s = 0.0;
      for (int k = 0; k < m_; ++k) s += t_[tidx(i, n_ + k)] * r[k];
      beta_[i] = s;
    }
  }

  bool eligible(int j, double& dir) const {
    if (at_[j] == At::Basic || lo_[j] == up_[j]) return false;
    const double d = d_[j];
    switch (at_[j]) {
      case At::Lower: dir = 1.0; return d < -kCostTol;
      case At::Upper: dir = -1.0; return d > kCostTol;
      case At::Free: dir = d < 0 ? 1.0 : -1.0; return std::abs(d) > kCostTol;
      case At::Basic: return false;
    }
    return false;
  }

  void pivot(int r, int j) {
    const double p = t_[tidx(r, j)];
    for (int k = 0; k < N_; ++k) t_[tidx(r, k)] /= p;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = t_[tidx(i, j)];
      if (f == 0.0) continue;
      for (int k = 0; k < N_; ++k) t_[tidx(i, k)] -= f * t_[tidx(r, k)];
      t_[tidx(i, j)] = 0.0;
    }
    const double f = d_[j];
    if (f != 0.0)
      for (int k = 0; k < N_; ++k) d_[k] -= f * t_[tidx(r, k)];
    d_[j] = 0.0;
  }

  LpStatus iterate(std::size_t& iterations) {
    reduced_costs();
    int degenerate = 0;
    bool bland = false;
    std::size_t local = 0;
    while (true) {
      int enter = -1;
      double dir = 0.0, best = 0.0;
      for (int j = 0; j < N_; ++j) {
        double dj;
        if (!eligible(j, dj)) continue;
        if (bland) {
          enter = j;
          dir = dj;
          break;
        }
        if (std::abs(d_[j]) > best) {
          best = std::abs(d_[j]);
          enter = j;
          dir = dj;
        }
      }
      if (enter < 0) {
        // confirm with freshly computed reduced costs before stopping
        reduced_costs();
        bool any = false;
        for (int j = 0; j < N_ && !any; ++j) {
          double dj;
          any = eligible(j, dj);
        }
        if (!any) return LpStatus::Optimal;
        continue;
      }
      if (++local > limit_) return LpStatus::IterationLimit;
      ++iterations;

      double theta = up_[enter] - lo_[enter];  // bound flip
      if (!std::isfinite(theta)) theta = kInf;
      int leave = -1;
      double leave_rate = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double alpha = t_[tidx(i, enter)];
        if (std::abs(alpha) < kPivotTol) continue;
        const double rate = -dir * alpha;
        const int b = basis_[i];
        double lim;
        if (rate < 0) {
          if (!std::isfinite(lo_[b])) continue;
          lim = (beta_[i] - lo_[b]) / -rate;
        } else {
          if (!std::isfinite(up_[b])) continue;
          lim = (up_[b] - beta_[i]) / rate;
        }
        lim = std::max(lim, 0.0);
        bool take = false;
        if (leave < 0) {
          take = lim <= theta;
        } else if (lim < theta - 1e-12) {
          take = true;
        } else if (lim <= theta + 1e-12) {
          take = bland ? b < basis_[leave] : std::abs(alpha) > std::abs(t_[tidx(leave, enter)]);
        }
        if (take) {
          theta = lim;
          leave = i;
          leave_rate = rate;
        }
      }
      if (!std::isfinite(theta)) return LpStatus::Unbounded;

      for (int i = 0; i < m_; ++i) beta_[i] += -dir * t_[tidx(i, enter)] * theta;
      if (leave < 0) {
        at_[enter] = at_[enter] == At::Lower ? At::Upper : At::Lower;
        x_[enter] = at_[enter] == At::Lower ? lo_[enter] : up_[enter];
      } else {
        const int out = basis_[leave];
        const double entering_value = x_[enter] + dir * theta;
        if (leave_rate < 0) {
          at_[out] = At::Lower;
          x_[out] = lo_[out];
        } else {
          at_[out] = At::Upper;
          x_[out] = up_[out];
        }
        basis_[leave] = enter;
        at_[enter] = At::Basic;
        beta_[leave] = entering_value;
        pivot(leave, enter);
      }
      if (theta <= 1e-12) {
        if (++degenerate > kDegenerateStreak) bland = true;
      } else {
        degenerate = 0;
        bland = false;
      }
      if (iterations % 200 == 0) refresh();
    }
  }

  void drive_out_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_ + m_) continue;
      int best = -1;
      double mag = 1e-7;
      for (int j = 0; j < n_ + m_; ++j) {
        if (at_[j] == At::Basic) continue;
        if (std::abs(t_[tidx(i, j)]) > mag) {
          mag = std::abs(t_[tidx(i, j)]);
          best = j;
        }
      }
      if (best < 0) continue;  // redundant row
      const int out = basis_[i];
      at_[out] = At::Lower;
      x_[out] = 0.0;
      basis_[i] = best;
      beta_[i] = x_[best];
      at_[best] = At::Basic;
      d_.assign(N_, 0.0);
      pivot(i, best);
    }
    for (int j = n_ + m_; j < N_; ++j) {
      up_[j] = 0.0;
      if (at_[j] != At::Basic) x_[j] = 0.0;
    }
    refresh();
  }

  int m_, n_, N_ = 0;
  std::vector<double> a_, rhs_, lo_, up_, x_, t_, beta_, cost_, d_, sigma_;
  std::vector<At> at_;
  std::vector<int> basis_, art_of_row_;
  std::size_t limit_ = 0;
};

LpSolution solve_with_bounds(const LinearProgram& lp, const std::vector<double>& lower,
                             const std::vector<double>& upper) {
  LpSolution sol;
  for (std::size_t j = 0; j < lower.size(); ++j)
    if (lower[j] > upper[j] + kFeasTol) return sol;
  Simplex s(lp, lower, upper);
  sol.status = s.run(lp, sol.iterations);
  if (sol.status == LpStatus::Optimal) {
    sol.x = s.solution();
    sol.objective = lp.evaluate(sol.x);
  }
  return sol;
}

}  // namespace

LpSolution lp_solve(const LinearProgram& lp) {
  lp.check();
  std::vector<double> lo, up;
  for (const auto& v : lp.variables) {
    lo.push_back(v.lower);
    up.push_back(v.upper);
  }
  return solve_with_bounds(lp, lo, up);
}

MipSolution bb_solve(const LinearProgram& lp, double gap_tol, std::size_t node_limit) {
  lp.check();
  const int n = static_cast<int>(lp.variables.size());
  const double sign = lp.sense == Sense::Maximize ? -1.0 : 1.0;  // search minimises sign * objective
  struct Node {
    std::vector<double> lo, up;
  };
  std::vector<Node> store;
  std::set<std::tuple<double, std::size_t>> open;  // (parent bound, id)
  Node root;
  for (const auto& v : lp.variables) {
    root.lo.push_back(v.lower);
    root.up.push_back(v.upper);
  }
  store.push_back(std::move(root));
  open.insert({-kInf, 0});

  MipSolution out;
  double incumbent = kInf;
  std::vector<double> best_x;
  auto tolerance = [&](double inc) { return gap_tol * std::max(std::abs(inc), 1e-10); };
  bool hit_limit = false;
  bool unbounded = false;

  while (!open.empty()) {
    auto [bound, id] = *open.begin();
    if (bound >= incumbent - tolerance(incumbent)) break;  // every open node is at least as bad
    if (out.nodes >= node_limit) {
      hit_limit = true;
      break;
    }
    open.erase(open.begin());
    ++out.nodes;
    Node node = std::move(store[id]);
    LpSolution rel = solve_with_bounds(lp, node.lo, node.up);
    if (rel.status == LpStatus::Unbounded) {
      unbounded = true;
      break;
    }
    if (rel.status != LpStatus::Optimal) continue;
    const double obj = sign * rel.objective;
    if (obj >= incumbent - tolerance(incumbent)) continue;

    int branch = -1;
    double frac_best = 1e-6;
    for (int j = 0; j < n; ++j) {
      if (lp.variables[j].type != VarType::Binary) continue;
      const double f = std::abs(rel.x[j] - std::round(rel.x[j]));
      if (f > frac_best + 1e-12) {
        frac_best = f;
        branch = j;
      }
    }
    if (branch < 0) {
      for (int j = 0; j < n; ++j)
        if (lp.variables[j].type == VarType::Binary) rel.x[j] = std::round(rel.x[j]);
      const double val = sign * lp.evaluate(rel.x);
      if (val < incumbent) {
        incumbent = val;
        best_x = rel.x;
      }
      continue;
    }
    Node down{node.lo, node.up}, up{std::move(node.lo), std::move(node.up)};
    down.up[branch] = 0.0;
    up.lo[branch] = 1.0;
    store.push_back(std::move(down));
    open.insert({obj, store.size() - 1});
    store.push_back(std::move(up));
    open.insert({obj, store.size() - 1});
  }

  if (unbounded) {
    out.status = LpStatus::Unbounded;
    return out;
  }
  double bound = incumbent;
  if (!open.empty()) bound = std::min(bound, std::get<0>(*open.begin()));
  if (best_x.empty()) {
    out.status = hit_limit ? LpStatus::NodeLimit : LpStatus::Infeasible;
    out.best_bound = sign * bound;
    return out;
  }
  out.status = hit_limit ? LpStatus::NodeLimit : LpStatus::Optimal;
  out.x = std::move(best_x);
  out.objective = sign * incumbent;
  out.best_bound = sign * bound;
  out.gap = (incumbent - bound) / std::max(std::abs(incumbent), 1e-10);
  return out;
}

}  // namespace adi
