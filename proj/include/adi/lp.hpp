#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "adi/graph.hpp"

namespace adi {

enum class Sense { Minimize, Maximize };
enum class Relation { LessEqual, GreaterEqual, Equal };
enum class VarType { Continuous, Binary };

using Terms = std::vector<std::pair<int, double>>;

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  VarType type = VarType::Continuous;
};

struct Constraint {
  std::string name;
  Terms terms;
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
};

struct LinearProgram {
  Sense sense = Sense::Minimize;
  std::vector<Variable> variables;
  Terms objective;
  std::vector<Constraint> constraints;

  int add_variable(std::string name, double lower, double upper, VarType type = VarType::Continuous);
  void add_constraint(std::string name, Terms terms, Relation relation, double rhs);
  // Throws std::invalid_argument for unknown variables, bad bounds or binaries
  // with bounds other than [0,1].
  void check() const;
  double evaluate(const std::vector<double>& x) const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, NodeLimit };

const char* status_name(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  std::size_t iterations = 0;
};

// Bounded-variable two-phase primal simplex on a dense tableau. Binary
// variables are relaxed to [0,1].
LpSolution lp_solve(const LinearProgram& lp);

struct MipSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;     // incumbent
  double best_bound = 0.0;    // proven bound in the objective's direction
  double gap = 0.0;           // relative
  std::vector<double> x;
  std::size_t nodes = 0;
};

inline constexpr double kDefaultGap = 1e-6;
inline constexpr std::size_t kDefaultNodeLimit = 100'000;

// Best-bound branch and bound on the most fractional binary. Ties go to the
// older node and the lower variable index.
MipSolution bb_solve(const LinearProgram& lp, double gap_tol = kDefaultGap,
                     std::size_t node_limit = kDefaultNodeLimit);

}  // namespace adi
