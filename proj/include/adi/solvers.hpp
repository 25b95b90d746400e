#pragma once

#include <optional>
#include <vector>

#include "adi/attacker.hpp"
#include "adi/kernel.hpp"
#include "adi/lp.hpp"

namespace adi {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultEps = 0.01;
inline constexpr int kDefaultRegions = 10;

// Pure-strategy program over the kernel: binary B_e per bw edge,
// r_u >= c r_dest - c U_dest B_e on blockable meta-edges, r_u >= c r_dest
// otherwise, r* >= r_u on entries, minimise r*. U_v is v's unblocked success
// rate toward DA.
LinearProgram pure_ip_model(const KernelGraph& k, int budget);

// Policy is on k.graph; value is best_attack against it.
DefenseSolution solve_pure_ip(const KernelGraph& k, int budget, double gap_tol = 1e-9);

// Log-domain LP for a fixed linear budget guess b': maximise r'* with
// B'_e in [0, -ln eps] and sum B'_e <= b'.
LinearProgram iterlp_model(const KernelGraph& k, double linear_budget, double eps = kDefaultEps);

struct MixedDefense {
  BlockingPolicy policy;
  double value = 0.0;
  std::optional<double> bound;  // lower bound on the optimal success rate
  std::size_t lp_solves = 0;
};

// Binary search over b' in [0, -|BW| ln eps] until the interval is below 1e-6;
// a guess is accepted when sum(1 - exp(-B'_e)) <= budget.
MixedDefense solve_mixed_iterlp(const KernelGraph& k, double budget, double eps = kDefaultEps);

enum class BoundKind { Upper, Lower };

// One linear piece per region: y = slope x + intercept on [from, to].
struct PiecewiseLinear {
  BoundKind kind = BoundKind::Upper;
  std::vector<double> breakpoints;  // regions + 1 values, from 0 to 1 - eps
  std::vector<double> slopes, intercepts;

  std::size_t regions() const { return slopes.size(); }
  // Piece of the region holding x (the lower region on a shared breakpoint).
  double operator()(double x) const;
};

// Breakpoints k/n below 1 - eps, then 1 - eps. Upper pieces are secants of
// -ln(1-x); lower pieces are tangents at region midpoints.
std::pair<PiecewiseLinear, PiecewiseLinear> piecewise_bounds(int n_regions = kDefaultRegions,
                                                             double eps = kDefaultEps);

enum class MipKind { Feasible, LowerBound };

// Multiple-choice model: per bw edge and region a binary z and a weight w in
// [a z, b z]; B_e = sum w, B'_e = sum(slope w + intercept z).
LinearProgram mixed_mip_model(const KernelGraph& k, double budget, MipKind kind,
                              int n_regions = kDefaultRegions, double eps = kDefaultEps);

MixedDefense solve_mixed_mip(const KernelGraph& k, double budget, MipKind kind,
                             int n_regions = kDefaultRegions, double eps = kDefaultEps,
                             double gap_tol = kDefaultGap);

// b rounds, each blocking the single edge that lowers the success rate most
// (ties to the smallest edge id).
DefenseSolution greedy_defense(const AttackGraph& g, int budget);

}  // namespace adi
