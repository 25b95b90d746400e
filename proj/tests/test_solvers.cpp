#include <cmath>

#include "adi/attacker.hpp"
#include "adi/kernel.hpp"
#include "adi/solvers.hpp"
#include "adi/tdcycle.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace adi;

namespace {

const double kFig1Mixed = 1.0 / (1.0 / 0.857375 + 1.0 / 0.76 + 1.0 / 0.9025);

double prob(const AttackGraph& g, const BlockingPolicy& p, VertexId u, VertexId v) {
  return p.probability[*g.find_edge(u, v)];
}

}  // namespace

TEST_CASE("solve_pure_ip") {
  SUBCASE("figure 1") {
    KernelGraph k = kernelize(fx::fig1());
    DefenseSolution s = solve_pure_ip(k, 2);
    CHECK(std::abs(s.value - 0.76) < 1e-9);
    CHECK(s.optimal);
    CHECK(s.policy.blocked().size() == 2);
  }
  SUBCASE("toy") {
    DefenseSolution s = solve_pure_ip(kernelize(fx::toy(40)), 20);
    CHECK(std::abs(s.value - 1.0 / 41) < 1e-12);
  }
  SUBCASE("full budget leaves only unblockable paths") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      AttackGraph g = fx::random_small(seed);
      KernelGraph k = kernelize(g);
      DefenseSolution s = solve_pure_ip(k, static_cast<int>(k.bw_edges.size()));
      std::vector<double> all(g.num_edges(), 0.0);
      for (EdgeId e = 0; e < static_cast<EdgeId>(g.num_edges()); ++e)
        if (g.edge(e).blockable) all[e] = 1.0;
      CHECK(s.value == doctest::Approx(oracle::success(g, all)).epsilon(1e-12));
    }
  }
  SUBCASE("random graphs agree with brute force and tdcycle") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      AttackGraph g = fx::random_small(seed);
      KernelGraph k = kernelize(g);
      for (int b = 0; b <= 3; ++b) {
        const double ip = solve_pure_ip(k, b).value;
        CHECK(std::abs(ip - brute_force_defense(g, b).value) < 1e-9);
        CHECK(std::abs(ip - solve_pure(g, b).value) < 1e-9);
      }
    }
  }
}

TEST_CASE("kernel value equals original value") {
  for (std::uint64_t seed = 200; seed < 230; ++seed) {
    AttackGraph g = fx::random_small(seed);
    KernelGraph k = kernelize(g);
    for (int b = 0; b <= 3; ++b)
      CHECK(brute_force_defense(k.graph, b).value == doctest::Approx(brute_force_defense(g, b).value).epsilon(1e-12));
  }
}

TEST_CASE("solve_mixed_iterlp") {
  AttackGraph g = fx::fig1();
  KernelGraph k = kernelize(g);
  MixedDefense m = solve_mixed_iterlp(k, 2.0);
  CHECK(std::abs(m.value - 0.27854) < 5e-3);
  CHECK(std::abs(m.value - kFig1Mixed) < 1e-4);
  CHECK(std::abs(prob(k.graph, m.policy, 2, 1) - 0.675) < 1e-2);
  CHECK(std::abs(prob(k.graph, m.policy, 4, 1) - 0.634) < 1e-2);
  CHECK(std::abs(prob(k.graph, m.policy, 5, 1) - 0.691) < 1e-2);
  CHECK(m.policy.total() <= 2.0 + 1e-6);

  MixedDefense zero = solve_mixed_iterlp(k, 0.0);
  CHECK(zero.policy.total() == 0.0);
  CHECK(zero.value == doctest::Approx(best_attack(g).success_rate));
}

TEST_CASE("piecewise_bounds") {
  for (int n : {1, 3, 10, 20, 37}) {
    auto [up, lo] = piecewise_bounds(n, 0.01);
    CHECK(up.breakpoints.front() == 0.0);
    CHECK(up.breakpoints.back() == doctest::Approx(0.99));
    CHECK(up(0.0) == doctest::Approx(0.0));
    CHECK(lo(0.0) <= 0.0);
    for (int i = 0; i <= 2000; ++i) {
      const double x = 0.99 * i / 2000.0;
      const double f = -std::log1p(-x);
      CHECK(lo(x) <= f + 1e-12);
      CHECK(f <= up(x) + 1e-12);
    }
  }
  auto [up, lo] = piecewise_bounds(10, 0.01);
  CHECK(lo(0.05) == doctest::Approx(-std::log(0.95)).epsilon(1e-14));
  CHECK(up.regions() == 10);
}

TEST_CASE("solve_mixed_mip") {
  AttackGraph g = fx::fig1();
  KernelGraph k = kernelize(g);
  MixedDefense f = solve_mixed_mip(k, 2.0, MipKind::Feasible);
  CHECK(f.value >= 0.2785);
  CHECK(f.value <= 0.2885);
  CHECK(f.policy.total() <= 2.0 + 1e-6);
  MixedDefense lb = solve_mixed_mip(k, 2.0, MipKind::LowerBound);
  REQUIRE(lb.bound);
  CHECK(*lb.bound <= 0.2786);
  CHECK(*lb.bound <= f.value);
  CHECK(f.value - *lb.bound <= 1e-2);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    KernelGraph r = kernelize(fx::random_small(seed));
    for (double b : {0.5, 1.5}) {
      MixedDefense a = solve_mixed_mip(r, b, MipKind::Feasible);
      MixedDefense c = solve_mixed_mip(r, b, MipKind::LowerBound);
      REQUIRE(c.bound);
      CHECK(*c.bound <= a.value + 1e-9);
      CHECK(a.policy.total() <= b + 1e-6);
    }
  }
}

TEST_CASE("greedy_defense") {
  DefenseSolution toy = greedy_defense(fx::toy(40), 20);
  CHECK(std::abs(toy.value - 1.0 / 41) < 1e-12);
  // the 20 odd edges are the only ones above 1/41
  AttackGraph t = fx::toy(40);
  CHECK(toy.policy.blocked().size() == 20);
  for (EdgeId e : toy.policy.blocked()) CHECK(t.edge(e).src % 2 == 1);
  AttackGraph g = fx::fig1();
  CHECK(greedy_defense(g, 0).value == doctest::Approx(best_attack(g).success_rate));
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    AttackGraph r = fx::random_small(seed);
    KernelGraph k = kernelize(r);
    for (int b = 1; b <= 3; ++b) CHECK(greedy_defense(r, b).value >= solve_pure_ip(k, b).value - 1e-12);
  }
}
