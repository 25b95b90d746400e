#include <algorithm>

#include "adi/kernel.hpp"
#include "adi/preprocess.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace adi;

TEST_CASE("split_nodes") {
  CHECK(split_nodes(fx::fig1()).empty());
  AttackGraph star(fx::numbered(5), {{1, 2, 0.1, false}, {1, 3, 0.1, false}, {1, 4, 0.1, false},
                                     {2, 0, 0.1, false}, {3, 0, 0.1, false}, {4, 0, 0.1, false}},
                   {1}, 0);
  CHECK(split_nodes(star) == std::vector<VertexId>{1});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    AttackGraph g = prune(fx::random_small(seed)).graph;
    auto s = split_nodes(g);
    CHECK(std::find(s.begin(), s.end(), g.da()) == s.end());
  }
}

TEST_CASE("nsp_decompose on figure 1") {
  AttackGraph g = fx::fig1();
  auto paths = nsp_decompose(g);
  REQUIRE(paths.size() == 3);
  CHECK(paths[0].origin == 3);
  CHECK(paths[0].c == doctest::Approx(0.857375).epsilon(1e-12));
  CHECK(paths[0].bw == g.find_edge(2, 1));
  CHECK(paths[1].origin == 4);
  CHECK(paths[1].c == doctest::Approx(0.76).epsilon(1e-12));
  CHECK(paths[1].bw == g.find_edge(4, 1));
  CHECK(paths[2].origin == 5);
  CHECK(paths[2].c == doctest::Approx(0.9025).epsilon(1e-12));
  CHECK(paths[2].bw == g.find_edge(5, 1));
  for (const auto& p : paths) CHECK(p.dest == 0);
}

TEST_CASE("nsp_decompose counting") {
  AttackGraph chain(fx::numbered(3), {{2, 1, 0.1, false}, {1, 0, 0.1, false}}, {2}, 0);
  auto one = nsp_decompose(chain);
  REQUIRE(one.size() == 1);
  CHECK_FALSE(one[0].blockable());
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    AttackGraph g = prune(fx::random_small(seed)).graph;
    std::size_t want = 0;
    for (VertexId v = 0; v < static_cast<VertexId>(g.num_vertices()); ++v)
      if (g.out_edges(v).size() >= 2 || g.is_entry(v)) want += g.out_edges(v).size();
    CHECK(nsp_decompose(g).size() == want);
  }
}

TEST_CASE("delete_dominated") {
  SUBCASE("rule instance") {
    // 1 -> 2 -> 0 unblockable (0.9), 1 -> 3 -> 0 blockable (0.8); 1 also -> 4 -> 0 so 1 splits
    AttackGraph g(fx::numbered(5),
                  {{1, 2, 0.1, false}, {2, 0, 0.0, false}, {1, 3, 0.2, true}, {3, 0, 0.0, false},
                   {1, 4, 0.5, true}, {4, 0, 0.0, false}},
                  {1}, 0);
    DominanceReport rep;
    AttackGraph h = delete_dominated(g, &rep);
    CHECK_FALSE(h.find_edge("1", "3"));
    CHECK_FALSE(h.find_edge("1", "4"));
    CHECK(rep.deleted_edges >= 2);
  }
  SUBCASE("figure 1 keeps the bw edges blockable") {
    AttackGraph h = delete_dominated(fx::fig1());
    std::vector<std::pair<std::string, std::string>> b;
    for (const auto& e : h.edges())
      if (e.blockable) b.push_back({h.label(e.src), h.label(e.dst)});
    std::sort(b.begin(), b.end());
    CHECK(b == std::vector<std::pair<std::string, std::string>>{{"2", "1"}, {"4", "1"}, {"5", "1"}});
    for (int k = 0; k <= 3; ++k) CHECK(oracle::best_pure(h, k) == doctest::Approx(oracle::best_pure(fx::fig1(), k)));
  }
  SUBCASE("oracle preservation") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      AttackGraph g = fx::random_small(seed);
      AttackGraph h = delete_dominated(g);
      for (int b = 0; b <= 3; ++b)
        CHECK(oracle::best_pure(h, b) == doctest::Approx(oracle::best_pure(g, b)).epsilon(1e-12));
    }
  }
}

TEST_CASE("build_kernel") {
  KernelGraph k = kernelize(fx::fig1());
  CHECK(k.vertices == std::vector<VertexId>{0, 3, 4, 5});
  CHECK(k.nsp_count() == 3);
  CHECK(k.bw_edges.size() == 3);
  auto j = nlohmann::json::parse(kernel_json(k));
  CHECK(j["nsp_count"] == 3);
  CHECK(j["meta_edges"].size() == 3);

  // 4 has a single successor, so only its path survives as a meta-edge
  AttackGraph tree(fx::numbered(5), {{1, 0, 0.1, true}, {1, 2, 0.1, true}, {2, 0, 0.1, true}, {2, 3, 0.1, true},
                                     {3, 0, 0.1, true}, {3, 4, 0.1, false}, {4, 0, 0.1, true}},
                   {1}, 0);
  KernelGraph kt = build_kernel(tree);
  CHECK(kt.nsp_count() == 6);
  CHECK(kt.vertices == std::vector<VertexId>{0, 1, 2, 3});
  CHECK(kt.bw_edges.size() == 6);
}
