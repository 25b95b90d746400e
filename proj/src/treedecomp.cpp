#include "adi/treedecomp.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "json.hpp"

namespace adi {

namespace {

struct Elimination {
  std::vector<VertexId> order;
  std::vector<std::vector<VertexId>> bag_of;  // by vertex
};

std::vector<std::set<VertexId>> undirected(const AttackGraph& g) {
  std::vector<std::set<VertexId>> adj(g.num_vertices());
  for (const Edge& e : g.edges()) {
    adj[e.src].insert(e.dst);
    adj[e.dst].insert(e.src);
  }
  return adj;
}

long fill_in(const std::vector<std::set<VertexId>>& adj, VertexId v) {
  long missing = 0;
  for (auto a = adj[v].begin(); a != adj[v].end(); ++a)
    for (auto b = std::next(a); b != adj[v].end(); ++b)
      if (!adj[*a].count(*b)) ++missing;
  return missing;
}

Elimination run_elimination(const AttackGraph& g, Heuristic h) {
  auto adj = undirected(g);
  const std::size_t n = g.num_vertices();
  auto key = [&](VertexId v) {
    return h == Heuristic::MinDegree ? static_cast<long>(adj[v].size()) : fill_in(adj, v);
  };
  std::vector<long> cur(n);
  std::set<std::pair<long, VertexId>> queue;
  for (std::size_t v = 0; v < n; ++v) {
    cur[v] = key(static_cast<VertexId>(v));
    queue.insert({cur[v], static_cast<VertexId>(v)});
  }
  Elimination out;
  out.bag_of.resize(n);
  while (!queue.empty()) {
    const VertexId i = queue.begin()->second;
    queue.erase(queue.begin());
    out.order.push_back(i);
    std::vector<VertexId> nb(adj[i].begin(), adj[i].end());
    auto& bag = out.bag_of[i];
    bag = nb;
    bag.push_back(i);
    std::sort(bag.begin(), bag.end());
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        adj[nb[a]].insert(nb[b]);
        adj[nb[b]].insert(nb[a]);
      }
    for (VertexId a : nb) adj[a].erase(i);
    adj[i].clear();
    std::set<VertexId> dirty(nb.begin(), nb.end());
    if (h == Heuristic::MinFillIn)
      for (VertexId a : nb) dirty.insert(adj[a].begin(), adj[a].end());
    for (VertexId v : dirty) {
      const long k = key(v);
      if (k == cur[v]) continue;
      queue.erase({cur[v], v});
      cur[v] = k;
      queue.insert({k, v});
    }
  }
  return out;
}

}  // namespace

int TreeDecomposition::width() const {
  int w = -1;
  for (const auto& b : bags) w = std::max(w, static_cast<int>(b.size()) - 1);
  return w;
}

std::vector<VertexId> elimination_order(const AttackGraph& g, Heuristic h) {
  return run_elimination(g, h).order;
}

TreeDecomposition eliminate(const AttackGraph& g, Heuristic h) {
  Elimination el = run_elimination(g, h);
  const std::size_t n = g.num_vertices();
  std::vector<int> pos(n);
  for (std::size_t k = 0; k < n; ++k) pos[el.order[k]] = static_cast<int>(k);

  TreeDecomposition td;
  td.bags.reserve(n);
  for (VertexId v : el.order) td.bags.push_back(el.bag_of[v]);
  if (n == 0) return td;
  td.root = pos[g.da()];

  // parent of bag k is the bag of its neighbour eliminated first after it
  std::vector<int> parent(n, -1);
  for (std::size_t k = 0; k < n; ++k) {
    const VertexId i = el.order[k];
    int best = -1;
    for (VertexId v : el.bag_of[i])
      if (v != i && (best < 0 || pos[v] < best)) best = pos[v];
    parent[k] = best;
  }
  auto top = [&](int k) {
    while (parent[k] >= 0) k = parent[k];
    return k;
  };
  const int da_top = top(td.root);
  for (std::size_t k = 0; k < n; ++k) {
    if (parent[k] >= 0) {
      td.tree_edges.push_back({static_cast<int>(k), parent[k]});
    } else if (static_cast<int>(k) != da_top) {
      td.tree_edges.push_back({static_cast<int>(k), td.root});
    }
  }
  return td;
}

TreeDecomposition best_decomposition(const AttackGraph& g) {
  TreeDecomposition a = eliminate(g, Heuristic::MinDegree);
  TreeDecomposition b = eliminate(g, Heuristic::MinFillIn);
  return b.width() < a.width() ? b : a;
}

const char* kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Leaf: return "leaf";
    case NodeKind::Introduce: return "introduce";
    case NodeKind::Forget: return "forget";
    case NodeKind::Join: return "join";
  }
  return "?";
}

int NiceTreeDecomposition::width() const {
  int w = -1;
  for (const auto& nd : nodes) w = std::max(w, static_cast<int>(nd.bag.size()) - 1);
  return w;
}

std::vector<int> NiceTreeDecomposition::post_order() const {
  std::vector<int> out;
  if (root < 0) return out;
  out.reserve(nodes.size());
  std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < nodes[node].children.size()) {
      const int c = nodes[node].children[next++];
      stack.push_back({c, 0});
    } else {
      out.push_back(node);
      stack.pop_back();
    }
  }
  return out;
}

std::size_t NiceTreeDecomposition::count(NodeKind k) const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [k](const NiceNode& nd) { return nd.kind == k; }));
}

namespace {

bool contains(const std::vector<VertexId>& sorted, VertexId v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

std::vector<VertexId> minus(const std::vector<VertexId>& a, const std::vector<VertexId>& b) {
  std::vector<VertexId> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

void check_tree(const std::vector<std::vector<VertexId>>& bags, const std::vector<std::pair<int, int>>& tree_edges,
                const AttackGraph& g, std::vector<std::string>& out) {
  const std::size_t n = g.num_vertices();
  const std::size_t m = bags.size();
  std::vector<std::vector<int>> holding(n);
  for (std::size_t b = 0; b < m; ++b) {
    if (!std::is_sorted(bags[b].begin(), bags[b].end()) ||
        std::adjacent_find(bags[b].begin(), bags[b].end()) != bags[b].end())
      out.push_back("bag " + std::to_string(b) + " not sorted or has duplicates");
    for (VertexId v : bags[b]) {
      if (v < 0 || static_cast<std::size_t>(v) >= n) {
        out.push_back("bag " + std::to_string(b) + " holds unknown vertex");
        continue;
      }
      holding[v].push_back(static_cast<int>(b));
    }
  }
  for (std::size_t v = 0; v < n; ++v)
    if (holding[v].empty()) out.push_back("vertex " + g.label(static_cast<VertexId>(v)) + " not in any bag");
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const Edge& edge = g.edges()[e];
    bool covered = false;
    for (int b : holding[edge.src])
      if (contains(bags[b], edge.dst)) covered = true;
    if (!covered) out.push_back("edge " + g.edge_label(static_cast<EdgeId>(e)) + " not covered");
  }

  if (m == 0) return;
  if (tree_edges.size() != m - 1) {
    out.push_back("tree has " + std::to_string(tree_edges.size()) + " edges for " + std::to_string(m) + " bags");
    return;
  }
  std::vector<int> comp(m);
  std::iota(comp.begin(), comp.end(), 0);
  auto find = [&](int x) {
    while (comp[x] != x) x = comp[x] = comp[comp[x]];
    return x;
  };
  for (auto [a, b] : tree_edges) {
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= m || static_cast<std::size_t>(b) >= m) {
      out.push_back("tree edge references unknown bag");
      return;
    }
    const int ra = find(a), rb = find(b);
    if (ra == rb) {
      out.push_back("tree has a cycle");
      return;
    }
    comp[ra] = rb;
  }
  // In a tree the bags holding v are connected iff they span |bags| - 1 tree edges.
  std::vector<std::size_t> span(n, 0);
  for (auto [a, b] : tree_edges)
    for (VertexId v : bags[a])
      if (contains(bags[b], v)) ++span[v];
  for (std::size_t v = 0; v < n; ++v)
    if (!holding[v].empty() && span[v] + 1 != holding[v].size())
      out.push_back("bags holding vertex " + g.label(static_cast<VertexId>(v)) + " are not connected");
}

}  // namespace

TdDiagnostics verify(const TreeDecomposition& td, const AttackGraph& g) {
  TdDiagnostics d;
  check_tree(td.bags, td.tree_edges, g, d.violations);
  return d;
}

TdDiagnostics verify(const NiceTreeDecomposition& ntd, const AttackGraph& g) {
  TdDiagnostics d;
  auto& out = d.violations;
  std::vector<std::vector<VertexId>> bags;
  std::vector<std::pair<int, int>> tree_edges;
  for (std::size_t i = 0; i < ntd.nodes.size(); ++i) {
    bags.push_back(ntd.nodes[i].bag);
    for (int c : ntd.nodes[i].children) {
      if (c < 0 || static_cast<std::size_t>(c) >= ntd.nodes.size()) {
        out.push_back("node " + std::to_string(i) + " has unknown child");
        return d;
      }
      tree_edges.push_back({static_cast<int>(i), c});
    }
  }
  check_tree(bags, tree_edges, g, out);
  if (ntd.root < 0 || static_cast<std::size_t>(ntd.root) >= ntd.nodes.size()) {
    out.push_back("missing root");
    return d;
  }
  if (ntd.nodes[ntd.root].bag != std::vector<VertexId>{g.da()}) out.push_back("root bag is not {DA}");

  for (std::size_t i = 0; i < ntd.nodes.size(); ++i) {
    const NiceNode& nd = ntd.nodes[i];
    const std::string id = "node " + std::to_string(i);
    auto child_bag = [&](std::size_t k) -> const std::vector<VertexId>& { return ntd.nodes[nd.children[k]].bag; };
    switch (nd.kind) {
      case NodeKind::Leaf:
        if (!nd.children.empty() || nd.bag.size() != 1) out.push_back(id + ": leaf must be childless with one vertex");
        break;
      case NodeKind::Introduce:
        if (nd.children.size() != 1 || contains(child_bag(0), nd.vertex) ||
            minus(nd.bag, child_bag(0)) != std::vector<VertexId>{nd.vertex} || !minus(child_bag(0), nd.bag).empty())
          out.push_back(id + ": bad introduce node");
        break;
      case NodeKind::Forget:
        if (nd.children.size() != 1 || contains(nd.bag, nd.vertex) ||
            minus(child_bag(0), nd.bag) != std::vector<VertexId>{nd.vertex} || !minus(nd.bag, child_bag(0)).empty())
          out.push_back(id + ": bad forget node");
        break;
      case NodeKind::Join:
        if (nd.children.size() != 2 || child_bag(0) != nd.bag || child_bag(1) != nd.bag)
          out.push_back(id + ": join children bags differ");
        break;
    }
    if (nd.kind != NodeKind::Forget && !nd.assigned.empty()) out.push_back(id + ": edges assigned to non-forget node");
  }

  if (ntd.forget_edge_assignment.size() != g.num_edges()) {
    out.push_back("edge assignment does not cover every edge");
    return d;
  }
  std::vector<int> seen(g.num_edges(), 0);
  for (const NiceNode& nd : ntd.nodes)
    for (EdgeId e : nd.assigned)
      if (e >= 0 && static_cast<std::size_t>(e) < g.num_edges()) ++seen[e];
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const std::string el = g.edge_label(static_cast<EdgeId>(e));
    const int x = ntd.forget_edge_assignment[e];
    if (seen[e] != 1) out.push_back("edge " + el + " listed at " + std::to_string(seen[e]) + " forget nodes");
    if (x < 0 || static_cast<std::size_t>(x) >= ntd.nodes.size() || ntd.nodes[x].kind != NodeKind::Forget) {
      out.push_back("edge " + el + " not assigned to a forget node");
      continue;
    }
    const NiceNode& nd = ntd.nodes[x];
    const Edge& edge = g.edges()[e];
    const auto& child = ntd.nodes[nd.children[0]].bag;
    if (!contains(child, edge.src) || !contains(child, edge.dst) ||
        (nd.vertex != edge.src && nd.vertex != edge.dst))
      out.push_back("edge " + el + " assigned to a forget node that does not forget an endpoint");
  }
  return d;
}

NiceTreeDecomposition to_nice(const TreeDecomposition& td, const AttackGraph& g) {
  if (auto d = verify(td, g); !d.ok()) throw GraphError("invalid tree decomposition: " + d.violations.front());
  const VertexId da = g.da();
  const std::size_t m = td.bags.size();
  int root = td.root;
  if (root < 0)
    for (std::size_t b = 0; b < m && root < 0; ++b)
      if (contains(td.bags[b], da)) root = static_cast<int>(b);
  if (root < 0 || static_cast<std::size_t>(root) >= m || !contains(td.bags[root], da))
    throw GraphError("invalid tree decomposition: root bag lacks DA");

  std::vector<std::vector<int>> adj(m);
  for (auto [a, b] : td.tree_edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& l : adj) std::sort(l.begin(), l.end());

  // BFS from the root; a bag sharing nothing with its parent also takes DA.
  std::vector<int> parent(m, -1), order{root};
  std::vector<std::vector<int>> children(m);
  std::vector<std::vector<VertexId>> bags = td.bags;
  std::vector<bool> seen(m, false);
  seen[root] = true;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const int b = order[k];
    for (int c : adj[b]) {
      if (seen[c]) continue;
      seen[c] = true;
      parent[c] = b;
      children[b].push_back(c);
      order.push_back(c);
      std::vector<VertexId> common;
      std::set_intersection(bags[c].begin(), bags[c].end(), bags[b].begin(), bags[b].end(),
                            std::back_inserter(common));
      if (common.empty()) {
        if (!contains(bags[b], da)) throw GraphError("disconnected decomposition not attached at DA");
        bags[c].insert(std::upper_bound(bags[c].begin(), bags[c].end(), da), da);
      }
    }
  }

  NiceTreeDecomposition ntd;
  auto add = [&](std::vector<VertexId> bag, NodeKind kind, std::vector<int> ch, VertexId v) {
    ntd.nodes.push_back({std::move(bag), kind, std::move(ch), v, {}});
    return static_cast<int>(ntd.nodes.size()) - 1;
  };
  // Walks node `at` (bag `from`) to bag `to`: forget, then introduce, largest first.
  auto chain = [&](int at, std::vector<VertexId> from, const std::vector<VertexId>& to) {
    auto drop = minus(from, to);
    for (auto it = drop.rbegin(); it != drop.rend(); ++it) {
      from.erase(std::find(from.begin(), from.end(), *it));
      at = add(from, NodeKind::Forget, {at}, *it);
    }
    auto intro = minus(to, from);
    for (auto it = intro.rbegin(); it != intro.rend(); ++it) {
      from.insert(std::upper_bound(from.begin(), from.end(), *it), *it);
      at = add(from, NodeKind::Introduce, {at}, *it);
    }
    return at;
  };

  std::vector<int> top(m, -1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int b = *it;
    const auto& bag = bags[b];
    if (bag.empty()) throw GraphError("invalid tree decomposition: empty bag");
    int cur = -1;
    if (children[b].empty()) {
      cur = add({bag.back()}, NodeKind::Leaf, {}, bag.back());
      cur = chain(cur, {bag.back()}, bag);
    }
    for (int c : children[b]) {
      const int node = chain(top[c], bags[c], bag);
      cur = cur < 0 ? node : add(bag, NodeKind::Join, {cur, node}, -1);
    }
    top[b] = cur;
  }
  ntd.root = chain(top[root], bags[root], {da});

  // Each edge goes to the forget node of whichever endpoint leaves first.
  std::vector<int> depth(ntd.nodes.size(), 0), forget_at(g.num_vertices(), -1);
  std::vector<int> stack{ntd.root};
  while (!stack.empty()) {
    const int x = stack.back();
    stack.pop_back();
    if (ntd.nodes[x].kind == NodeKind::Forget) forget_at[ntd.nodes[x].vertex] = x;
    for (int c : ntd.nodes[x].children) {
      depth[c] = depth[x] + 1;
      stack.push_back(c);
    }
  }
  ntd.forget_edge_assignment.assign(g.num_edges(), -1);
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const int fu = forget_at[g.edges()[e].src], fv = forget_at[g.edges()[e].dst];
    const int x = fv < 0 || (fu >= 0 && depth[fu] > depth[fv]) ? fu : fv;
    ntd.forget_edge_assignment[e] = x;
    if (x >= 0) ntd.nodes[x].assigned.push_back(static_cast<EdgeId>(e));
  }
  return ntd;
}

std::string treewidth_json(const TreeDecomposition& td, const NiceTreeDecomposition& ntd) {
  nlohmann::ordered_json j;
  j["width"] = td.width();
  j["bags"] = td.bags.size();
  j["nice_width"] = ntd.width();
  j["nice_nodes"] = ntd.nodes.size();
  for (NodeKind k : {NodeKind::Leaf, NodeKind::Introduce, NodeKind::Forget, NodeKind::Join})
    j["nodes_by_kind"][kind_name(k)] = ntd.count(k);
  return j.dump(2);
}

}  // namespace adi
