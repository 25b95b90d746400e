#include "adi/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "adi/rng.hpp"
#include "json.hpp"

namespace adi {

namespace {

using nlohmann::json;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string quoted(const std::string& s) { return json(s).dump(); }

}  // namespace

AttackGraph::AttackGraph(std::vector<std::string> labels, std::vector<Edge> edges,
                         std::vector<VertexId> entries, VertexId da)
    : labels_(std::move(labels)), edges_(std::move(edges)), entries_(std::move(entries)), da_(da) {
  const auto n = static_cast<VertexId>(labels_.size());
  if (da_ < 0 || da_ >= n) throw GraphError("DA vertex id out of range");
  for (std::size_t v = 0; v < labels_.size(); ++v)
    if (!index_.emplace(labels_[v], static_cast<VertexId>(v)).second)
      throw GraphError("duplicate vertex id '" + labels_[v] + "'");
  is_entry_.assign(labels_.size(), false);
  std::sort(entries_.begin(), entries_.end());
  for (VertexId v : entries_) {
    if (v < 0 || v >= n) throw GraphError("entry vertex id out of range");
    if (v == da_) throw GraphError("vertex '" + labels_[v] + "' is both entry and DA");
    if (is_entry_[v]) throw GraphError("duplicate entry '" + labels_[v] + "'");
    is_entry_[v] = true;
  }
  out_.assign(labels_.size(), {});
  in_.assign(labels_.size(), {});
  std::set<std::pair<VertexId, VertexId>> pairs;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n)
      throw GraphError("edge endpoint out of range");
    if (e.src == e.dst) throw GraphError("self-loop on '" + labels_[e.src] + "'");
    if (!(e.failure_rate >= 0.0 && e.failure_rate < 1.0))
      throw GraphError("failure rate of " + labels_[e.src] + "->" + labels_[e.dst] +
                       " outside [0,1)");
    if (!pairs.emplace(e.src, e.dst).second)
      throw GraphError("duplicate edge " + labels_[e.src] + "->" + labels_[e.dst]);
    out_[e.src].push_back(static_cast<EdgeId>(i));
    in_[e.dst].push_back(static_cast<EdgeId>(i));
  }
}

std::size_t AttackGraph::num_blockable() const {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return e.blockable; }));
}

std::string AttackGraph::edge_label(EdgeId e) const {
  return label(edge(e).src) + "->" + label(edge(e).dst);
}

std::optional<EdgeId> AttackGraph::find_edge(VertexId src, VertexId dst) const {
  for (EdgeId e : out_edges(src))
    if (edge(e).dst == dst) return e;
  return std::nullopt;
}

std::optional<VertexId> AttackGraph::find_vertex(std::string_view l) const {
  auto it = index_.find(std::string(l));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<EdgeId> AttackGraph::find_edge(std::string_view src, std::string_view dst) const {
  auto s = find_vertex(src);
  auto d = find_vertex(dst);
  if (!s || !d) return std::nullopt;
  return find_edge(*s, *d);
}

AttackGraph AttackGraph::with_blockable(const std::vector<bool>& flags) const {
  if (flags.size() != edges_.size()) throw GraphError("blockable flag count mismatch");
  std::vector<Edge> es = edges_;
  for (std::size_t i = 0; i < es.size(); ++i) es[i].blockable = flags[i];
  return AttackGraph(labels_, std::move(es), entries_, da_);
}

AttackGraph induced_subgraph(const AttackGraph& g, const std::vector<bool>& keep_vertex,
                             const std::vector<bool>& keep_edge) {
  if (!keep_vertex[g.da()]) throw GraphError("induced_subgraph: DA must be kept");
  std::vector<VertexId> remap(g.num_vertices(), -1);
  std::vector<std::string> labels;
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    if (!keep_vertex[v]) continue;
    remap[v] = static_cast<VertexId>(labels.size());
    labels.push_back(g.label(static_cast<VertexId>(v)));
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < g.num_edges(); ++i) {
    const Edge& e = g.edges()[i];
    if (!keep_edge[i] || remap[e.src] < 0 || remap[e.dst] < 0) continue;
    edges.push_back({remap[e.src], remap[e.dst], e.failure_rate, e.blockable});
  }
  std::vector<VertexId> entries;
  for (VertexId v : g.entries())
    if (remap[v] >= 0) entries.push_back(remap[v]);
  return AttackGraph(std::move(labels), std::move(edges), std::move(entries), remap[g.da()]);
}

AttackGraph load_graph(std::string_view document, std::vector<std::string>* warnings) {
  auto warn = [&](std::string msg) {
    if (warnings) warnings->push_back(std::move(msg));
  };
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw GraphError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("vertices") || !doc["vertices"].is_array() ||
      !doc.contains("edges") || !doc["edges"].is_array())
    throw GraphError("document must be an object with 'vertices' and 'edges' arrays");

  struct RawVertex {
    bool entry = false;
    bool da = false;
  };
  std::map<std::string, RawVertex> vertices;
  for (const auto& v : doc["vertices"]) {
    if (!v.is_object() || !v.contains("id") || !v["id"].is_string())
      throw GraphError("vertex entries need a string 'id'");
    RawVertex rv;
    for (const char* key : {"entry", "da"}) {
      if (!v.contains(key)) continue;
      if (!v[key].is_boolean()) throw GraphError(std::string("vertex field '") + key + "' must be boolean");
    }
    rv.entry = v.value("entry", false);
    rv.da = v.value("da", false);
    const std::string id = v["id"].get<std::string>();
    if (rv.entry && rv.da) throw GraphError("vertex '" + id + "' is both entry and DA");
    if (!vertices.emplace(id, rv).second) throw GraphError("duplicate vertex id '" + id + "'");
  }
  std::string da_label;
  for (const auto& [id, rv] : vertices) {
    if (!rv.da) continue;
    if (!da_label.empty()) throw GraphError("more than one DA vertex");
    da_label = id;
  }
  if (da_label.empty()) throw GraphError("no DA vertex");

  struct RawEdge {
    double rate;
    bool blockable;
  };
  std::map<std::pair<std::string, std::string>, RawEdge> edges;
  for (const auto& e : doc["edges"]) {
    if (!e.is_object() || !e.contains("src") || !e["src"].is_string() || !e.contains("dst") ||
        !e["dst"].is_string() || !e.contains("failure_rate") || !e["failure_rate"].is_number())
      throw GraphError("edges need string 'src'/'dst' and numeric 'failure_rate'");
    if (e.contains("blockable") && !e["blockable"].is_boolean())
      throw GraphError("edge field 'blockable' must be boolean");
    std::string src = e["src"].get<std::string>();
    std::string dst = e["dst"].get<std::string>();
    const double rate = e["failure_rate"].get<double>();
    const bool blockable = e.value("blockable", false);
    if (!vertices.count(src) || !vertices.count(dst))
      throw GraphError("edge " + src + "->" + dst + " references an unknown vertex");
    if (!(rate >= 0.0 && rate <= 1.0))
      throw GraphError("failure rate of " + src + "->" + dst + " outside [0,1]");
    if (edges.count({src, dst})) throw GraphError("duplicate edge " + src + "->" + dst);
    if (src == dst) {
      warn("self-loop " + src + "->" + dst + " dropped");
      continue;
    }
    if (rate == 1.0) {
      warn("edge " + src + "->" + dst + " has failure rate 1 and was dropped");
      continue;
    }
    edges.emplace(std::pair{std::move(src), std::move(dst)}, RawEdge{rate, blockable});
  }

  // Antiparallel pairs: keep the direction with src < dst, route the other
  // through an auxiliary vertex.
  std::vector<std::pair<std::pair<std::string, std::string>, RawEdge>> split;
  for (const auto& [key, re] : edges)
    if (key.first > key.second && edges.count({key.second, key.first})) split.push_back({key, re});
  for (const auto& [key, re] : split) {
    edges.erase(key);
    std::string aux = "aux:" + key.first + "->" + key.second;
    while (vertices.count(aux)) aux += "'";
    vertices.emplace(aux, RawVertex{});
    edges.emplace(std::pair{key.first, aux}, re);
    edges.emplace(std::pair{aux, key.second}, RawEdge{0.0, false});
    warn("antiparallel edge " + key.first + "->" + key.second + " routed through '" + aux + "'");
  }

  std::vector<std::string> labels{da_label};
  for (const auto& [id, rv] : vertices)
    if (id != da_label) labels.push_back(id);
  std::unordered_map<std::string, VertexId> index;
  for (std::size_t i = 0; i < labels.size(); ++i) index[labels[i]] = static_cast<VertexId>(i);
  std::vector<VertexId> entries;
  for (const auto& [id, rv] : vertices)
    if (rv.entry) entries.push_back(index[id]);
  std::vector<Edge> es;
  for (const auto& [key, re] : edges) es.push_back({index[key.first], index[key.second], re.rate, re.blockable});
  return AttackGraph(std::move(labels), std::move(es), std::move(entries), 0);
}

std::string serialize_graph(const AttackGraph& g) {
  std::vector<VertexId> vs(g.num_vertices());
  std::iota(vs.begin(), vs.end(), 0);
  std::sort(vs.begin(), vs.end(), [&](VertexId a, VertexId b) { return g.label(a) < g.label(b); });
  std::vector<EdgeId> es(g.num_edges());
  std::iota(es.begin(), es.end(), 0);
  std::sort(es.begin(), es.end(), [&](EdgeId a, EdgeId b) {
    const auto& x = g.edge(a);
    const auto& y = g.edge(b);
    return std::tie(g.label(x.src), g.label(x.dst)) < std::tie(g.label(y.src), g.label(y.dst));
  });
  std::string out = "{\"vertices\":[";
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ',';
    const VertexId v = vs[i];
    out += "{\"id\":" + quoted(g.label(v)) + ",\"entry\":" + (g.is_entry(v) ? "true" : "false") +
           ",\"da\":" + (v == g.da() ? "true" : "false") + "}";
  }
  out += "],\"edges\":[";
  for (std::size_t i = 0; i < es.size(); ++i) {
    if (i) out += ',';
    const Edge& e = g.edge(es[i]);
    out += "{\"src\":" + quoted(g.label(e.src)) + ",\"dst\":" + quoted(g.label(e.dst)) +
           ",\"failure_rate\":" + fmt17(e.failure_rate) +
           ",\"blockable\":" + (e.blockable ? "true" : "false") + "}";
  }
  out += "]}\n";
  return out;
}

std::vector<int> hops_to_da(const AttackGraph& g) {
  std::vector<int> hops(g.num_vertices(), -1);
  std::deque<VertexId> queue{g.da()};
  hops[g.da()] = 0;
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    for (EdgeId e : g.in_edges(v)) {
      const VertexId u = g.edge(e).src;
      if (hops[u] >= 0) continue;
      hops[u] = hops[v] + 1;
      queue.push_back(u);
    }
  }
  return hops;
}

std::vector<int> edge_hops(const AttackGraph& g) {
  const auto hops = hops_to_da(g);
  std::vector<int> out(g.num_edges(), -1);
  for (std::size_t i = 0; i < g.num_edges(); ++i) {
    const int h = hops[g.edges()[i].dst];
    out[i] = h < 0 ? -1 : h + 1;
  }
  return out;
}

Diagnostics validate(const AttackGraph& g) {
  Diagnostics d;
  d.n_vertices = g.num_vertices();
  d.n_edges = g.num_edges();
  d.n_blockable = g.num_blockable();
  d.n_entries = g.entries().size();
  for (EdgeId e : g.out_edges(g.da()))
    d.violations.push_back("DA has outgoing edge " + g.edge_label(e));
  const auto hops = hops_to_da(g);
  for (std::size_t v = 0; v < g.num_vertices(); ++v)
    if (hops[v] < 0) d.cannot_reach_da.push_back(static_cast<VertexId>(v));
  // Kahn's algorithm: leftover vertices lie on or behind a cycle.
  std::vector<std::size_t> indeg(g.num_vertices());
  for (const Edge& e : g.edges()) ++indeg[e.dst];
  std::vector<VertexId> stack;
  for (std::size_t v = 0; v < g.num_vertices(); ++v)
    if (indeg[v] == 0) stack.push_back(static_cast<VertexId>(v));
  std::size_t seen = 0;
  while (!stack.empty()) {
    const VertexId v = stack.back();
    stack.pop_back();
    ++seen;
    for (EdgeId e : g.out_edges(v))
      if (--indeg[g.edge(e).dst] == 0) stack.push_back(g.edge(e).dst);
  }
  d.has_cycle = seen != g.num_vertices();
  return d;
}

std::string diagnostics_json(const Diagnostics& d, const AttackGraph& g) {
  json out;
  out["ok"] = d.ok();
  out["violations"] = d.violations;
  std::vector<std::string> unreachable;
  for (VertexId v : d.cannot_reach_da) unreachable.push_back(g.label(v));
  out["cannot_reach_da"] = unreachable;
  out["has_cycle"] = d.has_cycle;
  out["counts"] = {{"vertices", d.n_vertices},
                   {"edges", d.n_edges},
                   {"blockable", d.n_blockable},
                   {"entries", d.n_entries}};
  return out.dump(2) + "\n";
}

namespace {

struct Assignment {
  std::vector<bool> blockable;
  std::vector<VertexId> entries;
};

Assignment draw_entries_and_blockable(std::size_t n_vertices, const std::vector<Edge>& edges,
                                      const AttackGraph& probe, std::size_t n_entries,
                                      std::size_t pool_size, Rng& rng) {
  if (n_entries > pool_size || pool_size + 1 > n_vertices)
    throw GraphError("generator needs n_entries <= entry_pool_size <= n_vertices - 1");
  const auto ehops = edge_hops(probe);
  const int max_hop = ehops.empty() ? 0 : *std::max_element(ehops.begin(), ehops.end());
  Assignment a;
  a.blockable.resize(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i)
    a.blockable[i] = max_hop > 0 && ehops[i] > 0 &&
                     rng.bernoulli(static_cast<double>(ehops[i]) / max_hop);
  const auto hops = hops_to_da(probe);
  std::vector<VertexId> order;
  for (std::size_t v = 0; v < n_vertices; ++v)
    if (static_cast<VertexId>(v) != probe.da()) order.push_back(static_cast<VertexId>(v));
  // Furthest first; unreachable vertices rank last, ties by id.
  std::stable_sort(order.begin(), order.end(), [&](VertexId x, VertexId y) { return hops[x] > hops[y]; });
  order.resize(pool_size);
  for (std::size_t idx : rng.sample(pool_size, n_entries)) a.entries.push_back(order[idx]);
  return a;
}

}  // namespace

AttackGraph generate_synthetic(const GeneratorParams& p) {
  if (p.n_vertices < 2) throw GraphError("generator needs at least 2 vertices");
  if (p.extra_edge_fraction < 0.0) throw GraphError("extra_edge_fraction must be nonnegative");
  for (double r : {p.high_failure_rate, p.low_failure_rate})
    if (!(r >= 0.0 && r < 1.0)) throw GraphError("generator failure rates must lie in [0,1)");
  if (p.n_entries > p.pool() || p.pool() + 1 > p.n_vertices)
    throw GraphError("generator needs n_entries <= entry_pool_size <= n_vertices - 1");

  Rng rng(p.seed);
  const std::size_t n = p.n_vertices;
  std::vector<Edge> edges;
  std::set<std::pair<VertexId, VertexId>> present;
  for (std::size_t v = 1; v < n; ++v) {
    const auto parent = static_cast<VertexId>(rng.below(v));
    edges.push_back({static_cast<VertexId>(v), parent, 0.0, false});
    present.emplace(static_cast<VertexId>(v), parent);
  }
  const auto extra = static_cast<std::size_t>(std::floor(p.extra_edge_fraction * static_cast<double>(n - 1)));
  // Only vertices >= 2 can carry an extra edge; the attempt cap guards dense requests.
  std::size_t added = 0;
  for (std::size_t attempt = 0; added < extra && n > 2 && attempt < 50 * extra + 100; ++attempt) {
    const auto u = static_cast<VertexId>(2 + rng.below(n - 2));
    const auto w = static_cast<VertexId>(rng.below(static_cast<std::uint64_t>(u)));
    if (!present.emplace(u, w).second) continue;
    edges.push_back({u, w, 0.0, false});
    ++added;
  }
  for (Edge& e : edges)
    e.failure_rate = rng.bernoulli(p.high_rate_fraction) ? p.high_failure_rate : p.low_failure_rate;

  std::vector<std::string> labels(n);
  for (std::size_t v = 0; v < n; ++v) labels[v] = std::to_string(v);
  const AttackGraph probe(labels, edges, {}, 0);
  const Assignment a = draw_entries_and_blockable(n, edges, probe, p.n_entries, p.pool(), rng);
  for (std::size_t i = 0; i < edges.size(); ++i) edges[i].blockable = a.blockable[i];
  return AttackGraph(std::move(labels), std::move(edges), a.entries, 0);
}

AttackGraph redraw_entries_and_blockable(const AttackGraph& topology, std::size_t n_entries,
                                         std::size_t entry_pool_size, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t pool = entry_pool_size == 0 ? 2 * n_entries : entry_pool_size;
  std::vector<Edge> edges = topology.edges();
  const AttackGraph probe(topology.labels(), edges, {}, topology.da());
  const Assignment a = draw_entries_and_blockable(topology.num_vertices(), edges, probe, n_entries, pool, rng);
  for (std::size_t i = 0; i < edges.size(); ++i) edges[i].blockable = a.blockable[i];
  return AttackGraph(topology.labels(), std::move(edges), a.entries, topology.da());
}

}  // namespace adi
