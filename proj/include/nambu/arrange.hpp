#pragma once

// Dual signed weighted multigraph of (domain, zero locus), canonical codes
// for weighted signed trees, equivalence verdicts, and exhaustive signed
// tree enumeration by Prufer sequences.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "nambu/errors.hpp"
#include "nambu/invariants.hpp"

namespace nambu {

struct SignedWeightedGraph {
  struct Vertex {
    int id = 0;
    int sign = 1;
  };
  struct Edge {
    int a = 0, b = 0;
    double weight = 0;
    int component = -1;
  };
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  double global_volume = 0;
  DomainKind domain = DomainKind::sphere2;

  bool is_tree() const {
    if (edges.size() + 1 != vertices.size()) return false;
    for (const Edge& e : edges)
      if (e.a == e.b) return false;
    // Acyclicity follows from the edge count once connectivity holds; check
    // connectivity with a scan.
    if (vertices.empty()) return false;
    std::vector<std::vector<int>> adj(vertices.size());
    std::map<int, int> index;
    for (std::size_t i = 0; i < vertices.size(); ++i) index[vertices[i].id] = static_cast<int>(i);
    for (const Edge& e : edges) {
      adj[index.at(e.a)].push_back(index.at(e.b));
      adj[index.at(e.b)].push_back(index.at(e.a));
    }
    std::vector<char> seen(vertices.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : adj[v])
        if (!seen[w]) {
          seen[w] = 1;
          ++count;
          stack.push_back(w);
        }
    }
    return count == vertices.size();
  }
};

struct CanonicalCode {
  std::string code;
  double weight_quantum = 0;
};

inline SignedWeightedGraph graph_from_report(const InvariantReport& rep) {
  SignedWeightedGraph g;
  g.domain = rep.domain;
  g.global_volume = rep.volume;
  for (std::size_t r = 0; r < rep.regions.signs.size(); ++r)
    g.vertices.push_back({static_cast<int>(r), rep.regions.signs[r]});
  for (const auto& adj : rep.regions.adjacency) {
    SignedWeightedGraph::Edge e;
    e.a = adj.positive_region;
    e.b = adj.negative_region;
    e.component = adj.component;
    e.weight = rep.components.at(adj.component).period;
    g.edges.push_back(e);
  }
  return g;
}

// One vertex per region carrying its sign, one edge per zero component
// weighted by its modular period, the regularized volume attached globally.
inline SignedWeightedGraph build_graph(const InvariantReport& rep, const RegionMap& rm) {
  if (rm.region_signs != rep.regions.signs ||
      rm.adjacency.size() != rep.regions.adjacency.size())
    throw ValidationError("report and region map come from different runs");
  return graph_from_report(rep);
}

namespace arrange_detail {

// AHU-style canonical code for a signed tree given as index-based edges.
// Weights are quantized to integers; quantum <= 0 drops weights entirely
// (used for unweighted signed-tree classes).
inline std::string tree_code(int n, const std::vector<std::array<int, 2>>& edges,
                             const std::vector<int>& signs,
                             const std::vector<double>& weights, double quantum) {
  std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, edge)
  for (std::size_t e = 0; e < edges.size(); ++e) {
    adj[edges[e][0]].push_back({edges[e][1], static_cast<int>(e)});
    adj[edges[e][1]].push_back({edges[e][0], static_cast<int>(e)});
  }

  // Tree center via leaf stripping.
  std::vector<int> degree(n), order;
  for (int v = 0; v < n; ++v) degree[v] = static_cast<int>(adj[v].size());
  std::vector<int> layer;
  std::vector<char> removed(n, 0);
  int remaining = n;
  for (int v = 0; v < n; ++v)
    if (degree[v] <= 1) layer.push_back(v);
  while (remaining > 2) {
    std::vector<int> next;
    for (int v : layer) {
      removed[v] = 1;
      --remaining;
      for (auto [w, e] : adj[v])
        if (!removed[w] && --degree[w] == 1) next.push_back(w);
    }
    layer = std::move(next);
  }
  std::vector<int> centers;
  for (int v = 0; v < n; ++v)
    if (!removed[v]) centers.push_back(v);

  auto quantize = [&](double w) -> long long { return std::llround(w / quantum); };

  std::function<std::string(int, int)> encode = [&](int v, int parent) -> std::string {
    std::vector<std::string> entries;
    for (auto [w, e] : adj[v]) {
      if (w == parent) continue;
      std::string entry = "[";
      if (quantum > 0) entry += std::to_string(quantize(weights[e])) + "|";
      entry += encode(w, v);
      entry += "]";
      entries.push_back(std::move(entry));
    }
    std::sort(entries.begin(), entries.end());
    std::string out = "(";
    out += signs[v] > 0 ? '+' : '-';
    for (const auto& s : entries) out += s;
    out += ')';
    return out;
  };

  std::string best;
  for (std::size_t ci = 0; ci < centers.size(); ++ci) {
    std::string code = encode(centers[ci], -1);
    if (ci == 0 || code < best) best = code;
  }
  return best;
}

struct IndexedTree {
  int n = 0;
  std::vector<std::array<int, 2>> edges;
  std::vector<int> signs;
  std::vector<double> weights;
};

inline IndexedTree index_graph(const SignedWeightedGraph& g) {
  IndexedTree t;
  t.n = static_cast<int>(g.vertices.size());
  std::map<int, int> index;
  for (int i = 0; i < t.n; ++i) {
    index[g.vertices[i].id] = i;
    t.signs.push_back(g.vertices[i].sign);
  }
  for (const auto& e : g.edges) {
    t.edges.push_back({index.at(e.a), index.at(e.b)});
    t.weights.push_back(e.weight);
  }
  return t;
}

}  // namespace arrange_detail

inline CanonicalCode canonical_code(const SignedWeightedGraph& g, double weight_quantum) {
  if (!g.is_tree())
    throw NotATree("canonical codes are defined for trees only; this graph has " +
                   std::to_string(g.vertices.size()) + " vertices and " +
                   std::to_string(g.edges.size()) + " edges");
  arrange_detail::IndexedTree t = arrange_detail::index_graph(g);
  return {arrange_detail::tree_code(t.n, t.edges, t.signs, t.weights, weight_quantum),
          weight_quantum};
}

enum class Verdict {
  equivalent_orientation_preserving,
  equivalent_orientation_reversing,
  inequivalent,
  undecided,
};

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::equivalent_orientation_preserving: return "equivalent_orientation_preserving";
    case Verdict::equivalent_orientation_reversing: return "equivalent_orientation_reversing";
    case Verdict::inequivalent: return "inequivalent";
    case Verdict::undecided: return "undecided";
  }
  return "?";
}

struct EquivalenceResult {
  Verdict verdict = Verdict::undecided;
  std::string reason;
};

namespace arrange_detail {

inline SignedWeightedGraph flipped(SignedWeightedGraph g) {
  for (auto& v : g.vertices) v.sign = -v.sign;
  return g;
}

// Isomorphism-invariant multiset summary used for torus multigraphs.
inline std::string multigraph_summary(const SignedWeightedGraph& g, double quantum) {
  auto q = [&](double w) { return std::to_string(std::llround(w / quantum)); };
  std::map<int, std::vector<std::string>> incident;
  std::map<int, int> sign_of;
  for (const auto& v : g.vertices) {
    sign_of[v.id] = v.sign;
    incident[v.id];
  }
  std::vector<std::string> edge_keys;
  for (const auto& e : g.edges) {
    std::string w = q(e.weight);
    incident[e.a].push_back(w);
    incident[e.b].push_back(w);
    int sa = sign_of.at(e.a), sb = sign_of.at(e.b);
    edge_keys.push_back(std::string(1, std::min(sa, sb) > 0 ? '+' : '-') +
                        std::string(1, std::max(sa, sb) > 0 ? '+' : '-') + w);
  }
  std::vector<std::string> vertex_keys;
  for (auto& [id, ws] : incident) {
    std::sort(ws.begin(), ws.end());
    std::string key(1, sign_of.at(id) > 0 ? '+' : '-');
    for (const auto& w : ws) key += "," + w;
    vertex_keys.push_back(std::move(key));
  }
  std::sort(vertex_keys.begin(), vertex_keys.end());
  std::sort(edge_keys.begin(), edge_keys.end());
  std::string out = "V{";
  for (const auto& k : vertex_keys) out += k + ";";
  out += "}E{";
  for (const auto& k : edge_keys) out += k + ";";
  out += "}";
  return out;
}

}  // namespace arrange_detail

// Equivalence decision. On the sphere the dual tree plus the volume decides;
// on tori only the invariant multisets are compared, so agreement yields an
// honest `undecided` (the diffeomorphism type of the arrangement is an input
// this artifact does not certify there).
inline EquivalenceResult is_equivalent(const InvariantReport& r1, const InvariantReport& r2,
                                       double tol_weights, double tol_volume) {
  if (r1.domain != r2.domain)
    throw DomainMismatch("reports compare different domain kinds");
  SignedWeightedGraph g1 = graph_from_report(r1);
  SignedWeightedGraph g2 = graph_from_report(r2);
  double max_w = 0;
  for (const auto& e : g1.edges) max_w = std::max(max_w, e.weight);
  for (const auto& e : g2.edges) max_w = std::max(max_w, e.weight);
  double quantum = max_w > 0 ? tol_weights * max_w : 1.0;

  if (r1.domain == DomainKind::sphere2) {
    std::string c1 = canonical_code(g1, quantum).code;
    std::string c2 = canonical_code(g2, quantum).code;
    if (c1 == c2 && std::abs(g1.global_volume - g2.global_volume) <= tol_volume)
      return {Verdict::equivalent_orientation_preserving, ""};
    std::string c2f = canonical_code(arrange_detail::flipped(g2), quantum).code;
    if (c1 == c2f && std::abs(g1.global_volume + g2.global_volume) <= tol_volume)
      return {Verdict::equivalent_orientation_reversing, ""};
    if (c1 != c2 && c1 != c2f) {
      std::string u1 = canonical_code(g1, 0.0).code;
      std::string u2 = canonical_code(g2, 0.0).code;
      std::string u2f = canonical_code(arrange_detail::flipped(g2), 0.0).code;
      if (u1 != u2 && u1 != u2f) return {Verdict::inequivalent, "tree shape"};
      return {Verdict::inequivalent, "weights"};
    }
    return {Verdict::inequivalent, "volume"};
  }

  std::string s1 = arrange_detail::multigraph_summary(g1, quantum);
  std::string s2 = arrange_detail::multigraph_summary(g2, quantum);
  if (s1 == s2 && std::abs(g1.global_volume - g2.global_volume) <= tol_volume)
    return {Verdict::undecided, "graph invariants and volume match"};
  std::string s2f = arrange_detail::multigraph_summary(arrange_detail::flipped(g2), quantum);
  if (s1 == s2f && std::abs(g1.global_volume + g2.global_volume) <= tol_volume)
    return {Verdict::undecided, "graph invariants match after an orientation flip"};
  if (s1 != s2 && s1 != s2f) return {Verdict::inequivalent, "graph invariants"};
  return {Verdict::inequivalent, "volume"};
}

struct SignedTreeClasses {
  long count = 0;
  std::vector<std::string> codes;
};

// Exhaustive enumeration of signed-tree isomorphism classes on k+1 vertices:
// every labeled tree via its Prufer sequence, both proper 2-colorings,
// deduplicated by canonical code.
inline SignedTreeClasses enumerate_signed_trees(int k, int max_k = 9) {
  if (k < 1 || k > max_k)
    throw KTooLarge("k must lie in [1, " + std::to_string(max_k) + "]");
  const int n = k + 1;
  std::set<std::string> codes;

  auto add_tree = [&](const std::vector<std::array<int, 2>>& edges) {
    std::vector<std::vector<int>> adj(n);
    for (const auto& e : edges) {
      adj[e[0]].push_back(e[1]);
      adj[e[1]].push_back(e[0]);
    }
    std::vector<int> parity(n, -1);
    std::vector<int> stack{0};
    parity[0] = 0;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : adj[v])
        if (parity[w] < 0) {
          parity[w] = parity[v] ^ 1;
          stack.push_back(w);
        }
    }
    std::vector<double> unit_weights(edges.size(), 1.0);
    for (int flip = 0; flip < 2; ++flip) {
      std::vector<int> signs(n);
      for (int v = 0; v < n; ++v) signs[v] = (parity[v] ^ flip) ? -1 : 1;
      codes.insert(arrange_detail::tree_code(n, edges, signs, unit_weights, 0.0));
    }
  };

  if (n == 2) {
    add_tree({{{0, 1}}});
  } else {
    std::vector<int> prufer(n - 2, 0);
    bool done = false;
    while (!done) {
      // Decode the Prufer sequence.
      std::vector<int> degree(n, 1);
      for (int p : prufer) ++degree[p];
      std::vector<std::array<int, 2>> edges;
      std::vector<int> deg = degree;
      for (int p : prufer) {
        int leaf = 0;
        while (deg[leaf] != 1) ++leaf;
        edges.push_back({p, leaf});
        --deg[leaf];
        --deg[p];
      }
      int u = 0;
      while (deg[u] != 1) ++u;
      int v = u + 1;
      while (deg[v] != 1) ++v;
      edges.push_back({u, v});
      add_tree(edges);

      // Next sequence.
      int pos = n - 3;
      while (pos >= 0) {
        if (++prufer[pos] < n) break;
        prufer[pos] = 0;
        --pos;
      }
      done = pos < 0;
    }
  }

  SignedTreeClasses out;
  out.codes.assign(codes.begin(), codes.end());
  out.count = static_cast<long>(out.codes.size());
  return out;
}

// DOT rendering: signs as vertex labels, weights at 6 significant digits,
// the regularized volume on the graph label.
inline std::string to_dot(const SignedWeightedGraph& g) {
  char buf[64];
  std::string out = "graph arrangement {\n";
  std::snprintf(buf, sizeof buf, "%.6g", g.global_volume);
  out += "  label=\"volume = " + std::string(buf) + "\";\n";
  for (const auto& v : g.vertices) {
    out += "  r" + std::to_string(v.id) + " [label=\"" + (v.sign > 0 ? "+" : "-") + "\"];\n";
  }
  for (const auto& e : g.edges) {
    std::snprintf(buf, sizeof buf, "%.6g", e.weight);
    out += "  r" + std::to_string(e.a) + " -- r" + std::to_string(e.b) +
           " [label=\"" + buf + "\"];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace nambu
