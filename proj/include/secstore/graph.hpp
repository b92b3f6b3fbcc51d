#pragma once

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "secstore/errors.hpp"

namespace secstore {

// Labeled undirected graph: K source symbols, unordered edges each carrying a
// label set that is empty or has exactly M members of {1..K}. Node order is
// the order of first appearance, which fixes all downstream numbering.
struct StorageGraph {
  int K = 0;
  int M = 0;
  std::vector<std::string> nodes;

  struct Edge {
    int a = 0;              // node indices, a < b
    int b = 0;
    std::vector<int> label;  // sorted ascending; empty means unqualified
    bool qualified() const { return !label.empty(); }
    bool operator==(const Edge&) const = default;
  };
  std::vector<Edge> edges;

  int node_index(std::string_view name) const {
    for (size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i] == name) return int(i);
    return -1;
  }

  int find_edge(int a, int b) const {
    if (a > b) std::swap(a, b);
    for (size_t e = 0; e < edges.size(); ++e)
      if (edges[e].a == a && edges[e].b == b) return int(e);
    return -1;
  }

  // edge indices incident to each node
  std::vector<std::vector<int>> incidence() const {
    std::vector<std::vector<int>> inc(nodes.size());
    for (size_t e = 0; e < edges.size(); ++e) {
      inc[edges[e].a].push_back(int(e));
      inc[edges[e].b].push_back(int(e));
    }
    return inc;
  }

  bool operator==(const StorageGraph&) const = default;
};

// Unordered node pair naming an edge, canonicalized to node order.
struct EdgeRef {
  std::string a;
  std::string b;
  bool operator==(const EdgeRef&) const = default;
};

inline EdgeRef edge_ref(const StorageGraph& g, int edge_index) {
  const auto& e = g.edges[edge_index];
  return EdgeRef{g.nodes[e.a], g.nodes[e.b]};
}

inline int resolve_edge(const StorageGraph& g, const EdgeRef& ref) {
  int a = g.node_index(ref.a);
  int b = g.node_index(ref.b);
  if (a < 0 || b < 0) throw PreconditionError("unknown node in edge reference");
  int e = g.find_edge(a, b);
  if (e < 0) throw PreconditionError("no such edge {" + ref.a + "," + ref.b + "}");
  return e;
}

// Invariant checks shared by the parser and programmatic construction.
// Throws ValidationError naming the violated invariant.
inline void validate_graph(const StorageGraph& g) {
  if (g.K < 1) throw ValidationError("K must be at least 1");
  if (g.M < 1) throw ValidationError("M must be at least 1");
  if (g.edges.empty()) throw ValidationError("graph has no edges");
  std::set<std::string> names(g.nodes.begin(), g.nodes.end());
  if (names.size() != g.nodes.size()) throw ValidationError("duplicate node identifier");

  std::set<std::pair<int, int>> seen;
  std::vector<int> degree(g.nodes.size(), 0);
  for (const auto& e : g.edges) {
    if (e.a < 0 || e.b < 0 || size_t(e.a) >= g.nodes.size() || size_t(e.b) >= g.nodes.size())
      throw ValidationError("edge endpoint out of range");
    if (e.a == e.b)
      throw ValidationError("self-loop at node " + g.nodes[e.a]);
    if (e.a > e.b)
      throw ValidationError("edge endpoints not canonicalized");
    if (!seen.insert({e.a, e.b}).second)
      throw ValidationError("duplicate edge {" + g.nodes[e.a] + "," + g.nodes[e.b] + "}");
    if (!e.label.empty() && int(e.label.size()) != g.M)
      throw ValidationError("label cardinality " + std::to_string(e.label.size()) +
                            " not in {0, " + std::to_string(g.M) + "} on edge {" +
                            g.nodes[e.a] + "," + g.nodes[e.b] + "}");
    if (!std::is_sorted(e.label.begin(), e.label.end()))
      throw ValidationError("label not sorted");
    for (size_t i = 0; i < e.label.size(); ++i) {
      int k = e.label[i];
      if (k < 1 || k > g.K)
        throw ValidationError("source index " + std::to_string(k) + " out of range [1, " +
                              std::to_string(g.K) + "]");
      if (i > 0 && e.label[i - 1] == k)
        throw ValidationError("repeated source index " + std::to_string(k) + " in label");
    }
    ++degree[e.a];
    ++degree[e.b];
  }
  for (size_t n = 0; n < g.nodes.size(); ++n)
    if (degree[n] == 0) throw ValidationError("isolated node " + g.nodes[n]);
}

namespace detail {

inline bool valid_node_token(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

inline int parse_int_token(std::string_view s, int line, const std::string& what) {
  if (s.empty()) throw ParseError(line, "empty " + what);
  long long v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw ParseError(line, "bad " + what + " '" + std::string(s) + "'");
    v = v * 10 + (c - '0');
    if (v > (1ll << 40)) throw ParseError(line, what + " too large");
  }
  return int(v);
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.emplace_back(s.substr(start, i - start));
  }
  return out;
}

}  // namespace detail

// Build a graph from (nodeA, nodeB, label) triples. Node order is first
// appearance in the edge list; labels are sorted; the result is validated.
inline StorageGraph make_graph(
    int K, int M,
    const std::vector<std::tuple<std::string, std::string, std::vector<int>>>& edge_list) {
  StorageGraph g;
  g.K = K;
  g.M = M;
  auto intern = [&](const std::string& name) {
    int idx = g.node_index(name);
    if (idx >= 0) return idx;
    g.nodes.push_back(name);
    return int(g.nodes.size()) - 1;
  };
  for (const auto& [na, nb, label] : edge_list) {
    StorageGraph::Edge e;
    e.a = intern(na);
    e.b = intern(nb);
    if (e.a > e.b) std::swap(e.a, e.b);
    e.label = label;
    std::sort(e.label.begin(), e.label.end());
    g.edges.push_back(std::move(e));
  }
  validate_graph(g);
  return g;
}

// Line-oriented text format:
//   # comment to end of line; blank lines ignored
//   K <int>        (exactly once, before any edge)
//   M <int>        (exactly once, before any edge)
//   edge <nodeA> <nodeB> <labels>   with <labels> = '-' or e.g. '1,3'
inline StorageGraph parse_graph(const std::string& text) {
  StorageGraph g;
  bool have_k = false, have_m = false;
  std::set<std::pair<int, int>> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    auto tok = detail::split_ws(line);
    if (tok.empty()) continue;

    if (tok[0] == "K" || tok[0] == "M") {
      bool& have = tok[0] == "K" ? have_k : have_m;
      if (tok.size() != 2) throw ParseError(lineno, tok[0] + " header needs one value");
      if (have) throw ParseError(lineno, "duplicate " + tok[0] + " header");
      if (!g.edges.empty()) throw ParseError(lineno, tok[0] + " header after first edge");
      int v = detail::parse_int_token(tok[1], lineno, tok[0] + " value");
      if (v < 1) throw ValidationError(tok[0] + " must be at least 1");
      (tok[0] == "K" ? g.K : g.M) = v;
      have = true;
      continue;
    }

    if (tok[0] == "edge") {
      if (!have_k || !have_m)
        throw ValidationError("edge on line " + std::to_string(lineno) +
                              " before K/M headers");
      if (tok.size() != 4) throw ParseError(lineno, "edge line needs 3 fields");
      if (!detail::valid_node_token(tok[1]) || !detail::valid_node_token(tok[2]))
        throw ParseError(lineno, "node identifiers must be letters, digits or underscore");
      if (tok[1] == tok[2])
        throw ValidationError("self-loop at node " + tok[1] + " on line " +
                              std::to_string(lineno));
      auto intern = [&](const std::string& name) {
        int idx = g.node_index(name);
        if (idx >= 0) return idx;
        g.nodes.push_back(name);
        return int(g.nodes.size()) - 1;
      };
      StorageGraph::Edge e;
      e.a = intern(tok[1]);
      e.b = intern(tok[2]);
      if (e.a > e.b) std::swap(e.a, e.b);
      if (!seen.insert({e.a, e.b}).second)
        throw ValidationError("duplicate edge {" + tok[1] + "," + tok[2] + "} on line " +
                              std::to_string(lineno));
      if (tok[3] != "-") {
        std::string item;
        std::istringstream labels(tok[3]);
        while (std::getline(labels, item, ',')) {
          int k = detail::parse_int_token(item, lineno, "source index");
          if (k < 1 || k > g.K)
            throw ValidationError("source index " + std::to_string(k) +
                                  " out of range [1, " + std::to_string(g.K) +
                                  "] on line " + std::to_string(lineno));
          if (std::find(e.label.begin(), e.label.end(), k) != e.label.end())
            throw ValidationError("repeated source index " + std::to_string(k) +
                                  " on line " + std::to_string(lineno));
          e.label.push_back(k);
        }
        if (tok[3].empty() || tok[3].back() == ',')
          throw ParseError(lineno, "bad label list '" + tok[3] + "'");
        std::sort(e.label.begin(), e.label.end());
        if (int(e.label.size()) != g.M)
          throw ValidationError("label cardinality " + std::to_string(e.label.size()) +
                                " not in {0, " + std::to_string(g.M) + "} on line " +
                                std::to_string(lineno));
      }
      g.edges.push_back(std::move(e));
      continue;
    }

    throw ParseError(lineno, "unknown directive '" + tok[0] + "'");
  }
  if (!have_k) throw ValidationError("missing K header");
  if (!have_m) throw ValidationError("missing M header");
  validate_graph(g);
  return g;
}

// Canonical text. parse_graph(emit_graph(g)) == g for every graph whose node
// order is first-appearance order of its edge list (all graphs produced by
// parse_graph or make_graph).
inline std::string emit_graph(const StorageGraph& g) {
  std::string out;
  out += "K " + std::to_string(g.K) + "\n";
  out += "M " + std::to_string(g.M) + "\n";
  for (const auto& e : g.edges) {
    out += "edge " + g.nodes[e.a] + " " + g.nodes[e.b] + " ";
    if (e.label.empty()) {
      out += "-";
    } else {
      for (size_t i = 0; i < e.label.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(e.label[i]);
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace secstore
