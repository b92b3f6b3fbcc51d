#pragma once

#include <algorithm>
#include <deque>
#include <string_view>
#include <vector>

#include "secstore/graph.hpp"

namespace secstore {

// One source symbol's view of the graph: every edge is qualified (its label
// demands this source) or unqualified (it does not).
struct CharacteristicView {
  int source = 0;
  std::vector<int> qualified;    // edge indices, input order
  std::vector<int> unqualified;  // complement, input order
};

inline CharacteristicView characteristic_view(const StorageGraph& g, int k) {
  if (k < 1 || k > g.K)
    throw PreconditionError("source index " + std::to_string(k) + " out of range [1, " +
                            std::to_string(g.K) + "]");
  CharacteristicView view;
  view.source = k;
  for (size_t e = 0; e < g.edges.size(); ++e) {
    const auto& label = g.edges[e].label;
    if (std::binary_search(label.begin(), label.end(), k))
      view.qualified.push_back(int(e));
    else
      view.unqualified.push_back(int(e));
  }
  return view;
}

// Partition of the nodes into components of the unqualified subgraph.
// Ids run 1..count and are assigned by BFS seeded in node order, so two
// nodes share an id exactly when an unqualified path connects them; a node
// touching no unqualified edge is a singleton component.
struct ComponentPartition {
  std::vector<int> id;  // per node, 1-based
  int count = 0;
};

inline ComponentPartition unqualified_components(const StorageGraph& g,
                                                 const CharacteristicView& view) {
  std::vector<std::vector<int>> adj(g.nodes.size());
  for (int e : view.unqualified) {
    adj[g.edges[e].a].push_back(g.edges[e].b);
    adj[g.edges[e].b].push_back(g.edges[e].a);
  }
  ComponentPartition part;
  part.id.assign(g.nodes.size(), 0);
  for (size_t start = 0; start < g.nodes.size(); ++start) {
    if (part.id[start] != 0) continue;
    ++part.count;
    std::deque<int> queue{int(start)};
    part.id[start] = part.count;
    while (!queue.empty()) {
      int n = queue.front();
      queue.pop_front();
      for (int nb : adj[n]) {
        if (part.id[nb] == 0) {
          part.id[nb] = part.count;
          queue.push_back(nb);
        }
      }
    }
  }
  return part;
}

// Qualified edges whose endpoints fall in one unqualified component, i.e.
// whose endpoints are also joined by an unqualified path. These are the
// structural obstruction to the extremal key rate.
inline std::vector<int> internal_qualified_edges(const StorageGraph& g,
                                                 const CharacteristicView& view,
                                                 const ComponentPartition& comps) {
  std::vector<int> internal;
  for (int e : view.qualified)
    if (comps.id[g.edges[e].a] == comps.id[g.edges[e].b]) internal.push_back(e);
  return internal;
}

// Intersection of the labels of all edges incident to the node.
inline std::vector<int> common_sources(const StorageGraph& g, int node) {
  if (node < 0 || size_t(node) >= g.nodes.size())
    throw PreconditionError("node index out of range");
  std::vector<int> common;
  bool first = true;
  for (const auto& e : g.edges) {
    if (e.a != node && e.b != node) continue;
    if (first) {
      common = e.label;
      first = false;
    } else {
      std::vector<int> next;
      std::set_intersection(common.begin(), common.end(), e.label.begin(), e.label.end(),
                            std::back_inserter(next));
      common = std::move(next);
    }
    if (common.empty()) break;
  }
  return common;
}

inline std::vector<int> common_sources(const StorageGraph& g, std::string_view node_name) {
  int idx = g.node_index(node_name);
  if (idx < 0) throw PreconditionError("unknown node " + std::string(node_name));
  return common_sources(g, idx);
}

// Full structural decomposition: per-source component partitions and
// internal qualified edges, per-node common sources, degenerate node set.
//
// Each per-source record carries two variants of the component data. The
// plain ones apply the definitions to the whole graph. The restricted ones
// apply them to the non-degenerate subgraph (degenerate nodes removed along
// with their edges); the extremal-rate theory is stated there, since a
// degenerate node satisfies all of its constraints by storing its common
// sources verbatim and an unqualified path routed through such nodes forces
// no alignment between its endpoints.
struct ComponentAnalysis {
  struct PerSource {
    CharacteristicView view;
    ComponentPartition components;
    std::vector<int> internal_qualified;  // edge indices
    // Non-degenerate subgraph variants: degenerate nodes carry id 0.
    ComponentPartition restricted_components;
    std::vector<int> restricted_internal;
  };
  std::vector<PerSource> per_source;    // index k-1
  std::vector<std::vector<int>> common; // per node
  std::vector<bool> degenerate;         // per node

  std::vector<int> nondegenerate_nodes() const {
    std::vector<int> out;
    for (size_t n = 0; n < degenerate.size(); ++n)
      if (!degenerate[n]) out.push_back(int(n));
    return out;
  }

  std::vector<int> degenerate_nodes() const {
    std::vector<int> out;
    for (size_t n = 0; n < degenerate.size(); ++n)
      if (degenerate[n]) out.push_back(int(n));
    return out;
  }

  int max_component_count() const {
    int m = 0;
    for (const auto& ps : per_source) m = std::max(m, ps.components.count);
    return m;
  }

  int max_restricted_component_count() const {
    int m = 0;
    for (const auto& ps : per_source) m = std::max(m, ps.restricted_components.count);
    return m;
  }

  bool any_internal_qualified() const {
    for (const auto& ps : per_source)
      if (!ps.internal_qualified.empty()) return true;
    return false;
  }

  bool any_restricted_internal() const {
    for (const auto& ps : per_source)
      if (!ps.restricted_internal.empty()) return true;
    return false;
  }
};

namespace detail {

// Components of the unqualified subgraph induced on non-degenerate nodes;
// degenerate nodes get id 0.
inline ComponentPartition restricted_unqualified_components(const StorageGraph& g,
                                                            const CharacteristicView& view,
                                                            const std::vector<bool>& degenerate) {
  std::vector<std::vector<int>> adj(g.nodes.size());
  for (int e : view.unqualified) {
    const auto& edge = g.edges[e];
    if (degenerate[edge.a] || degenerate[edge.b]) continue;
    adj[edge.a].push_back(edge.b);
    adj[edge.b].push_back(edge.a);
  }
  ComponentPartition part;
  part.id.assign(g.nodes.size(), 0);
  for (size_t start = 0; start < g.nodes.size(); ++start) {
    if (degenerate[start] || part.id[start] != 0) continue;
    ++part.count;
    std::deque<int> queue{int(start)};
    part.id[start] = part.count;
    while (!queue.empty()) {
      int n = queue.front();
      queue.pop_front();
      for (int nb : adj[n]) {
        if (part.id[nb] == 0) {
          part.id[nb] = part.count;
          queue.push_back(nb);
        }
      }
    }
  }
  return part;
}

}  // namespace detail

inline ComponentAnalysis analyze(const StorageGraph& g) {
  ComponentAnalysis a;
  a.common.reserve(g.nodes.size());
  for (size_t n = 0; n < g.nodes.size(); ++n) a.common.push_back(common_sources(g, int(n)));
  // A node is degenerate when every incident edge carries exactly its common
  // source set, i.e. all incident labels coincide.
  a.degenerate.assign(g.nodes.size(), true);
  for (const auto& e : g.edges) {
    if (e.label != a.common[e.a]) a.degenerate[e.a] = false;
    if (e.label != a.common[e.b]) a.degenerate[e.b] = false;
  }
  a.per_source.reserve(g.K);
  for (int k = 1; k <= g.K; ++k) {
    ComponentAnalysis::PerSource ps;
    ps.view = characteristic_view(g, k);
    ps.components = unqualified_components(g, ps.view);
    ps.internal_qualified = internal_qualified_edges(g, ps.view, ps.components);
    ps.restricted_components =
        detail::restricted_unqualified_components(g, ps.view, a.degenerate);
    for (int e : ps.view.qualified) {
      const auto& edge = g.edges[e];
      if (!a.degenerate[edge.a] && !a.degenerate[edge.b] &&
          ps.restricted_components.id[edge.a] == ps.restricted_components.id[edge.b])
        ps.restricted_internal.push_back(e);
    }
    a.per_source.push_back(std::move(ps));
  }
  return a;
}

}  // namespace secstore
