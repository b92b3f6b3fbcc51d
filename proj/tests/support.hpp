#pragma once

// Shared test machinery: seeded random instance generators for the three
// regime classes (plus fully arbitrary graphs), and from-scratch
// reimplementations of the structural predicates used as independent oracles.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "secstore/secstore.hpp"

namespace testsupport {

using namespace secstore;

using EdgeTriple = std::tuple<std::string, std::string, std::vector<int>>;

// ---------- independent structural predicates ----------

// Common sources by direct intersection, no analysis module involved.
inline std::vector<int> direct_common(const StorageGraph& g, int node) {
  std::vector<int> common;
  bool first = true;
  for (const auto& e : g.edges) {
    if (e.a != node && e.b != node) continue;
    std::vector<int> label = e.label;
    if (first) {
      common = label;
      first = false;
    } else {
      std::vector<int> next;
      for (int k : common)
        if (std::find(label.begin(), label.end(), k) != label.end()) next.push_back(k);
      common = next;
    }
  }
  return common;
}

inline std::vector<bool> direct_degenerate(const StorageGraph& g) {
  std::vector<bool> deg(g.nodes.size(), true);
  for (size_t n = 0; n < g.nodes.size(); ++n) {
    auto common = direct_common(g, int(n));
    for (const auto& e : g.edges)
      if ((e.a == int(n) || e.b == int(n)) && e.label != common) deg[n] = false;
  }
  return deg;
}

// Keyless union condition checked edge by edge.
inline bool keyless_condition(const StorageGraph& g) {
  for (const auto& e : g.edges) {
    std::set<int> u;
    for (int k : direct_common(g, e.a)) u.insert(k);
    for (int k : direct_common(g, e.b)) u.insert(k);
    std::vector<int> uni(u.begin(), u.end());
    if (uni != e.label) return false;
  }
  return true;
}

// The rate-1 structural condition for M = 1: non-degenerate subgraph
// nonempty, and no demanded pair of non-degenerate nodes is joined by a path
// of edges avoiding that source within the non-degenerate subgraph.
// Fresh DFS per (source, edge); shares nothing with analyze().
inline bool rate_one_condition(const StorageGraph& g) {
  auto deg = direct_degenerate(g);
  bool any_nondeg = false;
  for (bool d : deg) any_nondeg = any_nondeg || !d;
  if (!any_nondeg) return false;

  auto reaches = [&](int from, int to, int banned_source) {
    std::vector<bool> seen(g.nodes.size(), false);
    std::vector<int> stack{from};
    seen[from] = true;
    while (!stack.empty()) {
      int n = stack.back();
      stack.pop_back();
      if (n == to) return true;
      for (const auto& e : g.edges) {
        if (std::find(e.label.begin(), e.label.end(), banned_source) != e.label.end()) continue;
        if (deg[e.a] || deg[e.b]) continue;
        int other = -1;
        if (e.a == n) other = e.b;
        if (e.b == n) other = e.a;
        if (other >= 0 && !seen[other]) {
          seen[other] = true;
          stack.push_back(other);
        }
      }
    }
    return false;
  };

  for (int k = 1; k <= g.K; ++k)
    for (const auto& e : g.edges) {
      if (std::find(e.label.begin(), e.label.end(), k) == e.label.end()) continue;
      if (deg[e.a] || deg[e.b]) continue;
      if (reaches(e.a, e.b, k)) return false;
    }
  return true;
}

// ---------- fixed instances ----------

inline StorageGraph path_conflict_graph() {  // SubExtremal showcase, all nodes non-degenerate
  return make_graph(2, 1,
                    {{"V1", "V3", {1}}, {"V1", "V2", {2}}, {"V2", "V4", {}}, {"V3", "V4", {2}}});
}

inline StorageGraph degenerate_bridge_graph() {  // same demand pinned on the whole path
  return make_graph(2, 1,
                    {{"V1", "V3", {1}}, {"V1", "V2", {2}}, {"V2", "V4", {2}}, {"V3", "V4", {2}}});
}

inline StorageGraph cycle4_graph() {
  return make_graph(2, 1,
                    {{"V1", "V2", {1}}, {"V2", "V3", {2}}, {"V3", "V4", {1}}, {"V4", "V1", {2}}});
}

inline StorageGraph twin_pairs_graph() {  // extremal class with M = 2
  return make_graph(3, 2,
                    {{"V1", "V2", {}},
                     {"V3", "V4", {}},
                     {"V5", "V6", {}},
                     {"V7", "V8", {}},
                     {"V1", "V3", {1, 2}},
                     {"V2", "V5", {1, 3}},
                     {"V1", "V7", {2, 3}},
                     {"V4", "V6", {2, 3}},
                     {"V3", "V7", {1, 3}},
                     {"V6", "V8", {1, 2}}});
}

inline StorageGraph keyless_overlap_graph() {  // keyless with overlapping common sources
  return make_graph(3, 2,
                    {{"V1", "V2", {1, 2}},
                     {"V1", "V3", {1, 2}},
                     {"V2", "V4", {1, 2}},
                     {"V3", "V5", {1, 3}},
                     {"V5", "V6", {1, 3}}});
}

inline StorageGraph all_degenerate_graph() {  // two single-demand clusters
  return make_graph(2, 1,
                    {{"V1", "V2", {1}},
                     {"V2", "V3", {1}},
                     {"V3", "V1", {1}},
                     {"V4", "V5", {2}},
                     {"V5", "V6", {2}},
                     {"V6", "V7", {2}},
                     {"V7", "V4", {2}}});
}

// ---------- random generators ----------

// Arbitrary valid graph: random labels, no class targeted.
inline StorageGraph random_valid_graph(SplitMix64& rng) {
  while (true) {
    int k = 1 + int(rng.below(4));
    int m = 1 + int(rng.below(uint64_t(std::min(k, 2))));
    int n = 2 + int(rng.below(6));
    std::vector<EdgeTriple> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (rng.below(2) != 0) continue;
        std::vector<int> label;
        if (rng.below(5) >= 2) {
          std::vector<int> pool(k);
          for (int s = 0; s < k; ++s) pool[s] = s + 1;
          for (int s = 0; s < m; ++s) std::swap(pool[s], pool[s + rng.below(uint64_t(k - s))]);
          label.assign(pool.begin(), pool.begin() + m);
          std::sort(label.begin(), label.end());
        }
        edges.emplace_back("n" + std::to_string(i), "n" + std::to_string(j), label);
      }
    if (edges.empty()) continue;
    return make_graph(k, m, edges);
  }
}

// Extremal-class generator. Nodes are assigned one of a few component
// profiles (a value in {1,2} per source); a demanded edge may join two
// profiles differing in exactly M coordinates (the differing set is the
// label), an unlabeled edge may join equal profiles. Qualified edges then
// always cross unqualified components, so no internal qualified edge can
// arise; classification filters out the rare keyless or uncharacterized
// leftovers.
inline std::optional<StorageGraph> random_extremal_graph(uint64_t seed, int M, int max_nodes,
                                                         int max_k) {
  SplitMix64 rng(seed);
  for (int attempt = 0; attempt < 400; ++attempt) {
    int k = std::min(M + 1, max_k) + int(rng.below(uint64_t(std::max(1, max_k - M))));
    k = std::min(k, max_k);
    if (k <= M) continue;
    int n = 4 + int(rng.below(uint64_t(std::max(1, max_nodes - 3))));
    int profiles = 2 + int(rng.below(3));
    std::vector<std::vector<int>> profile(profiles, std::vector<int>(k));
    for (auto& p : profile)
      for (int s = 0; s < k; ++s) p[s] = 1 + int(rng.below(2));
    std::vector<int> node_profile(n);
    for (int i = 0; i < n; ++i) node_profile[i] = int(rng.below(uint64_t(profiles)));

    std::vector<EdgeTriple> edges;
    bool any_qualified = false;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const auto& pi = profile[node_profile[i]];
        const auto& pj = profile[node_profile[j]];
        std::vector<int> differ;
        for (int s = 0; s < k; ++s)
          if (pi[s] != pj[s]) differ.push_back(s + 1);
        std::string a = "V" + std::to_string(i);
        std::string b = "V" + std::to_string(j);
        if (differ.empty()) {
          if (rng.below(4) < 3) edges.emplace_back(a, b, std::vector<int>{});
        } else if (int(differ.size()) == M) {
          if (rng.below(2) == 0) {
            edges.emplace_back(a, b, differ);
            any_qualified = true;
          }
        }
      }
    if (!any_qualified || edges.empty()) continue;
    StorageGraph g;
    try {
      // make_graph drops nothing, so prune isolated nodes by keeping only
      // referenced names (make_graph numbers by first appearance anyway)
      g = make_graph(k, M, edges);
    } catch (const ValidationError&) {
      continue;
    }
    if (classify(g, analyze(g)).regime == Regime::ExtremalOneOverM) return g;
  }
  return std::nullopt;
}

// Keyless-class generator. Every node gets a target common-source set
// (possibly empty); demanded edges join pairs whose targets union to exactly
// M sources, unlabeled edges join pairs of empty-target nodes. The union
// condition then holds on every edge by construction.
inline std::optional<StorageGraph> random_keyless_graph(uint64_t seed, int max_nodes, int max_k,
                                                        int max_m) {
  SplitMix64 rng(seed);
  for (int attempt = 0; attempt < 400; ++attempt) {
    int m = 1 + int(rng.below(uint64_t(max_m)));
    int k = m + int(rng.below(uint64_t(std::max(1, max_k - m + 1))));
    int n = 3 + int(rng.below(uint64_t(std::max(1, max_nodes - 2))));
    std::vector<std::vector<int>> target(n);
    for (int i = 0; i < n; ++i) {
      if (rng.below(3) == 0) continue;  // empty target
      int size = 1 + int(rng.below(uint64_t(m)));
      std::vector<int> pool(k);
      for (int s = 0; s < k; ++s) pool[s] = s + 1;
      for (int s = 0; s < size; ++s) std::swap(pool[s], pool[s + rng.below(uint64_t(k - s))]);
      target[i].assign(pool.begin(), pool.begin() + size);
      std::sort(target[i].begin(), target[i].end());
    }
    std::vector<EdgeTriple> edges;
    bool any_qualified = false;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        std::set<int> u(target[i].begin(), target[i].end());
        u.insert(target[j].begin(), target[j].end());
        std::string a = "V" + std::to_string(i);
        std::string b = "V" + std::to_string(j);
        if (target[i].empty() && target[j].empty()) {
          if (rng.below(2) == 0) edges.emplace_back(a, b, std::vector<int>{});
        } else if (int(u.size()) == m) {
          if (rng.below(2) == 0) {
            edges.emplace_back(a, b, std::vector<int>(u.begin(), u.end()));
            any_qualified = true;
          }
        }
      }
    if (!any_qualified || edges.empty()) continue;
    StorageGraph g;
    try {
      g = make_graph(k, m, edges);
    } catch (const ValidationError&) {
      continue;
    }
    if (classify(g, analyze(g)).regime == Regime::Keyless) return g;
  }
  return std::nullopt;
}

// Rename nodes through a random bijection and shuffle the edge order.
inline StorageGraph relabel(const StorageGraph& g, SplitMix64& rng,
                            std::map<std::string, std::string>* mapping_out = nullptr) {
  std::vector<int> perm(g.nodes.size());
  for (size_t i = 0; i < perm.size(); ++i) perm[i] = int(i);
  for (size_t i = perm.size(); i > 1; --i)
    std::swap(perm[i - 1], perm[rng.below(i)]);
  std::map<std::string, std::string> mapping;
  for (size_t i = 0; i < g.nodes.size(); ++i)
    mapping[g.nodes[i]] = "R" + std::to_string(perm[i]);
  std::vector<EdgeTriple> edges;
  for (const auto& e : g.edges)
    edges.emplace_back(mapping.at(g.nodes[e.a]), mapping.at(g.nodes[e.b]), e.label);
  for (size_t i = edges.size(); i > 1; --i)
    std::swap(edges[i - 1], edges[rng.below(i)]);
  if (mapping_out) *mapping_out = mapping;
  return make_graph(g.K, g.M, edges);
}

// Random (w, z) input vectors for a code.
inline std::pair<std::vector<uint64_t>, std::vector<uint64_t>> random_inputs(
    const LinearSecureCode& code, SplitMix64& rng) {
  std::vector<uint64_t> w(code.K), z(code.zdim);
  for (auto& v : w) v = rng.below(code.field.q);
  for (auto& v : z) v = rng.below(code.field.q);
  return {w, z};
}

}  // namespace testsupport
