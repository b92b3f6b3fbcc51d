#pragma once

#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "secstore/analysis.hpp"

namespace secstore {

struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n, long long d) : num(n), den(d) {
    long long g = std::gcd(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }

  bool operator==(const Rational&) const = default;
};

// What the theory lets us claim about the source key capacity of a graph.
struct ClaimedCapacity {
  enum Kind { Unbounded, Exact, Unknown } kind = Unknown;
  Rational value;  // meaningful only for Exact

  std::string str() const {
    switch (kind) {
      case Unbounded: return "unbounded";
      case Exact: return value.str();
      default: return "unknown";
    }
  }
};

enum class Regime {
  Keyless,           // every edge label is the union of its endpoint common sources
  ExtremalOneOverM,  // rate 1/M achievable: clean component structure, no internal qualified edge
  SubExtremal,       // some characteristic graph has an internal qualified edge: capacity < 1/M
  Uncharacterized,   // outside the characterized classes; no capacity claim
};

inline std::string_view regime_name(Regime r) {
  switch (r) {
    case Regime::Keyless: return "Keyless";
    case Regime::ExtremalOneOverM: return "ExtremalOneOverM";
    case Regime::SubExtremal: return "SubExtremal";
    default: return "Uncharacterized";
  }
}

struct ClassificationResult {
  Regime regime = Regime::Uncharacterized;
  int M = 0;
  ClaimedCapacity capacity;
  // SubExtremal: the obstructions, (source k, edge index), k ascending.
  // Internal within the non-degenerate subgraph, where the extremal theory
  // lives; a path routed through degenerate nodes obstructs nothing.
  std::vector<std::pair<int, int>> internal_witnesses;
  // Uncharacterized: non-degenerate nodes with nonempty common sources.
  std::vector<int> nonempty_common_nodes;
  // Uncharacterized: edges where the endpoint common-source union misses the label.
  std::vector<int> union_violations;
};

namespace detail {

inline void check_analysis_matches(const StorageGraph& g, const ComponentAnalysis& a) {
  bool ok = int(a.per_source.size()) == g.K && a.common.size() == g.nodes.size() &&
            a.degenerate.size() == g.nodes.size();
  for (const auto& ps : a.per_source)
    ok = ok && ps.components.id.size() == g.nodes.size() &&
         ps.view.qualified.size() + ps.view.unqualified.size() == g.edges.size();
  if (!ok) throw PreconditionError("analysis does not match graph");
}

inline std::vector<int> label_union(const std::vector<int>& x, const std::vector<int>& y) {
  std::vector<int> out;
  std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
  return out;
}

}  // namespace detail

// Decision order follows the strength of the resulting guarantee: a keyless
// graph needs no key at all, which beats rate 1/M, so the keyless test runs
// first. Outside both characterized classes the result is Uncharacterized
// and no capacity is claimed.
inline ClassificationResult classify(const StorageGraph& g, const ComponentAnalysis& a) {
  detail::check_analysis_matches(g, a);
  ClassificationResult res;
  res.M = g.M;

  std::vector<int> violations;
  for (size_t e = 0; e < g.edges.size(); ++e) {
    const auto& edge = g.edges[e];
    if (detail::label_union(a.common[edge.a], a.common[edge.b]) != edge.label)
      violations.push_back(int(e));
  }
  if (violations.empty()) {
    res.regime = Regime::Keyless;
    res.capacity.kind = ClaimedCapacity::Unbounded;
    return res;
  }

  auto nondeg = a.nondegenerate_nodes();
  bool clean = !nondeg.empty();
  for (int n : nondeg) clean = clean && a.common[n].empty();
  if (clean) {
    for (int k = 1; k <= g.K; ++k)
      for (int e : a.per_source[k - 1].restricted_internal)
        res.internal_witnesses.emplace_back(k, e);
    if (res.internal_witnesses.empty()) {
      res.regime = Regime::ExtremalOneOverM;
      res.capacity.kind = ClaimedCapacity::Exact;
      res.capacity.value = Rational(1, g.M);
    } else {
      res.regime = Regime::SubExtremal;
      res.capacity.kind = ClaimedCapacity::Unknown;
    }
    return res;
  }

  res.regime = Regime::Uncharacterized;
  res.capacity.kind = ClaimedCapacity::Unknown;
  for (int n : nondeg)
    if (!a.common[n].empty()) res.nonempty_common_nodes.push_back(n);
  res.union_violations = std::move(violations);
  return res;
}

}  // namespace secstore
