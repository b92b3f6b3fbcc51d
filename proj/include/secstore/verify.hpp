#pragma once

#include <unordered_map>
#include <vector>

#include "secstore/code.hpp"

namespace secstore {

inline constexpr uint64_t kDefaultOracleBudget = 10'000'000;    // input tuples
inline constexpr uint64_t kDefaultConverseBudget = 10'000'000;  // candidate codes

// H(A * X | X restricted to `given`) in log_q units, for X a vector of
// independent uniform field symbols: exactly the rank of A over the columns
// outside `given`. This identity is what makes every entropy in the linear
// method an exact integer.
inline int cond_entropy_linear(const PrimeField& f, const FieldMatrix& rows,
                               const std::vector<size_t>& given) {
  std::vector<char> is_given(rows.cols, 0);
  for (size_t c : given) {
    if (c >= rows.cols) throw PreconditionError("cond_entropy_linear: column out of range");
    is_given[c] = 1;
  }
  std::vector<size_t> keep;
  for (size_t c = 0; c < rows.cols; ++c)
    if (!is_given[c]) keep.push_back(c);
  return int(rank(f, select_columns(rows, keep)));
}

namespace detail {

inline FieldMatrix stacked_edge_matrix(const LinearSecureCode& code, const StorageGraph& g,
                                       int edge_index) {
  const auto& e = g.edges[edge_index];
  FieldMatrix stacked = vstack(code.node_matrix[e.a], code.node_matrix[e.b]);
  if (stacked.rows == 0) stacked = FieldMatrix(0, code.input_cols());
  return stacked;
}

inline std::vector<size_t> label_columns(const std::vector<int>& label) {
  std::vector<size_t> cols;
  for (int k : label) cols.push_back(size_t(k) - 1);
  return cols;
}

inline std::vector<size_t> source_columns(int K) {
  std::vector<size_t> cols(K);
  for (int i = 0; i < K; ++i) cols[i] = size_t(i);
  return cols;
}

}  // namespace detail

// Correctness of a qualified edge: every demanded source is a deterministic
// function of the two stored vectors, i.e. each selector row lies in the row
// space of the stacked edge matrix.
inline bool check_correctness_linear(const LinearSecureCode& code, const StorageGraph& g,
                                     int edge_index) {
  const auto& e = g.edges[edge_index];
  if (!e.qualified()) throw PreconditionError("check_correctness_linear: edge is unqualified");
  FieldMatrix stacked = detail::stacked_edge_matrix(code, g, edge_index);
  return solve_left(code.field, stacked, detail::selector_rows(e.label, code.input_cols()))
      .has_value();
}

// Security of any edge: conditioning on the undesired sources must remove no
// uncertainty beyond what the desired sources already removed. With
// independent uniform inputs this is an exact rank comparison.
inline bool check_security_linear(const LinearSecureCode& code, const StorageGraph& g,
                                  int edge_index) {
  const auto& e = g.edges[edge_index];
  FieldMatrix stacked = detail::stacked_edge_matrix(code, g, edge_index);
  return cond_entropy_linear(code.field, stacked, detail::label_columns(e.label)) ==
         cond_entropy_linear(code.field, stacked, detail::source_columns(code.K));
}

// Definition-level audit of one edge by full enumeration of the input space.
// Verdicts are computed from exact occurrence counts; no estimate is involved.
struct OracleResult {
  bool correctness = true;  // vacuously true on unqualified edges
  bool security = true;
  // Support-based entropies in log_q units (every conditional slice of a
  // linear code is uniform over a q-power-sized support).
  int h_vi = 0;
  int h_vj = 0;
  int h_pair = 0;
  int h_pair_given_sources = 0;  // H(V_i, V_j | W_1..W_K)
};

namespace detail {

using PairKey = unsigned __int128;

struct PairKeyHash {
  size_t operator()(PairKey v) const {
    uint64_t lo = uint64_t(v);
    uint64_t hi = uint64_t(v >> 64);
    uint64_t x = lo ^ (hi + 0x9e3779b97f4a7c15ull + (lo << 6) + (lo >> 2));
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdull;
    x ^= x >> 33;
    return size_t(x);
  }
};

inline PairKey pack_symbols(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b,
                            uint64_t q) {
  PairKey key = 0;
  for (uint64_t v : a) key = key * q + v;
  for (uint64_t v : b) key = key * q + v;
  return key;
}

// exponent e with q^e == n, or -1 when n is not a power of q
inline int logq_exact(uint64_t q, uint64_t n) {
  int e = 0;
  while (n > 1) {
    if (n % q != 0) return -1;
    n /= q;
    ++e;
  }
  return e;
}

inline bool advance_odometer(std::vector<uint64_t>& digits, uint64_t q) {
  for (auto& d : digits) {
    if (++d < q) return true;
    d = 0;
  }
  return false;
}

}  // namespace detail

inline OracleResult entropy_oracle(const LinearSecureCode& code, const StorageGraph& g,
                                   int edge_index, uint64_t budget = kDefaultOracleBudget) {
  const PrimeField& f = code.field;
  auto tuples = checked_pow(f.q, code.input_cols(), budget);
  if (!tuples)
    throw BudgetError("entropy oracle needs q^(K+zdim) = " + std::to_string(f.q) + "^" +
                      std::to_string(code.input_cols()) + " tuples, over budget " +
                      std::to_string(budget));

  const auto& e = g.edges[edge_index];
  const FieldMatrix& ai = code.node_matrix[e.a];
  const FieldMatrix& aj = code.node_matrix[e.b];

  // the base-q packing of an observed pair must fit one 128-bit key
  detail::PairKey key_space = 1;
  for (size_t i = 0; i < ai.rows + aj.rows; ++i) {
    detail::PairKey next = key_space * f.q;
    if (next / f.q != key_space)
      throw BudgetError("entropy oracle: stored pair too wide to enumerate");
    key_space = next;
  }

  OracleResult res;
  // pair value -> (first desired-source value seen with it, occurrence count)
  std::unordered_map<detail::PairKey, std::pair<detail::PairKey, uint64_t>, detail::PairKeyHash>
      pair_info;
  std::unordered_map<detail::PairKey, uint64_t, detail::PairKeyHash> vi_count, vj_count;
  // desired-source value -> reference conditional distribution over (vi, vj)
  std::unordered_map<detail::PairKey,
                     std::vector<std::pair<detail::PairKey, uint64_t>>, detail::PairKeyHash>
      reference;
  uint64_t per_w_support = 0;
  bool per_w_support_uniform = true;

  std::vector<uint64_t> w(code.K, 0);
  std::vector<uint64_t> input(code.input_cols(), 0);
  do {
    detail::PairKey desired = 0;
    for (int k : e.label) desired = desired * f.q + w[size_t(k) - 1];
    std::copy(w.begin(), w.end(), input.begin());

    // conditional distribution of the pair given this full source vector
    std::unordered_map<detail::PairKey, uint64_t, detail::PairKeyHash> cond;
    std::vector<uint64_t> z(code.zdim, 0);
    do {
      std::copy(z.begin(), z.end(), input.begin() + code.K);
      auto vi = matvec(f, ai, input);
      auto vj = matvec(f, aj, input);
      detail::PairKey pk = detail::pack_symbols(vi, vj, f.q);
      ++cond[pk];
      auto [it, fresh] = pair_info.emplace(pk, std::make_pair(desired, uint64_t(0)));
      if (!fresh && it->second.first != desired) res.correctness = false;
      ++it->second.second;
      ++vi_count[detail::pack_symbols(vi, {}, f.q)];
      ++vj_count[detail::pack_symbols(vj, {}, f.q)];
    } while (detail::advance_odometer(z, f.q));

    std::vector<std::pair<detail::PairKey, uint64_t>> fingerprint(cond.begin(), cond.end());
    std::sort(fingerprint.begin(), fingerprint.end());
    if (per_w_support == 0)
      per_w_support = fingerprint.size();
    else if (per_w_support != fingerprint.size())
      per_w_support_uniform = false;
    auto [it, fresh] = reference.emplace(desired, fingerprint);
    if (!fresh && it->second != fingerprint) res.security = false;
  } while (detail::advance_odometer(w, f.q));

  if (!e.qualified()) res.correctness = true;  // nothing is demanded

  // exact entropies from support sizes (uniform, q-power supports for any
  // linear map of uniform inputs)
  uint64_t expect = *tuples / pair_info.size();
  bool flat = *tuples % pair_info.size() == 0;
  for (const auto& [pk, info] : pair_info) flat = flat && info.second == expect;
  int hp = detail::logq_exact(f.q, pair_info.size());
  int hvi = detail::logq_exact(f.q, vi_count.size());
  int hvj = detail::logq_exact(f.q, vj_count.size());
  int hgw = per_w_support_uniform ? detail::logq_exact(f.q, per_w_support) : -1;
  if (!flat || hp < 0 || hvi < 0 || hvj < 0 || hgw < 0)
    throw PreconditionError("entropy oracle: observed distribution is not a uniform "
                            "q-power support (input is not a linear code?)");
  res.h_pair = hp;
  res.h_vi = hvi;
  res.h_vj = hvj;
  res.h_pair_given_sources = hgw;
  return res;
}

// Exact finite analogs of the structural facts behind the rate-1/M
// constructions, in log_q units. Applies to keyed codes only (zdim > 0).
struct AuditReport {
  bool applicable = false;
  struct Failure {
    std::string check;
    std::string where;
  };
  std::vector<Failure> failures;
  bool pass() const { return applicable && failures.empty(); }
};

// Checks, per non-degenerate node n and qualified edge {i,j} between
// non-degenerate nodes:
//   message_noise_size   rank(A_n) = M and rank of its key block = M
//   qualified_edge_size  rank([A_i; A_j]) = 2M
//   noise_alignment      rank of all nodes' key blocks stacked = M
//   source_independence  at every node, source columns outside the node's
//                        common sources add no rank beyond the key block
inline AuditReport audit_ranks(const LinearSecureCode& code, const StorageGraph& g,
                                const ComponentAnalysis& a) {
  AuditReport report;
  if (code.zdim == 0) return report;  // outside the keyed-code hypotheses
  report.applicable = true;
  const PrimeField& f = code.field;
  int m = code.M;

  std::vector<size_t> zcols;
  for (int i = 0; i < code.zdim; ++i) zcols.push_back(size_t(code.K) + i);

  FieldMatrix all_rows(0, code.input_cols());
  for (size_t n = 0; n < g.nodes.size(); ++n) {
    const FieldMatrix& an = code.node_matrix[n];
    all_rows = vstack(all_rows, an);
    if (!a.degenerate[n]) {
      bool ok = rank(f, an) == size_t(m) &&
                rank(f, select_columns(an, zcols)) == size_t(m);
      if (!ok) report.failures.push_back({"message_noise_size", g.nodes[n]});
    }
    std::vector<size_t> complement = zcols;
    for (int k = 1; k <= code.K; ++k)
      if (!std::binary_search(a.common[n].begin(), a.common[n].end(), k))
        complement.push_back(size_t(k) - 1);
    if (rank(f, select_columns(an, complement)) != rank(f, select_columns(an, zcols)))
      report.failures.push_back({"source_independence", g.nodes[n]});
  }

  for (size_t e = 0; e < g.edges.size(); ++e) {
    const auto& edge = g.edges[e];
    if (!edge.qualified() || a.degenerate[edge.a] || a.degenerate[edge.b]) continue;
    FieldMatrix stacked = detail::stacked_edge_matrix(code, g, int(e));
    if (rank(f, stacked) != size_t(2 * m))
      report.failures.push_back(
          {"qualified_edge_size", g.nodes[edge.a] + "," + g.nodes[edge.b]});
  }

  if (rank(f, select_columns(all_rows, zcols)) != size_t(m))
    report.failures.push_back({"noise_alignment", "global"});
  return report;
}

// Full report over every edge, linear method always, oracle when requested
// and affordable.
struct VerificationReport {
  struct EdgeRecord {
    int edge = 0;
    bool correctness = true;
    bool security = true;
    bool oracle_ran = false;
    bool methods_agree = true;
  };
  std::vector<EdgeRecord> edges;
  std::vector<int> node_entropy;                        // H(V_n), log_q
  std::vector<std::pair<int, int>> qualified_entropy;   // (edge, H(V_i, V_j))
  int noise_entropy_given_sources = 0;                  // H(all V | all W)
  std::string rate;
  bool valid = false;
};

inline VerificationReport verify_code(const LinearSecureCode& code, const StorageGraph& g,
                                      bool use_oracle = false,
                                      uint64_t budget = kDefaultOracleBudget) {
  if (code.node_names != g.nodes)
    throw PreconditionError("code and graph disagree on the node list");
  if (code.K != g.K || code.M != g.M)
    throw PreconditionError("code and graph disagree on K or M");

  VerificationReport report;
  report.rate = code.rate_str();
  bool all_pass = true;

  bool oracle_affordable =
      use_oracle && checked_pow(code.field.q, code.input_cols(), budget).has_value();
  for (size_t e = 0; e < g.edges.size(); ++e) {
    VerificationReport::EdgeRecord rec;
    rec.edge = int(e);
    rec.security = check_security_linear(code, g, int(e));
    if (g.edges[e].qualified()) rec.correctness = check_correctness_linear(code, g, int(e));
    if (oracle_affordable) {
      OracleResult oracle = entropy_oracle(code, g, int(e), budget);
      rec.oracle_ran = true;
      rec.methods_agree =
          oracle.correctness == rec.correctness && oracle.security == rec.security;
    }
    all_pass = all_pass && rec.correctness && rec.security && rec.methods_agree;
    report.edges.push_back(rec);
  }

  for (const auto& mat : code.node_matrix)
    report.node_entropy.push_back(int(rank(code.field, mat)));
  FieldMatrix all_rows(0, code.input_cols());
  for (const auto& mat : code.node_matrix) all_rows = vstack(all_rows, mat);
  std::vector<size_t> zcols;
  for (int i = 0; i < code.zdim; ++i) zcols.push_back(size_t(code.K) + i);
  report.noise_entropy_given_sources =
      code.zdim == 0 ? 0 : int(rank(code.field, select_columns(all_rows, zcols)));
  for (size_t e = 0; e < g.edges.size(); ++e)
    if (g.edges[e].qualified())
      report.qualified_entropy.emplace_back(
          int(e), int(rank(code.field, detail::stacked_edge_matrix(code, g, int(e)))));

  report.valid = all_pass;
  return report;
}

// Enumerate every assignment of per-node coefficient matrices of the given
// shape and return the first one that passes the linear correctness and
// security checks on every edge, or nullopt when none exists. The candidate
// index is an odometer over node matrices: node 0's entries vary fastest,
// and within a node entries are row-major with the first entry least
// significant. A returned "none" certifies non-existence for the whole
// scalar-linear shape class at this q, and nothing beyond it.
inline std::optional<LinearSecureCode> exhaustive_converse_search(
    const StorageGraph& g, uint64_t q, int node_dim, int zdim,
    uint64_t budget = kDefaultConverseBudget) {
  if (node_dim < 1) throw PreconditionError("node_dim must be at least 1");
  if (zdim < 0) throw PreconditionError("zdim must be non-negative");
  PrimeField f{q};
  size_t cols = size_t(g.K) + size_t(zdim);
  size_t per_node = size_t(node_dim) * cols;
  auto total = checked_pow(q, per_node * g.nodes.size(), budget);
  if (!total)
    throw BudgetError("converse search needs q^(node_dim*(K+zdim)*N) = " + std::to_string(q) +
                      "^" + std::to_string(per_node * g.nodes.size()) +
                      " candidates, over budget " + std::to_string(budget));
  uint64_t block = *checked_pow(q, per_node, UINT64_MAX);

  auto decode_block = [&](uint64_t value) {
    FieldMatrix m(size_t(node_dim), cols);
    for (auto& v : m.data) {
      v = value % q;
      value /= q;
    }
    return m;
  };

  auto make_code = [&](const std::vector<FieldMatrix>& mats) {
    LinearSecureCode code{f};
    code.K = g.K;
    code.M = g.M;
    code.zdim = zdim;
    code.kind = CodeKind::Searched;
    code.node_names = g.nodes;
    code.node_matrix = mats;
    return code;
  };

  auto edge_ok = [&](const FieldMatrix& ma, const FieldMatrix& mb,
                     const StorageGraph::Edge& edge) {
    FieldMatrix stacked = vstack(ma, mb);
    if (cond_entropy_linear(f, stacked, detail::label_columns(edge.label)) !=
        cond_entropy_linear(f, stacked, detail::source_columns(g.K)))
      return false;
    if (edge.qualified() &&
        !solve_left(f, stacked, detail::selector_rows(edge.label, cols)).has_value())
      return false;
    return true;
  };

  // Per-edge verdicts depend only on the two endpoint blocks, so when the
  // block space is small enough they are precomputed once and the main scan
  // reduces to table lookups.
  constexpr uint64_t kTableCap = uint64_t(1) << 22;
  bool tabulate = block <= (uint64_t(1) << 11) && block * block <= kTableCap;
  std::vector<std::vector<char>> tables;
  std::vector<FieldMatrix> block_matrix;
  if (tabulate) {
    block_matrix.reserve(block);
    for (uint64_t v = 0; v < block; ++v) block_matrix.push_back(decode_block(v));
    tables.resize(g.edges.size());
    for (size_t e = 0; e < g.edges.size(); ++e) {
      tables[e].resize(size_t(block) * block);
      for (uint64_t bi = 0; bi < block; ++bi)
        for (uint64_t bj = 0; bj < block; ++bj)
          tables[e][size_t(bi) * block + bj] =
              edge_ok(block_matrix[bi], block_matrix[bj], g.edges[e]);
    }
  }

  size_t n_nodes = g.nodes.size();
  std::vector<uint64_t> blocks(n_nodes, 0);
  for (uint64_t candidate = 0; candidate < *total; ++candidate) {
    uint64_t rest = candidate;
    for (size_t n = 0; n < n_nodes; ++n) {
      blocks[n] = rest % block;
      rest /= block;
    }
    bool ok = true;
    if (tabulate) {
      for (size_t e = 0; e < g.edges.size() && ok; ++e)
        ok = tables[e][size_t(blocks[g.edges[e].a]) * block + blocks[g.edges[e].b]];
    } else {
      std::vector<FieldMatrix> mats;
      mats.reserve(n_nodes);
      for (uint64_t b : blocks) mats.push_back(decode_block(b));
      for (size_t e = 0; e < g.edges.size() && ok; ++e)
        ok = edge_ok(mats[g.edges[e].a], mats[g.edges[e].b], g.edges[e]);
      if (ok) {
        auto code = make_code(mats);
        derive_decoders(code, g);
        return code;
      }
      continue;
    }
    if (ok) {
      std::vector<FieldMatrix> mats;
      mats.reserve(n_nodes);
      for (uint64_t b : blocks) mats.push_back(decode_block(b));
      auto code = make_code(mats);
      derive_decoders(code, g);
      return code;
    }
  }
  return std::nullopt;
}

}  // namespace secstore
