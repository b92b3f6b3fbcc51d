#pragma once

#include <optional>
#include <string>
#include <vector>

#include "secstore/classify.hpp"
#include "secstore/field.hpp"

namespace secstore {

enum class CodeKind { M1, General, Keyless, Searched };

inline std::string_view code_kind_name(CodeKind k) {
  switch (k) {
    case CodeKind::M1: return "m1";
    case CodeKind::General: return "general";
    case CodeKind::Keyless: return "keyless";
    default: return "searched";
  }
}

// A linear secure storage code. Each node stores A_n * (W_1..W_K, Z_1..Z_zdim);
// every source occupies one field symbol, the key occupies zdim of them, so
// the achieved source key rate is 1/zdim (no key at all when zdim = 0).
struct LinearSecureCode {
  static constexpr int kSourceLen = 1;  // field symbols per source

  PrimeField field;
  int K = 0;
  int M = 0;
  int zdim = 0;
  CodeKind kind = CodeKind::M1;
  uint64_t seed = 0;
  int draws_used = 0;  // randomized builders: accepted draw number, 1-based

  std::vector<std::string> node_names;
  std::vector<FieldMatrix> node_matrix;             // dim_n x (K + zdim)
  std::vector<std::optional<FieldMatrix>> decoder;  // per edge index, qualified edges only

  explicit LinearSecureCode(PrimeField f) : field(f) {}

  size_t input_cols() const { return size_t(K) + size_t(zdim); }

  // achieved key rate: source symbols per key symbol
  std::string rate_str() const {
    return zdim == 0 ? "unbounded" : Rational(kSourceLen, zdim).str();
  }
};

namespace detail {

// Selector rows for the sources in `label` over the (W;Z) column layout.
inline FieldMatrix selector_rows(const std::vector<int>& label, size_t cols) {
  FieldMatrix s(label.size(), cols);
  for (size_t i = 0; i < label.size(); ++i) s.at(i, size_t(label[i]) - 1) = 1;
  return s;
}

// Rows stored at a degenerate node: its common sources verbatim (all incident
// edges demand exactly that set), or M zero rows when every incident edge is
// unqualified. A zero row is secure on any edge and, unlike an extra noise
// symbol, costs nothing against the claimed key rate.
inline FieldMatrix degenerate_rows(const std::vector<int>& common, int m, size_t cols) {
  if (!common.empty()) return selector_rows(common, cols);
  return FieldMatrix(size_t(m), cols);
}

inline uint64_t checked_q_override(uint64_t q, uint64_t bound) {
  if (!is_prime(q) || q < bound)
    throw PreconditionError("field override " + std::to_string(q) +
                            " must be a prime >= " + std::to_string(bound));
  return q;
}

}  // namespace detail

// Synthesize a decoder for every qualified edge: D with D * [A_i; A_j] equal
// to the selector rows of the edge label. Returns false if any edge has none
// (built codes always have one; hand-assembled or corrupted codes may not).
inline bool derive_decoders(LinearSecureCode& code, const StorageGraph& g) {
  code.decoder.assign(g.edges.size(), std::nullopt);
  bool all = true;
  for (size_t e = 0; e < g.edges.size(); ++e) {
    const auto& edge = g.edges[e];
    if (!edge.qualified()) continue;
    FieldMatrix stacked = vstack(code.node_matrix[edge.a], code.node_matrix[edge.b]);
    if (stacked.cols == 0) stacked.cols = code.input_cols();
    auto d = solve_left(code.field, stacked, detail::selector_rows(edge.label, code.input_cols()));
    if (d)
      code.decoder[e] = std::move(*d);
    else
      all = false;
  }
  return all;
}

// Explicit construction for M = 1. Degenerate nodes store their common
// source verbatim; the rest of the construction lives on the non-degenerate
// subgraph. Per source k, a non-degenerate node in the u-th unqualified
// component of that subgraph's k-th characteristic graph contributes
// u*W_k + Z; the stored symbol is the sum over all k, so its row is
// (u_1(n), ..., u_K(n), K). A qualified edge between non-degenerate nodes
// joins two components whose indices differ, and the difference of the
// endpoint symbols isolates (u_i - u_j) * W_k. Needs q > max_k U^[k] so
// component indices stay distinct nonzero residues, and q > K so the
// aggregated noise coefficient K cannot vanish.
inline LinearSecureCode build_m1(const StorageGraph& g, const ComponentAnalysis& a,
                                 std::optional<uint64_t> q_override = {}) {
  ClassificationResult cls = classify(g, a);
  if (cls.regime != Regime::ExtremalOneOverM || g.M != 1)
    throw PreconditionError(std::string("build_m1 requires the ExtremalOneOverM regime with M = 1 (got ") +
                            std::string(regime_name(cls.regime)) + ", M = " +
                            std::to_string(g.M) + ")");
  uint64_t bound =
      std::max<uint64_t>(uint64_t(a.max_restricted_component_count()) + 1, uint64_t(g.K) + 1);
  uint64_t q = q_override ? detail::checked_q_override(*q_override, bound)
                          : next_prime_at_least(bound);

  LinearSecureCode code{PrimeField(q)};
  code.K = g.K;
  code.M = 1;
  code.zdim = 1;
  code.kind = CodeKind::M1;
  code.node_names = g.nodes;
  size_t cols = code.input_cols();
  for (size_t n = 0; n < g.nodes.size(); ++n) {
    if (a.degenerate[n]) {
      code.node_matrix.push_back(detail::degenerate_rows(a.common[n], 1, cols));
      continue;
    }
    FieldMatrix row(1, cols);
    for (int k = 1; k <= g.K; ++k)
      row.at(0, size_t(k) - 1) = uint64_t(a.per_source[k - 1].restricted_components.id[n]);
    row.at(0, size_t(g.K)) = uint64_t(g.K) % q;
    code.node_matrix.push_back(std::move(row));
  }
  if (!derive_decoders(code, g))
    throw BuildError("m1 construction produced an undecodable edge");
  return code;
}

// One draw of the randomized rate-1/M construction: sample a coding vector
// in F_q^M per (source, unqualified component of the non-degenerate
// subgraph); a non-degenerate node stores sum_k h[k][u_k(n)] * W_k + K * Z,
// degenerate nodes store their common sources verbatim. Accepted when for
// every qualified edge between non-degenerate nodes the M x M matrix of
// coding-vector differences (columns ordered by ascending source index) is
// invertible. Returns the code on acceptance, nullopt on rejection.
inline std::optional<LinearSecureCode> attempt_general_draw(const StorageGraph& g,
                                                            const ComponentAnalysis& a,
                                                            const PrimeField& f,
                                                            SplitMix64& rng) {
  int m = g.M;
  std::vector<std::vector<std::vector<uint64_t>>> h(g.K);
  for (int k = 1; k <= g.K; ++k) {
    h[k - 1].resize(a.per_source[k - 1].restricted_components.count);
    for (auto& vec : h[k - 1]) {
      vec.resize(m);
      for (auto& v : vec) v = rng.below(f.q);
    }
  }

  for (const auto& edge : g.edges) {
    if (!edge.qualified()) continue;
    if (a.degenerate[edge.a] || a.degenerate[edge.b]) continue;
    FieldMatrix diff(m, size_t(m));
    for (size_t j = 0; j < edge.label.size(); ++j) {
      int k = edge.label[j];
      const auto& comps = a.per_source[k - 1].restricted_components;
      const auto& hi = h[k - 1][comps.id[edge.a] - 1];
      const auto& hj = h[k - 1][comps.id[edge.b] - 1];
      for (int i = 0; i < m; ++i) diff.at(i, j) = f.sub(hi[i], hj[i]);
    }
    if (rank(f, diff) != size_t(m)) return std::nullopt;
  }

  LinearSecureCode code{f};
  code.K = g.K;
  code.M = m;
  code.zdim = m;
  code.kind = CodeKind::General;
  code.node_names = g.nodes;
  size_t cols = code.input_cols();
  uint64_t noise_coeff = uint64_t(g.K) % f.q;
  for (size_t n = 0; n < g.nodes.size(); ++n) {
    if (a.degenerate[n]) {
      code.node_matrix.push_back(detail::degenerate_rows(a.common[n], m, cols));
      continue;
    }
    FieldMatrix mat(size_t(m), cols);
    for (int k = 1; k <= g.K; ++k) {
      const auto& vec = h[k - 1][a.per_source[k - 1].restricted_components.id[n] - 1];
      for (int i = 0; i < m; ++i) mat.at(i, size_t(k) - 1) = vec[i];
    }
    for (int i = 0; i < m; ++i) mat.at(i, size_t(g.K) + i) = noise_coeff;
    code.node_matrix.push_back(std::move(mat));
  }
  return code;
}

namespace detail {

template <typename Draw>
LinearSecureCode rejection_build(const StorageGraph& g, uint64_t seed, uint64_t q0,
                                 int max_retries, Draw&& draw) {
  SplitMix64 rng(seed);
  uint64_t q = q0;
  int draws = 0;
  for (int escalation = 0; escalation <= 3; ++escalation) {
    PrimeField f{q};
    for (int attempt = 0; attempt < max_retries; ++attempt) {
      ++draws;
      if (auto code = draw(f, rng)) {
        code->seed = seed;
        code->draws_used = draws;
        if (!derive_decoders(*code, g))
          throw BuildError("accepted draw produced an undecodable edge");
        return std::move(*code);
      }
    }
    q = next_prime_at_least(2 * q);
  }
  throw BuildError("randomized construction exhausted " + std::to_string(draws) +
                   " draws (seed " + std::to_string(seed) + ", final q " + std::to_string(q) +
                   ")");
}

inline LinearSecureCode build_general_impl(const StorageGraph& g, const ComponentAnalysis& a,
                                           uint64_t seed, std::optional<uint64_t> q_override,
                                           int max_retries) {
  uint64_t bound = std::max({uint64_t(g.M) * g.edges.size() + 1, uint64_t(g.K) + 1,
                             uint64_t(a.max_restricted_component_count()) + 1});
  uint64_t q = q_override ? checked_q_override(*q_override, bound) : next_prime_at_least(bound);
  return rejection_build(g, seed, q, max_retries, [&](const PrimeField& f, SplitMix64& rng) {
    return attempt_general_draw(g, a, f, rng);
  });
}

}  // namespace detail

// Randomized construction achieving rate 1/M on the extremal class. The
// product of the qualified-edge determinants is a nonzero polynomial of
// degree at most M*|E| in the coding-vector entries, so with q > M*|E| a
// uniform draw is accepted with positive probability (at least 1/2 once
// q >= 2*M*|E|); on exhaustion the field doubles, at most three times.
inline LinearSecureCode build_general(const StorageGraph& g, const ComponentAnalysis& a,
                                      uint64_t seed, std::optional<uint64_t> q_override = {},
                                      int max_retries = 64) {
  ClassificationResult cls = classify(g, a);
  if (cls.regime != Regime::ExtremalOneOverM)
    throw PreconditionError(std::string("build_general requires the ExtremalOneOverM regime (got ") +
                            std::string(regime_name(cls.regime)) + ")");
  return detail::build_general_impl(g, a, seed, q_override, max_retries);
}

// Same machinery without the regime gate: best-effort attempt on graphs the
// theory does not characterize. Succeeds exactly when some draw makes every
// qualified edge decodable, which is impossible whenever a characteristic
// graph has an internal qualified edge.
inline LinearSecureCode build_general_unchecked(const StorageGraph& g, const ComponentAnalysis& a,
                                                uint64_t seed,
                                                std::optional<uint64_t> q_override = {},
                                                int max_retries = 64) {
  return detail::build_general_impl(g, a, seed, q_override, max_retries);
}

// Keyless construction: a node stores |C(V_n)| random linear combinations of
// exactly its common sources (nothing at all when that set is empty). In the
// keyless regime each edge label is covered by the two endpoint common-source
// sets, so a draw is accepted when the stacked map restricted to the label
// columns has rank M for every qualified edge; security needs no sampling at
// all since only desired sources ever appear on an edge.
inline LinearSecureCode build_keyless(const StorageGraph& g, const ComponentAnalysis& a,
                                      uint64_t seed, std::optional<uint64_t> q_override = {},
                                      int max_retries = 64) {
  ClassificationResult cls = classify(g, a);
  if (cls.regime != Regime::Keyless)
    throw PreconditionError(std::string("build_keyless requires the Keyless regime (got ") +
                            std::string(regime_name(cls.regime)) + ")");
  uint64_t bound = std::max<uint64_t>(uint64_t(g.M) * g.edges.size() + 1, 2);
  uint64_t q = q_override ? detail::checked_q_override(*q_override, bound)
                          : next_prime_at_least(bound);

  auto draw = [&](const PrimeField& f, SplitMix64& rng) -> std::optional<LinearSecureCode> {
    LinearSecureCode code{f};
    code.K = g.K;
    code.M = g.M;
    code.zdim = 0;
    code.kind = CodeKind::Keyless;
    code.node_names = g.nodes;
    for (size_t n = 0; n < g.nodes.size(); ++n) {
      const auto& common = a.common[n];
      FieldMatrix coeff = sample_matrix(f, common.size(), common.size(), rng);
      FieldMatrix mat(common.size(), size_t(g.K));
      for (size_t r = 0; r < common.size(); ++r)
        for (size_t j = 0; j < common.size(); ++j)
          mat.at(r, size_t(common[j]) - 1) = coeff.at(r, j);
      code.node_matrix.push_back(std::move(mat));
    }
    for (const auto& edge : g.edges) {
      if (!edge.qualified()) continue;
      FieldMatrix stacked = vstack(code.node_matrix[edge.a], code.node_matrix[edge.b]);
      if (stacked.rows == 0) return std::nullopt;
      std::vector<size_t> label_cols;
      for (int k : edge.label) label_cols.push_back(size_t(k) - 1);
      if (rank(f, select_columns(stacked, label_cols)) != size_t(g.M)) return std::nullopt;
    }
    return code;
  };
  return detail::rejection_build(g, seed, q, max_retries, draw);
}

// V_n = A_n * (w; z) for every node.
inline std::vector<std::vector<uint64_t>> encode(const LinearSecureCode& code,
                                                 const std::vector<uint64_t>& w,
                                                 const std::vector<uint64_t>& z) {
  if (w.size() != size_t(code.K) || z.size() != size_t(code.zdim))
    throw PreconditionError("encode: input length mismatch");
  std::vector<uint64_t> input;
  input.reserve(code.input_cols());
  for (uint64_t v : w) input.push_back(code.field.reduce(v));
  for (uint64_t v : z) input.push_back(code.field.reduce(v));
  std::vector<std::vector<uint64_t>> stored;
  stored.reserve(code.node_matrix.size());
  for (const auto& mat : code.node_matrix) {
    if (mat.rows == 0)
      stored.emplace_back();
    else
      stored.push_back(matvec(code.field, mat, input));
  }
  return stored;
}

// Recover the edge's demanded sources (ascending source order) from the two
// stored vectors.
inline std::vector<uint64_t> decode(const LinearSecureCode& code, const StorageGraph& g,
                                    int edge_index, const std::vector<uint64_t>& vi,
                                    const std::vector<uint64_t>& vj) {
  const auto& edge = g.edges[edge_index];
  if (!edge.qualified()) throw PreconditionError("decode: edge is unqualified, nothing to decode");
  if (vi.size() != code.node_matrix[edge.a].rows || vj.size() != code.node_matrix[edge.b].rows)
    throw PreconditionError("decode: stored vector dimension mismatch");
  if (!code.decoder[edge_index])
    throw PreconditionError("decode: decoders not derived for this code");
  std::vector<uint64_t> joint;
  joint.reserve(vi.size() + vj.size());
  for (uint64_t v : vi) joint.push_back(code.field.reduce(v));
  for (uint64_t v : vj) joint.push_back(code.field.reduce(v));
  return matvec(code.field, *code.decoder[edge_index], joint);
}

inline std::vector<uint64_t> decode(const LinearSecureCode& code, const StorageGraph& g,
                                    const EdgeRef& ref, const std::vector<uint64_t>& vi,
                                    const std::vector<uint64_t>& vj) {
  return decode(code, g, resolve_edge(g, ref), vi, vj);
}

// Text format: six header lines then per-node coefficient rows, columns
// ordered W_1..W_K, Z_1..Z_zdim.
inline std::string emit_code(const LinearSecureCode& code) {
  std::string out;
  out += "q " + std::to_string(code.field.q) + "\n";
  out += "K " + std::to_string(code.K) + "\n";
  out += "M " + std::to_string(code.M) + "\n";
  out += "zdim " + std::to_string(code.zdim) + "\n";
  out += "kind " + std::string(code_kind_name(code.kind)) + "\n";
  out += "seed " + std::to_string(code.seed) + "\n";
  for (size_t n = 0; n < code.node_names.size(); ++n) {
    out += "node " + code.node_names[n] + "\n";
    const auto& mat = code.node_matrix[n];
    for (size_t r = 0; r < mat.rows; ++r) {
      out += "row";
      for (size_t c = 0; c < mat.cols; ++c) out += " " + std::to_string(mat.at(r, c));
      out += "\n";
    }
  }
  return out;
}

namespace detail {

inline uint64_t parse_u64_token(std::string_view s, int line, const std::string& what) {
  if (s.empty()) throw ParseError(line, "empty " + what);
  unsigned __int128 v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw ParseError(line, "bad " + what + " '" + std::string(s) + "'");
    v = v * 10 + unsigned(c - '0');
    if (v > UINT64_MAX) throw ParseError(line, what + " too large");
  }
  return uint64_t(v);
}

}  // namespace detail

// Inverse of emit_code. Decoders are not stored; call derive_decoders with
// the matching graph before decoding.
inline LinearSecureCode parse_code(const std::string& text) {
  std::optional<uint64_t> q, seed;
  std::optional<int> k, m, zdim;
  std::optional<CodeKind> kind;
  std::vector<std::string> names;
  std::vector<std::vector<std::vector<uint64_t>>> rows;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    auto tok = detail::split_ws(line);
    if (tok.empty()) continue;
    const std::string& head = tok[0];

    if (head == "q" || head == "K" || head == "M" || head == "zdim" || head == "kind" ||
        head == "seed") {
      if (!names.empty()) throw ParseError(lineno, head + " header after first node");
      if (tok.size() != 2) throw ParseError(lineno, head + " header needs one value");
      if (head == "q") {
        if (q) throw ParseError(lineno, "duplicate q header");
        q = detail::parse_u64_token(tok[1], lineno, "q value");
      } else if (head == "seed") {
        if (seed) throw ParseError(lineno, "duplicate seed header");
        seed = detail::parse_u64_token(tok[1], lineno, "seed value");
      } else if (head == "kind") {
        if (kind) throw ParseError(lineno, "duplicate kind header");
        if (tok[1] == "m1") kind = CodeKind::M1;
        else if (tok[1] == "general") kind = CodeKind::General;
        else if (tok[1] == "keyless") kind = CodeKind::Keyless;
        else if (tok[1] == "searched") kind = CodeKind::Searched;
        else throw ParseError(lineno, "unknown kind '" + tok[1] + "'");
      } else {
        auto& slot = head == "K" ? k : head == "M" ? m : zdim;
        if (slot) throw ParseError(lineno, "duplicate " + head + " header");
        int v = detail::parse_int_token(tok[1], lineno, head + " value");
        if (head != "zdim" && v < 1) throw ValidationError(head + " must be at least 1");
        slot = v;
      }
      continue;
    }

    if (head == "node") {
      if (!(q && k && m && zdim && kind && seed))
        throw ValidationError("node before complete header block");
      if (tok.size() != 2) throw ParseError(lineno, "node line needs one name");
      if (!detail::valid_node_token(tok[1]))
        throw ParseError(lineno, "bad node identifier '" + tok[1] + "'");
      for (const auto& n : names)
        if (n == tok[1]) throw ValidationError("duplicate node " + tok[1]);
      names.push_back(tok[1]);
      rows.emplace_back();
      continue;
    }

    if (head == "row") {
      if (names.empty()) throw ParseError(lineno, "row before any node");
      size_t want = size_t(*k) + size_t(*zdim);
      if (tok.size() != want + 1)
        throw ParseError(lineno, "row needs " + std::to_string(want) + " entries");
      std::vector<uint64_t> row;
      for (size_t i = 1; i < tok.size(); ++i) {
        uint64_t v = detail::parse_u64_token(tok[i], lineno, "row entry");
        if (v >= *q)
          throw ValidationError("row entry " + std::to_string(v) + " not reduced mod " +
                                std::to_string(*q) + " on line " + std::to_string(lineno));
        row.push_back(v);
      }
      rows.back().push_back(std::move(row));
      continue;
    }

    throw ParseError(lineno, "unknown directive '" + head + "'");
  }

  if (!(q && k && m && zdim && kind && seed))
    throw ValidationError("missing code header (need q, K, M, zdim, kind, seed)");
  if (names.empty()) throw ValidationError("code has no nodes");

  LinearSecureCode code{PrimeField(*q)};
  code.K = *k;
  code.M = *m;
  code.zdim = *zdim;
  code.kind = *kind;
  code.seed = *seed;
  code.node_names = std::move(names);
  size_t cols = code.input_cols();
  for (auto& node_rows : rows) {
    FieldMatrix mat(node_rows.size(), cols);
    for (size_t r = 0; r < node_rows.size(); ++r)
      for (size_t c = 0; c < cols; ++c) mat.at(r, c) = node_rows[r][c];
    code.node_matrix.push_back(std::move(mat));
  }
  return code;
}

}  // namespace secstore
