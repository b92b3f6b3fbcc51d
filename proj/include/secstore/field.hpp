#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "secstore/errors.hpp"

namespace secstore {

// Largest allowed modulus. Residues stay below 2^31 so a product of two of
// them fits in a uint64_t without overflow; all arithmetic is exact.
inline constexpr uint64_t kMaxModulus = uint64_t(1) << 31;

inline bool is_prime(uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

// Smallest prime >= n.
inline uint64_t next_prime_at_least(uint64_t n) {
  if (n <= 2) return 2;
  if (n % 2 == 0) ++n;
  while (!is_prime(n)) n += 2;
  return n;
}

// q^e, or nullopt if the result would exceed cap.
inline std::optional<uint64_t> checked_pow(uint64_t base, uint64_t exp, uint64_t cap) {
  unsigned __int128 acc = 1;
  for (uint64_t i = 0; i < exp; ++i) {
    acc *= base;
    if (acc > cap) return std::nullopt;
  }
  return uint64_t(acc);
}

struct PrimeField {
  uint64_t q;

  explicit PrimeField(uint64_t modulus) : q(modulus) {
    if (q < 2 || q > kMaxModulus)
      throw ValidationError("field modulus " + std::to_string(q) + " out of range [2, 2^31]");
    if (!is_prime(q))
      throw ValidationError("field modulus " + std::to_string(q) + " is not prime");
  }

  // Operands must already be reduced residues in [0, q).
  uint64_t add(uint64_t a, uint64_t b) const { return (a + b) % q; }
  uint64_t sub(uint64_t a, uint64_t b) const { return (a + q - b) % q; }
  uint64_t neg(uint64_t a) const { return a == 0 ? 0 : q - a; }
  uint64_t mul(uint64_t a, uint64_t b) const { return a * b % q; }
  uint64_t reduce(uint64_t a) const { return a % q; }

  uint64_t pow(uint64_t a, uint64_t e) const {
    uint64_t acc = 1;
    while (e > 0) {
      if (e & 1) acc = mul(acc, a);
      a = mul(a, a);
      e >>= 1;
    }
    return acc;
  }

  uint64_t inv(uint64_t a) const {
    if (a == 0) throw PreconditionError("inverse of zero");
    return pow(a, q - 2);
  }

  bool operator==(const PrimeField&) const = default;
};

// Deterministic splittable generator (splitmix64). Seeding is explicit and
// all downstream sampling threads a state value, never global randomness.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound); rejection keeps the draw unbiased.
  uint64_t below(uint64_t bound) {
    if (bound == 0) throw PreconditionError("below: zero bound");
    uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t v = next();
    while (v >= limit) v = next();
    return v % bound;
  }

  // Derive an independent stream.
  SplitMix64 split() { return SplitMix64(next() ^ 0x5851f42d4c957f2dull); }

 private:
  uint64_t state_;
};

// Dense row-major matrix of reduced residues.
struct FieldMatrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<uint64_t> data;

  FieldMatrix() = default;
  FieldMatrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0) {}

  uint64_t& at(size_t r, size_t c) { return data[r * cols + c]; }
  uint64_t at(size_t r, size_t c) const { return data[r * cols + c]; }

  static FieldMatrix identity(size_t n) {
    FieldMatrix m(n, n);
    for (size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  bool operator==(const FieldMatrix&) const = default;
};

inline FieldMatrix transpose(const FieldMatrix& m) {
  FieldMatrix t(m.cols, m.rows);
  for (size_t r = 0; r < m.rows; ++r)
    for (size_t c = 0; c < m.cols; ++c) t.at(c, r) = m.at(r, c);
  return t;
}

inline FieldMatrix vstack(const FieldMatrix& a, const FieldMatrix& b) {
  if (a.rows == 0) return b;
  if (b.rows == 0 && b.cols == 0) return a;
  if (a.cols != b.cols) throw PreconditionError("vstack: column count mismatch");
  FieldMatrix m(a.rows + b.rows, a.cols);
  std::copy(a.data.begin(), a.data.end(), m.data.begin());
  std::copy(b.data.begin(), b.data.end(), m.data.begin() + a.data.size());
  return m;
}

// Columns of m listed in `cols`, in the given order.
inline FieldMatrix select_columns(const FieldMatrix& m, const std::vector<size_t>& cols) {
  FieldMatrix out(m.rows, cols.size());
  for (size_t r = 0; r < m.rows; ++r)
    for (size_t i = 0; i < cols.size(); ++i) out.at(r, i) = m.at(r, cols[i]);
  return out;
}

inline FieldMatrix matmul(const PrimeField& f, const FieldMatrix& a, const FieldMatrix& b) {
  if (a.cols != b.rows) throw PreconditionError("matmul: shape mismatch");
  FieldMatrix m(a.rows, b.cols);
  for (size_t r = 0; r < a.rows; ++r) {
    for (size_t k = 0; k < a.cols; ++k) {
      uint64_t v = a.at(r, k);
      if (v == 0) continue;
      for (size_t c = 0; c < b.cols; ++c)
        m.at(r, c) = (m.at(r, c) + v * b.at(k, c)) % f.q;
    }
  }
  return m;
}

inline std::vector<uint64_t> matvec(const PrimeField& f, const FieldMatrix& a,
                                    const std::vector<uint64_t>& x) {
  if (a.cols != x.size()) throw PreconditionError("matvec: shape mismatch");
  std::vector<uint64_t> y(a.rows, 0);
  for (size_t r = 0; r < a.rows; ++r) {
    uint64_t acc = 0;
    for (size_t c = 0; c < a.cols; ++c) acc = (acc + a.at(r, c) * x[c]) % f.q;
    y[r] = acc;
  }
  return y;
}

// In-place reduced row echelon form. Returns the pivot columns; pivot rows
// are normalized to 1 and moved to the top in pivot order. When `transform`
// is given it must start as the identity and receives the same row
// operations, so transform * original = reduced.
inline std::vector<size_t> rref_in_place(const PrimeField& f, FieldMatrix& m,
                                         FieldMatrix* transform = nullptr) {
  std::vector<size_t> pivots;
  size_t row = 0;
  for (size_t col = 0; col < m.cols && row < m.rows; ++col) {
    size_t pivot = row;
    while (pivot < m.rows && m.at(pivot, col) == 0) ++pivot;
    if (pivot == m.rows) continue;
    if (pivot != row) {
      for (size_t c = 0; c < m.cols; ++c) std::swap(m.at(pivot, c), m.at(row, c));
      if (transform)
        for (size_t c = 0; c < transform->cols; ++c)
          std::swap(transform->at(pivot, c), transform->at(row, c));
    }
    uint64_t scale = f.inv(m.at(row, col));
    if (scale != 1) {
      for (size_t c = 0; c < m.cols; ++c) m.at(row, c) = f.mul(m.at(row, c), scale);
      if (transform)
        for (size_t c = 0; c < transform->cols; ++c)
          transform->at(row, c) = f.mul(transform->at(row, c), scale);
    }
    for (size_t r = 0; r < m.rows; ++r) {
      if (r == row || m.at(r, col) == 0) continue;
      uint64_t factor = m.at(r, col);
      for (size_t c = 0; c < m.cols; ++c)
        m.at(r, c) = f.sub(m.at(r, c), f.mul(factor, m.at(row, c)));
      if (transform)
        for (size_t c = 0; c < transform->cols; ++c)
          transform->at(r, c) = f.sub(transform->at(r, c), f.mul(factor, transform->at(row, c)));
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

inline size_t rank(const PrimeField& f, FieldMatrix m) {
  return rref_in_place(f, m).size();
}

// Find D with D * m = target, or nullopt when some target row lies outside
// the row space of m. D is the canonical solution assembled from the
// elimination transform (one valid left-inverse among possibly many).
inline std::optional<FieldMatrix> solve_left(const PrimeField& f, const FieldMatrix& m,
                                             const FieldMatrix& target) {
  if (m.cols != target.cols) throw PreconditionError("solve_left: column count mismatch");
  FieldMatrix reduced = m;
  FieldMatrix t = FieldMatrix::identity(m.rows);
  std::vector<size_t> pivots = rref_in_place(f, reduced, &t);

  FieldMatrix d(target.rows, m.rows);
  std::vector<uint64_t> residual(m.cols);
  for (size_t i = 0; i < target.rows; ++i) {
    for (size_t c = 0; c < m.cols; ++c) residual[c] = target.at(i, c);
    for (size_t p = 0; p < pivots.size(); ++p) {
      uint64_t coef = residual[pivots[p]];
      if (coef == 0) continue;
      for (size_t c = 0; c < m.cols; ++c)
        residual[c] = f.sub(residual[c], f.mul(coef, reduced.at(p, c)));
      for (size_t c = 0; c < m.rows; ++c)
        d.at(i, c) = f.add(d.at(i, c), f.mul(coef, t.at(p, c)));
    }
    for (uint64_t v : residual)
      if (v != 0) return std::nullopt;
  }
  return d;
}

// i.i.d. uniform entries, consumed from rng in row-major order.
inline FieldMatrix sample_matrix(const PrimeField& f, size_t rows, size_t cols, SplitMix64& rng) {
  FieldMatrix m(rows, cols);
  for (uint64_t& v : m.data) v = rng.below(f.q);
  return m;
}

}  // namespace secstore
