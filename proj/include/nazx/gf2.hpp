#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace nazx {

using BitRow = boost::dynamic_bitset<>;

/// Dense matrix over GF(2), one bitset per row.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols)
      : cols_(cols), rows_(rows, BitRow(cols)) {}
  BitMatrix(std::initializer_list<std::initializer_list<int>> init) {
    for (const auto& r : init) {
      if (rows_.empty()) cols_ = r.size();
      if (r.size() != cols_) throw std::invalid_argument("ragged matrix");
      BitRow row(cols_);
      std::size_t j = 0;
      for (int v : r) row[j++] = (v & 1) != 0;
      rows_.push_back(std::move(row));
    }
  }

  [[nodiscard]] std::size_t rows() const { return rows_.size(); }
  [[nodiscard]] std::size_t cols() const { return cols_; }

  [[nodiscard]] bool get(std::size_t r, std::size_t c) const {
    return rows_[r][c];
  }
  void set(std::size_t r, std::size_t c, bool v = true) { rows_[r][c] = v; }

  [[nodiscard]] const BitRow& row(std::size_t r) const { return rows_[r]; }
  BitRow& row(std::size_t r) { return rows_[r]; }

  /// row[target] ^= row[source]
  void add_row(std::size_t source, std::size_t target) {
    rows_[target] ^= rows_[source];
  }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

  [[nodiscard]] std::string to_string() const {
    std::string s;
    for (const auto& r : rows_) {
      for (std::size_t j = 0; j < cols_; ++j) s += r[j] ? '1' : '0';
      s += '\n';
    }
    return s;
  }

 private:
  std::size_t cols_ = 0;
  std::vector<BitRow> rows_;
};

/// Elementary operation: row `target` += row `source`.
struct RowOp {
  std::size_t source;
  std::size_t target;
  friend bool operator==(const RowOp&, const RowOp&) = default;
};

/// True when every nonzero row has a leading one in a column that is zero in
/// all other rows (reduced row-echelon form up to a permutation of rows).
inline bool is_reduced(const BitMatrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const std::size_t lead = m.row(r).find_first();
    if (lead == BitRow::npos) continue;
    for (std::size_t o = 0; o < m.rows(); ++o) {
      if (o != r && m.get(o, lead)) return false;
    }
  }
  return true;
}

/// Gauss-Jordan elimination using row additions only (no swaps), so every
/// operation maps to a single CNOT. Reduces `m` in place to row-permuted
/// RREF and returns the operations applied, in order.
///
/// Among rows eligible as a column's pivot, the one with the fewest ones is
/// chosen (ties: lowest index), which keeps fill-in and operation count down.
inline std::vector<RowOp> gaussian_eliminate(BitMatrix& m) {
  std::vector<RowOp> ops;
  std::vector<bool> used(m.rows(), false);
  for (std::size_t c = 0; c < m.cols(); ++c) {
    std::optional<std::size_t> pivot;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (used[r] || !m.get(r, c)) continue;
      if (!pivot || m.row(r).count() < m.row(*pivot).count()) pivot = r;
    }
    if (!pivot) continue;
    used[*pivot] = true;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r != *pivot && m.get(r, c)) {
        m.add_row(*pivot, r);
        ops.push_back({*pivot, r});
      }
    }
  }
  return ops;
}

inline std::size_t gf2_rank(BitMatrix m) {
  gaussian_eliminate(m);
  std::size_t rank = 0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (m.row(r).any()) ++rank;
  }
  return rank;
}

/// Solves m x = b_k over GF(2) for every right-hand side b_k at once.
/// Each rhs has m.rows() bits; each solution has m.cols() bits. Free variables
/// are set to zero.
inline std::vector<std::optional<BitRow>> solve_gf2(
    const BitMatrix& m, const std::vector<BitRow>& rhs) {
  const std::size_t n = m.cols();
  const std::size_t k = rhs.size();
  // Augmented rows [m | b_0 ... b_{k-1}].
  BitMatrix aug(m.rows(), n + k);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < n; ++c) aug.set(r, c, m.get(r, c));
    for (std::size_t j = 0; j < k; ++j) {
      if (rhs[j].size() != m.rows()) {
        throw std::invalid_argument("rhs length mismatch");
      }
      aug.set(r, n + j, rhs[j][r]);
    }
  }
  std::vector<std::size_t> pivot_col(m.rows(), BitRow::npos);
  std::vector<bool> used(m.rows(), false);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = BitRow::npos;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (!used[r] && aug.get(r, c)) {
        p = r;
        break;
      }
    }
    if (p == BitRow::npos) continue;
    used[p] = true;
    pivot_col[p] = c;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r != p && aug.get(r, c)) aug.add_row(p, r);
    }
  }
  std::vector<std::optional<BitRow>> out(k);
  for (std::size_t j = 0; j < k; ++j) {
    BitRow x(n);
    bool ok = true;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (!aug.get(r, n + j)) continue;
      if (pivot_col[r] == BitRow::npos) {
        ok = false;
        break;
      }
      x[pivot_col[r]] = true;
    }
    if (ok) out[j] = std::move(x);
  }
  return out;
}

}  // namespace nazx
