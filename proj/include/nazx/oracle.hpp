#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "nazx/circuit.hpp"
#include "nazx/zx_diagram.hpp"

namespace nazx {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

class OracleLimit : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline cplx expi(double a) { return std::polar(1.0, a); }

/// 2x2 matrix of a single-qubit gate. Rz(t) = diag(e^{-it/2}, e^{it/2}).
inline Mat2 single_qubit_matrix(GateKind k, const Phase& angle = {}) {
  using namespace std::complex_literals;
  const double r = 1.0 / std::sqrt(2.0);
  const double t = angle.to_radians();
  Mat2 m;
  switch (k) {
    case GateKind::H: m << r, r, r, -r; break;
    case GateKind::X: m << 0, 1, 1, 0; break;
    case GateKind::Y: m << 0, -1i, 1i, 0; break;
    case GateKind::Z: m << 1, 0, 0, -1; break;
    case GateKind::S: m << 1, 0, 0, 1i; break;
    case GateKind::Sdg: m << 1, 0, 0, -1i; break;
    case GateKind::T: m << 1, 0, 0, expi(M_PI / 4); break;
    case GateKind::Tdg: m << 1, 0, 0, expi(-M_PI / 4); break;
    case GateKind::Rx:
      m << std::cos(t / 2), -1i * std::sin(t / 2), -1i * std::sin(t / 2),
          std::cos(t / 2);
      break;
    case GateKind::Ry:
      m << std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2);
      break;
    case GateKind::Rz: m << expi(-t / 2), 0, 0, expi(t / 2); break;
    default: throw std::invalid_argument("not a single-qubit gate");
  }
  return m;
}

inline Mat2 single_qubit_matrix(const Gate& g) {
  return single_qubit_matrix(g.kind, g.angle);
}

inline Mat2 rz_matrix(double t) {
  Mat2 m;
  m << expi(-t / 2), 0, 0, expi(t / 2);
  return m;
}
inline Mat2 ry_matrix(double t) {
  Mat2 m;
  m << std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2);
  return m;
}

/// Left-multiplies `u` (rows indexed by little-endian basis states) by a
/// single-qubit matrix acting on qubit q.
inline void apply_single(Eigen::MatrixXcd& u, int q, const Mat2& m) {
  const Eigen::Index bit = Eigen::Index{1} << q;
  const cplx m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    cplx* col = u.col(c).data();
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      if (i & bit) continue;
      const cplx a = col[i], b = col[i | bit];
      col[i] = m00 * a + m01 * b;
      col[i | bit] = m10 * a + m11 * b;
    }
  }
}

/// Multiplies rows whose basis index has every bit of `qubits` set by e^{i phi}.
inline void apply_controlled_phase(Eigen::MatrixXcd& u,
                                   const std::vector<int>& qubits,
                                   double phi) {
  Eigen::Index mask = 0;
  for (int q : qubits) mask |= Eigen::Index{1} << q;
  const cplx f = expi(phi);
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    cplx* col = u.col(c).data();
    for (Eigen::Index i = mask; i < u.rows(); i = (i + 1) | mask) col[i] *= f;
  }
}

inline void apply_gate(Eigen::MatrixXcd& u, const Gate& g) {
  switch (g.kind) {
    case GateKind::CX: {
      const Eigen::Index c = Eigen::Index{1} << g.qubits[0];
      const Eigen::Index t = Eigen::Index{1} << g.qubits[1];
      for (Eigen::Index k = 0; k < u.cols(); ++k) {
        cplx* col = u.col(k).data();
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
          if ((i & c) && !(i & t)) std::swap(col[i], col[i | t]);
        }
      }
      break;
    }
    case GateKind::Swap: {
      const Eigen::Index a = Eigen::Index{1} << g.qubits[0];
      const Eigen::Index b = Eigen::Index{1} << g.qubits[1];
      for (Eigen::Index k = 0; k < u.cols(); ++k) {
        cplx* col = u.col(k).data();
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
          if ((i & a) && !(i & b)) std::swap(col[i], col[(i & ~a) | b]);
        }
      }
      break;
    }
    case GateKind::CZ:
    case GateKind::NCZ:
      apply_controlled_phase(u, g.qubits, M_PI);
      break;
    case GateKind::NCP:
      apply_controlled_phase(u, g.qubits, g.angle.to_radians());
      break;
    default:
      apply_single(u, g.qubits[0], single_qubit_matrix(g));
  }
}

/// Dense unitary of a circuit; entry (y, x) = <y|U|x> with qubit q as bit q.
inline Eigen::MatrixXcd circuit_unitary(const Circuit& c, int max_qubits = 12) {
  if (c.num_qubits() > max_qubits) {
    throw OracleLimit("circuit_unitary: too many qubits");
  }
  const Eigen::Index dim = Eigen::Index{1} << c.num_qubits();
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& g : c.gates()) apply_gate(u, g);
  return u;
}

namespace oracle_detail {

/// Table over a sorted list of binary variables; bit i of the index is the
/// value of vars[i].
struct Factor {
  std::vector<std::uint32_t> vars;
  std::vector<cplx> table;
};

inline Factor multiply(const Factor& a, const Factor& b, std::size_t limit) {
  Factor out;
  std::set_union(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(),
                 std::back_inserter(out.vars));
  if (out.vars.size() > limit) {
    throw OracleLimit("diagram_tensor: intermediate factor too large");
  }
  auto positions = [&](const Factor& f) {
    std::vector<std::size_t> pos;
    for (auto v : f.vars) {
      pos.push_back(static_cast<std::size_t>(
          std::lower_bound(out.vars.begin(), out.vars.end(), v) -
          out.vars.begin()));
    }
    return pos;
  };
  const auto pa = positions(a);
  const auto pb = positions(b);
  const std::size_t size = std::size_t{1} << out.vars.size();
  out.table.resize(size);
  for (std::size_t idx = 0; idx < size; ++idx) {
    std::size_t ia = 0, ib = 0;
    for (std::size_t k = 0; k < pa.size(); ++k) ia |= ((idx >> pa[k]) & 1) << k;
    for (std::size_t k = 0; k < pb.size(); ++k) ib |= ((idx >> pb[k]) & 1) << k;
    out.table[idx] = a.table[ia] * b.table[ib];
  }
  return out;
}

inline Factor sum_out(const Factor& f, std::uint32_t var) {
  const auto it = std::lower_bound(f.vars.begin(), f.vars.end(), var);
  const std::size_t p = static_cast<std::size_t>(it - f.vars.begin());
  Factor out;
  out.vars = f.vars;
  out.vars.erase(out.vars.begin() + static_cast<std::ptrdiff_t>(p));
  out.table.assign(std::size_t{1} << out.vars.size(), cplx{});
  const std::size_t low = (std::size_t{1} << p) - 1;
  for (std::size_t idx = 0; idx < f.table.size(); ++idx) {
    const std::size_t o = (idx & low) | ((idx >> (p + 1)) << p);
    out.table[o] += f.table[idx];
  }
  return out;
}

inline Factor pair_factor(std::uint32_t a, std::uint32_t b, bool hadamard) {
  Factor f;
  f.vars = {std::min(a, b), std::max(a, b)};
  if (hadamard) {
    f.table = {1.0, 1.0, 1.0, -1.0};
  } else {
    f.table = {1.0, 0.0, 0.0, 1.0};
  }
  return f;
}

}  // namespace oracle_detail

/// Tensor of a graph-like diagram as a 2^|O| x 2^|I| matrix, entry (y, x),
/// input i as bit i of x and output j as bit j of y. Computed by variable
/// elimination over the spider assignment sum; Hadamard wires contribute the
/// unnormalized factor (-1)^{ab}, so the result is correct up to a global
/// scalar only.
inline Eigen::MatrixXcd diagram_tensor(const ZxDiagram& d,
                                       std::size_t max_scope = 24) {
  using namespace oracle_detail;
  const std::uint32_t base = d.id_bound();
  const auto nin = static_cast<std::uint32_t>(d.inputs().size());
  const auto nout = static_cast<std::uint32_t>(d.outputs().size());
  if (nin + nout > max_scope) throw OracleLimit("diagram_tensor: too wide");

  std::vector<Factor> factors;
  for (SpiderId v : d.spiders()) {
    factors.push_back(Factor{{v.value}, {1.0, expi(d.phase(v).to_radians())}});
    for (SpiderId w : d.neighbors(v)) {
      if (v < w) factors.push_back(pair_factor(v.value, w.value, true));
    }
  }
  for (std::uint32_t i = 0; i < nin; ++i) {
    const auto& b = d.inputs()[i];
    factors.push_back(pair_factor(b.spider.value, base + i, b.hadamard));
  }
  for (std::uint32_t j = 0; j < nout; ++j) {
    const auto& b = d.outputs()[j];
    factors.push_back(pair_factor(b.spider.value, base + nin + j, b.hadamard));
  }

  // Greedy elimination: always the spider variable whose merged scope is
  // smallest.
  std::set<std::uint32_t> pending;
  for (SpiderId v : d.spiders()) pending.insert(v.value);
  while (!pending.empty()) {
    std::uint32_t best = 0;
    std::size_t best_scope = SIZE_MAX;
    for (std::uint32_t v : pending) {
      std::set<std::uint32_t> scope;
      for (const auto& f : factors) {
        if (std::binary_search(f.vars.begin(), f.vars.end(), v)) {
          scope.insert(f.vars.begin(), f.vars.end());
        }
      }
      if (scope.size() < best_scope) {
        best_scope = scope.size();
        best = v;
      }
    }
    pending.erase(best);
    Factor merged{{}, {1.0}};
    std::vector<Factor> rest;
    for (auto& f : factors) {
      if (std::binary_search(f.vars.begin(), f.vars.end(), best)) {
        merged = multiply(merged, f, max_scope);
      } else {
        rest.push_back(std::move(f));
      }
    }
    rest.push_back(sum_out(merged, best));
    factors = std::move(rest);
  }

  Factor all{{}, {1.0}};
  for (const auto& f : factors) all = multiply(all, f, max_scope);
  // `all` now ranges over boundary variables only, all of which appear.
  const Eigen::Index rows = Eigen::Index{1} << nout;
  const Eigen::Index cols = Eigen::Index{1} << nin;
  Eigen::MatrixXcd t(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y) {
    for (Eigen::Index x = 0; x < cols; ++x) {
      std::size_t idx = 0;
      for (std::size_t k = 0; k < all.vars.size(); ++k) {
        const std::uint32_t var = all.vars[k];
        const std::uint32_t off = var - base;
        const bool bit = off < nin ? ((x >> off) & 1) != 0
                                   : ((y >> (off - nin)) & 1) != 0;
        if (bit) idx |= std::size_t{1} << k;
      }
      t(y, x) = all.table[idx];
    }
  }
  return t;
}

/// Projective equality: after scaling both matrices so their largest entry
/// has modulus one, checks max|A - cB| < tol with c = A(i,j)/B(i,j) at the
/// largest-modulus entry of B.
inline bool equal_up_to_scalar(const Eigen::MatrixXcd& a,
                               const Eigen::MatrixXcd& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("equal_up_to_scalar: shape mismatch");
  }
  if (a.size() == 0) return true;
  const double na = a.cwiseAbs().maxCoeff();
  const double nb = b.cwiseAbs().maxCoeff();
  if (nb == 0.0) throw std::invalid_argument("equal_up_to_scalar: zero B");
  if (na == 0.0) return false;
  const Eigen::MatrixXcd an = a / na;
  const Eigen::MatrixXcd bn = b / nb;
  Eigen::Index bi = 0, bj = 0;
  bn.cwiseAbs().maxCoeff(&bi, &bj);
  const cplx c = an(bi, bj) / bn(bi, bj);
  return (an - c * bn).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace nazx
