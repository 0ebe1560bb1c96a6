#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nazx/phase.hpp"

namespace nazx {

enum class GateKind {
  H, X, Y, Z, S, Sdg, T, Tdg, Rx, Ry, Rz, CX, CZ, Swap, NCP, NCZ
};

inline std::string_view gate_name(GateKind k) {
  switch (k) {
    case GateKind::H: return "h";
    case GateKind::X: return "x";
    case GateKind::Y: return "y";
    case GateKind::Z: return "z";
    case GateKind::S: return "s";
    case GateKind::Sdg: return "sdg";
    case GateKind::T: return "t";
    case GateKind::Tdg: return "tdg";
    case GateKind::Rx: return "rx";
    case GateKind::Ry: return "ry";
    case GateKind::Rz: return "rz";
    case GateKind::CX: return "cx";
    case GateKind::CZ: return "cz";
    case GateKind::Swap: return "swap";
    case GateKind::NCP: return "ncp";
    case GateKind::NCZ: return "ncz";
  }
  return "?";
}

inline bool has_angle(GateKind k) {
  return k == GateKind::Rx || k == GateKind::Ry || k == GateKind::Rz ||
         k == GateKind::NCP;
}

inline bool is_single_qubit(GateKind k) {
  switch (k) {
    case GateKind::CX:
    case GateKind::CZ:
    case GateKind::Swap:
    case GateKind::NCP:
    case GateKind::NCZ:
      return false;
    default:
      return true;
  }
}

/// Gates that are diagonal in the computational basis.
inline bool is_diagonal(GateKind k) {
  switch (k) {
    case GateKind::Z:
    case GateKind::S:
    case GateKind::Sdg:
    case GateKind::T:
    case GateKind::Tdg:
    case GateKind::Rz:
    case GateKind::CZ:
    case GateKind::NCP:
    case GateKind::NCZ:
      return true;
    default:
      return false;
  }
}

/// Phase-gate angle of a diagonal single-qubit gate (Z, S, T, ... as Rz).
inline Phase z_rotation_angle(GateKind k, const Phase& angle) {
  switch (k) {
    case GateKind::Z: return Phase::pi();
    case GateKind::S: return {1, 2};
    case GateKind::Sdg: return {-1, 2};
    case GateKind::T: return {1, 4};
    case GateKind::Tdg: return {-1, 4};
    case GateKind::Rz: return angle;
    default: throw std::invalid_argument("not a z rotation");
  }
}

struct Gate {
  GateKind kind = GateKind::H;
  std::vector<int> qubits;
  Phase angle;  // meaningful for Rx/Ry/Rz/NCP only

  friend bool operator==(const Gate& a, const Gate& b) {
    if (a.kind != b.kind || a.qubits != b.qubits) return false;
    return !has_angle(a.kind) || a.angle == b.angle;
  }

  /// Effective phase of an NCP/NCZ/CZ gate.
  [[nodiscard]] Phase controlled_phase() const {
    return kind == GateKind::NCP ? angle : Phase::pi();
  }

  static Gate single(GateKind k, int q, Phase a = {}) { return {k, {q}, a}; }
  static Gate h(int q) { return single(GateKind::H, q); }
  static Gate x(int q) { return single(GateKind::X, q); }
  static Gate rz(int q, Phase a) { return single(GateKind::Rz, q, a); }
  static Gate rx(int q, Phase a) { return single(GateKind::Rx, q, a); }
  static Gate ry(int q, Phase a) { return single(GateKind::Ry, q, a); }
  static Gate cx(int c, int t) { return {GateKind::CX, {c, t}, {}}; }
  static Gate cz(int a, int b) { return {GateKind::CZ, {a, b}, {}}; }
  static Gate swap(int a, int b) { return {GateKind::Swap, {a, b}, {}}; }
  static Gate ncp(std::vector<int> qs, Phase phi) {
    return {GateKind::NCP, std::move(qs), phi};
  }
  static Gate ncz(std::vector<int> qs) {
    return {GateKind::NCZ, std::move(qs), {}};
  }

  [[nodiscard]] std::string to_string() const {
    std::string s(gate_name(kind));
    if (has_angle(kind)) s += "(" + angle.to_string() + ")";
    for (std::size_t i = 0; i < qubits.size(); ++i) {
      s += (i == 0 ? " " : ",") + std::to_string(qubits[i]);
    }
    return s;
  }
};

inline std::ostream& operator<<(std::ostream& os, const Gate& g) {
  return os << g.to_string();
}

class InvalidGate : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ordered gate list over a fixed number of qubits.
///
/// Qubit indices are little-endian throughout the library: qubit q is bit q
/// of a computational basis index.
class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(int num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits < 0) throw std::invalid_argument("negative qubit count");
  }
  Circuit(int num_qubits, std::initializer_list<Gate> gates)
      : Circuit(num_qubits) {
    for (const auto& g : gates) add(g);
  }

  [[nodiscard]] int num_qubits() const { return num_qubits_; }
  [[nodiscard]] const std::vector<Gate>& gates() const { return gates_; }
  [[nodiscard]] std::size_t size() const { return gates_.size(); }
  [[nodiscard]] bool empty() const { return gates_.empty(); }

  /// Qubits measured at the end of the source program (metadata only).
  [[nodiscard]] const std::vector<int>& measured() const { return measured_; }
  void set_measured(std::vector<int> qs) { measured_ = std::move(qs); }

  Circuit& add(Gate g) {
    validate(g);
    gates_.push_back(std::move(g));
    return *this;
  }

  void validate(const Gate& g) const {
    const std::size_t n = g.qubits.size();
    if (n == 0) throw InvalidGate("gate without qubits");
    for (std::size_t i = 0; i < n; ++i) {
      if (g.qubits[i] < 0 || g.qubits[i] >= num_qubits_) {
        throw InvalidGate("qubit index out of range in " + g.to_string());
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (g.qubits[i] == g.qubits[j]) {
          throw InvalidGate("repeated qubit in " + g.to_string());
        }
      }
    }
    switch (g.kind) {
      case GateKind::CX:
      case GateKind::CZ:
      case GateKind::Swap:
        if (n != 2) throw InvalidGate("two-qubit gate arity");
        break;
      case GateKind::NCP:
      case GateKind::NCZ:
        if (n < 2) throw InvalidGate("ncp/ncz need at least two qubits");
        break;
      default:
        if (n != 1) throw InvalidGate("single-qubit gate arity");
    }
  }

  friend bool operator==(const Circuit& a, const Circuit& b) {
    return a.num_qubits_ == b.num_qubits_ && a.gates_ == b.gates_;
  }

 private:
  int num_qubits_ = 0;
  std::vector<Gate> gates_;
  std::vector<int> measured_;
};

}  // namespace nazx
