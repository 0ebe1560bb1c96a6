#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "nazx/circuit.hpp"

namespace nazx {

namespace passes_detail {

inline bool is_z_rotation(GateKind k) {
  switch (k) {
    case GateKind::Z:
    case GateKind::S:
    case GateKind::Sdg:
    case GateKind::T:
    case GateKind::Tdg:
    case GateKind::Rz:
      return true;
    default:
      return false;
  }
}

inline bool is_controlled_phase(GateKind k) {
  return k == GateKind::CZ || k == GateKind::NCP || k == GateKind::NCZ;
}

inline bool same_qubit_set(const Gate& a, const Gate& b) {
  if (a.qubits.size() != b.qubits.size()) return false;
  auto x = a.qubits, y = b.qubits;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  return x == y;
}

/// Single left-to-right sweep. Each qubit keeps the stack of live gates that
/// touch it; a new gate is matched only against gates it can legally be
/// commuted next to.
class Sweep {
 public:
  explicit Sweep(int num_qubits)
      : stacks_(static_cast<std::size_t>(num_qubits)) {}

  bool changed = false;

  void push(const Gate& g) {
    if (is_z_rotation(g.kind) && merge_z_rotation(g)) return;
    if (is_controlled_phase(g.kind) && merge_controlled_phase(g)) return;
    if (!is_z_rotation(g.kind) && !is_controlled_phase(g.kind) &&
        merge_adjacent(g)) {
      return;
    }
    out_.push_back(g);
    for (int q : g.qubits) stack(q).push_back(out_.size() - 1);
  }

  Circuit finish(int num_qubits) const {
    Circuit c(num_qubits);
    for (const auto& g : out_) {
      if (g) c.add(*g);
    }
    return c;
  }

 private:
  std::vector<std::size_t>& stack(int q) {
    return stacks_[static_cast<std::size_t>(q)];
  }

  void erase(std::size_t idx) {
    for (int q : out_[idx]->qubits) {
      auto& s = stack(q);
      s.erase(std::find(s.begin(), s.end(), idx));
    }
    out_[idx].reset();
    changed = true;
  }

  bool merge_z_rotation(const Gate& g) {
    auto& s = stack(g.qubits[0]);
    for (auto it = s.rbegin(); it != s.rend(); ++it) {
      Gate& prev = *out_[*it];
      if (is_z_rotation(prev.kind)) {
        Phase sum = z_rotation_angle(prev.kind, prev.angle) +
                    z_rotation_angle(g.kind, g.angle);
        if (sum.is_zero()) {
          erase(*it);
        } else {
          prev = Gate::rz(prev.qubits[0], sum);
          changed = true;
        }
        return true;
      }
      if (!is_diagonal(prev.kind)) return false;
    }
    return false;
  }

  // Diagonal multi-qubit gates commute with every diagonal gate, so the
  // partner may sit below other diagonal gates on each qubit stack.
  bool merge_controlled_phase(const Gate& g) {
    auto& s0 = stack(g.qubits[0]);
    std::optional<std::size_t> partner;
    for (auto it = s0.rbegin(); it != s0.rend(); ++it) {
      const Gate& prev = *out_[*it];
      if (is_controlled_phase(prev.kind) && same_qubit_set(prev, g)) {
        partner = *it;
        break;
      }
      if (!is_diagonal(prev.kind)) return false;
    }
    if (!partner) return false;
    for (int q : g.qubits) {
      auto& s = stack(q);
      for (auto it = s.rbegin(); it != s.rend(); ++it) {
        if (*it == *partner) break;
        if (!is_diagonal(out_[*it]->kind)) return false;
      }
    }
    Gate& prev = *out_[*partner];
    Phase sum = prev.controlled_phase() + g.controlled_phase();
    if (sum.is_zero()) {
      erase(*partner);
    } else if (sum == Phase::pi() && prev.qubits.size() == 2) {
      prev = Gate::cz(prev.qubits[0], prev.qubits[1]);
      changed = true;
    } else if (sum == Phase::pi()) {
      prev = Gate::ncz(prev.qubits);
      changed = true;
    } else {
      prev = Gate::ncp(prev.qubits, sum);
      changed = true;
    }
    return true;
  }

  bool merge_adjacent(const Gate& g) {
    const auto& s0 = stack(g.qubits[0]);
    if (s0.empty()) return false;
    const std::size_t idx = s0.back();
    for (int q : g.qubits) {
      const auto& s = stack(q);
      if (s.empty() || s.back() != idx) return false;
    }
    Gate& prev = *out_[idx];
    if (prev.kind != g.kind || !same_qubit_set(prev, g)) return false;
    switch (g.kind) {
      case GateKind::H:
      case GateKind::X:
      case GateKind::Y:
      case GateKind::Swap:
        erase(idx);
        return true;
      case GateKind::CX:
        if (prev.qubits != g.qubits) return false;
        erase(idx);
        return true;
      case GateKind::Rx:
      case GateKind::Ry: {
        Phase sum = prev.angle + g.angle;
        if (sum.is_zero()) {
          erase(idx);
        } else {
          prev.angle = sum;
          changed = true;
        }
        return true;
      }
      default:
        return false;
    }
  }

  std::vector<std::optional<Gate>> out_;
  std::vector<std::vector<std::size_t>> stacks_;
};

}  // namespace passes_detail

/// Peephole cancellation: removes adjacent self-inverse pairs, merges
/// z-rotations (through intervening diagonal gates) and controlled phases on
/// identical qubit sets, and looks past gates on disjoint qubits. Runs to a
/// fixpoint capped at 10 sweeps. Never increases the gate count.
inline Circuit cancel_gates(const Circuit& c) {
  Circuit current = c;
  for (int pass = 0; pass < 10; ++pass) {
    passes_detail::Sweep sweep(c.num_qubits());
    for (const auto& g : current.gates()) sweep.push(g);
    Circuit next = sweep.finish(c.num_qubits());
    const bool changed = sweep.changed;
    current = std::move(next);
    if (!changed) break;
  }
  current.set_measured(c.measured());
  return current;
}

/// "No-decomp" baseline: every CX becomes H-conjugated CZ on the target and
/// swaps are expanded through CX; CZ, NCZ and NCP are kept as native
/// controlled phases.
inline Circuit to_ncz_baseline(const Circuit& c) {
  Circuit out(c.num_qubits());
  auto cx = [&](int ctl, int tgt) {
    out.add(Gate::h(tgt));
    out.add(Gate::cz(ctl, tgt));
    out.add(Gate::h(tgt));
  };
  for (const auto& g : c.gates()) {
    switch (g.kind) {
      case GateKind::CX:
        cx(g.qubits[0], g.qubits[1]);
        break;
      case GateKind::Swap:
        cx(g.qubits[0], g.qubits[1]);
        cx(g.qubits[1], g.qubits[0]);
        cx(g.qubits[0], g.qubits[1]);
        break;
      default:
        out.add(g);
    }
  }
  out.set_measured(c.measured());
  return out;
}

}  // namespace nazx
