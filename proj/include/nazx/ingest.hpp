#pragma once

#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "nazx/circuit.hpp"
#include "nazx/cnp.hpp"
#include "nazx/zx_diagram.hpp"

namespace nazx {

/// Unrestricted ZX-diagram as produced by gate templates: Z and X spiders,
/// boundary nodes, plain and Hadamard edges, parallel edges allowed.
struct RawDiagram {
  enum class Kind { Boundary, Z, X };
  struct Node {
    Kind kind;
    Phase phase;
  };
  struct Edge {
    int a;
    int b;
    bool hadamard;
  };
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::vector<int> inputs;
  std::vector<int> outputs;

  int add(Kind k, Phase p = {}) {
    nodes.push_back({k, p});
    return static_cast<int>(nodes.size()) - 1;
  }
  void connect(int a, int b, bool hadamard) { edges.push_back({a, b, hadamard}); }
};

namespace ingest_detail {

class WireBuilder {
 public:
  explicit WireBuilder(int n)
      : last_(static_cast<std::size_t>(n)),
        pending_h_(static_cast<std::size_t>(n), false) {
    for (int q = 0; q < n; ++q) {
      int b = raw.add(RawDiagram::Kind::Boundary);
      raw.inputs.push_back(b);
      last_[static_cast<std::size_t>(q)] = b;
    }
  }

  RawDiagram raw;

  void hadamard(int q) { pending_h_[idx(q)] = !pending_h_[idx(q)]; }

  int place(int q, RawDiagram::Kind k, Phase p = {}) {
    int v = raw.add(k, p);
    raw.connect(last_[idx(q)], v, pending_h_[idx(q)]);
    pending_h_[idx(q)] = false;
    last_[idx(q)] = v;
    return v;
  }

  void swap(int a, int b) {
    std::swap(last_[idx(a)], last_[idx(b)]);
    std::swap(pending_h_[idx(a)], pending_h_[idx(b)]);
  }

  RawDiagram finish() {
    for (std::size_t q = 0; q < last_.size(); ++q) {
      int b = raw.add(RawDiagram::Kind::Boundary);
      raw.connect(last_[q], b, pending_h_[q]);
      raw.outputs.push_back(b);
    }
    return std::move(raw);
  }

 private:
  static std::size_t idx(int q) { return static_cast<std::size_t>(q); }
  std::vector<int> last_;
  std::vector<bool> pending_h_;
};

}  // namespace ingest_detail

/// Replaces every gate by its ZX template. Controlled phases use the gadget
/// structure of theorem1_template spliced onto fresh Z spiders on each wire.
inline RawDiagram circuit_to_diagram(const Circuit& c) {
  using K = RawDiagram::Kind;
  ingest_detail::WireBuilder w(c.num_qubits());
  for (const auto& g : c.gates()) {
    const auto& q = g.qubits;
    switch (g.kind) {
      case GateKind::H: w.hadamard(q[0]); break;
      case GateKind::Z:
      case GateKind::S:
      case GateKind::Sdg:
      case GateKind::T:
      case GateKind::Tdg:
      case GateKind::Rz:
        w.place(q[0], K::Z, z_rotation_angle(g.kind, g.angle));
        break;
      case GateKind::X: w.place(q[0], K::X, Phase::pi()); break;
      case GateKind::Rx: w.place(q[0], K::X, g.angle); break;
      case GateKind::Y:
        w.place(q[0], K::Z, Phase::pi());
        w.place(q[0], K::X, Phase::pi());
        break;
      case GateKind::Ry:
        w.place(q[0], K::Z, Phase(-1, 2));
        w.place(q[0], K::X, g.angle);
        w.place(q[0], K::Z, Phase(1, 2));
        break;
      case GateKind::CX: {
        int a = w.place(q[0], K::Z);
        int b = w.place(q[1], K::X);
        w.raw.connect(a, b, false);
        break;
      }
      case GateKind::CZ: {
        int a = w.place(q[0], K::Z);
        int b = w.place(q[1], K::Z);
        w.raw.connect(a, b, true);
        break;
      }
      case GateKind::Swap: w.swap(q[0], q[1]); break;
      case GateKind::NCP:
      case GateKind::NCZ: {
        const int n = static_cast<int>(q.size());
        CnpTemplate t = theorem1_template(n, g.controlled_phase());
        std::vector<int> anchors;
        for (int qb : q) anchors.push_back(w.place(qb, K::Z, t.anchor_phase));
        for (const auto& e : t.required) {
          int root = w.raw.add(K::Z);
          int top = w.raw.add(K::Z, e.phase);
          w.raw.connect(root, top, true);
          for (int i = 0; i < n; ++i) {
            if (e.subset & (std::uint64_t{1} << i)) {
              w.raw.connect(root, anchors[static_cast<std::size_t>(i)], true);
            }
          }
        }
        break;
      }
    }
  }
  return w.finish();
}

/// Normalizes a raw diagram: X spiders are color-changed, Z spiders joined
/// by plain wires are fused, Hadamard self-loops become a pi phase, parallel
/// Hadamard wires cancel in pairs, and every boundary position gets its own
/// spider.
inline ZxDiagram to_graph_like(const RawDiagram& raw) {
  using K = RawDiagram::Kind;
  const std::size_t n = raw.nodes.size();
  std::vector<RawDiagram::Edge> edges = raw.edges;
  for (auto& e : edges) {
    int flips = (raw.nodes[static_cast<std::size_t>(e.a)].kind == K::X) +
                (raw.nodes[static_cast<std::size_t>(e.b)].kind == K::X);
    if (flips % 2 == 1) e.hadamard = !e.hadamard;
  }
  auto is_spider = [&](int v) {
    return raw.nodes[static_cast<std::size_t>(v)].kind != K::Boundary;
  };

  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      auto& p = parent[static_cast<std::size_t>(v)];
      p = parent[static_cast<std::size_t>(p)];
      v = p;
    }
    return v;
  };
  for (const auto& e : edges) {
    if (!e.hadamard && is_spider(e.a) && is_spider(e.b)) {
      int a = find(e.a), b = find(e.b);
      if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
  }

  ZxDiagram d;
  std::map<int, SpiderId> spider_of;
  for (std::size_t v = 0; v < n; ++v) {
    if (!is_spider(static_cast<int>(v))) continue;
    int r = find(static_cast<int>(v));
    auto it = spider_of.find(r);
    if (it == spider_of.end()) it = spider_of.emplace(r, d.add_spider()).first;
    d.add_to_phase(it->second, raw.nodes[v].phase);
  }

  std::map<int, std::pair<int, bool>> boundary_link;  // boundary -> (node, H)
  for (const auto& e : edges) {
    const bool sa = is_spider(e.a), sb = is_spider(e.b);
    if (sa && sb) {
      SpiderId a = spider_of.at(find(e.a));
      SpiderId b = spider_of.at(find(e.b));
      if (a == b) {
        if (e.hadamard) d.add_to_phase(a, Phase::pi());
      } else if (e.hadamard) {
        d.toggle_edge(a, b);
      }
    } else if (sa) {
      boundary_link[e.b] = {e.a, e.hadamard};
    } else if (sb) {
      boundary_link[e.a] = {e.b, e.hadamard};
    } else {
      boundary_link[e.a] = {e.b, e.hadamard};
      boundary_link[e.b] = {e.a, e.hadamard};
    }
  }

  // Boundary-to-boundary wires get a phase-0 spider carrying both roles.
  std::map<std::pair<int, int>, SpiderId> bare;
  auto attach = [&](int boundary, bool input) {
    const auto [other, h] = boundary_link.at(boundary);
    SpiderId s;
    bool flag = h;
    if (is_spider(other)) {
      s = spider_of.at(find(other));
    } else {
      const std::pair<int, int> key{std::min(boundary, other),
                                    std::max(boundary, other)};
      auto it = bare.find(key);
      if (it == bare.end()) it = bare.emplace(key, d.add_spider()).first;
      // The wire's Hadamard (if any) sits on the input side.
      flag = input ? h : false;
      s = it->second;
    }
    const bool taken = input ? d.is_input(s) : d.is_output(s);
    if (taken) {
      // Unfuse a phase-0 buffer so each side holds a spider at most once.
      SpiderId buf = d.add_spider();
      d.toggle_edge(buf, s);
      s = buf;
      flag = !flag;
    }
    if (input) {
      d.add_input(s, flag);
    } else {
      d.add_output(s, flag);
    }
  };
  for (int b : raw.inputs) attach(b, true);
  for (int b : raw.outputs) attach(b, false);
  return d;
}

/// circuit_to_diagram followed by to_graph_like.
inline ZxDiagram ingest(const Circuit& c) {
  return to_graph_like(circuit_to_diagram(c));
}

}  // namespace nazx
