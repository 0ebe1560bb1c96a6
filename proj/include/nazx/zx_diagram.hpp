#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nazx/phase.hpp"

namespace nazx {

/// Opaque, never-reused spider identifier. Ids are handed out in increasing
/// order, so ascending-id iteration is insertion order.
struct SpiderId {
  std::uint32_t value = 0;
  friend auto operator<=>(const SpiderId&, const SpiderId&) = default;
};

inline std::string to_string(SpiderId v) {
  return "s" + std::to_string(v.value);
}

/// One boundary position: the spider carrying the dangling wire, and whether
/// that wire carries a Hadamard.
struct BoundaryWire {
  SpiderId spider;
  bool hadamard = false;
  friend bool operator==(const BoundaryWire&, const BoundaryWire&) = default;
};

class DiagramError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Graph-like ZX-diagram: Z-spiders with phases, Hadamard wires forming a
/// simple graph, and ordered input/output boundary wires. Global scalars are
/// not tracked.
class ZxDiagram {
 public:
  SpiderId add_spider(Phase phase = {}) {
    SpiderId id{static_cast<std::uint32_t>(nodes_.size())};
    nodes_.push_back(Node{phase, {}});
    ++live_;
    return id;
  }

  void remove_spider(SpiderId v) {
    Node& n = node(v);
    for (SpiderId w : n.neighbors) node(w).neighbors.erase(v);
    edges_ -= n.neighbors.size();
    nodes_[v.value].reset();
    --live_;
    auto drop = [v](std::vector<BoundaryWire>& ws) {
      std::erase_if(ws, [v](const BoundaryWire& b) { return b.spider == v; });
    };
    drop(inputs_);
    drop(outputs_);
  }

  [[nodiscard]] bool contains(SpiderId v) const {
    return v.value < nodes_.size() && nodes_[v.value].has_value();
  }

  [[nodiscard]] const Phase& phase(SpiderId v) const { return node(v).phase; }
  void set_phase(SpiderId v, Phase p) { node(v).phase = p; }
  void add_to_phase(SpiderId v, Phase p) { node(v).phase += p; }

  [[nodiscard]] const std::set<SpiderId>& neighbors(SpiderId v) const {
    return node(v).neighbors;
  }
  [[nodiscard]] std::size_t degree(SpiderId v) const {
    return node(v).neighbors.size();
  }
  [[nodiscard]] bool connected(SpiderId u, SpiderId v) const {
    return node(u).neighbors.count(v) > 0;
  }

  /// Adds the Hadamard wire u-v if absent, removes it if present: parallel
  /// Hadamard wires cancel pairwise.
  void toggle_edge(SpiderId u, SpiderId v) {
    if (u == v) throw DiagramError("self-loop toggle on " + to_string(u));
    Node& a = node(u);
    Node& b = node(v);
    if (a.neighbors.erase(v) > 0) {
      b.neighbors.erase(u);
      --edges_;
    } else {
      a.neighbors.insert(v);
      b.neighbors.insert(u);
      ++edges_;
    }
  }
  void add_edge(SpiderId u, SpiderId v) {
    if (!connected(u, v)) toggle_edge(u, v);
  }
  void remove_edge(SpiderId u, SpiderId v) {
    if (connected(u, v)) toggle_edge(u, v);
  }

  [[nodiscard]] std::vector<SpiderId> spiders() const {
    std::vector<SpiderId> out;
    out.reserve(live_);
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i]) out.push_back(SpiderId{i});
    }
    return out;
  }
  [[nodiscard]] std::size_t num_spiders() const { return live_; }
  [[nodiscard]] std::size_t num_edges() const { return edges_; }
  /// One past the largest id ever issued.
  [[nodiscard]] std::uint32_t id_bound() const {
    return static_cast<std::uint32_t>(nodes_.size());
  }

  [[nodiscard]] const std::vector<BoundaryWire>& inputs() const {
    return inputs_;
  }
  [[nodiscard]] const std::vector<BoundaryWire>& outputs() const {
    return outputs_;
  }
  std::vector<BoundaryWire>& mutable_inputs() { return inputs_; }
  std::vector<BoundaryWire>& mutable_outputs() { return outputs_; }
  void add_input(SpiderId v, bool hadamard = false) {
    node(v);
    inputs_.push_back({v, hadamard});
  }
  void add_output(SpiderId v, bool hadamard = false) {
    node(v);
    outputs_.push_back({v, hadamard});
  }

  [[nodiscard]] bool is_input(SpiderId v) const { return holds(inputs_, v); }
  [[nodiscard]] bool is_output(SpiderId v) const { return holds(outputs_, v); }
  [[nodiscard]] bool is_boundary(SpiderId v) const {
    return is_input(v) || is_output(v);
  }
  [[nodiscard]] bool is_interior(SpiderId v) const { return !is_boundary(v); }

  /// Throws DiagramError when the simple-graph or boundary invariants fail.
  void check_invariants() const {
    std::size_t count = 0;
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
      if (!nodes_[i]) continue;
      SpiderId v{i};
      for (SpiderId w : nodes_[i]->neighbors) {
        if (w == v) throw DiagramError("self-loop at " + to_string(v));
        if (!contains(w) || !neighbors(w).count(v)) {
          throw DiagramError("asymmetric edge at " + to_string(v));
        }
        ++count;
      }
    }
    if (count != 2 * edges_) throw DiagramError("edge count drift");
    for (const auto* ws : {&inputs_, &outputs_}) {
      std::set<SpiderId> seen;
      for (const auto& b : *ws) {
        if (!contains(b.spider)) throw DiagramError("dangling boundary");
        if (!seen.insert(b.spider).second) {
          throw DiagramError("spider holds two boundary positions of one side");
        }
      }
    }
  }

  [[nodiscard]] nlohmann::json to_json() const {
    nlohmann::json spiders = nlohmann::json::array();
    nlohmann::json edges = nlohmann::json::array();
    for (SpiderId v : this->spiders()) {
      spiders.push_back({{"id", v.value},
                         {"phase", phase(v).to_string()},
                         {"phase_num", phase(v).numerator().str()},
                         {"phase_den", phase(v).denominator().str()}});
      for (SpiderId w : neighbors(v)) {
        if (v < w) edges.push_back({v.value, w.value});
      }
    }
    auto wires = [](const std::vector<BoundaryWire>& ws) {
      nlohmann::json a = nlohmann::json::array();
      for (const auto& b : ws) {
        a.push_back({{"spider", b.spider.value}, {"hadamard", b.hadamard}});
      }
      return a;
    };
    return {{"spiders", spiders},
            {"edges", edges},
            {"inputs", wires(inputs_)},
            {"outputs", wires(outputs_)}};
  }

 private:
  struct Node {
    Phase phase;
    std::set<SpiderId> neighbors;
  };

  static bool holds(const std::vector<BoundaryWire>& ws, SpiderId v) {
    return std::any_of(ws.begin(), ws.end(),
                       [v](const BoundaryWire& b) { return b.spider == v; });
  }

  Node& node(SpiderId v) {
    if (!contains(v)) throw DiagramError("unknown spider " + to_string(v));
    return *nodes_[v.value];
  }
  [[nodiscard]] const Node& node(SpiderId v) const {
    if (!contains(v)) throw DiagramError("unknown spider " + to_string(v));
    return *nodes_[v.value];
  }

  std::vector<std::optional<Node>> nodes_;
  std::vector<BoundaryWire> inputs_;
  std::vector<BoundaryWire> outputs_;
  std::size_t live_ = 0;
  std::size_t edges_ = 0;
};

/// n bare wires: spider i is both input i and output i.
inline ZxDiagram identity_diagram(int n) {
  ZxDiagram d;
  for (int i = 0; i < n; ++i) {
    SpiderId v = d.add_spider();
    d.add_input(v);
    d.add_output(v);
  }
  return d;
}

/// Toggles every edge among the neighbours of v (G * v).
inline void local_complement_graph(ZxDiagram& d, SpiderId v) {
  std::vector<SpiderId> nbrs(d.neighbors(v).begin(), d.neighbors(v).end());
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
      d.toggle_edge(nbrs[i], nbrs[j]);
    }
  }
}

/// Graph pivot along the edge u-v: G * u * v * u.
inline void pivot_graph(ZxDiagram& d, SpiderId u, SpiderId v) {
  if (!d.connected(u, v)) {
    throw DiagramError("pivot on non-adjacent spiders " + to_string(u) + ", " +
                       to_string(v));
  }
  local_complement_graph(d, u);
  local_complement_graph(d, v);
  local_complement_graph(d, u);
}

/// A phase gadget: a degree-1 `top` carrying the phase, hanging off a
/// phase-0 `root` whose other neighbours are the `legs`.
struct GadgetView {
  SpiderId top;
  SpiderId root;
  std::vector<SpiderId> legs;  // ascending
  friend bool operator==(const GadgetView&, const GadgetView&) = default;
};

/// Top of the gadget rooted at `root`, if `root` is a gadget root.
inline std::optional<SpiderId> gadget_top(const ZxDiagram& d, SpiderId root) {
  if (!d.is_interior(root) || !d.phase(root).is_zero() ||
      d.degree(root) < 2) {
    return std::nullopt;
  }
  for (SpiderId t : d.neighbors(root)) {
    if (d.degree(t) == 1 && d.is_interior(t)) return t;
  }
  return std::nullopt;
}

inline bool is_gadget_root(const ZxDiagram& d, SpiderId v) {
  return gadget_top(d, v).has_value();
}

/// True when v is the top of some gadget.
inline bool is_gadget_top(const ZxDiagram& d, SpiderId v) {
  if (!d.is_interior(v) || d.degree(v) != 1) return false;
  SpiderId r = *d.neighbors(v).begin();
  auto t = gadget_top(d, r);
  return t && *t == v;
}

inline std::optional<GadgetView> gadget_at_root(const ZxDiagram& d,
                                                SpiderId root) {
  auto t = gadget_top(d, root);
  if (!t) return std::nullopt;
  GadgetView g{*t, root, {}};
  for (SpiderId w : d.neighbors(root)) {
    if (w != *t) g.legs.push_back(w);
  }
  return g;
}

/// Every phase gadget in the diagram, ordered by root id. A root with more
/// than one degree-1 neighbour uses the smallest one as its top.
inline std::vector<GadgetView> find_gadgets(const ZxDiagram& d) {
  std::vector<GadgetView> out;
  for (SpiderId v : d.spiders()) {
    if (auto g = gadget_at_root(d, v)) out.push_back(std::move(*g));
  }
  return out;
}

}  // namespace nazx
