#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nazx/gf2.hpp"
#include "nazx/zx_diagram.hpp"

namespace nazx {

enum class Plane { XY, YZ, XZ };

inline const char* plane_name(Plane p) {
  switch (p) {
    case Plane::XY: return "XY";
    case Plane::YZ: return "YZ";
    case Plane::XZ: return "XZ";
  }
  return "?";
}

/// Index-based labeled open graph (G, I, O, lambda). Vertex i corresponds to
/// diagram spider ids[i] when built from a diagram.
struct LabeledOpenGraph {
  std::vector<BitRow> adj;
  BitRow inputs;
  BitRow outputs;
  std::vector<Plane> labels;
  std::vector<SpiderId> ids;

  LabeledOpenGraph() = default;
  explicit LabeledOpenGraph(std::size_t n)
      : adj(n, BitRow(n)), inputs(n), outputs(n), labels(n, Plane::XY) {
    for (std::size_t i = 0; i < n; ++i) {
      ids.push_back(SpiderId{static_cast<std::uint32_t>(i)});
    }
  }

  [[nodiscard]] std::size_t size() const { return adj.size(); }

  void add_edge(std::size_t a, std::size_t b) {
    if (a == b) throw std::invalid_argument("open graph self-loop");
    adj[a][b] = true;
    adj[b][a] = true;
  }

  [[nodiscard]] std::optional<std::size_t> index_of(SpiderId v) const {
    auto it = std::lower_bound(ids.begin(), ids.end(), v);
    if (it == ids.end() || *it != v) return std::nullopt;
    return static_cast<std::size_t>(it - ids.begin());
  }

  /// Vertices are all spiders except gadget tops. A spider r with a
  /// degree-1 interior neighbour t (the smallest such) and Clifford phase is
  /// one measured qubit together with t: plane YZ when phase(r) is 0 or pi
  /// (gadget roots), XZ when it is +-pi/2. Every other spider is XY. Inputs
  /// and outputs are the boundary spiders.
  static LabeledOpenGraph from_diagram(const ZxDiagram& d) {
    auto top_of = [&](SpiderId r) -> std::optional<SpiderId> {
      if (!d.is_interior(r) || d.degree(r) < 2 || !d.phase(r).is_clifford()) {
        return std::nullopt;
      }
      for (SpiderId t : d.neighbors(r)) {
        if (d.degree(t) == 1 && d.is_interior(t)) return t;
      }
      return std::nullopt;
    };
    std::vector<SpiderId> vs;
    for (SpiderId v : d.spiders()) {
      if (d.is_interior(v) && d.degree(v) == 1) {
        auto t = top_of(*d.neighbors(v).begin());
        if (t && *t == v) continue;
      }
      vs.push_back(v);
    }
    LabeledOpenGraph g(vs.size());
    g.ids = vs;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (d.is_input(vs[i])) g.inputs[i] = true;
      if (d.is_output(vs[i])) g.outputs[i] = true;
      if (top_of(vs[i])) {
        g.labels[i] = d.phase(vs[i]).is_pauli() ? Plane::YZ : Plane::XZ;
      }
      for (SpiderId w : d.neighbors(vs[i])) {
        if (auto j = g.index_of(w)) g.adj[i][*j] = true;
      }
    }
    return g;
  }
};

/// Correction sets (absent for outputs) plus integer levels: u precedes w
/// iff level[u] < level[w].
struct GFlow {
  std::vector<std::optional<BitRow>> g;
  std::vector<int> level;
};

inline BitRow odd_neighborhood(const LabeledOpenGraph& G, const BitRow& s) {
  BitRow odd(G.size());
  for (std::size_t v = s.find_first(); v != BitRow::npos; v = s.find_next(v)) {
    odd ^= G.adj[v];
  }
  return odd;
}

/// Maximally delayed gflow search: each round corrects every still
/// unprocessed vertex whose conditions can be met using only already
/// processed non-inputs, found by one multi-right-hand-side GF(2) solve.
/// Complete for all three planes.
inline std::optional<GFlow> find_gflow(const LabeledOpenGraph& G) {
  const std::size_t n = G.size();
  GFlow f;
  f.g.assign(n, std::nullopt);
  std::vector<int> round(n, -1);
  BitRow processed = G.outputs;
  for (std::size_t v = 0; v < n; ++v) {
    if (G.outputs[v]) round[v] = 0;
  }
  int k = 0;
  while (processed.count() < n) {
    ++k;
    std::vector<std::size_t> rows, cols;
    for (std::size_t v = 0; v < n; ++v) {
      if (!processed[v]) {
        rows.push_back(v);
      } else if (!G.inputs[v]) {
        cols.push_back(v);
      }
    }
    BitMatrix m(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < cols.size(); ++c) {
        m.set(r, c, G.adj[rows[r]][cols[c]]);
      }
    }
    std::vector<BitRow> rhs;
    for (std::size_t u : rows) {
      BitRow b(rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const bool self = rows[r] == u;
        const bool nb = G.adj[u][rows[r]];
        switch (G.labels[u]) {
          case Plane::XY: b[r] = self; break;
          case Plane::YZ: b[r] = nb; break;
          case Plane::XZ: b[r] = self != nb; break;
        }
      }
      rhs.push_back(std::move(b));
    }
    const auto sols = solve_gf2(m, rhs);
    std::vector<std::size_t> done;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::size_t u = rows[i];
      if (!sols[i]) continue;
      if (G.labels[u] != Plane::XY && G.inputs[u]) continue;
      BitRow corr(n);
      for (std::size_t c = 0; c < cols.size(); ++c) {
        if ((*sols[i])[c]) corr[cols[c]] = true;
      }
      if (G.labels[u] != Plane::XY) corr[u] = true;
      f.g[u] = std::move(corr);
      done.push_back(u);
    }
    if (done.empty()) return std::nullopt;
    for (std::size_t u : done) {
      processed[u] = true;
      round[u] = k;
    }
  }
  f.level.assign(n, 0);
  for (std::size_t v = 0; v < n; ++v) f.level[v] = k - round[v];
  return f;
}

/// Checks the gflow conditions for every non-output vertex, with the order
/// given by levels, plus g(v) containing no inputs.
inline bool verify_gflow(const LabeledOpenGraph& G, const GFlow& f) {
  const std::size_t n = G.size();
  if (f.g.size() != n || f.level.size() != n) return false;
  for (std::size_t v = 0; v < n; ++v) {
    if (G.outputs[v]) continue;
    if (!f.g[v] || f.g[v]->size() != n) return false;
    const BitRow& gv = *f.g[v];
    if ((gv & G.inputs).any()) return false;
    const BitRow odd = odd_neighborhood(G, gv);
    const BitRow later = gv | odd;
    for (std::size_t w = later.find_first(); w != BitRow::npos;
         w = later.find_next(w)) {
      if (w != v && f.level[v] >= f.level[w]) return false;
    }
    const bool in_g = gv[v];
    const bool in_odd = odd[v];
    switch (G.labels[v]) {
      case Plane::XY:
        if (in_g || !in_odd) return false;
        break;
      case Plane::XZ:
        if (!in_g || !in_odd) return false;
        break;
      case Plane::YZ:
        if (!in_g || in_odd) return false;
        break;
    }
  }
  return true;
}

class GflowError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inserting a YZ vertex x adjacent only to outputs W keeps a gflow:
/// g'(x) = {x}, x is ordered after every non-output and before every output,
/// and g' agrees with g elsewhere. Returns the extended graph and flow.
inline std::pair<LabeledOpenGraph, GFlow> extend_gflow_insertion(
    const LabeledOpenGraph& G, const GFlow& f,
    const std::vector<std::size_t>& legs, SpiderId new_id = SpiderId{0}) {
  const std::size_t n = G.size();
  for (std::size_t w : legs) {
    if (w >= n || !G.outputs[w]) {
      throw GflowError("gflow insertion: leg is not an output");
    }
  }
  LabeledOpenGraph H;
  H.adj = G.adj;
  for (auto& row : H.adj) row.push_back(false);
  H.adj.emplace_back(n + 1);
  H.inputs = G.inputs;
  H.inputs.push_back(false);
  H.outputs = G.outputs;
  H.outputs.push_back(false);
  H.labels = G.labels;
  H.labels.push_back(Plane::YZ);
  H.ids = G.ids;
  H.ids.push_back(new_id);
  for (std::size_t w : legs) H.add_edge(n, w);

  GFlow out;
  int top = -1;
  for (std::size_t v = 0; v < n; ++v) {
    if (!G.outputs[v]) top = std::max(top, f.level[v]);
  }
  const int x_level = top + 1;
  for (std::size_t v = 0; v < n; ++v) {
    if (f.g[v]) {
      BitRow gv = *f.g[v];
      gv.push_back(false);
      out.g.push_back(std::move(gv));
    } else {
      out.g.push_back(std::nullopt);
    }
    out.level.push_back(G.outputs[v] ? std::max(f.level[v], x_level + 1)
                                     : f.level[v]);
  }
  BitRow gx(n + 1);
  gx[n] = true;
  out.g.push_back(std::move(gx));
  out.level.push_back(x_level);
  return {std::move(H), std::move(out)};
}

}  // namespace nazx
