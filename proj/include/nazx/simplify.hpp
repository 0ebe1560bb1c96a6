#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "nazx/cnp.hpp"
#include "nazx/gflow.hpp"
#include "nazx/zx_diagram.hpp"

namespace nazx {

struct RewriteStep {
  std::string rule;
  std::vector<std::uint32_t> spiders;
  std::size_t spiders_before = 0;
  std::size_t spiders_after = 0;
  std::size_t edges_before = 0;
  std::size_t edges_after = 0;
};

struct RewriteTrace {
  std::vector<RewriteStep> steps;
  int iterations = 0;
  int gflow_checks = 0;

  [[nodiscard]] std::size_t count(const std::string& rule) const {
    return static_cast<std::size_t>(
        std::count_if(steps.begin(), steps.end(),
                      [&](const RewriteStep& s) { return s.rule == rule; }));
  }

  [[nodiscard]] nlohmann::json to_json() const {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& s : steps) {
      a.push_back({{"rule", s.rule},
                   {"spiders", s.spiders},
                   {"spiders_before", s.spiders_before},
                   {"spiders_after", s.spiders_after},
                   {"edges_before", s.edges_before},
                   {"edges_after", s.edges_after}});
    }
    return {{"iterations", iterations}, {"steps", a}};
  }
};

class SimplifyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// True for spiders that belong to a phase gadget, as root or as top.
inline bool in_gadget(const ZxDiagram& d, SpiderId v) {
  return is_gadget_root(d, v) || is_gadget_top(d, v);
}

/// Moves every boundary role of `v` onto a fresh phase-0 spider joined to v
/// by a Hadamard wire (the flag of the moved wire flips). Afterwards v is
/// interior. Returns the new spiders.
inline std::vector<SpiderId> unfuse_boundary(ZxDiagram& d, SpiderId v) {
  std::vector<SpiderId> out;
  for (auto* ws : {&d.mutable_inputs(), &d.mutable_outputs()}) {
    for (auto& b : *ws) {
      if (b.spider != v) continue;
      SpiderId w = d.add_spider();
      d.toggle_edge(w, v);
      b.spider = w;
      b.hadamard = !b.hadamard;
      out.push_back(w);
    }
  }
  return out;
}

/// (lc): removes an interior +-pi/2 spider, complementing its neighbourhood
/// and subtracting its phase from every neighbour.
inline bool lc_simp(ZxDiagram& d, SpiderId v) {
  if (!d.is_interior(v)) throw DiagramError("lc_simp on boundary spider");
  const Phase a = d.phase(v);
  if (!a.is_proper_clifford()) return false;
  local_complement_graph(d, v);
  for (SpiderId w : std::vector<SpiderId>(d.neighbors(v).begin(),
                                          d.neighbors(v).end())) {
    d.add_to_phase(w, -a);
  }
  d.remove_spider(v);
  return true;
}

/// (p): removes adjacent interior spiders u, v with phases in {0, pi}.
inline bool pivot_simp(ZxDiagram& d, SpiderId u, SpiderId v) {
  if (!d.is_interior(u) || !d.is_interior(v)) {
    throw DiagramError("pivot_simp on boundary spider");
  }
  if (!d.connected(u, v)) throw DiagramError("pivot_simp on non-adjacent pair");
  const Phase pu = d.phase(u), pv = d.phase(v);
  if (!pu.is_pauli() || !pv.is_pauli()) return false;
  std::vector<SpiderId> a, b, c;
  for (SpiderId w : d.neighbors(u)) {
    if (w == v) continue;
    (d.connected(w, v) ? c : a).push_back(w);
  }
  for (SpiderId w : d.neighbors(v)) {
    if (w != u && !d.connected(w, u)) b.push_back(w);
  }
  pivot_graph(d, u, v);
  for (SpiderId w : a) d.add_to_phase(w, pv);
  for (SpiderId w : b) d.add_to_phase(w, pu);
  for (SpiderId w : c) d.add_to_phase(w, pu + pv + Phase::pi());
  d.remove_spider(u);
  d.remove_spider(v);
  return true;
}

/// A phase-pi spider with a degree-1 interior neighbour t acts like a gadget
/// root with phase 0 and top phase -phase(t). Rewrites it into that form.
inline bool normalize_gadget_root(ZxDiagram& d, SpiderId r) {
  if (!d.contains(r) || !d.is_interior(r) || d.phase(r) != Phase::pi()) {
    return false;
  }
  if (d.degree(r) < 2) return false;
  for (SpiderId t : d.neighbors(r)) {
    if (d.degree(t) == 1 && d.is_interior(t)) {
      d.set_phase(r, Phase::zero());
      d.set_phase(t, -d.phase(t));
      return true;
    }
  }
  return false;
}

/// Pivots interior Pauli u against interior non-Clifford v by first turning
/// v's phase into a gadget; u and v disappear and a gadget carrying
/// +-phase(v) appears on u's former neighbourhood.
inline bool gadget_pivot(ZxDiagram& d, SpiderId u, SpiderId v) {
  if (!d.is_interior(u) || !d.is_interior(v)) {
    throw DiagramError("gadget_pivot on boundary spider");
  }
  if (!d.connected(u, v)) throw DiagramError("gadget_pivot on non-adjacent pair");
  if (!d.phase(u).is_pauli() || d.phase(v).is_clifford()) return false;
  const Phase sigma = d.phase(v);
  d.set_phase(v, Phase::zero());
  SpiderId m = d.add_spider();
  SpiderId s = d.add_spider(sigma);
  d.toggle_edge(v, m);
  d.toggle_edge(m, s);
  pivot_simp(d, u, v);
  if (d.phase(m) == Phase::pi()) {
    d.set_phase(m, Phase::zero());
    d.set_phase(s, -d.phase(s));
  }
  if (d.degree(m) == 1) {
    d.remove_spider(s);
    d.remove_spider(m);
  }
  return true;
}

/// Merges gadgets with identical leg sets, adding top phases. Returns the
/// number of merges. Gadgets left with phase 0 are removed.
inline int gadget_fusion(ZxDiagram& d, std::vector<RewriteStep>* steps = nullptr) {
  int fused = 0;
  std::map<std::vector<SpiderId>, GadgetView> first;
  for (const auto& g : find_gadgets(d)) {
    if (!d.contains(g.root) || !is_gadget_root(d, g.root)) continue;
    auto [it, fresh] = first.emplace(g.legs, g);
    if (fresh) continue;
    const std::size_t before = d.num_spiders(), eb = d.num_edges();
    const GadgetView& keep = it->second;
    d.add_to_phase(keep.top, d.phase(g.top));
    remove_gadget(d, g);
    ++fused;
    if (d.phase(keep.top).is_zero()) {
      remove_gadget(d, keep);
      first.erase(it);
    }
    if (steps) {
      steps->push_back({"gadget_fusion", {keep.root.value, g.root.value}, before,
                        d.num_spiders(), eb, d.num_edges()});
    }
  }
  return fused;
}

struct SimplifyOptions {
  /// Run find_gflow after every rewrite; throws SimplifyError on failure.
  bool check_gflow = false;
  /// Assert the lexicographic termination measure after every iteration.
  bool check_measure = true;
  bool record_trace = true;
  int max_iterations = 1'000'000;
};

/// Lexicographic termination measure: (spiders, interior non-gadget
/// non-Clifford spiders, interior non-gadget Clifford spiders).
inline std::tuple<std::size_t, std::size_t, std::size_t> simplify_measure(
    const ZxDiagram& d) {
  std::size_t non_clifford = 0, clifford = 0;
  for (SpiderId v : d.spiders()) {
    if (!d.is_interior(v) || in_gadget(d, v)) continue;
    (d.phase(v).is_clifford() ? clifford : non_clifford)++;
  }
  return {d.num_spiders(), non_clifford, clifford};
}

namespace simplify_detail {

class Driver {
 public:
  Driver(ZxDiagram& d, const SimplifyOptions& o) : d_(d), opt_(o) {}

  RewriteTrace trace;

  void run() {
    check_gflow("initial");
    cleanup();
    auto measure = simplify_measure(d_);
    for (int it = 0;; ++it) {
      if (it >= opt_.max_iterations) {
        throw SimplifyError("full_simplify: iteration cap reached");
      }
      const bool changed = lc_pass() || pivot_pass() || boundary_pivot_pass() ||
                           boundary_lc_pass() || gadget_pivot_pass() ||
                           fusion_pass();
      if (!changed) break;
      cleanup();
      ++trace.iterations;
      auto next = simplify_measure(d_);
      if (opt_.check_measure && !(next < measure)) {
        throw SimplifyError("full_simplify: termination measure did not decrease");
      }
      measure = next;
    }
  }

 private:
  void record(const std::string& rule, std::vector<std::uint32_t> ids,
              std::size_t before, std::size_t eb) {
    if (opt_.record_trace) {
      trace.steps.push_back(
          {rule, std::move(ids), before, d_.num_spiders(), eb, d_.num_edges()});
    }
    check_gflow(rule);
  }

  void check_gflow(const std::string& rule) {
    if (!opt_.check_gflow) return;
    ++trace.gflow_checks;
    if (!find_gflow(LabeledOpenGraph::from_diagram(d_))) {
      throw SimplifyError("gflow lost after " + rule);
    }
  }

  bool pauli_candidate(SpiderId v) const {
    return d_.contains(v) && d_.is_interior(v) && d_.phase(v).is_pauli() &&
           !in_gadget(d_, v);
  }

  // Scalar components, Pauli gadgets, pi roots and identity spiders.
  bool cleanup() {
    bool any = false;
    for (bool again = true; again;) {
      again = false;
      for (SpiderId v : d_.spiders()) {
        if (!d_.contains(v) || !d_.is_interior(v)) continue;
        const std::size_t before = d_.num_spiders(), eb = d_.num_edges();
        if (d_.degree(v) == 0) {
          d_.remove_spider(v);
          record("remove_scalar", {v.value}, before, eb);
          again = true;
          continue;
        }
        if (d_.degree(v) == 1) {
          SpiderId w = *d_.neighbors(v).begin();
          if (d_.is_interior(w) && d_.degree(w) == 1) {
            d_.remove_spider(v);
            d_.remove_spider(w);
            record("remove_scalar", {v.value, w.value}, before, eb);
            again = true;
            continue;
          }
        }
        if (normalize_gadget_root(d_, v)) {
          record("gadget_root_pi", {v.value}, before, eb);
          again = true;
          continue;
        }
        if (auto g = gadget_at_root(d_, v)) {
          const Phase p = d_.phase(g->top);
          if (p.is_pauli()) {
            for (SpiderId w : g->legs) d_.add_to_phase(w, p);
            remove_gadget(d_, *g);
            record("remove_pauli_gadget", {v.value}, before, eb);
            again = true;
            continue;
          }
        }
        if (remove_identity(v)) {
          record("remove_identity", {v.value}, before, eb);
          again = true;
        }
      }
      any = any || again;
    }
    return any;
  }

  // Interior phase-0 degree-2 spider between a and b: fuses b into a.
  bool remove_identity(SpiderId v) {
    if (!d_.phase(v).is_zero() || d_.degree(v) != 2) return false;
    auto it = d_.neighbors(v).begin();
    SpiderId a = *it++;
    SpiderId b = *it;
    if (d_.is_boundary(b) && !d_.is_boundary(a)) std::swap(a, b);
    if ((d_.is_input(a) && d_.is_input(b)) ||
        (d_.is_output(a) && d_.is_output(b))) {
      return false;
    }
    d_.remove_spider(v);
    d_.add_to_phase(a, d_.phase(b));
    for (SpiderId w : std::vector<SpiderId>(d_.neighbors(b).begin(),
                                            d_.neighbors(b).end())) {
      if (w == a) {
        d_.add_to_phase(a, Phase::pi());
      } else {
        d_.toggle_edge(a, w);
      }
    }
    for (auto* ws : {&d_.mutable_inputs(), &d_.mutable_outputs()}) {
      for (auto& bw : *ws) {
        if (bw.spider == b) bw.spider = a;
      }
    }
    d_.remove_spider(b);
    return true;
  }

  bool lc_pass() {
    bool any = false;
    for (SpiderId v : d_.spiders()) {
      if (!d_.contains(v) || !d_.is_interior(v)) continue;
      const std::size_t before = d_.num_spiders(), eb = d_.num_edges();
      if (is_gadget_top(d_, v) && d_.phase(v).is_proper_clifford()) {
        // Clifford gadget: top and root go together.
        SpiderId r = *d_.neighbors(v).begin();
        lc_simp(d_, v);
        lc_simp(d_, r);
        record("lc_gadget", {v.value, r.value}, before, eb);
        any = true;
      } else if (lc_simp(d_, v)) {
        record("lc", {v.value}, before, eb);
        any = true;
      }
    }
    return any;
  }

  bool pivot_pass() {
    bool any = false;
    for (SpiderId u : d_.spiders()) {
      if (!pauli_candidate(u)) continue;
      for (SpiderId v : d_.neighbors(u)) {
        if (!pauli_candidate(v)) continue;
        const std::size_t before = d_.num_spiders(), eb = d_.num_edges();
        pivot_simp(d_, u, v);
        record("pivot", {u.value, v.value}, before, eb);
        any = true;
        break;
      }
    }
    return any;
  }

  bool boundary_pivot_pass() {
    for (SpiderId u : d_.spiders()) {
      if (!pauli_candidate(u)) continue;
      for (SpiderId v : d_.neighbors(u)) {
        if (!d_.is_boundary(v) || !d_.phase(v).is_pauli()) continue;
        const std::size_t before = d_.num_spiders(), eb = d_.num_edges();
        unfuse_boundary(d_, v);
        pivot_simp(d_, u, v);
        record("boundary_pivot", {u.value, v.value}, before, eb);
        return true;
      }
    }
    return false;
  }

  // Interior Pauli u next to a +-pi/2 boundary spider v: v is moved off the
  // boundary and both are removed by (lc).
  bool boundary_lc_pass() {
    for (SpiderId u : d_.spiders()) {
      if (!pauli_candidate(u)) continue;
      for (SpiderId v : d_.neighbors(u)) {
        if (!d_.is_boundary(v) || !d_.phase(v).is_proper_clifford()) continue;
        const std::size_t before = d_.num_spiders(), eb = d_.num_edges();
        unfuse_boundary(d_, v);
        lc_simp(d_, v);
        lc_simp(d_, u);
        record("boundary_lc", {u.value, v.value}, before, eb);
        return true;
      }
    }
    return false;
  }

  bool gadget_pivot_pass() {
    bool any = false;
    for (SpiderId u : d_.spiders()) {
      if (!pauli_candidate(u)) continue;
      for (SpiderId v : d_.neighbors(u)) {
        if (!d_.is_interior(v) || d_.phase(v).is_clifford() || in_gadget(d_, v)) {
          continue;
        }
        const std::size_t before = d_.num_spiders(), eb = d_.num_edges();
        gadget_pivot(d_, u, v);
        record("gadget_pivot", {u.value, v.value}, before, eb);
        any = true;
        break;
      }
    }
    return any;
  }

  bool fusion_pass() {
    std::vector<RewriteStep> steps;
    const int n = gadget_fusion(d_, &steps);
    if (opt_.record_trace) {
      trace.steps.insert(trace.steps.end(), steps.begin(), steps.end());
    }
    if (n > 0) check_gflow("gadget_fusion");
    return n > 0;
  }

  ZxDiagram& d_;
  SimplifyOptions opt_;
};

}  // namespace simplify_detail

/// Rewrites a graph-like diagram to a fixpoint of identity removal, (lc),
/// (p), boundary pivots, gadget pivots and gadget fusion, in that priority.
/// Afterwards no interior spider has phase +-pi/2 and no two interior
/// non-gadget Pauli spiders are adjacent.
inline RewriteTrace full_simplify(ZxDiagram& d, const SimplifyOptions& opt = {}) {
  simplify_detail::Driver drv(d, opt);
  drv.run();
  return std::move(drv.trace);
}

}  // namespace nazx
