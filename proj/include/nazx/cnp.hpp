#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nazx/gflow.hpp"
#include "nazx/phase.hpp"
#include "nazx/zx_diagram.hpp"

namespace nazx {

/// Gadget structure of an n-qubit controlled phase: phase alpha on every
/// anchor and a gadget with phase (-1)^{|s|+1} alpha on every subset s of at
/// least two anchors. Subsets are bitmasks over anchor positions.
struct CnpTemplate {
  struct Entry {
    std::uint64_t subset;
    Phase phase;
    friend bool operator==(const Entry&, const Entry&) = default;
  };
  int n = 0;
  Phase phi;
  Phase alpha;
  Phase anchor_phase;
  std::vector<Entry> required;
};

inline Phase subset_phase(const Phase& alpha, int size) {
  return size % 2 == 1 ? alpha : -alpha;
}

inline CnpTemplate theorem1_template(int n, const Phase& phi) {
  if (n < 2) throw std::invalid_argument("controlled phase needs n >= 2");
  if (n > 62) throw std::invalid_argument("controlled phase too large");
  CnpTemplate t;
  t.n = n;
  t.phi = phi;
  t.alpha = phi.div_pow2(static_cast<unsigned>(n - 1));
  t.anchor_phase = t.alpha;
  for (std::uint64_t s = 1; s < (std::uint64_t{1} << n); ++s) {
    const int k = std::popcount(s);
    if (k >= 2) t.required.push_back({s, subset_phase(t.alpha, k)});
  }
  return t;
}

inline std::vector<SpiderId> subset_members(const std::vector<SpiderId>& anchors,
                                            std::uint64_t s) {
  std::vector<SpiderId> out;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (s & (std::uint64_t{1} << i)) out.push_back(anchors[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Adds a root/top gadget on `legs` and returns it.
inline GadgetView add_gadget(ZxDiagram& d, const std::vector<SpiderId>& legs,
                             const Phase& phase) {
  if (legs.empty()) throw DiagramError("gadget without legs");
  SpiderId root = d.add_spider();
  SpiderId top = d.add_spider(phase);
  d.toggle_edge(root, top);
  for (SpiderId w : legs) d.toggle_edge(root, w);
  GadgetView g{top, root, legs};
  std::sort(g.legs.begin(), g.legs.end());
  return g;
}

inline void remove_gadget(ZxDiagram& d, const GadgetView& g) {
  d.remove_spider(g.top);
  d.remove_spider(g.root);
}

/// Splices the template onto `anchors` (anchor i plays template position i).
inline std::vector<GadgetView> instantiate_template(
    ZxDiagram& d, const CnpTemplate& t, const std::vector<SpiderId>& anchors) {
  if (static_cast<int>(anchors.size()) != t.n) {
    throw std::invalid_argument("anchor count does not match template");
  }
  for (SpiderId a : anchors) {
    if (!d.contains(a)) throw DiagramError("unknown anchor " + to_string(a));
  }
  std::vector<GadgetView> out;
  for (const auto& e : t.required) {
    out.push_back(add_gadget(d, subset_members(anchors, e.subset), e.phase));
  }
  for (SpiderId a : anchors) d.add_to_phase(a, t.anchor_phase);
  return out;
}

/// Appendix-B combinatorial sum:
/// sum_{k=1..n} (-1)^{k+1} sum_j C(l,j) C(n-l,k-j) (j mod 2).
inline std::int64_t lemma2_sum(int n, int l) {
  if (n < 1 || l < 0 || l > n) throw std::out_of_range("lemma2_sum range");
  if (n > 60) throw std::out_of_range("lemma2_sum: n too large");
  auto binom = [](int a, int b) -> std::int64_t {
    if (b < 0 || b > a) return 0;
    std::int64_t r = 1;
    for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
  };
  std::int64_t total = 0;
  for (int k = 1; k <= n; ++k) {
    std::int64_t inner = 0;
    for (int j = 1; j <= std::min(k, l); j += 2) {
      inner += binom(l, j) * binom(n - l, k - j);
    }
    total += (k % 2 == 1 ? 1 : -1) * inner;
  }
  return total;
}

/// Diagonal phase the template applies to computational basis state `basis`.
inline Phase phase_accumulation(const CnpTemplate& t,
                                const std::vector<bool>& basis) {
  if (static_cast<int>(basis.size()) != t.n) {
    throw std::invalid_argument("basis length mismatch");
  }
  std::uint64_t bits = 0;
  for (int i = 0; i < t.n; ++i) {
    if (basis[static_cast<std::size_t>(i)]) bits |= std::uint64_t{1} << i;
  }
  Phase total = t.anchor_phase * std::popcount(bits);
  for (const auto& e : t.required) {
    if (std::popcount(e.subset & bits) % 2 == 1) total += e.phase;
  }
  return total;
}

inline Phase gadget_phase(const ZxDiagram& d, const GadgetView& g) {
  return d.phase(g.top);
}

/// Sets the gadget to `desired` and adds a sibling gadget on the same legs
/// carrying the remainder. Returns the sibling, or nullopt when the phases
/// already agree.
inline std::optional<GadgetView> split_gadget(ZxDiagram& d,
                                              const GadgetView& g,
                                              const Phase& desired) {
  auto check = gadget_at_root(d, g.root);
  if (!check || check->top != g.top) throw DiagramError("invalid gadget");
  const Phase current = d.phase(g.top);
  if (current == desired) return std::nullopt;
  d.set_phase(g.top, desired);
  return add_gadget(d, check->legs, current - desired);
}

/// Sets the anchor's phase to `desired`; the caller emits the returned
/// residue as an Rz gate.
inline Phase split_output_phase(ZxDiagram& d, SpiderId anchor,
                                const Phase& desired) {
  const Phase residue = d.phase(anchor) - desired;
  d.set_phase(anchor, desired);
  return residue;
}

/// Open graph plus gflow maintained across insertions of YZ vertices on the
/// outputs (debug mode).
struct GflowTracker {
  LabeledOpenGraph graph;
  GFlow flow;
  int verified_insertions = 0;

  static GflowTracker from_diagram(const ZxDiagram& d) {
    GflowTracker t;
    t.graph = LabeledOpenGraph::from_diagram(d);
    auto f = find_gflow(t.graph);
    if (!f) throw GflowError("no gflow before insertion");
    t.flow = std::move(*f);
    return t;
  }

  void record_insertion(const GadgetView& g) {
    std::vector<std::size_t> legs;
    for (SpiderId w : g.legs) {
      auto i = graph.index_of(w);
      if (!i) throw GflowError("gflow insertion: unknown leg");
      legs.push_back(*i);
    }
    auto [h, f] = extend_gflow_insertion(graph, flow, legs, g.root);
    if (!verify_gflow(h, f)) {
      throw GflowError("extended gflow failed verification");
    }
    graph = std::move(h);
    flow = std::move(f);
    ++verified_insertions;
  }
};

/// Adds gadgets +phase and -phase on `legs`, which must be output spiders.
/// Returns (kept, residual).
inline std::pair<GadgetView, GadgetView> insert_identity_pair(
    ZxDiagram& d, const std::vector<SpiderId>& legs, const Phase& phase,
    GflowTracker* tracker = nullptr) {
  for (SpiderId w : legs) {
    if (!d.contains(w) || !d.is_output(w)) {
      throw DiagramError("identity pair leg outside the frontier");
    }
  }
  GadgetView kept = add_gadget(d, legs, phase);
  if (tracker) tracker->record_insertion(kept);
  GadgetView residual = add_gadget(d, legs, -phase);
  if (tracker) tracker->record_insertion(residual);
  return {kept, residual};
}

enum class InsertMode { NoInsert, WithInsert };

struct MatchPlan {
  struct Split {
    GadgetView gadget;
    Phase desired;
  };
  struct Insertion {
    std::vector<SpiderId> legs;
    Phase phase;
  };
  std::vector<SpiderId> targets;  // ascending; anchor i = targets[i]
  Phase alpha;
  GadgetView seed;
  std::vector<GadgetView> matched;  // existing gadgets used as-is
  std::vector<Split> splits;
  std::vector<std::pair<SpiderId, Phase>> output_phase_adjustments;
  std::vector<Insertion> insertions;

  [[nodiscard]] Phase phi() const {
    return alpha.mul_pow2(static_cast<unsigned>(targets.size() - 1));
  }
};

/// Looks for a seed gadget whose legs all lie in `frontier` and plans how
/// to complete it into an exact controlled-phase structure. Seeds are tried
/// by decreasing leg count, then ascending root id; seeds with alpha = 0 or
/// phi = 0, more than `max_size` legs, or (in no-insert mode) missing sub-gadgets are
/// skipped.
inline std::optional<MatchPlan> match_cnp(
    const ZxDiagram& d, const std::vector<SpiderId>& frontier, InsertMode mode,
    std::optional<int> max_size = std::nullopt) {
  std::vector<SpiderId> front(frontier);
  std::sort(front.begin(), front.end());
  auto in_front = [&](SpiderId v) {
    return std::binary_search(front.begin(), front.end(), v);
  };
  std::vector<GadgetView> all = find_gadgets(d);
  std::map<std::vector<SpiderId>, GadgetView> by_legs;
  std::vector<GadgetView> seeds;
  for (const auto& g : all) {
    if (!std::all_of(g.legs.begin(), g.legs.end(), in_front)) continue;
    by_legs.emplace(g.legs, g);  // first (smallest root) wins
    if (g.legs.size() >= 2) seeds.push_back(g);
  }
  std::stable_sort(seeds.begin(), seeds.end(),
                   [](const GadgetView& a, const GadgetView& b) {
                     return a.legs.size() > b.legs.size();
                   });
  for (const auto& seed : seeds) {
    const int n = static_cast<int>(seed.legs.size());
    if (n > 62) continue;
    if (max_size && n > *max_size) continue;
    const Phase p = d.phase(seed.top);
    const Phase alpha = n % 2 == 1 ? p : -p;
    if (alpha.is_zero()) continue;
    MatchPlan plan;
    plan.targets = seed.legs;
    plan.alpha = alpha;
    if (plan.phi().is_zero()) continue;
    plan.seed = seed;
    bool ok = true;
    for (std::uint64_t s = 1; s < (std::uint64_t{1} << n) && ok; ++s) {
      const int k = std::popcount(s);
      if (k < 2 || k == n) continue;
      const auto legs = subset_members(plan.targets, s);
      const Phase want = subset_phase(alpha, k);
      auto it = by_legs.find(legs);
      if (it != by_legs.end()) {
        if (d.phase(it->second.top) == want) {
          plan.matched.push_back(it->second);
        } else {
          plan.splits.push_back({it->second, want});
        }
      } else if (mode == InsertMode::WithInsert) {
        plan.insertions.push_back({legs, want});
      } else {
        ok = false;
      }
    }
    if (!ok) continue;
    for (SpiderId a : plan.targets) {
      plan.output_phase_adjustments.emplace_back(a, d.phase(a) - alpha);
    }
    return plan;
  }
  return std::nullopt;
}

/// Result of executing a plan: the controlled phase to emit on `anchors`
/// and Rz residues split off the anchors.
struct CnpExtraction {
  std::vector<SpiderId> anchors;
  Phase phi;
  std::vector<std::pair<SpiderId, Phase>> residues;
  int insertions = 0;
  int splits = 0;
};

/// Executes a plan: splits and insertions complete the structure, which is
/// then removed from the diagram (gadgets deleted, anchors left at phase 0).
inline CnpExtraction apply_match_plan(ZxDiagram& d, const MatchPlan& plan,
                                      GflowTracker* tracker = nullptr) {
  CnpExtraction out;
  out.anchors = plan.targets;
  out.phi = plan.phi();
  std::vector<GadgetView> consume{plan.seed};
  consume.insert(consume.end(), plan.matched.begin(), plan.matched.end());
  for (const auto& s : plan.splits) {
    auto rest = split_gadget(d, s.gadget, s.desired);
    if (rest && tracker) tracker->record_insertion(*rest);
    consume.push_back(s.gadget);
    ++out.splits;
  }
  for (const auto& ins : plan.insertions) {
    auto [kept, residual] = insert_identity_pair(d, ins.legs, ins.phase, tracker);
    (void)residual;
    consume.push_back(kept);
    ++out.insertions;
  }
  for (const auto& g : consume) remove_gadget(d, g);
  for (SpiderId a : plan.targets) {
    const Phase residue = split_output_phase(d, a, plan.alpha);
    d.set_phase(a, Phase::zero());
    if (!residue.is_zero()) out.residues.emplace_back(a, residue);
  }
  return out;
}

}  // namespace nazx
