#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "nazx/gflow.hpp"

namespace nazx::testkit {

/// Small open graph as bitmasks (at most 16 vertices).
struct SmallOpenGraph {
  int n = 0;
  std::vector<std::uint32_t> adj;
  std::uint32_t inputs = 0;
  std::uint32_t outputs = 0;
  std::vector<Plane> labels;

  [[nodiscard]] LabeledOpenGraph to_labeled() const {
    LabeledOpenGraph g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      g.inputs[ui] = (inputs >> i) & 1;
      g.outputs[ui] = (outputs >> i) & 1;
      g.labels[ui] = labels[ui];
      for (int j = 0; j < n; ++j) {
        if ((adj[ui] >> j) & 1) g.adj[ui][static_cast<std::size_t>(j)] = true;
      }
    }
    return g;
  }
};

inline std::uint32_t small_odd(const SmallOpenGraph& g, std::uint32_t s) {
  std::uint32_t odd = 0;
  for (int v = 0; v < g.n; ++v) {
    if ((s >> v) & 1) odd ^= g.adj[static_cast<std::size_t>(v)];
  }
  return odd;
}

/// Exhaustive existence check. A gflow exists iff the non-outputs can be
/// ordered so that each vertex v has a correction set among the non-input
/// vertices placed after it (plus v itself), with Odd and g outside v lying
/// after it. Searches every order via dynamic programming over the set of
/// already placed (later) vertices and enumerates every candidate set.
inline bool brute_force_has_gflow(const SmallOpenGraph& g) {
  const std::uint32_t all = (std::uint32_t{1} << g.n) - 1;
  const std::uint32_t noninputs = all & ~g.inputs;
  std::vector<char> reach(std::size_t{1} << g.n, 0);
  reach[g.outputs] = 1;
  auto correctable = [&](int v, std::uint32_t later) {
    const std::uint32_t bit = std::uint32_t{1} << v;
    const std::uint32_t pool = (later | bit) & noninputs;
    // enumerate every subset of pool, including empty
    for (std::uint32_t s = pool;; s = (s - 1) & pool) {
      const std::uint32_t odd = small_odd(g, s);
      const bool ok_order = (((s | odd) & ~bit) & ~later) == 0;
      if (ok_order) {
        const bool in_g = s & bit, in_odd = odd & bit;
        bool ok = false;
        switch (g.labels[static_cast<std::size_t>(v)]) {
          case Plane::XY: ok = !in_g && in_odd; break;
          case Plane::XZ: ok = in_g && in_odd; break;
          case Plane::YZ: ok = in_g && !in_odd; break;
        }
        if (ok) return true;
      }
      if (s == 0) break;
    }
    return false;
  };
  // Process subsets in increasing popcount so that predecessors are final.
  std::vector<std::uint32_t> order(std::size_t{1} << g.n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [](std::uint32_t a, std::uint32_t b) {
    return __builtin_popcount(a) < __builtin_popcount(b);
  });
  for (std::uint32_t placed : order) {
    if (!reach[placed]) continue;
    if (placed == all) return true;
    for (int v = 0; v < g.n; ++v) {
      const std::uint32_t bit = std::uint32_t{1} << v;
      if (placed & bit) continue;
      if (correctable(v, placed)) reach[placed | bit] = 1;
    }
  }
  return reach[all] != 0;
}

/// One representative adjacency (as edge bitmask over pairs) per isomorphism
/// class of simple graphs on n vertices.
inline std::vector<std::vector<std::uint32_t>> graph_classes(int n) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::set<std::uint32_t> seen;
  std::vector<std::vector<std::uint32_t>> out;
  const std::uint32_t combos = std::uint32_t{1} << pairs.size();
  for (std::uint32_t e = 0; e < combos; ++e) {
    std::iota(perm.begin(), perm.end(), 0);
    std::uint32_t canon = UINT32_MAX;
    do {
      std::uint32_t m = 0;
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        if (!((e >> k) & 1)) continue;
        int a = perm[static_cast<std::size_t>(pairs[k].first)];
        int b = perm[static_cast<std::size_t>(pairs[k].second)];
        if (a > b) std::swap(a, b);
        const auto idx = std::find(pairs.begin(), pairs.end(), std::make_pair(a, b)) -
                         pairs.begin();
        m |= std::uint32_t{1} << idx;
      }
      canon = std::min(canon, m);
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (!seen.insert(canon).second) continue;
    std::vector<std::uint32_t> adj(static_cast<std::size_t>(n), 0);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if ((canon >> k) & 1) {
        adj[static_cast<std::size_t>(pairs[k].first)] |= 1u << pairs[k].second;
        adj[static_cast<std::size_t>(pairs[k].second)] |= 1u << pairs[k].first;
      }
    }
    out.push_back(std::move(adj));
  }
  return out;
}

struct GflowSweepResult {
  std::size_t cases = 0;
  std::size_t with_gflow = 0;
  std::size_t disagreements = 0;
  std::size_t unverified = 0;
};

/// Compares find_gflow (and verify_gflow on its result) against the
/// exhaustive search on one graph.
inline void compare_gflow(const SmallOpenGraph& s, GflowSweepResult& r) {
  const auto f = find_gflow(s.to_labeled());
  const bool expected = brute_force_has_gflow(s);
  ++r.cases;
  if (expected) ++r.with_gflow;
  if (f.has_value() != expected) ++r.disagreements;
  if (f && !verify_gflow(s.to_labeled(), *f)) ++r.unverified;
}

/// Every vertex role (input, output, both, neither) and every plane for
/// non-outputs, over every graph up to isomorphism on 1..max_n vertices.
inline GflowSweepResult exhaustive_gflow_sweep(int max_n) {
  GflowSweepResult r;
  static constexpr std::array<Plane, 3> planes{Plane::XY, Plane::YZ, Plane::XZ};
  for (int n = 1; n <= max_n; ++n) {
    for (const auto& adj : graph_classes(n)) {
      // per vertex: 0..5 = (input?, plane) for non-outputs, 6 = output,
      // 7 = input and output
      std::vector<int> state(static_cast<std::size_t>(n), 0);
      while (true) {
        SmallOpenGraph s;
        s.n = n;
        s.adj = adj;
        s.labels.assign(static_cast<std::size_t>(n), Plane::XY);
        for (int v = 0; v < n; ++v) {
          const int st = state[static_cast<std::size_t>(v)];
          if (st < 6) {
            if (st >= 3) s.inputs |= 1u << v;
            s.labels[static_cast<std::size_t>(v)] = planes[static_cast<std::size_t>(st % 3)];
          } else {
            s.outputs |= 1u << v;
            if (st == 7) s.inputs |= 1u << v;
          }
        }
        compare_gflow(s, r);
        int k = 0;
        while (k < n && ++state[static_cast<std::size_t>(k)] == 8) {
          state[static_cast<std::size_t>(k)] = 0;
          ++k;
        }
        if (k == n) break;
      }
    }
  }
  return r;
}

inline SmallOpenGraph random_small_graph(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> role(0, 9);
  std::uniform_int_distribution<int> plane(0, 5);
  SmallOpenGraph s;
  s.n = n;
  s.adj.assign(static_cast<std::size_t>(n), 0);
  s.labels.assign(static_cast<std::size_t>(n), Plane::XY);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (coin(rng)) {
        s.adj[static_cast<std::size_t>(i)] |= 1u << j;
        s.adj[static_cast<std::size_t>(j)] |= 1u << i;
      }
    }
    const int r = role(rng);
    if (r < 3) s.outputs |= 1u << i;
    if (r >= 7) s.inputs |= 1u << i;
    const int p = plane(rng);  // XY-biased
    s.labels[static_cast<std::size_t>(i)] =
        p < 4 ? Plane::XY : (p == 4 ? Plane::YZ : Plane::XZ);
  }
  return s;
}

inline GflowSweepResult random_gflow_sweep(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(6, 8);
  GflowSweepResult r;
  for (int i = 0; i < count; ++i) compare_gflow(random_small_graph(rng, size(rng)), r);
  return r;
}

}  // namespace nazx::testkit
