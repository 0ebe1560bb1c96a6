#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nazx/circuit.hpp"
#include "nazx/cnp.hpp"
#include "nazx/gf2.hpp"
#include "nazx/gflow.hpp"
#include "nazx/simplify.hpp"
#include "nazx/zx_diagram.hpp"

namespace nazx {

struct ExtractionMode {
  enum class Kind { Default, NoInsert, WithInsert };
  Kind kind = Kind::Default;
  /// Largest number of controls (qubits - 1) of an emitted controlled phase.
  std::optional<int> max_ctrl;

  static ExtractionMode default_mode() { return {}; }
  static ExtractionMode no_insert(std::optional<int> max_ctrl = std::nullopt) {
    return {Kind::NoInsert, max_ctrl};
  }
  static ExtractionMode with_insert(std::optional<int> max_ctrl = std::nullopt) {
    return {Kind::WithInsert, max_ctrl};
  }
};

inline const char* mode_name(ExtractionMode::Kind k) {
  switch (k) {
    case ExtractionMode::Kind::Default: return "default";
    case ExtractionMode::Kind::NoInsert: return "no-insert";
    case ExtractionMode::Kind::WithInsert: return "with-insert";
  }
  return "?";
}

struct ExtractionStats {
  int iterations = 0;
  int cz = 0;
  int cx = 0;
  int h = 0;
  int rz = 0;
  int ncp = 0;
  int yz_pivots = 0;
  int insertions = 0;
  int splits = 0;
  int gflow_checks = 0;
  std::map<int, int> ncp_sizes;

  [[nodiscard]] nlohmann::json to_json() const {
    nlohmann::json sizes = nlohmann::json::object();
    for (auto [k, v] : ncp_sizes) sizes[std::to_string(k)] = v;
    return {{"iterations", iterations}, {"cz", cz},       {"cx", cx},
            {"h", h},                   {"rz", rz},       {"ncp", ncp},
            {"ncp_sizes", sizes},       {"yz_pivots", yz_pivots},
            {"insertions", insertions}, {"splits", splits}};
  }
};

struct ExtractionOptions {
  /// Check gflow after every step and verify every insertion incrementally.
  bool check_gflow = false;
};

class ExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pivots a gadget root r against an adjacent output spider f whose phase is
/// 0 or pi. f's boundary roles first move onto fresh buffer spiders; the
/// pivot then removes f and r, turning the gadget top into an ordinary
/// spider. Gadget roots left at phase pi are normalized.
inline void pivot_yz_neighbor(ZxDiagram& d, SpiderId root, SpiderId f) {
  if (!d.contains(root) || !d.contains(f) || !d.connected(root, f)) {
    throw DiagramError("pivot_yz_neighbor on non-adjacent pair");
  }
  if (!is_gadget_root(d, root)) throw DiagramError("pivot_yz_neighbor: not a gadget root");
  if (!d.phase(f).is_pauli()) throw DiagramError("pivot_yz_neighbor: frontier phase");
  unfuse_boundary(d, f);
  pivot_simp(d, f, root);
  for (SpiderId v : d.spiders()) normalize_gadget_root(d, v);
}

namespace extract_detail {

class Extractor {
 public:
  Extractor(ZxDiagram& d, ExtractionMode mode, ExtractionOptions opt)
      : d_(d), mode_(mode), opt_(opt) {}

  ExtractionStats stats;

  Circuit run() {
    const int n = static_cast<int>(d_.outputs().size());
    if (static_cast<int>(d_.inputs().size()) != n) {
      throw ExtractionError("diagram not extractable: input/output count mismatch");
    }
    if (!find_gflow(LabeledOpenGraph::from_diagram(d_))) {
      throw ExtractionError("diagram not extractable");
    }
    while (true) {
      ++stats.iterations;
      output_hadamards();
      extract_cz();
      if (mode_.kind != ExtractionMode::Kind::Default) extract_cnp();
      extract_rz();
      check("phases");
      if (finished()) break;
      if (advance_singles()) continue;
      if (eliminate()) continue;
      if (pivot_blocker()) continue;
      throw ExtractionError("extraction made no progress:\n" + d_.to_json().dump());
    }
    return assemble(n);
  }

 private:
  std::optional<int> qubit_of(SpiderId v) const {
    const auto& outs = d_.outputs();
    for (std::size_t q = 0; q < outs.size(); ++q) {
      if (outs[q].spider == v) return static_cast<int>(q);
    }
    return std::nullopt;
  }

  std::vector<SpiderId> frontier() const {
    std::vector<SpiderId> f;
    for (const auto& o : d_.outputs()) f.push_back(o.spider);
    return f;
  }

  void check(const char* step) {
    if (!opt_.check_gflow) return;
    ++stats.gflow_checks;
    if (!find_gflow(LabeledOpenGraph::from_diagram(d_))) {
      throw ExtractionError(std::string("gflow lost during extraction after ") + step);
    }
  }

  void emit(Gate g) { emitted_.push_back(std::move(g)); }

  void output_hadamards() {
    auto& outs = d_.mutable_outputs();
    for (std::size_t q = 0; q < outs.size(); ++q) {
      if (!outs[q].hadamard) continue;
      emit(Gate::h(static_cast<int>(q)));
      ++stats.h;
      outs[q].hadamard = false;
    }
  }

  void extract_cz() {
    const auto f = frontier();
    for (std::size_t a = 0; a < f.size(); ++a) {
      for (std::size_t b = a + 1; b < f.size(); ++b) {
        if (!d_.connected(f[a], f[b])) continue;
        emit(Gate::cz(static_cast<int>(a), static_cast<int>(b)));
        ++stats.cz;
        d_.remove_edge(f[a], f[b]);
      }
    }
  }

  // Gadgets on frontier legs with a Pauli or zero phase are plain phases.
  void drop_trivial_frontier_gadgets(const std::vector<SpiderId>& f) {
    for (const auto& g : find_gadgets(d_)) {
      const bool on_frontier = std::all_of(g.legs.begin(), g.legs.end(), [&](SpiderId w) {
        return std::find(f.begin(), f.end(), w) != f.end();
      });
      const Phase p = d_.phase(g.top);
      if (!on_frontier || !p.is_pauli()) continue;
      for (SpiderId w : g.legs) d_.add_to_phase(w, p);
      remove_gadget(d_, g);
    }
  }

  void extract_cnp() {
    const InsertMode im = mode_.kind == ExtractionMode::Kind::WithInsert
                              ? InsertMode::WithInsert
                              : InsertMode::NoInsert;
    std::optional<int> max_size;
    if (mode_.max_ctrl) max_size = *mode_.max_ctrl + 1;
    const auto f = frontier();
    while (true) {
      gadget_fusion(d_);
      drop_trivial_frontier_gadgets(f);
      auto plan = match_cnp(d_, f, im, max_size);
      if (!plan) break;
      std::optional<GflowTracker> tracker;
      if (opt_.check_gflow && (!plan->insertions.empty() || !plan->splits.empty())) {
        tracker = GflowTracker::from_diagram(d_);
      }
      auto ex = apply_match_plan(d_, *plan, tracker ? &*tracker : nullptr);
      std::vector<int> qs;
      for (SpiderId a : ex.anchors) qs.push_back(*qubit_of(a));
      std::sort(qs.begin(), qs.end());
      emit(Gate::ncp(qs, ex.phi));
      ++stats.ncp;
      ++stats.ncp_sizes[static_cast<int>(qs.size())];
      stats.insertions += ex.insertions;
      stats.splits += ex.splits;
      for (const auto& [a, r] : ex.residues) {
        emit(Gate::rz(*qubit_of(a), r));
        ++stats.rz;
      }
      if (tracker) stats.gflow_checks += tracker->verified_insertions;
      check("controlled phase");
    }
  }

  void extract_rz() {
    const auto f = frontier();
    for (std::size_t q = 0; q < f.size(); ++q) {
      const Phase p = d_.phase(f[q]);
      if (p.is_zero()) continue;
      emit(Gate::rz(static_cast<int>(q), p));
      ++stats.rz;
      d_.set_phase(f[q], Phase::zero());
    }
  }

  bool finished() const {
    for (SpiderId v : d_.spiders()) {
      if (!d_.is_input(v) || !d_.is_output(v) || d_.degree(v) != 0) return false;
    }
    return true;
  }

  // H extraction: a frontier spider without an input role whose single
  // neighbour is an ordinary spider hands its output to that neighbour.
  bool advance_singles() {
    bool any = false;
    auto& outs = d_.mutable_outputs();
    for (std::size_t q = 0; q < outs.size(); ++q) {
      const SpiderId v = outs[q].spider;
      if (d_.is_input(v) || d_.degree(v) != 1) continue;
      const SpiderId w = *d_.neighbors(v).begin();
      if (d_.is_output(w) || in_gadget(d_, w)) continue;
      emit(Gate::h(static_cast<int>(q)));
      ++stats.h;
      outs[q] = {w, false};
      d_.remove_spider(v);
      any = true;
    }
    if (any) check("hadamard");
    return any;
  }

  struct Biadjacency {
    std::vector<std::size_t> rows;  // qubits
    std::vector<SpiderId> cols;
    BitMatrix m;
  };

  Biadjacency biadjacency() const {
    Biadjacency b;
    const auto f = frontier();
    std::vector<SpiderId> cols;
    for (std::size_t q = 0; q < f.size(); ++q) {
      if (d_.is_input(f[q])) continue;
      b.rows.push_back(q);
      for (SpiderId w : d_.neighbors(f[q])) cols.push_back(w);
    }
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    b.cols = cols;
    b.m = BitMatrix(b.rows.size(), cols.size());
    for (std::size_t r = 0; r < b.rows.size(); ++r) {
      for (SpiderId w : d_.neighbors(f[b.rows[r]])) {
        const auto c = std::lower_bound(cols.begin(), cols.end(), w) - cols.begin();
        b.m.set(r, static_cast<std::size_t>(c), true);
      }
    }
    return b;
  }

  // Gaussian elimination on the frontier biadjacency matrix; applied only if
  // it produces a row with a single ordinary-spider neighbour.
  bool eliminate() {
    Biadjacency b = biadjacency();
    if (b.rows.empty()) return false;
    BitMatrix reduced = b.m;
    const auto ops = gaussian_eliminate(reduced);
    bool useful = false;
    for (std::size_t r = 0; r < reduced.rows() && !useful; ++r) {
      if (reduced.row(r).count() != 1) continue;
      const SpiderId w = b.cols[reduced.row(r).find_first()];
      useful = !in_gadget(d_, w);
    }
    if (!useful || ops.empty()) return false;
    const auto f = frontier();
    for (const auto& op : ops) {
      const std::size_t qc = b.rows[op.target], qt = b.rows[op.source];
      const SpiderId c = f[qc], t = f[qt];
      // row c += row t: CX with control c and target t on the output side
      emit(Gate::cx(static_cast<int>(qc), static_cast<int>(qt)));
      ++stats.cx;
      for (SpiderId w : std::vector<SpiderId>(d_.neighbors(t).begin(),
                                              d_.neighbors(t).end())) {
        d_.toggle_edge(c, w);
      }
    }
    check("elimination");
    return true;
  }

  bool pivot_blocker() {
    const auto f = frontier();
    for (SpiderId v : f) {
      for (SpiderId w : d_.neighbors(v)) {
        if (!is_gadget_root(d_, w)) continue;
        pivot_yz_neighbor(d_, w, v);
        ++stats.yz_pivots;
        check("pivot");
        return true;
      }
    }
    return false;
  }

  // Remaining diagram: input Hadamards and a qubit permutation.
  Circuit assemble(int n) {
    Circuit c(n);
    std::vector<int> target(static_cast<std::size_t>(n));
    const auto& ins = d_.inputs();
    for (int i = 0; i < n; ++i) {
      const auto& b = ins[static_cast<std::size_t>(i)];
      if (b.hadamard) {
        c.add(Gate::h(i));
        ++stats.h;
      }
      target[static_cast<std::size_t>(i)] = *qubit_of(b.spider);
    }
    // Realize wire i -> target[i] with swaps (3 CX each).
    std::vector<int> at(static_cast<std::size_t>(n));  // at[w]: logical on wire w
    std::vector<int> where(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) at[static_cast<std::size_t>(i)] = where[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < n; ++i) {
      const int w = target[static_cast<std::size_t>(i)];
      const int cur = where[static_cast<std::size_t>(i)];
      if (cur == w) continue;
      c.add(Gate::cx(cur, w));
      c.add(Gate::cx(w, cur));
      c.add(Gate::cx(cur, w));
      stats.cx += 3;
      const int other = at[static_cast<std::size_t>(w)];
      std::swap(at[static_cast<std::size_t>(cur)], at[static_cast<std::size_t>(w)]);
      where[static_cast<std::size_t>(other)] = cur;
      where[static_cast<std::size_t>(i)] = w;
    }
    for (auto it = emitted_.rbegin(); it != emitted_.rend(); ++it) c.add(*it);
    return c;
  }

  ZxDiagram& d_;
  ExtractionMode mode_;
  ExtractionOptions opt_;
  std::vector<Gate> emitted_;
};

}  // namespace extract_detail

struct ExtractionResult {
  Circuit circuit;
  ExtractionStats stats;
};

/// Extracts a circuit from a graph-like diagram with gflow. Gates are found
/// from the outputs inwards: CZ for frontier edges, controlled phases from
/// frontier gadget structures (non-default modes), Rz for frontier phases,
/// then Hadamard extraction, Gaussian elimination (CX) or a pivot on a
/// blocking gadget root. The diagram is consumed.
inline ExtractionResult extract_with_stats(ZxDiagram& d, ExtractionMode mode = {},
                                           ExtractionOptions opt = {}) {
  extract_detail::Extractor ex(d, mode, opt);
  Circuit c = ex.run();
  return {std::move(c), ex.stats};
}

inline Circuit extract_circuit(ZxDiagram d, ExtractionMode mode = {},
                               ExtractionOptions opt = {}) {
  return extract_with_stats(d, mode, opt).circuit;
}

}  // namespace nazx
