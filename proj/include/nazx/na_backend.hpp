#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "nazx/circuit.hpp"
#include "nazx/oracle.hpp"

namespace nazx {

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  double r = std::remainder(a, 2 * M_PI);
  if (r <= -M_PI) r += 2 * M_PI;
  return r;
}

/// ZYZ Euler angles: U = e^{i delta} Rz(beta) Ry(theta) Rz(alpha), theta in
/// [0, pi]. At theta = 0 or pi only alpha is kept (beta = 0).
struct Euler {
  double beta = 0, theta = 0, alpha = 0;
};

inline Euler zyz_decompose(const Mat2& u, double eps = 1e-12) {
  // scale into SU(2): [[a, -b*], [b, a*]] with a = e^{-i(alpha+beta)/2} cos,
  // b = e^{i(beta-alpha)/2} sin
  const Mat2 v = u / std::sqrt(u.determinant());
  const cplx a = v(0, 0), b = v(1, 0);
  Euler e;
  e.theta = 2 * std::atan2(std::abs(b), std::abs(a));
  if (std::abs(b) <= eps) {
    e.theta = 0;
    e.alpha = wrap_angle(-2 * std::arg(a));
  } else if (std::abs(a) <= eps) {
    e.theta = M_PI;
    e.alpha = wrap_angle(-2 * std::arg(b));
  } else {
    e.beta = wrap_angle(std::arg(b) - std::arg(a));
    e.alpha = wrap_angle(-std::arg(a) - std::arg(b));
  }
  return e;
}

inline Mat2 euler_matrix(const Euler& e) {
  return rz_matrix(e.beta) * ry_matrix(e.theta) * rz_matrix(e.alpha);
}

// ---------------------------------------------------------------------------
// Native operations

struct GrOp {
  double theta = 0;  // global Ry rotation angle on every qubit
};
struct RzLayerOp {
  std::map<int, double> angles;
};
struct NcpOp {
  std::vector<int> qubits;
  Phase phi;
};
using NativeOp = std::variant<GrOp, RzLayerOp, NcpOp>;

/// Gate-time constants. Each value is the duration at angle pi, in seconds.
struct TimeConfig {
  double rz = 100e-9;
  double gr = 100e-6;
  double ncp2 = 100e-9;
  double ncp_multi = 400e-9;

  [[nodiscard]] nlohmann::json to_json() const {
    return {{"rz", rz}, {"gr", gr}, {"ncp2", ncp2}, {"ncp_multi", ncp_multi}};
  }
  static TimeConfig from_json(const nlohmann::json& j) {
    TimeConfig c;
    c.rz = j.value("rz", c.rz);
    c.gr = j.value("gr", c.gr);
    c.ncp2 = j.value("ncp2", c.ncp2);
    c.ncp_multi = j.value("ncp_multi", c.ncp_multi);
    return c;
  }
};

inline double op_time(const NativeOp& op, const TimeConfig& cfg = {}) {
  if (const auto* g = std::get_if<GrOp>(&op)) return std::abs(g->theta) / M_PI * cfg.gr;
  if (const auto* r = std::get_if<RzLayerOp>(&op)) {
    double m = 0;
    for (const auto& [q, a] : r->angles) m = std::max(m, std::abs(a));
    return m / M_PI * cfg.rz;
  }
  const auto& n = std::get<NcpOp>(op);
  const double frac = std::abs(n.phi.to_radians()) / M_PI;
  return frac * (n.qubits.size() <= 2 ? cfg.ncp2 : cfg.ncp_multi);
}

/// Total time in seconds; NCP gates run one after another.
inline double execution_time(const std::vector<NativeOp>& ops, const TimeConfig& cfg = {}) {
  double t = 0;
  for (const auto& op : ops) t += op_time(op, cfg);
  return t;
}

// ---------------------------------------------------------------------------
// Layering

using SingleLayer = std::map<int, Mat2>;

/// Alternating layers: singles[0], multis[0], singles[1], ..., singles[k].
/// Empty when the circuit has no gates.
struct LayeredCircuit {
  int num_qubits = 0;
  std::vector<SingleLayer> singles;
  std::vector<std::vector<Gate>> multis;

  [[nodiscard]] bool empty() const { return singles.empty(); }
};

/// Rewrites the circuit into H/Rz-style single-qubit gates and NCP gates:
/// CX -> H CZ H, swap -> 3 CX, CZ/NCZ -> NCP(., pi).
inline std::vector<Gate> native_gates(const Circuit& c) {
  std::vector<Gate> out;
  auto cz = [&](int a, int b) { out.push_back(Gate::ncp({a, b}, Phase::pi())); };
  auto cx = [&](int ctl, int tgt) {
    out.push_back(Gate::h(tgt));
    cz(ctl, tgt);
    out.push_back(Gate::h(tgt));
  };
  for (const auto& g : c.gates()) {
    switch (g.kind) {
      case GateKind::CX: cx(g.qubits[0], g.qubits[1]); break;
      case GateKind::Swap:
        cx(g.qubits[0], g.qubits[1]);
        cx(g.qubits[1], g.qubits[0]);
        cx(g.qubits[0], g.qubits[1]);
        break;
      case GateKind::CZ: cz(g.qubits[0], g.qubits[1]); break;
      case GateKind::NCZ: out.push_back(Gate::ncp(g.qubits, Phase::pi())); break;
      case GateKind::NCP:
        if (!g.angle.is_zero()) out.push_back(g);
        break;
      default: out.push_back(g);
    }
  }
  return out;
}

/// ASAP layering. Multi-qubit gates are diagonal and commute, so each goes
/// into the earliest multi layer after the last single-qubit gate on its
/// qubits.
inline LayeredCircuit layerize(const Circuit& c) {
  LayeredCircuit out;
  out.num_qubits = c.num_qubits();
  const auto gates = native_gates(c);
  if (gates.empty()) return out;
  // position of the last op on each qubit: 2k for single layer k, 2k+1 for
  // multi layer k
  std::vector<int> last(c.num_qubits(), -1);
  auto ensure = [&](std::size_t singles) {
    while (out.singles.size() < singles) out.singles.emplace_back();
    while (out.multis.size() + 1 < out.singles.size()) out.multis.emplace_back();
  };
  for (const auto& g : gates) {
    if (is_single_qubit(g.kind)) {
      const int q = g.qubits[0];
      const int k = last[q] < 0 ? 0 : (last[q] + 1) / 2;
      ensure(k + 1);
      auto [it, fresh] = out.singles[k].try_emplace(q, Mat2::Identity());
      it->second = single_qubit_matrix(g) * it->second;
      last[q] = 2 * k;
    } else {
      int k = 0;
      for (int q : g.qubits) k = std::max(k, last[q] < 0 ? 0 : last[q] / 2);
      ensure(k + 2);
      out.multis[k].push_back(g);
      for (int q : g.qubits) last[q] = 2 * k + 1;
    }
  }
  return out;
}

/// Largest Euler theta in a layer.
inline double theta_max(const SingleLayer& layer) {
  double m = 0;
  for (const auto& [q, u] : layer) m = std::max(m, zyz_decompose(u).theta);
  return m;
}

inline double sum_theta_max(const LayeredCircuit& lc) {
  double s = 0;
  for (const auto& l : lc.singles) s += theta_max(l);
  return s;
}

inline Eigen::MatrixXcd layered_unitary(const LayeredCircuit& lc) {
  const Eigen::Index dim = Eigen::Index{1} << lc.num_qubits;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (std::size_t k = 0; k < lc.singles.size(); ++k) {
    for (const auto& [q, m] : lc.singles[k]) apply_single(u, q, m);
    if (k < lc.multis.size()) {
      for (const auto& g : lc.multis[k]) apply_gate(u, g);
    }
  }
  return u;
}

namespace na_detail {

struct Movable {
  int qubit;
  Mat2 u;
  double theta;
  int lo, hi;  // inclusive range of legal single layers
  int at;      // current layer
};

inline std::vector<Movable> collect_movables(const LayeredCircuit& lc) {
  const int layers = static_cast<int>(lc.singles.size());
  std::vector<Movable> out;
  for (int q = 0; q < lc.num_qubits; ++q) {
    std::vector<int> busy;  // multi layers touching q
    for (int k = 0; k < static_cast<int>(lc.multis.size()); ++k) {
      for (const auto& g : lc.multis[k]) {
        if (std::find(g.qubits.begin(), g.qubits.end(), q) != g.qubits.end()) {
          busy.push_back(k);
          break;
        }
      }
    }
    for (int k = 0; k < layers; ++k) {
      auto it = lc.singles[k].find(q);
      if (it == lc.singles[k].end()) continue;
      // single layer k sits between multi layers k-1 and k
      auto nxt = std::lower_bound(busy.begin(), busy.end(), k);
      const int hi = nxt == busy.end() ? layers - 1 : *nxt;
      const int lo = nxt == busy.begin() ? 0 : *std::prev(nxt) + 1;
      out.push_back({q, it->second, zyz_decompose(it->second).theta, lo, hi, k});
    }
  }
  return out;
}

inline double cost(const std::vector<Movable>& ms, int layers) {
  std::vector<double> mx(layers, 0.0);
  for (const auto& m : ms) mx[m.at] = std::max(mx[m.at], m.theta);
  double s = 0;
  for (double v : mx) s += v;
  return s;
}

/// Moves single units one at a time while that strictly lowers the total.
inline void local_search(std::vector<Movable>& ms, int layers) {
  double best = cost(ms, layers);
  for (bool improved = true; improved;) {
    improved = false;
    for (auto& m : ms) {
      const int orig = m.at;
      int pick = orig;
      for (int k = m.lo; k <= m.hi; ++k) {
        m.at = k;
        const double c = cost(ms, layers);
        if (c < best - 1e-12) {
          best = c;
          pick = k;
        }
      }
      m.at = pick;
      if (pick != orig) improved = true;
    }
  }
}

}  // namespace na_detail

/// Re-homes each qubit's single-qubit unitaries within its idle span so that
/// large Euler angles share layers. Largest angles are placed first, each
/// into the candidate layer with the largest current theta_max (which
/// covers it when possible, else grows least). The result never has a larger
/// total theta_max than the input.
inline LayeredCircuit greedy_assign(const LayeredCircuit& lc) {
  using na_detail::Movable;
  const int layers = static_cast<int>(lc.singles.size());
  if (layers <= 1) return lc;
  auto original = na_detail::collect_movables(lc);

  auto greedy = original;
  std::vector<std::size_t> order(greedy.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ta = greedy[a].theta, tb = greedy[b].theta;
    if (std::abs(ta - tb) > 1e-12) return ta > tb;
    return (greedy[a].hi - greedy[a].lo) < (greedy[b].hi - greedy[b].lo);
  });
  std::vector<double> mx(layers, 0.0);
  for (std::size_t i : order) {
    auto& m = greedy[i];
    int pick = m.lo;
    for (int k = m.lo; k <= m.hi; ++k) {
      if (mx[k] > mx[pick] + 1e-12) pick = k;
    }
    m.at = pick;
    mx[pick] = std::max(mx[pick], m.theta);
  }
  na_detail::local_search(greedy, layers);
  auto kept = original;
  na_detail::local_search(kept, layers);
  const auto& best = na_detail::cost(greedy, layers) < na_detail::cost(kept, layers) - 1e-12
                         ? greedy
                         : kept;

  LayeredCircuit out;
  out.num_qubits = lc.num_qubits;
  out.multis = lc.multis;
  out.singles.assign(layers, {});
  for (const auto& m : best) out.singles[m.at][m.qubit] = m.u;
  return out;
}

/// Realizes a single-qubit layer as Rz(a) GR(t) Rz(b) GR(t) Rz(c) in time
/// order with t = theta_max / 2. Qubits in [0, num_qubits) absent from the
/// layer get b = pi, so their two half-pulses cancel. Angles below `eps` are
/// dropped from the Rz layers; empty Rz layers are omitted.
inline std::vector<NativeOp> transversal_decompose(const SingleLayer& layer, int num_qubits,
                                                   double eps = 1e-12) {
  std::vector<Euler> eu(num_qubits);
  double tmax = 0;
  for (int q = 0; q < num_qubits; ++q) {
    auto it = layer.find(q);
    if (it != layer.end()) eu[q] = zyz_decompose(it->second);
    tmax = std::max(tmax, eu[q].theta);
  }
  std::vector<NativeOp> ops;
  auto push_rz = [&](RzLayerOp r) {
    for (auto it = r.angles.begin(); it != r.angles.end();) {
      it = std::abs(it->second) < eps ? r.angles.erase(it) : std::next(it);
    }
    if (!r.angles.empty()) ops.emplace_back(std::move(r));
  };
  if (tmax < eps) {
    RzLayerOp r;
    for (int q = 0; q < num_qubits; ++q) r.angles[q] = wrap_angle(eu[q].beta + eu[q].alpha);
    push_rz(std::move(r));
    return ops;
  }
  const double t = tmax / 2;
  const double smax = std::sin(tmax / 2);
  RzLayerOp ra, rb, rc;
  for (int q = 0; q < num_qubits; ++q) {
    const double ratio = std::clamp(std::sin(eu[q].theta / 2) / smax, -1.0, 1.0);
    const double b = 2 * std::acos(ratio);
    const Mat2 m = ry_matrix(t) * rz_matrix(b) * ry_matrix(t);
    const Euler fit = zyz_decompose(m);
    // U = Rz(beta) Ry(theta) Rz(alpha), M = Rz(p) Ry(theta) Rz(q)
    ra.angles[q] = wrap_angle(eu[q].alpha - fit.alpha);
    rb.angles[q] = wrap_angle(b);
    rc.angles[q] = wrap_angle(eu[q].beta - fit.beta);
  }
  push_rz(std::move(ra));
  ops.emplace_back(GrOp{t});
  push_rz(std::move(rb));
  ops.emplace_back(GrOp{t});
  push_rz(std::move(rc));
  return ops;
}

/// Per-qubit 2x2 product of a decomposed single layer, in matrix order.
inline Mat2 qubit_product(const std::vector<NativeOp>& ops, int q) {
  Mat2 u = Mat2::Identity();
  for (const auto& op : ops) {
    if (const auto* g = std::get_if<GrOp>(&op)) {
      u = ry_matrix(g->theta) * u;
    } else if (const auto* r = std::get_if<RzLayerOp>(&op)) {
      auto it = r->angles.find(q);
      if (it != r->angles.end()) u = rz_matrix(it->second) * u;
    }
  }
  return u;
}

// ---------------------------------------------------------------------------
// Schedules

struct ScheduleCounts {
  int gr_pulses = 0;
  int gr_layers = 0;
  int rz_layers = 0;
  std::map<int, int> ncp;  // arity -> count
};

struct Schedule {
  int num_qubits = 0;
  std::vector<NativeOp> ops;
  double total_time = 0;  // seconds
  TimeConfig config;

  [[nodiscard]] ScheduleCounts counts() const {
    ScheduleCounts c;
    for (const auto& op : ops) {
      if (std::holds_alternative<GrOp>(op)) {
        ++c.gr_pulses;
      } else if (std::holds_alternative<RzLayerOp>(op)) {
        ++c.rz_layers;
      } else {
        ++c.ncp[static_cast<int>(std::get<NcpOp>(op).qubits.size())];
      }
    }
    c.gr_layers = c.gr_pulses / 2;  // two half-pulses per layer
    return c;
  }

  [[nodiscard]] nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& op : ops) {
      nlohmann::json j;
      if (const auto* g = std::get_if<GrOp>(&op)) {
        j = {{"type", "gr"}, {"theta", g->theta}};
      } else if (const auto* r = std::get_if<RzLayerOp>(&op)) {
        nlohmann::json a = nlohmann::json::object();
        for (const auto& [q, v] : r->angles) a[std::to_string(q)] = v;
        j = {{"type", "rz"}, {"angles", a}};
      } else {
        const auto& n = std::get<NcpOp>(op);
        j = {{"type", "ncp"}, {"qubits", n.qubits}, {"phi", n.phi.to_radians()},
             {"phi_pi_fraction",
              {n.phi.numerator().str(), n.phi.denominator().str()}}};
      }
      j["time"] = op_time(op, config);
      arr.push_back(std::move(j));
    }
    return {{"num_qubits", num_qubits},
            {"ops", arr},
            {"time_config", config.to_json()},
            {"total_time", total_time}};
  }

  /// Inverse of to_json; NCP angles are read back exactly from
  /// `phi_pi_fraction`.
  static Schedule from_json(const nlohmann::json& j);
};

inline Schedule Schedule::from_json(const nlohmann::json& j) {
  Schedule s;
  s.num_qubits = j.at("num_qubits").get<int>();
  if (j.contains("time_config")) s.config = TimeConfig::from_json(j.at("time_config"));
  for (const auto& o : j.at("ops")) {
    const auto type = o.at("type").get<std::string>();
    if (type == "gr") {
      s.ops.emplace_back(GrOp{o.at("theta").get<double>()});
    } else if (type == "rz") {
      RzLayerOp r;
      for (const auto& [k, v] : o.at("angles").items()) r.angles[std::stoi(k)] = v.get<double>();
      s.ops.emplace_back(std::move(r));
    } else if (type == "ncp") {
      s.ops.emplace_back(NcpOp{o.at("qubits").get<std::vector<int>>(),
                               Phase(Phase::Int(o.at("phi_pi_fraction").at(0).get<std::string>()),
                                     Phase::Int(o.at("phi_pi_fraction").at(1).get<std::string>()))});
    } else {
      throw std::invalid_argument("unknown schedule op: " + type);
    }
  }
  s.total_time = execution_time(s.ops, s.config);
  return s;
}

struct ScheduleOptions {
  bool greedy = true;
  TimeConfig time;
};

/// layerize -> greedy_assign -> transversal_decompose per single layer, with
/// the multi layers interleaved in order.
inline Schedule schedule(const Circuit& c, const ScheduleOptions& opt = {}) {
  Schedule s;
  s.num_qubits = c.num_qubits();
  s.config = opt.time;
  LayeredCircuit lc = layerize(c);
  if (opt.greedy) lc = greedy_assign(lc);
  for (std::size_t k = 0; k < lc.singles.size(); ++k) {
    for (auto& op : transversal_decompose(lc.singles[k], lc.num_qubits)) {
      s.ops.push_back(std::move(op));
    }
    if (k < lc.multis.size()) {
      for (const auto& g : lc.multis[k]) s.ops.emplace_back(NcpOp{g.qubits, g.angle});
    }
  }
  s.total_time = execution_time(s.ops, s.config);
  return s;
}

inline Eigen::MatrixXcd schedule_unitary(const Schedule& s, int max_qubits = 12) {
  if (s.num_qubits > max_qubits) throw OracleLimit("schedule_unitary: too many qubits");
  const Eigen::Index dim = Eigen::Index{1} << s.num_qubits;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& op : s.ops) {
    if (const auto* g = std::get_if<GrOp>(&op)) {
      const Mat2 m = ry_matrix(g->theta);
      for (int q = 0; q < s.num_qubits; ++q) apply_single(u, q, m);
    } else if (const auto* r = std::get_if<RzLayerOp>(&op)) {
      for (const auto& [q, a] : r->angles) apply_single(u, q, rz_matrix(a));
    } else {
      const auto& n = std::get<NcpOp>(op);
      apply_controlled_phase(u, n.qubits, n.phi.to_radians());
    }
  }
  return u;
}

}  // namespace nazx
