#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "nazx/circuit.hpp"
#include "nazx/extract.hpp"
#include "nazx/ingest.hpp"
#include "nazx/na_backend.hpp"
#include "nazx/oracle.hpp"
#include "nazx/passes.hpp"
#include "nazx/qasm.hpp"
#include "nazx/simplify.hpp"

namespace nazx {

enum class Pipeline { ZxDefault, ZxNoInsert, ZxWithInsert, NoDecomp };

inline const char* pipeline_name(Pipeline p) {
  switch (p) {
    case Pipeline::ZxDefault: return "zx-default";
    case Pipeline::ZxNoInsert: return "zx-no-insert";
    case Pipeline::ZxWithInsert: return "zx-with-insert";
    case Pipeline::NoDecomp: return "no-decomp";
  }
  return "?";
}

inline const std::vector<Pipeline>& all_pipelines() {
  static const std::vector<Pipeline> v{Pipeline::ZxDefault, Pipeline::ZxNoInsert,
                                       Pipeline::ZxWithInsert, Pipeline::NoDecomp};
  return v;
}

inline std::optional<Pipeline> parse_pipeline(std::string_view s) {
  for (Pipeline p : all_pipelines()) {
    if (s == pipeline_name(p)) return p;
  }
  return std::nullopt;
}

struct PipelineOptions {
  std::optional<int> max_ctrl;
  bool verify = false;
  int verify_max_qubits = 10;
  bool check_gflow = false;  // debug: gflow after every rewrite and insertion
  ScheduleOptions schedule;
};

/// Failure of one pipeline run. `kind` is one of "io", "parse", "unsupported",
/// "extraction", "internal".
class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  [[nodiscard]] const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

struct Report {
  std::string file;
  Pipeline pipeline = Pipeline::ZxDefault;
  int num_qubits = 0;
  ScheduleCounts counts;
  std::map<std::string, int> gates;  // synthesized circuit, by gate name
  double time_ms = 0;
  double runtime_s = 0;
  std::optional<bool> verified;
  std::optional<ExtractionStats> extraction;
  Circuit circuit;
  Schedule sched;

  [[nodiscard]] nlohmann::json to_json() const {
    nlohmann::json ncp = nlohmann::json::object();
    for (const auto& [k, v] : counts.ncp) ncp[std::to_string(k)] = v;
    nlohmann::json j{{"file", file},
                     {"pipeline", pipeline_name(pipeline)},
                     {"num_qubits", num_qubits},
                     {"counts",
                      {{"gr_pulses", counts.gr_pulses},
                       {"gr_layers", counts.gr_layers},
                       {"rz_layers", counts.rz_layers},
                       {"ncp", ncp}}},
                     {"gates", gates},
                     {"time_ms", time_ms},
                     {"runtime_s", runtime_s},
                     {"verified", verified ? nlohmann::json(*verified) : nlohmann::json()}};
    if (extraction) j["extraction"] = extraction->to_json();
    return j;
  }
};

inline nlohmann::json error_record(const std::string& file, std::optional<Pipeline> p,
                                   const PipelineError& e) {
  return {{"file", file},
          {"pipeline", p ? nlohmann::json(pipeline_name(*p)) : nlohmann::json()},
          {"error", {{"kind", e.kind()}, {"message", e.what()}}}};
}

/// Synthesis stage of a pipeline (no cancellation or scheduling).
inline Circuit synthesize(const Circuit& c, Pipeline p, const PipelineOptions& opt,
                          std::optional<ExtractionStats>* stats = nullptr) {
  if (p == Pipeline::NoDecomp) return to_ncz_baseline(c);
  ExtractionMode mode = p == Pipeline::ZxDefault    ? ExtractionMode::default_mode()
                        : p == Pipeline::ZxNoInsert ? ExtractionMode::no_insert(opt.max_ctrl)
                                                    : ExtractionMode::with_insert(opt.max_ctrl);
  try {
    ZxDiagram d = ingest(c);
    SimplifyOptions so;
    so.check_gflow = opt.check_gflow;
    full_simplify(d, so);
    auto r = extract_with_stats(d, mode, {opt.check_gflow});
    if (stats) *stats = r.stats;
    return r.circuit;
  } catch (const ExtractionError& e) {
    throw PipelineError("extraction", e.what());
  } catch (const SimplifyError& e) {
    throw PipelineError("internal", e.what());
  }
}

/// Runs one pipeline on an already parsed circuit.
inline Report run_pipeline(const Circuit& input, Pipeline p, const PipelineOptions& opt = {},
                           std::string file = {}) {
  Report r;
  r.file = std::move(file);
  r.pipeline = p;
  r.num_qubits = input.num_qubits();
  const auto t0 = std::chrono::steady_clock::now();
  r.circuit = cancel_gates(synthesize(input, p, opt, &r.extraction));
  r.sched = schedule(r.circuit, opt.schedule);
  r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.counts = r.sched.counts();
  for (const auto& g : r.circuit.gates()) ++r.gates[std::string(gate_name(g.kind))];
  r.time_ms = r.sched.total_time * 1e3;
  if (opt.verify && input.num_qubits() <= opt.verify_max_qubits) {
    r.verified = equal_up_to_scalar(schedule_unitary(r.sched, opt.verify_max_qubits),
                                    circuit_unitary(input, opt.verify_max_qubits), 1e-8);
  }
  return r;
}

inline Circuit load_qasm_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PipelineError("io", "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_qasm(ss.str());
  } catch (const QasmError& e) {
    throw PipelineError(e.kind() == QasmError::Kind::Unsupported ? "unsupported" : "parse",
                        e.what());
  }
}

inline Report run_pipeline_file(const std::filesystem::path& path, Pipeline p,
                                const PipelineOptions& opt = {}) {
  return run_pipeline(load_qasm_file(path), p, opt, path.filename().string());
}

// ---------------------------------------------------------------------------
// Suites

struct SuiteRow {
  std::string file;
  Pipeline pipeline = Pipeline::ZxDefault;
  std::optional<Report> report;
  std::optional<nlohmann::json> error;
};

struct SuiteResult {
  std::vector<SuiteRow> rows;  // file-name order, then pipeline order
  Pipeline baseline = Pipeline::ZxDefault;
  /// pipeline -> mean of (1 - T_p / T_baseline) over files where both ran
  /// and T_baseline > 0
  std::map<std::string, double> mean_reduction;
  std::map<std::string, int> reduction_samples;
};

inline void compute_aggregate(SuiteResult& s) {
  s.mean_reduction.clear();
  s.reduction_samples.clear();
  std::map<std::string, double> base;
  for (const auto& r : s.rows) {
    if (r.report && r.pipeline == s.baseline) base[r.file] = r.report->time_ms;
  }
  std::map<std::string, double> sum;
  for (const auto& r : s.rows) {
    if (!r.report) continue;
    auto it = base.find(r.file);
    if (it == base.end() || it->second <= 0) continue;
    const std::string name = pipeline_name(r.pipeline);
    sum[name] += 1.0 - r.report->time_ms / it->second;
    ++s.reduction_samples[name];
  }
  for (const auto& [k, v] : sum) s.mean_reduction[k] = v / s.reduction_samples[k];
}

struct SuiteOptions {
  PipelineOptions pipeline;
  Pipeline baseline = Pipeline::ZxDefault;
  int jobs = 1;
};

/// Runs every pipeline on every file. Errors are recorded per row and do not
/// stop the suite. Rows come back in a fixed order whatever `jobs` is.
inline SuiteResult run_suite(std::vector<std::filesystem::path> files,
                             const std::vector<Pipeline>& pipelines,
                             const SuiteOptions& opt = {}) {
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) {
    return a.filename().string() < b.filename().string();
  });
  SuiteResult out;
  out.baseline = opt.baseline;
  for (const auto& f : files) {
    for (Pipeline p : pipelines) out.rows.push_back({f.filename().string(), p, {}, {}});
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < out.rows.size();) {
      auto& row = out.rows[i];
      const auto& path = files[i / pipelines.size()];
      try {
        row.report = run_pipeline_file(path, row.pipeline, opt.pipeline);
      } catch (const PipelineError& e) {
        row.error = error_record(row.file, row.pipeline, e);
      } catch (const std::exception& e) {
        row.error = error_record(row.file, row.pipeline, PipelineError("internal", e.what()));
      }
    }
  };
  const int jobs = std::max(1, opt.jobs);
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  compute_aggregate(out);
  return out;
}

inline std::vector<std::filesystem::path> qasm_files_in(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".qasm") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline nlohmann::json suite_to_json(const SuiteResult& s) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : s.rows) rows.push_back(r.report ? r.report->to_json() : *r.error);
  nlohmann::json agg = nlohmann::json::object();
  for (const auto& [k, v] : s.mean_reduction) {
    agg[k] = {{"mean_reduction", v}, {"files", s.reduction_samples.at(k)}};
  }
  return {{"rows", rows},
          {"aggregate", {{"baseline", pipeline_name(s.baseline)}, {"pipelines", agg}}}};
}

namespace pipeline_detail {

inline std::vector<int> ncp_arities(const std::vector<const Report*>& reports) {
  std::set<int> a{2, 3};
  for (const auto* r : reports) {
    for (const auto& [k, v] : r->counts.ncp) a.insert(k);
  }
  return {a.begin(), a.end()};
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

}  // namespace pipeline_detail

/// CSV with one row per (file, pipeline) and a final aggregate row per
/// non-baseline pipeline (`file` = "mean_reduction", `time_ms` holding the
/// mean of 1 - T/T_baseline).
inline std::string suite_to_csv(const SuiteResult& s) {
  using pipeline_detail::fmt;
  std::vector<const Report*> reps;
  for (const auto& r : s.rows) {
    if (r.report) reps.push_back(&*r.report);
  }
  const auto arities = pipeline_detail::ncp_arities(reps);
  std::ostringstream os;
  os << "file,pipeline,gr_pulses,gr_layers,rz_layers";
  for (int a : arities) os << ",ncp" << a;
  os << ",time_ms,runtime_s,verified,error\n";
  for (const auto& r : s.rows) {
    os << r.file << ',' << pipeline_name(r.pipeline);
    if (r.report) {
      const auto& c = r.report->counts;
      os << ',' << c.gr_pulses << ',' << c.gr_layers << ',' << c.rz_layers;
      for (int a : arities) {
        auto it = c.ncp.find(a);
        os << ',' << (it == c.ncp.end() ? 0 : it->second);
      }
      os << ',' << fmt(r.report->time_ms) << ',' << fmt(r.report->runtime_s) << ','
         << (r.report->verified ? (*r.report->verified ? "true" : "false") : "") << ",\n";
    } else {
      os << ",,,";
      for (std::size_t i = 0; i < arities.size(); ++i) os << ',';
      std::string msg = (*r.error)["error"]["kind"].get<std::string>();
      os << ",,," << msg << '\n';
    }
  }
  for (const auto& [k, v] : s.mean_reduction) {
    if (k == pipeline_name(s.baseline)) continue;
    os << "mean_reduction," << k << ",,,";
    for (std::size_t i = 0; i < arities.size(); ++i) os << ',';
    os << ',' << fmt(v) << ",,,\n";
  }
  return os.str();
}

/// Fixed-width text table in the layout of the evaluation tables.
inline std::string suite_to_table(const SuiteResult& s) {
  std::vector<const Report*> reps;
  for (const auto& r : s.rows) {
    if (r.report) reps.push_back(&*r.report);
  }
  const auto arities = pipeline_detail::ncp_arities(reps);
  std::ostringstream os;
  os << std::left << std::setw(24) << "file" << std::setw(16) << "pipeline" << std::right
     << std::setw(6) << "GR" << std::setw(6) << "Rz";
  for (int a : arities) os << std::setw(7) << ("C" + std::to_string(a - 1) + "P");
  os << std::setw(12) << "T[ms]" << std::setw(10) << "r[s]" << "\n";
  for (const auto& r : s.rows) {
    os << std::left << std::setw(24) << r.file << std::setw(16) << pipeline_name(r.pipeline)
       << std::right;
    if (!r.report) {
      os << "  error: " << (*r.error)["error"]["message"].get<std::string>() << "\n";
      continue;
    }
    const auto& c = r.report->counts;
    os << std::setw(6) << c.gr_pulses << std::setw(6) << c.rz_layers;
    for (int a : arities) {
      auto it = c.ncp.find(a);
      os << std::setw(7) << (it == c.ncp.end() ? 0 : it->second);
    }
    os << std::setw(12) << std::fixed << std::setprecision(4) << r.report->time_ms
       << std::setw(10) << std::setprecision(3) << r.report->runtime_s << "\n"
       << std::defaultfloat;
  }
  for (const auto& [k, v] : s.mean_reduction) {
    if (k == pipeline_name(s.baseline)) continue;
    os << "mean reduction of T vs " << pipeline_name(s.baseline) << ", " << k << ": "
       << std::fixed << std::setprecision(3) << v << std::defaultfloat << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Generators

/// n-qubit quantum Fourier transform: H and controlled phases pi/2^k, with
/// the final qubit reversal as swaps when `swaps` is set.
inline Circuit qft_circuit(int n, bool swaps = false) {
  Circuit c(n);
  for (int i = n - 1; i >= 0; --i) {
    c.add(Gate::h(i));
    for (int j = i - 1; j >= 0; --j) {
      c.add(Gate::ncp({j, i}, Phase(Phase::Int(1), Phase::Int(1) << (i - j))));
    }
  }
  if (swaps) {
    for (int i = 0; i < n / 2; ++i) c.add(Gate::swap(i, n - 1 - i));
  }
  return c;
}

}  // namespace nazx
