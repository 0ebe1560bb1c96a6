// nazx: compile OpenQASM circuits to a neutral-atom schedule and report
// gate counts and execution time.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nazx/nazx.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::optional<int> max_ctrl;
  bool verify = false;
  int verify_max = 10;
  bool check_gflow = false;
  bool no_greedy = false;
  std::string time_config;
  std::string format = "json";

  [[nodiscard]] nazx::PipelineOptions options() const {
    nazx::PipelineOptions o;
    o.max_ctrl = max_ctrl;
    o.verify = verify;
    o.verify_max_qubits = verify_max;
    o.check_gflow = check_gflow;
    o.schedule.greedy = !no_greedy;
    if (!time_config.empty()) {
      std::ifstream in(time_config);
      if (!in) throw nazx::PipelineError("io", "cannot read " + time_config);
      try {
        o.schedule.time = nazx::TimeConfig::from_json(json::parse(in));
      } catch (const json::exception& e) {
        throw nazx::PipelineError("parse", time_config + ": " + e.what());
      }
    }
    return o;
  }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--max-ctrl", c.max_ctrl,
                  "largest number of controls in an extracted controlled phase")
      ->check(CLI::NonNegativeNumber);
  app->add_flag("--verify", c.verify, "compare the schedule with the input unitary");
  app->add_option("--verify-max-qubits", c.verify_max, "qubit bound for --verify")
      ->capture_default_str();
  app->add_flag("--check-gflow", c.check_gflow, "assert gflow after every rewrite");
  app->add_flag("--no-greedy", c.no_greedy, "skip greedy single-qubit layer assignment");
  app->add_option("--time-config", c.time_config,
                  "JSON file with gate times at angle pi: rz, gr, ncp2, ncp_multi (seconds)");
  app->add_option("--format", c.format, "output format")
      ->check(CLI::IsMember({"json", "csv", "table"}))
      ->capture_default_str();
}

std::vector<nazx::Pipeline> parse_pipelines(const std::vector<std::string>& names) {
  std::vector<nazx::Pipeline> out;
  for (const auto& n : names) {
    if (n == "all") {
      out = nazx::all_pipelines();
      continue;
    }
    auto p = nazx::parse_pipeline(n);
    if (!p) throw nazx::PipelineError("usage", "unknown pipeline '" + n + "'");
    out.push_back(*p);
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw nazx::PipelineError("io", "cannot write " + path);
  out << text;
}

std::string render(const nazx::SuiteResult& s, const std::string& format) {
  if (format == "csv") return nazx::suite_to_csv(s);
  if (format == "table") return nazx::suite_to_table(s);
  return nazx::suite_to_json(s).dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ZX-based synthesis of controlled-phase circuits for neutral atoms"};
  app.require_subcommand(1);

  Common run_opts;
  std::string run_file;
  std::vector<std::string> run_pipelines{"zx-with-insert"};
  std::string emit_qasm, emit_schedule;
  auto* run = app.add_subcommand("run", "compile one OpenQASM file");
  run->add_option("file", run_file, "OpenQASM 2.0 input")->required();
  run->add_option("--pipeline", run_pipelines,
                  "zx-default, zx-no-insert, zx-with-insert, no-decomp or all")
      ->capture_default_str();
  run->add_option("--emit-qasm", emit_qasm, "write the synthesized circuit");
  run->add_option("--emit-schedule", emit_schedule, "write the native schedule as JSON");
  add_common(run, run_opts);

  Common suite_opts;
  std::string suite_dir, suite_out, baseline = "zx-default";
  std::vector<std::string> suite_pipelines{"all"};
  int jobs = 1;
  auto* suite = app.add_subcommand("suite", "compile every .qasm file in a directory");
  suite->add_option("dir", suite_dir, "directory of OpenQASM files")
      ->required()
      ->check(CLI::ExistingDirectory);
  suite->add_option("--pipeline", suite_pipelines, "pipelines to run")->capture_default_str();
  suite->add_option("--baseline", baseline, "reference pipeline for the mean T reduction")
      ->capture_default_str();
  suite->add_option("--jobs,-j", jobs, "worker threads")->check(CLI::PositiveNumber);
  suite->add_option("--out,-o", suite_out, "write the table here instead of stdout");
  add_common(suite, suite_opts);

  int qft_n = 0;
  bool qft_swaps = false;
  std::string qft_out;
  auto* qft = app.add_subcommand("qft", "write an n-qubit QFT as OpenQASM");
  qft->add_option("n", qft_n, "number of qubits")->required()->check(CLI::Range(1, 64));
  qft->add_flag("--swaps", qft_swaps, "append the final qubit reversal");
  qft->add_option("--out,-o", qft_out, "output path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  std::string current_file;
  std::optional<nazx::Pipeline> current_pipeline;
  try {
    if (*qft) {
      const auto text = nazx::write_qasm(nazx::qft_circuit(qft_n, qft_swaps));
      if (qft_out.empty()) {
        std::cout << text;
      } else {
        write_text(qft_out, text);
      }
      return 0;
    }

    if (*run) {
      current_file = fs::path(run_file).filename().string();
      const auto opt = run_opts.options();
      const auto pipelines = parse_pipelines(run_pipelines);
      if (pipelines.size() > 1 && (!emit_qasm.empty() || !emit_schedule.empty())) {
        throw nazx::PipelineError("usage", "--emit-* needs a single pipeline");
      }
      const nazx::Circuit input = nazx::load_qasm_file(run_file);
      nazx::SuiteResult result;
      for (auto p : pipelines) {
        current_pipeline = p;
        auto rep = nazx::run_pipeline(input, p, opt, current_file);
        if (!emit_qasm.empty()) write_text(emit_qasm, nazx::write_qasm(rep.circuit));
        if (!emit_schedule.empty()) write_text(emit_schedule, rep.sched.to_json().dump(2) + "\n");
        result.rows.push_back({current_file, p, std::move(rep), {}});
      }
      if (run_opts.format == "json") {
        json out = json::array();
        for (const auto& r : result.rows) out.push_back(r.report->to_json());
        std::cout << (out.size() == 1 ? out[0] : out).dump(2) << "\n";
      } else {
        result.baseline = pipelines.front();
        nazx::compute_aggregate(result);
        std::cout << render(result, run_opts.format);
      }
      return 0;
    }

    nazx::SuiteOptions so;
    so.pipeline = suite_opts.options();
    so.jobs = jobs;
    auto base = nazx::parse_pipeline(baseline);
    if (!base) throw nazx::PipelineError("usage", "unknown pipeline '" + baseline + "'");
    so.baseline = *base;
    const auto result =
        nazx::run_suite(nazx::qasm_files_in(suite_dir), parse_pipelines(suite_pipelines), so);
    const auto text = render(result, suite_opts.format);
    if (suite_out.empty()) {
      std::cout << text;
    } else {
      write_text(suite_out, text);
    }
    bool failed = false;
    for (const auto& r : result.rows) failed = failed || r.error.has_value();
    return failed ? 1 : 0;
  } catch (const nazx::PipelineError& e) {
    std::cout << nazx::error_record(current_file, current_pipeline, e).dump(2) << "\n";
    std::cerr << "nazx: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    nazx::PipelineError wrapped("internal", e.what());
    std::cout << nazx::error_record(current_file, current_pipeline, wrapped).dump(2) << "\n";
    std::cerr << "nazx: " << e.what() << "\n";
    return 1;
  }
}
