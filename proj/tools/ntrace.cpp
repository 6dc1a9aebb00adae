// Command-line front end: verify scenario files, run the bundled suite, or
// run the filtration property check on one scenario.
//
// Exit codes: 0 all reports pass, 1 some report fails, 2 input error.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ntrace/report/scenario.hpp"

#ifndef NTRACE_SCENARIO_DIR
#define NTRACE_SCENARIO_DIR "scenarios"
#endif

namespace fs = std::filesystem;
using namespace ntrace;
using namespace ntrace::report;

namespace {

struct Job {
  fs::path path;
  std::optional<Scenario> scenario;
  std::string load_error;
  TraceReport report;
};

void run_all(std::vector<Job>& jobs, const RunOptions& options, bool filtration, unsigned threads) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      auto& job = jobs[i];
      try {
        job.scenario = load_scenario(job.path);
      } catch (const Error& e) {
        job.load_error = e.what();
        continue;
      }
      job.report = filtration ? run_filtration(*job.scenario, options) : run(*job.scenario, options);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < std::max(1u, threads); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace formula verification for finite-index and torus scenarios"};
  app.require_subcommand(1);
  app.fallthrough();

  RunOptions options;
  std::string backend, emit_format = "table", out_dir;
  double tolerance = -1;
  unsigned jobs_bound = 1;
  bool timings = false;
  app.add_option("--backend", backend, "Override the scenario backend")->check(CLI::IsMember({"exact", "approx"}));
  app.add_option("--tolerance", tolerance, "Override the scenario tolerance")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", options.seed, "Seed for random filtrations");
  app.add_option("--emit", emit_format, "Output format")->check(CLI::IsMember({"table", "json"}));
  app.add_option("--jobs", jobs_bound, "Scenarios run concurrently")->check(CLI::Range(1u, 256u));
  app.add_flag("--timings", timings, "Include timings in the output");
  app.add_option("--out-dir", out_dir, "Also write <id>.json structured reports here");

  std::vector<std::string> files;
  auto* verify = app.add_subcommand("verify", "Verify scenario files");
  verify->add_option("files", files, "Scenario files")->required()->check(CLI::ExistingFile);

  std::string suite_dir = NTRACE_SCENARIO_DIR;
  auto* suite = app.add_subcommand("suite", "Run the bundled scenarios");
  suite->add_option("--dir", suite_dir, "Scenario directory")->check(CLI::ExistingDirectory);

  std::string filtration_file;
  auto* filtration = app.add_subcommand("filtration", "Composition series and random pi-filtrations of one scenario");
  filtration->add_option("file", filtration_file, "Scenario file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (!backend.empty()) options.backend = backend;
  if (tolerance >= 0) options.tolerance = tolerance;

  std::vector<Job> jobs;
  if (*verify)
    for (const auto& f : files) jobs.push_back({f, {}, {}, {}});
  if (*suite)
    for (const auto& p : scenario_files(suite_dir)) jobs.push_back({p, {}, {}, {}});
  if (*filtration) jobs.push_back({filtration_file, {}, {}, {}});

  run_all(jobs, options, static_cast<bool>(*filtration), jobs_bound);

  bool input_error = false, failure = false;
  const Format format = emit_format == "json" ? Format::Structured : Format::Table;
  for (const auto& job : jobs) {
    if (job.scenario == std::nullopt) {
      std::cerr << job.load_error << '\n';
      input_error = true;
      continue;
    }
    std::cout << emit(job.report, format, timings);
    failure = failure || !job.report.pass;
    if (!out_dir.empty()) {
      fs::create_directories(out_dir);
      std::ofstream(fs::path(out_dir) / (job.report.scenario_id + ".json")) << emit(job.report, Format::Structured, timings);
    }
  }
  if (format == Format::Table && jobs.size() > 1) {
    std::size_t passed = 0;
    for (const auto& job : jobs) passed += job.scenario && job.report.pass;
    std::cout << passed << "/" << jobs.size() << " scenarios pass\n";
  }
  return input_error ? 2 : failure ? 1 : 0;
}
