#include <chrono>
#include <cstdio>

#include "builders.hpp"
#include "ntrace/discrete/trace.hpp"
#include "ntrace/spectral/spectral.hpp"

namespace ntrace::report {

namespace {

using linalg::ApproxField;
using linalg::ExactField;

Field body_field(const Scenario& s) { return {s.body, s.case_kind == "spectral-model" ? "model" : s.case_kind, s.origin}; }

std::string effective_backend(const Scenario& s, const RunOptions& o) { return o.backend.value_or(s.backend); }

double effective_tolerance(const Scenario& s, const RunOptions& o, double fallback) {
  if (o.tolerance) return *o.tolerance;
  if (s.tolerance) return std::stod(*s.tolerance);
  return fallback;
}

std::string number_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

TraceReport failed(const Scenario& s, const std::string& backend, const std::string& message) {
  TraceReport r;
  r.scenario_id = s.id;
  r.case_kind = s.case_kind;
  r.backend = backend;
  r.error = message;
  return r;
}

template <linalg::Field F>
TraceReport run_discrete(const F& f, const Scenario& s, double tolerance) {
  const Field at = body_field(s);
  const auto g = build_group(at.key("group"));
  const auto gamma = build_subgroup(g, at.key("subgroup"));
  const auto twist = build_twist(f, gamma, at.key("twist"));
  const auto fn = build_test_function(f, g, at.key("test_function"));
  const auto rep = discrete::induce(f, twist, s.id);
  auto report = discrete::evaluate_discrete(f, rep, fn, {.scenario_id = s.id, .tolerance = tolerance});
  if (!F::is_exact) report.parameters["tolerance"] = number_text(tolerance);
  return report;
}

TraceReport run_torus(const Scenario& s, const std::string& backend, double tolerance) {
  const Field at = body_field(s);
  const auto twist = build_torus_twist(backend, at.key("monodromy"));
  const auto fn = build_analytic(at.key("test_function"));
  torus::TorusOptions options;
  options.scenario_id = s.id;
  options.tolerance = tolerance;
  if (s.body.contains("K")) options.K = s.body["K"].get<long>();
  if (s.body.contains("N")) options.N = s.body["N"].get<long>();
  options.pairing = s.body["pairing"] == "minus" ? torus::Pairing::Minus : torus::Pairing::Plus;
  auto report = torus::evaluate_torus(twist, fn, options);
  report.parameters["monodromy_backend"] = backend;
  return report;
}

template <linalg::Field F>
spectral::AdmissibleModel<F> scenario_model(const F& f, const Scenario& s) {
  const Field at = body_field(s);
  if (s.case_kind == "spectral-model") return build_model(f, at, s.id);
  if (s.case_kind != "discrete") at.fail("filtration runs need a discrete or spectral-model scenario");
  const auto g = build_group(at.key("group"));
  const auto gamma = build_subgroup(g, at.key("subgroup"));
  return discrete::induce(f, build_twist(f, gamma, at.key("twist")), s.id).model;
}

template <linalg::Field F>
TraceReport filtration_report(const F& f, const Scenario& s, std::uint64_t seed) {
  using linalg::scalar_text;
  TraceReport report;
  report.scenario_id = s.id;
  report.case_kind = s.case_kind;
  report.backend = std::string(F::name);
  const auto t0 = std::chrono::steady_clock::now();
  const auto model = scenario_model(f, s);
  const std::size_t trials = s.case_kind == "spectral-model" ? s.body["trials"].get<std::size_t>() : 4;
  const std::size_t seeds = s.case_kind == "spectral-model" ? s.body["seeds"].get<std::size_t>() : 3;
  report.parameters = {{"seed", std::to_string(seed)},
                       {"trials", std::to_string(trials)},
                       {"seeds", std::to_string(seeds)},
                       {"dim", std::to_string(model.dim())}};
  report.normalization = {{"multiplicity", "Jordan-Hoelder count of composition factors isomorphic to pi"},
                          {"filtration", "longest maximality-certified random pi-filtration per seed"}};

  const auto series = spectral::composition_series(f, model);
  const auto table = spectral::multiplicity_table(f, series);
  std::size_t weighted = 0;
  report.pass = true;
  for (std::size_t c = 0; c < table.classes.size(); ++c) {
    const auto& pi = table.classes[c];
    const std::size_t n = table.counts[c];
    weighted += n * pi.key.dim;
    MultiplicityRow row;
    row.dim = pi.key.dim;
    row.multiplicity = n;
    std::string traces;
    for (const auto& t : pi.key.gen_traces) traces += (traces.empty() ? "" : ", ") + scalar_text(t);
    row.label = "dim " + std::to_string(row.dim) + ", tr pi(generators) = (" + traces + ")";
    row.trace = std::to_string(pi.key.dim);  // tr π(identity)
    report.multiplicities.push_back(row);

    for (std::size_t k = 0; k < seeds; ++k) {
      const std::uint64_t trial_seed = seed * 1000003 + c * 1009 + k;
      auto r = spectral::random_pi_filtration_length(f, model, pi, trials, trial_seed);
      TraceCheck check;
      check.name = "filtration length = N, factor " + std::to_string(c) + ", seed " + std::to_string(trial_seed);
      check.lhs = r.certified ? std::to_string(r.length) : "uncertified";
      check.rhs = std::to_string(n);
      check.residual = r.certified ? std::abs(static_cast<double>(r.length) - static_cast<double>(n)) : 0;
      check.pass = !r.certified || r.length == n;
      check.provenance = r.certified ? "exact integer comparison"
                                     : "no trial reached a certified maximal filtration; not counted as a violation";
      report.pass = report.pass && check.pass;
      report.checks.push_back(std::move(check));
    }
  }
  // Σ N(π)·dim π = dim V is the trace formula at f = δ_e.
  report.direct_trace = std::to_string(model.dim());
  report.spectral_side = std::to_string(weighted);
  TraceCheck dims;
  dims.name = "dim V = sum N(pi) dim pi";
  dims.lhs = *report.direct_trace;
  dims.rhs = report.spectral_side;
  dims.residual = std::abs(static_cast<double>(model.dim()) - static_cast<double>(weighted));
  dims.pass = model.dim() == weighted;
  dims.provenance = "exact integer comparison";
  report.pass = report.pass && dims.pass;
  report.checks.insert(report.checks.begin(), dims);
  report.timings.emplace_back("filtration", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return report;
}

}  // namespace

void validate(const Scenario& s) {
  const Field at = body_field(s);
  if (s.case_kind == "discrete") {
    const auto g = build_group(at.key("group"));
    const auto gamma = build_subgroup(g, at.key("subgroup"));
    if (s.backend == "exact") {
      const ExactField f;
      build_twist(f, gamma, at.key("twist"));
      build_test_function(f, g, at.key("test_function"));
    } else {
      const ApproxField f;
      build_twist(f, gamma, at.key("twist"));
      build_test_function(f, g, at.key("test_function"));
    }
  } else if (s.case_kind == "torus") {
    build_torus_twist(s.backend, at.key("monodromy"));
    build_analytic(at.key("test_function"));
  } else if (s.backend == "exact") {
    build_model(ExactField{}, at, s.id);
  } else {
    build_model(ApproxField{}, at, s.id);
  }
}

torus::TorusTwist torus_twist(const Scenario& s) {
  if (s.case_kind != "torus") throw SchemaError(s.origin + ": scenario " + s.id + " is not a torus scenario");
  return build_torus_twist(s.backend, body_field(s).key("monodromy"));
}

TraceReport run(const Scenario& s, const RunOptions& options) {
  if (s.case_kind == "spectral-model") return run_filtration(s, options);
  const std::string backend = effective_backend(s, options);
  const auto t0 = std::chrono::steady_clock::now();
  TraceReport report;
  try {
    if (s.case_kind == "torus")
      report = run_torus(s, backend, effective_tolerance(s, options, 1e-10));
    else if (backend == "exact")
      report = run_discrete(ExactField{}, s, 0.0);
    else
      report = run_discrete(ApproxField{}, s, effective_tolerance(s, options, 1e-9));
  } catch (const Error& e) {
    report = failed(s, s.case_kind == "torus" ? "approx" : backend, e.what());
  }
  if (!report.error.empty() && report.error.find("scenario " + s.id) == std::string::npos)
    report.error = "scenario " + s.id + ": " + report.error;
  report.timings.emplace_back("total", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return report;
}

TraceReport run_filtration(const Scenario& s, const RunOptions& options) {
  const std::string backend = effective_backend(s, options);
  try {
    return backend == "exact" ? filtration_report(ExactField{}, s, options.seed)
                              : filtration_report(ApproxField{}, s, options.seed);
  } catch (const Error& e) {
    return failed(s, backend, "scenario " + s.id + ": " + e.what());
  }
}

}  // namespace ntrace::report
