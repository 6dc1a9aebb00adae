#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ntrace/errors.hpp"
#include "ntrace/torus/torus.hpp"
#include "ntrace/trace_report.hpp"

namespace ntrace::report {

using json = nlohmann::json;

/// A validated scenario file. `body` is the case section ("discrete",
/// "torus" or "model") with defaults filled in; scalars stay as strings so
/// exact values never pass through binary floats.
struct Scenario {
  std::string id;
  std::string case_kind;  // discrete | torus | spectral-model
  std::string backend;    // exact | approx
  std::optional<std::string> tolerance;
  json body;
  std::string origin;  // file path, for error context
};

/// Throws ParseError (with line and column) for malformed JSON or scalars and
/// SchemaError naming the offending field, including model-level violations
/// such as a singular monodromy.
Scenario parse_scenario(std::string_view text, const std::string& origin = "<input>");
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical JSON text: sorted keys, two-space indent, trailing newline.
std::string serialize_scenario(const Scenario& scenario);

struct RunOptions {
  std::optional<std::string> backend;  // overrides the file
  std::optional<double> tolerance;     // overrides the file
  std::uint64_t seed = 0;              // random filtrations only
};

/// Dispatches on the case. Module errors end up in report.error with the
/// scenario id; the report never throws for mathematical failures.
TraceReport run(const Scenario& scenario, const RunOptions& options = {});

/// Composition series of the scenario's representation and, per factor,
/// random π-filtration lengths compared with the multiplicity.
TraceReport run_filtration(const Scenario& scenario, const RunOptions& options = {});

/// Monodromy of a torus scenario, built as run() builds it. Throws
/// SchemaError for any other case.
torus::TorusTwist torus_twist(const Scenario& scenario);

enum class Format { Table, Structured };

/// Structured output is canonical JSON (sorted keys, numbers as text);
/// timings are included only on request.
std::string emit(const TraceReport& report, Format format, bool timings = false);

/// Inverse of the structured emit.
TraceReport report_from_json(std::string_view text);

/// *.json files of a directory, sorted by name.
std::vector<std::filesystem::path> scenario_files(const std::filesystem::path& dir);

}  // namespace ntrace::report
