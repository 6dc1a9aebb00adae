#include <cstdio>
#include <sstream>

#include "ntrace/report/scenario.hpp"

namespace ntrace::report {

namespace {

// %.17g survives text → double → text unchanged.
std::string number_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double number_of(const json& j, const char* key) {
  const std::string s = j.at(key).get<std::string>();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw ParseError(std::string("report field '") + key + "': malformed number '" + s + "'");
  return v;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

std::string table(const TraceReport& r, bool timings) {
  std::ostringstream out;
  out << "scenario " << pad(r.scenario_id, 32) << pad(r.case_kind, 16) << pad(r.backend, 8) << (r.pass ? "PASS" : "FAIL")
      << '\n';
  if (r.direct_trace) out << "  " << pad("direct trace", 18) << *r.direct_trace << '\n';
  out << "  " << pad("spectral side", 18) << (r.spectral_side.empty() ? "n/a" : r.spectral_side) << '\n';
  out << "  " << pad("geometric side", 18) << (r.geometric_side.empty() ? "n/a" : r.geometric_side) << '\n';
  if (r.case_kind == "torus")
    out << "  " << pad("tail bounds", 18) << "spectral " << number_text(r.tail_bound_spectral) << ", geometric "
        << number_text(r.tail_bound_geometric) << '\n';
  if (!r.checks.empty()) {
    out << "  checks\n    " << pad("name", 44) << pad("residual", 26) << pad("tolerance", 26) << pad("tails", 26) << "result\n";
    for (const auto& c : r.checks)
      out << "    " << pad(c.name, 44) << pad(number_text(c.residual), 26) << pad(number_text(c.tolerance), 26)
          << pad(number_text(c.tail_bound), 26) << (c.pass ? "pass" : "FAIL") << '\n';
  }
  if (!r.multiplicities.empty()) {
    out << "  factors\n    " << pad("N", 6) << pad("dim", 6) << pad("tr pi(f)", 26) << "factor\n";
    for (const auto& m : r.multiplicities)
      out << "    " << pad(std::to_string(m.multiplicity), 6) << pad(std::to_string(m.dim), 6) << pad(m.trace, 26) << m.label
          << '\n';
  }
  if (!r.error.empty()) out << "  error: " << r.error << '\n';
  if (timings)
    for (const auto& [k, v] : r.timings) out << "  time " << pad(k, 13) << number_text(v) << " s\n";
  return out.str();
}

json to_json(const TraceReport& r, bool timings) {
  json j;
  j["scenario_id"] = r.scenario_id;
  j["case"] = r.case_kind;
  j["backend"] = r.backend;
  if (r.direct_trace) j["direct_trace"] = *r.direct_trace;
  j["spectral_side"] = r.spectral_side;
  j["geometric_side"] = r.geometric_side;
  j["tail_bound_spectral"] = number_text(r.tail_bound_spectral);
  j["tail_bound_geometric"] = number_text(r.tail_bound_geometric);
  j["pass"] = r.pass;
  j["error"] = r.error;
  j["checks"] = json::array();
  for (const auto& c : r.checks)
    j["checks"].push_back({{"name", c.name},
                           {"lhs", c.lhs},
                           {"rhs", c.rhs},
                           {"residual", number_text(c.residual)},
                           {"tolerance", number_text(c.tolerance)},
                           {"tail_bound", number_text(c.tail_bound)},
                           {"pass", c.pass},
                           {"provenance", c.provenance}});
  j["multiplicities"] = json::array();
  for (const auto& m : r.multiplicities)
    j["multiplicities"].push_back({{"label", m.label}, {"dim", m.dim}, {"multiplicity", m.multiplicity}, {"trace", m.trace}});
  j["geometric_terms"] = json::array();
  for (const auto& t : r.geometric_terms)
    j["geometric_terms"].push_back({{"gamma", t.gamma},
                                    {"volume", t.volume},
                                    {"orbital", t.orbital},
                                    {"trace_omega", t.trace_omega},
                                    {"contribution", t.contribution}});
  j["normalization"] = r.normalization;
  j["parameters"] = r.parameters;
  if (timings) {
    j["timings"] = json::object();
    for (const auto& [k, v] : r.timings) j["timings"][k] = number_text(v);
  }
  return j;
}

}  // namespace

std::string emit(const TraceReport& report, Format format, bool timings) {
  if (format == Format::Table) return table(report, timings);
  return to_json(report, timings).dump(2) + "\n";
}

TraceReport report_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
  try {
    TraceReport r;
    r.scenario_id = j.at("scenario_id").get<std::string>();
    r.case_kind = j.at("case").get<std::string>();
    r.backend = j.at("backend").get<std::string>();
    if (j.contains("direct_trace")) r.direct_trace = j["direct_trace"].get<std::string>();
    r.spectral_side = j.at("spectral_side").get<std::string>();
    r.geometric_side = j.at("geometric_side").get<std::string>();
    r.tail_bound_spectral = number_of(j, "tail_bound_spectral");
    r.tail_bound_geometric = number_of(j, "tail_bound_geometric");
    r.pass = j.at("pass").get<bool>();
    r.error = j.at("error").get<std::string>();
    for (const auto& c : j.at("checks"))
      r.checks.push_back({c.at("name"), c.at("lhs"), c.at("rhs"), number_of(c, "residual"), number_of(c, "tolerance"),
                          number_of(c, "tail_bound"), c.at("pass").get<bool>(), c.at("provenance")});
    for (const auto& m : j.at("multiplicities"))
      r.multiplicities.push_back({m.at("label"), m.at("dim").get<std::size_t>(), m.at("multiplicity").get<std::size_t>(), m.at("trace")});
    for (const auto& t : j.at("geometric_terms"))
      r.geometric_terms.push_back({t.at("gamma"), t.at("volume"), t.at("orbital"), t.at("trace_omega"), t.at("contribution")});
    r.normalization = j.at("normalization").get<std::map<std::string, std::string>>();
    r.parameters = j.at("parameters").get<std::map<std::string, std::string>>();
    if (j.contains("timings"))
      for (const auto& [k, v] : j["timings"].items()) r.timings.emplace_back(k, number_of(j["timings"], k.c_str()));
    return r;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("report: ") + e.what());
  }
}

}  // namespace ntrace::report
