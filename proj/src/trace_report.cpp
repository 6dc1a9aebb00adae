#include "ntrace/trace_report.hpp"

#include <sstream>

namespace ntrace {

std::string TraceReport::dump() const {
  std::ostringstream out;
  out << "scenario " << scenario_id << " (" << case_kind << ", " << backend << "): " << (pass ? "PASS" : "FAIL") << '\n';
  if (!error.empty()) out << "  error: " << error << '\n';
  if (direct_trace) out << "  direct trace:   " << *direct_trace << '\n';
  out << "  spectral side:  " << spectral_side << '\n';
  out << "  geometric side: " << geometric_side << '\n';
  for (const auto& c : checks)
    out << "  check " << c.name << ": " << (c.pass ? "pass" : "FAIL") << ", residual " << c.residual << ", tolerance "
        << c.tolerance << ", tails " << c.tail_bound << " [" << c.provenance << "]\n";
  for (const auto& m : multiplicities)
    out << "  factor " << m.label << ": N = " << m.multiplicity << ", tr pi(f) = " << m.trace << '\n';
  for (const auto& t : geometric_terms)
    out << "  class " << t.gamma << ": vol " << t.volume << " * O " << t.orbital << " * tr omega " << t.trace_omega
        << " = " << t.contribution << '\n';
  for (const auto& [k, v] : parameters) out << "  " << k << " = " << v << '\n';
  return out.str();
}

}  // namespace ntrace
