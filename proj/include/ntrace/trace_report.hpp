#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ntrace {

/// One asserted equality: |lhs − rhs| ≤ tolerance (+ tails where stated).
struct TraceCheck {
  std::string name;
  std::string lhs, rhs;
  double residual = 0;
  double tolerance = 0;
  double tail_bound = 0;
  bool pass = false;
  std::string provenance;  // where the tolerance came from
};

struct MultiplicityRow {
  std::string label;  // readable key of the composition factor
  std::size_t dim = 0;
  std::size_t multiplicity = 0;
  std::string trace;  // tr π(f)
};

/// Contribution vol·O_γ(f)·tr ω(γ) of one class (or one n for the torus).
struct GeometricTerm {
  std::string gamma;
  std::string volume;
  std::string orbital;
  std::string trace_omega;
  std::string contribution;
};

/// Both sides of the formula with the evidence for their agreement. Every
/// scalar is text: exact values in canonical rational form, approximate ones
/// with 17 significant digits.
struct TraceReport {
  std::string scenario_id;
  std::string case_kind;  // discrete | torus | spectral-model
  std::string backend;    // exact | approx
  std::optional<std::string> direct_trace;
  std::string spectral_side;
  std::string geometric_side;
  std::vector<TraceCheck> checks;
  double tail_bound_spectral = 0;
  double tail_bound_geometric = 0;
  std::vector<MultiplicityRow> multiplicities;
  std::vector<GeometricTerm> geometric_terms;
  std::map<std::string, std::string> normalization;
  std::map<std::string, std::string> parameters;
  bool pass = false;
  std::string error;  // "Kind: message" when a module error stopped the run
  std::vector<std::pair<std::string, double>> timings;  // seconds; never serialized by default

  /// Multi-line dump of every field, used in TraceMismatch messages.
  std::string dump() const;
};

}  // namespace ntrace
