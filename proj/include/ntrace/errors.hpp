#pragma once

#include <stdexcept>
#include <string>

namespace ntrace {

/// Root of every error the library throws. `kind()` is a stable identifier
/// used by reports and the CLI exit-code mapping.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define NTRACE_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name, what) {}  \
  }

// linear algebra
NTRACE_DEFINE_ERROR(DimensionMismatch);
NTRACE_DEFINE_ERROR(SingularMatrix);
NTRACE_DEFINE_ERROR(ExactEigenvalueNotInField);
NTRACE_DEFINE_ERROR(NonConvergence);
NTRACE_DEFINE_ERROR(SpectralPole);
NTRACE_DEFINE_ERROR(NotInSpan);

// spectral core
NTRACE_DEFINE_ERROR(SigmaNotSpectral);
NTRACE_DEFINE_ERROR(SlowContraction);
NTRACE_DEFINE_ERROR(BadLambda);
NTRACE_DEFINE_ERROR(NonIrreduciblePi);
NTRACE_DEFINE_ERROR(TraceMismatch);
NTRACE_DEFINE_ERROR(NotStable);
NTRACE_DEFINE_ERROR(InvalidModel);

// discrete case
NTRACE_DEFINE_ERROR(InvalidElement);
NTRACE_DEFINE_ERROR(RelationViolation);
NTRACE_DEFINE_ERROR(IllFormedCosetAction);
NTRACE_DEFINE_ERROR(NotInSubgroup);
NTRACE_DEFINE_ERROR(ScenarioTooLarge);

// torus case
NTRACE_DEFINE_ERROR(TailBoundExceedsTolerance);
NTRACE_DEFINE_ERROR(GrowthInadmissible);

// input
NTRACE_DEFINE_ERROR(ParseError);
NTRACE_DEFINE_ERROR(SchemaError);

#undef NTRACE_DEFINE_ERROR

}  // namespace ntrace
