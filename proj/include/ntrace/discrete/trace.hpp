#pragma once

#include <string>
#include <vector>

#include "ntrace/discrete/induced.hpp"
#include "ntrace/trace_report.hpp"

namespace ntrace::discrete {

/// A Γ-conjugacy class [γ] ⊆ Γ. Distinct Γ-classes inside one G-class stay distinct.
struct GammaClass {
  Element rep;
  std::string description;
};

/// Γ-classes whose G-class meets `support`; only these can contribute.
std::vector<GammaClass> conjugacy_classes_meeting(const FiniteIndexSubgroup& gamma, const std::vector<Element>& support);

/// Whether u, v ∈ Γ are conjugate by an element of Γ.
bool gamma_conjugate(const FiniteIndexSubgroup& gamma, const Element& u, const Element& v);

/// vol(Γ_γ\G_γ) for counting measure: the number of cosets of Γ_γ in G_γ.
/// Throws NotInSubgroup for γ ∉ Γ.
std::size_t centralizer_volume(const FiniteIndexSubgroup& gamma, const Element& g);

/// O_γ(f): the sum of f over the G-conjugacy class of γ.
template <Field F>
typename F::Scalar orbital_sum(const F& f, const DiscreteGroup& g, const Element& x, const DiscreteTestFunction<F>& fn);

template <Field F>
struct GeometricSide {
  struct Term {
    GammaClass cls;
    std::size_t volume = 0;
    typename F::Scalar orbital;
    typename F::Scalar trace_omega;
  };
  typename F::Scalar value;
  std::vector<Term> terms;
};

/// Σ over contributing Γ-classes of vol · O_γ(f) · tr ω(γ).
template <Field F>
GeometricSide<F> geometric_side_discrete(const F& f, const Twist<F>& omega, const DiscreteTestFunction<F>& fn);

/// Σ_x f(x) Σ_i [rep_i·x·rep_i⁻¹ ∈ Γ] tr ω(rep_i·x·rep_i⁻¹), the diagonal of the
/// kernel of R(f), computed without forming a matrix.
template <Field F>
typename F::Scalar kernel_diagonal_trace(const F& f, const Twist<F>& omega, const DiscreteTestFunction<F>& fn);

struct DiscreteOptions {
  std::string scenario_id;
  double tolerance = 1e-9;  // approx backend only; relative to max(1, |direct|)
};

/// Direct trace of R(f), spectral side Σ N(π) tr π(f) and geometric side in
/// one report. Module errors are caught and recorded as a failed report.
template <Field F>
TraceReport evaluate_discrete(const F& f, const InducedRep<F>& rep, const DiscreteTestFunction<F>& fn,
                              const DiscreteOptions& options);

/// evaluate_discrete, throwing TraceMismatch with the full report dump unless it passes.
template <Field F>
TraceReport verify_discrete(const F& f, const InducedRep<F>& rep, const DiscreteTestFunction<F>& fn,
                            const DiscreteOptions& options);

}  // namespace ntrace::discrete
